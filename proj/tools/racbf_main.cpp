#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "racbf/config.hpp"
#include "racbf/output.hpp"
#include "racbf/random.hpp"
#include "racbf/risk.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitSelfCheckFailed = 3;
constexpr int kExitIoError = 4;

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<double> beta;
    std::optional<std::string> variant;
    std::optional<double> bound_scale;
    std::optional<std::string> scenario_mode;
};

racbf::RunConfig resolve_config(const std::string& config_path, const Overrides& o) {
    racbf::RunConfig cfg = config_path.empty() ? racbf::RunConfig::paper_defaults()
                                               : racbf::load_config_file(config_path);
    if (o.seed) {
        cfg.scenario_seed = *o.seed;
        cfg.noise_seed = racbf::derive_seed(*o.seed);
    }
    if (o.beta) cfg.controller.beta = *o.beta;
    if (o.variant) cfg.controller.variant = racbf::variant_from_string(*o.variant);
    if (o.bound_scale) cfg.controller.bound_scale = *o.bound_scale;
    if (o.scenario_mode)
        cfg.scenario_mode = racbf::scenario_mode_from_string(*o.scenario_mode);
    cfg.validate();
    return cfg;
}

std::filesystem::path prepare_out_dir(const std::string& out_dir) {
    std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

int run_simulate(const std::string& config_path, const std::string& out_dir, const Overrides& o) {
    const racbf::RunConfig cfg = resolve_config(config_path, o);
    const racbf::TrajectoryLog log = racbf::run_closed_loop(cfg);
    const racbf::RunMetrics metrics = racbf::compute_metrics(log, cfg);

    const auto dir = prepare_out_dir(out_dir);
    racbf::write_trajectory_csv((dir / "trajectory.csv").string(), log, cfg);
    racbf::write_metrics_json((dir / "metrics.json").string(), metrics, cfg);
    std::ofstream snap(dir / "resolved_config.json");
    if (!snap) throw std::runtime_error("cannot write resolved_config.json");
    snap << racbf::config_to_json(cfg).dump(2) << "\n";

    std::printf("simulate: %d steps, min_h=%s, feasible %d/%d -> %s\n", cfg.total_steps,
                racbf::format_double(metrics.min_h).c_str(), metrics.feasible_steps,
                cfg.total_steps, dir.string().c_str());
    return 0;
}

int run_compare(const std::string& config_path, const std::string& out_dir,
                const std::vector<std::uint64_t>& seeds, const std::vector<double>& beta_list,
                const Overrides& o) {
    const racbf::RunConfig base = resolve_config(config_path, o);

    std::vector<racbf::BatchEntry> entries;
    std::vector<double> racbf_betas = beta_list.empty()
                                          ? std::vector<double>{base.controller.beta}
                                          : beta_list;
    for (double beta : racbf_betas) {
        racbf::RunConfig cfg = base;
        cfg.controller.variant = racbf::Variant::racbf;
        cfg.controller.beta = beta;
        std::ostringstream label;
        label << "racbf(beta=" << beta << ")";
        entries.push_back({label.str(), cfg});
    }
    {
        racbf::RunConfig cfg = base;
        cfg.controller.variant = racbf::Variant::risk_aware_dhocbf;
        std::ostringstream label;
        label << "risk_aware_dhocbf(beta=" << cfg.controller.beta << ")";
        entries.push_back({label.str(), cfg});
    }
    {
        racbf::RunConfig cfg = base;
        cfg.controller.variant = racbf::Variant::risk_agnostic_dhocbf;
        entries.push_back({"risk_agnostic_dhocbf", cfg});
    }

    const racbf::ComparisonTable table = racbf::batch_compare(entries, seeds);
    const auto dir = prepare_out_dir(out_dir);
    racbf::write_comparison_csv((dir / "comparison.csv").string(), table, base.total_steps);

    for (const auto& agg : table.aggregates)
        std::printf("%-28s violation_fraction=%.3f mean_min_h=%+.4f feasible=%.3f\n",
                    agg.label.c_str(), agg.violation_fraction, agg.mean_min_h,
                    agg.mean_feasible_fraction);
    std::printf("compare: %zu rows -> %s\n", table.rows.size(), dir.string().c_str());
    return 0;
}

std::vector<double> read_csv_column(const std::string& path, const std::string& column) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + " is empty");

    int target = -1;
    {
        std::stringstream header(line);
        std::string cell;
        for (int i = 0; std::getline(header, cell, ','); ++i)
            if (cell == column) target = i;
    }
    if (target < 0) throw std::runtime_error("column \"" + column + "\" not found in " + path);

    std::vector<double> values;
    while (std::getline(in, line)) {
        std::stringstream row(line);
        std::string cell;
        for (int i = 0; std::getline(row, cell, ','); ++i) {
            if (i != target) continue;
            if (!cell.empty()) values.push_back(std::stod(cell));
        }
    }
    return values;
}

int run_risk(const std::vector<double>& inline_values, const std::string& csv_path,
             const std::string& column, double beta) {
    std::vector<double> values = inline_values;
    if (!csv_path.empty()) {
        auto from_csv = read_csv_column(csv_path, column);
        values.insert(values.end(), from_csv.begin(), from_csv.end());
    }
    if (values.empty()) {
        std::cerr << "risk: no values given (use --values or --csv/--column)\n";
        return kExitConfigError;
    }

    const auto d = racbf::EmpiricalDistribution::uniform(values);
    // The discrete left beta-quantile degenerates to the maximum at beta = 1.
    const double v = beta < 1.0 ? racbf::var(d, beta)
                                : *std::max_element(values.begin(), values.end());
    const double tail = racbf::cvar_tail(d, beta);
    const auto dual = racbf::cvar_dual(d, beta);

    std::printf("VaR_%g       = %.12g\n", beta, v);
    std::printf("CVaR_tail   = %.12g\n", tail);
    std::printf("CVaR_dual   = %.12g\n", dual.value);
    std::printf("zeta_star   = %.12g\n", dual.zeta_star);

    if (std::abs(dual.value - tail) > 1e-9) {
        std::fprintf(stderr, "self-check failed: |dual - tail| = %.3g > 1e-9\n",
                     std::abs(dual.value - tail));
        return kExitSelfCheckFailed;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Risk-aware adaptive discrete-time CBF toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    Overrides overrides;
    std::vector<std::uint64_t> seeds;
    std::vector<double> beta_list;
    std::vector<double> risk_values;
    std::string risk_csv;
    std::string risk_column = "h";
    double risk_beta = 0.5;

    const auto add_override_flags = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON run configuration");
        cmd->add_option("--seed", overrides.seed,
                        "scenario seed (the noise seed is derived from it)");
        cmd->add_option("--beta", overrides.beta, "CVaR confidence level");
        cmd->add_option("--variant", overrides.variant,
                        "racbf | risk_aware_dhocbf | risk_agnostic_dhocbf");
        cmd->add_option("--bound-scale", overrides.bound_scale,
                        "input bound expansion factor");
        cmd->add_option("--scenario-mode", overrides.scenario_mode,
                        "first_step | per_step | repeated");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "run one closed-loop rollout");
    add_override_flags(simulate);
    simulate->add_option("--out", out_dir, "output directory");

    CLI::App* compare = app.add_subcommand("compare", "benchmark the controller variants");
    add_override_flags(compare);
    compare->add_option("--out", out_dir, "output directory");
    compare->add_option("--seeds", seeds, "comma-separated seed list")
        ->required()
        ->delimiter(',');
    compare->add_option("--beta-list", beta_list, "racbf confidence levels")->delimiter(',');

    CLI::App* risk = app.add_subcommand("risk", "VaR / CVaR of a sample set");
    risk->add_option("--values", risk_values, "comma-separated values")->delimiter(',');
    risk->add_option("--csv", risk_csv, "CSV file to read");
    risk->add_option("--column", risk_column, "CSV column name (default h)");
    risk->add_option("--beta", risk_beta, "confidence level in (0, 1]")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return run_simulate(config_path, out_dir, overrides);
        if (compare->parsed())
            return run_compare(config_path, out_dir, seeds, beta_list, overrides);
        if (risk->parsed()) return run_risk(risk_values, risk_csv, risk_column, risk_beta);
    } catch (const racbf::ContractViolation& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitIoError;
    }
    return 0;
}
