#include "racbf/output.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "racbf/config.hpp"

namespace racbf {

const char* kTrajectoryHeader =
    "t,x,y,theta,v,u1,u2,nu,zeta,h,psi1,min_psi_m,solver_status";

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.15g", value);
    return buf;
}

namespace {

std::ofstream open_or_throw(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

}  // namespace

void write_trajectory_csv(const std::string& path, const TrajectoryLog& log,
                          const RunConfig& cfg) {
    const ControllerConfig ctrl = make_controller(cfg);
    std::ofstream out = open_or_throw(path);
    out << kTrajectoryHeader << "\n";

    for (std::size_t t = 0; t < log.states.size(); ++t) {
        const StateVector& x = log.states[t];
        out << t;
        for (int i = 0; i < 4; ++i) out << ',' << format_double(x[i]);
        if (t < log.records.size()) {
            const StepRecord& rec = log.records[t];
            out << ',' << format_double(rec.u[0]) << ',' << format_double(rec.u[1]);
            out << ',' << (ctrl.has_aux() ? format_double(rec.nu) : std::string());
            out << ',' << (ctrl.has_risk() ? format_double(rec.zeta) : std::string());
            out << ',' << format_double(rec.h);
            out << ',' << format_double(rec.psi1);
            const double min_psi = *std::min_element(rec.psi_m_scenarios.begin(),
                                                     rec.psi_m_scenarios.end());
            out << ',' << format_double(min_psi);
            out << ',' << to_string(rec.status);
        } else {
            // Terminal state row: h is still well defined, step cells are not.
            out << ",,,,," << format_double(ctrl.barrier.h(x)) << ",,,";
        }
        out << "\n";
    }
}

void write_metrics_json(const std::string& path, const RunMetrics& metrics,
                        const RunConfig& cfg) {
    nlohmann::json j{
        {"min_h", metrics.min_h},
        {"first_violation_step",
         metrics.first_violation_step ? nlohmann::json(*metrics.first_violation_step)
                                      : nlohmann::json(nullptr)},
        {"feasible_steps", metrics.feasible_steps},
        {"total_steps", cfg.total_steps},
        {"input_bound_violations", metrics.input_bound_violations},
        {"accumulated_cost", metrics.accumulated_cost},
        {"reached_target", metrics.reached_target},
    };
    std::ofstream out = open_or_throw(path);
    out << j.dump(2) << "\n";
}

void write_comparison_csv(const std::string& path, const ComparisonTable& table,
                          int total_steps) {
    std::ofstream out = open_or_throw(path);
    out << "row_type,label,seed,min_h,first_violation_step,feasible_steps,feasible_fraction,"
           "input_bound_violations,reached_target,accumulated_cost,violation_fraction,"
           "mean_min_h,mean_feasible_fraction,infeasible_seed_fraction\n";
    for (const auto& row : table.rows) {
        const auto& m = row.metrics;
        out << "detail," << row.label << ',' << row.seed << ',' << format_double(m.min_h) << ','
            << (m.first_violation_step ? std::to_string(*m.first_violation_step) : std::string())
            << ',' << m.feasible_steps << ','
            << format_double(static_cast<double>(m.feasible_steps) / total_steps) << ','
            << m.input_bound_violations << ',' << (m.reached_target ? 1 : 0) << ','
            << format_double(m.accumulated_cost) << ",,,,\n";
    }
    for (const auto& agg : table.aggregates) {
        out << "aggregate," << agg.label << ",,,,,,,,," << format_double(agg.violation_fraction)
            << ',' << format_double(agg.mean_min_h) << ','
            << format_double(agg.mean_feasible_fraction) << ','
            << format_double(agg.infeasible_seed_fraction) << "\n";
    }
}

}  // namespace racbf
