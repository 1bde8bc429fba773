#include <doctest.h>

#include <cmath>

#include "racbf/harness.hpp"
#include "racbf/random.hpp"
#include "racbf/risk.hpp"

using namespace racbf;

namespace {

RunConfig short_run(Variant v, int steps = 6) {
    RunConfig cfg = RunConfig::paper_defaults();
    cfg.controller.variant = v;
    cfg.total_steps = steps;
    return cfg;
}

}  // namespace

TEST_CASE("rollouts are a pure function of the seeds") {
    const RunConfig cfg = short_run(Variant::racbf, 4);
    const TrajectoryLog a = run_closed_loop(cfg);
    const TrajectoryLog b = run_closed_loop(cfg);

    REQUIRE(a.states.size() == b.states.size());
    for (std::size_t t = 0; t < a.states.size(); ++t) CHECK(a.states[t] == b.states[t]);
    for (std::size_t t = 0; t < a.records.size(); ++t) {
        CHECK(a.records[t].u == b.records[t].u);
        CHECK(a.records[t].nu == b.records[t].nu);
        CHECK(a.records[t].noise == b.records[t].noise);
    }
}

TEST_CASE("log shape matches the configured horizon") {
    const RunConfig cfg = short_run(Variant::risk_agnostic_dhocbf, 5);
    const TrajectoryLog log = run_closed_loop(cfg);
    CHECK(log.states.size() == 6);
    CHECK(log.records.size() == 5);
    CHECK(log.chains.empty());

    const RunConfig rac = short_run(Variant::racbf, 3);
    const TrajectoryLog rlog = run_closed_loop(rac);
    CHECK(rlog.chains.size() == 4);
}

TEST_CASE("scenario and process-noise streams are independent") {
    RunConfig base = short_run(Variant::risk_agnostic_dhocbf, 3);

    RunConfig other_noise = base;
    other_noise.noise_seed = 999;
    const TrajectoryLog a = run_closed_loop(base);
    const TrajectoryLog b = run_closed_loop(other_noise);
    bool noise_differs = false;
    for (std::size_t t = 0; t < a.records.size(); ++t)
        if (a.records[t].noise != b.records[t].noise) noise_differs = true;
    CHECK(noise_differs);

    RunConfig other_scen = base;
    other_scen.scenario_seed = 999;
    const TrajectoryLog c = run_closed_loop(other_scen);
    for (std::size_t t = 0; t < a.records.size(); ++t)
        CHECK(a.records[t].noise == c.records[t].noise);  // same noise draws
}

TEST_CASE("zero-noise risk-agnostic rollout keeps the barrier nonnegative") {
    RunConfig cfg = short_run(Variant::risk_agnostic_dhocbf, 50);
    cfg.noise_std = Eigen::VectorXd::Zero(4);
    const TrajectoryLog log = run_closed_loop(cfg);
    const RunMetrics metrics = compute_metrics(log, cfg);
    CHECK(metrics.min_h >= -1e-8);
    CHECK_FALSE(metrics.first_violation_step.has_value());
    CHECK(metrics.feasible_steps == 50);
}

TEST_CASE("metrics on a hand-built log") {
    RunConfig cfg = RunConfig::paper_defaults();
    cfg.total_steps = 2;

    // h values (1, -0.1, 0.2) via x-positions on the obstacle axis.
    TrajectoryLog log;
    const auto state_with_h = [](double h) {
        return (Eigen::VectorXd(4) << std::sqrt(1.0 + h), 0.0, 0.0, 0.0).finished();
    };
    log.states = {state_with_h(1.0), state_with_h(-0.1), state_with_h(0.2)};
    StepRecord rec;
    rec.u = Eigen::VectorXd::Zero(2);
    rec.noise = Eigen::VectorXd::Zero(4);
    rec.psi_m_scenarios = {0.0};
    log.records = {rec, rec};

    const RunMetrics metrics = compute_metrics(log, cfg);
    CHECK(metrics.min_h == doctest::Approx(-0.1).epsilon(1e-12));
    REQUIRE(metrics.first_violation_step.has_value());
    CHECK(*metrics.first_violation_step == 1);

    // Reversing the log moves the violation step.
    TrajectoryLog reversed = log;
    std::reverse(reversed.states.begin(), reversed.states.end());
    const RunMetrics rev = compute_metrics(reversed, cfg);
    REQUIRE(rev.first_violation_step.has_value());
    CHECK(*rev.first_violation_step == 1);
    CHECK(rev.min_h == doctest::Approx(-0.1).epsilon(1e-12));
}

TEST_CASE("paper racbf run: auxiliary positivity and certificate replay") {
    RunConfig cfg = short_run(Variant::racbf, 12);
    const TrajectoryLog log = run_closed_loop(cfg);

    for (const auto& chain : log.chains) CHECK(chain[0] > 0.0);
    for (const auto& rec : log.records) {
        if (rec.status != SolveStatus::optimal) continue;
        CHECK(cvar_tail(EmpiricalDistribution::uniform(rec.psi_m_scenarios),
                        cfg.controller.beta) >= -1e-6);
    }
}

TEST_CASE("batch_compare composes run_closed_loop and compute_metrics") {
    const RunConfig cfg = short_run(Variant::risk_agnostic_dhocbf, 3);
    const ComparisonTable table = batch_compare({{"agnostic", cfg}}, {11});
    REQUIRE(table.rows.size() == 1);
    REQUIRE(table.aggregates.size() == 1);

    RunConfig expected_cfg = cfg;
    expected_cfg.scenario_seed = 11;
    expected_cfg.noise_seed = derive_seed(11);
    const RunMetrics direct = compute_metrics(run_closed_loop(expected_cfg), expected_cfg);
    CHECK(table.rows[0].metrics.min_h == direct.min_h);
    CHECK(table.rows[0].metrics.feasible_steps == direct.feasible_steps);
    CHECK(table.aggregates[0].mean_min_h == direct.min_h);

    CHECK_THROWS_AS(batch_compare({{"agnostic", cfg}}, {}), ContractViolation);
}
