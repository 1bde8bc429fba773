#ifndef RACBF_HARNESS_HPP
#define RACBF_HARNESS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "racbf/controller.hpp"

namespace racbf {

struct Obstacle {
    double x = 0.0;
    double y = 0.0;
    double radius = 1.0;
};

/// Plain-data mirror of ControllerConfig, assembled into callables by
/// make_controller. bound_scale widens the strict input box for the
/// bound-expansion experiment; metrics always count violations of the strict
/// box.
struct ControllerSettings {
    Variant variant = Variant::racbf;
    double beta = 0.1;
    std::vector<double> lambdas{0.4, 0.4};
    std::vector<double> ells{0.4, 0.4};
    double epsilon = 1e-10;
    double nu_reference = 0.0;
    Eigen::VectorXd control_weights;
    Eigen::VectorXd state_weights;
    double aux_weight = 1000.0;
    double risk_weight = 1.0;
    Eigen::VectorXd control_lower;
    Eigen::VectorXd control_upper;
    double bound_scale = 1.0;
    SolverOptions solver;
};

struct RunConfig {
    int total_steps = 50;
    std::uint64_t scenario_seed = 1;
    std::uint64_t noise_seed = 2;
    StateVector initial_state;
    StateVector target_state;
    AuxChainState initial_chain;
    Obstacle obstacle;
    UnicycleParams params;
    Eigen::VectorXd noise_std;
    int scenario_count = 20;
    ScenarioMode scenario_mode = ScenarioMode::first_step;
    double target_radius = 0.1;
    ControllerSettings controller;

    void validate() const;

    /// The case-study configuration: all defaults from the reference study.
    static RunConfig paper_defaults();
};

/// Builds the runnable controller (unicycle model, quadratic obstacle barrier,
/// scaled bounds) from the plain settings.
ControllerConfig make_controller(const RunConfig& cfg);

struct StepRecord {
    ControlVector u;
    double nu = 0.0;
    double zeta = 0.0;
    Eigen::VectorXd sigmas;
    DisturbanceVector noise;
    double h = 0.0;     // h(x_t)
    double psi1 = 0.0;  // realized first-order value at t
    std::vector<double> psi_m_scenarios;
    SolveStatus status = SolveStatus::optimal;
    int iterations = 0;
};

struct TrajectoryLog {
    std::vector<StateVector> states;      // total_steps + 1
    std::vector<AuxChainState> chains;    // total_steps + 1 (racbf only, else empty)
    std::vector<StepRecord> records;      // total_steps
};

struct RunMetrics {
    double min_h = 0.0;
    std::optional<int> first_violation_step;
    int feasible_steps = 0;
    int input_bound_violations = 0;
    double accumulated_cost = 0.0;
    bool reached_target = false;
};

/// Closed-loop rollout: one scenario set drawn per run, process noise from an
/// independent stream, auxiliary chain advanced with the optimized nu on
/// feasible steps and zero on fallback steps. Deterministic in both seeds.
TrajectoryLog run_closed_loop(const RunConfig& cfg);

RunMetrics compute_metrics(const TrajectoryLog& log, const RunConfig& cfg);

struct BatchEntry {
    std::string label;
    RunConfig cfg;
};

struct ComparisonRow {
    std::string label;
    std::uint64_t seed;
    RunMetrics metrics;
};

struct ComparisonAggregate {
    std::string label;
    double violation_fraction = 0.0;      // seeds with min_h < 0
    double mean_min_h = 0.0;
    double mean_feasible_fraction = 0.0;  // feasible steps / total steps
    double infeasible_seed_fraction = 0.0;  // seeds with any non-optimal step
};

struct ComparisonTable {
    std::vector<ComparisonRow> rows;
    std::vector<ComparisonAggregate> aggregates;
};

/// Runs every entry over every seed (scenario seed = seed, noise seed derived
/// from it) and aggregates per entry.
ComparisonTable batch_compare(const std::vector<BatchEntry>& entries,
                              const std::vector<std::uint64_t>& seeds);

}  // namespace racbf

#endif  // RACBF_HARNESS_HPP
