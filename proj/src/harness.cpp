#include "racbf/harness.hpp"

#include <cmath>
#include <stdexcept>

#include "racbf/random.hpp"

namespace racbf {

void RunConfig::validate() const {
    require(total_steps >= 1, "RunConfig: total_steps must be >= 1");
    require(obstacle.radius > 0.0, "RunConfig: obstacle radius must be positive");
    require(initial_state.size() == 4, "RunConfig: initial state must have dimension 4");
    require(target_state.size() == 4, "RunConfig: target state must have dimension 4");
    require(noise_std.size() == 4, "RunConfig: noise std must have dimension 4");
    require(scenario_count >= 1, "RunConfig: scenario count must be >= 1");
    require(target_radius > 0.0, "RunConfig: target radius must be positive");
    params.validate();
}

RunConfig RunConfig::paper_defaults() {
    RunConfig cfg;
    cfg.total_steps = 50;
    cfg.scenario_seed = 1;
    cfg.noise_seed = 2;
    cfg.initial_state = (Eigen::VectorXd(4) << -1.5, 0.0, M_PI / 12.0, 1.0).finished();
    cfg.target_state = (Eigen::VectorXd(4) << 2.0, 0.0, 0.0, 0.0).finished();
    cfg.initial_chain = (Eigen::VectorXd(2) << 0.1, 0.0).finished();
    cfg.obstacle = {0.0, 0.0, 1.0};
    cfg.params = {1650.0, 0.1};
    cfg.noise_std = Eigen::VectorXd::Constant(4, 0.2);
    cfg.scenario_count = 20;
    cfg.scenario_mode = ScenarioMode::first_step;
    cfg.target_radius = 0.1;

    auto& c = cfg.controller;
    c.variant = Variant::racbf;
    c.beta = 0.1;
    c.lambdas = {0.4, 0.4};
    c.ells = {0.4, 0.4};
    c.epsilon = 1e-10;
    c.nu_reference = 0.0;
    c.control_weights = (Eigen::VectorXd(2) << 1000.0, 1000.0).finished();
    c.state_weights = (Eigen::VectorXd(4) << 10000.0, 10000.0, 1000.0, 10.0).finished();
    c.aux_weight = 1000.0;
    c.risk_weight = 1.0;
    c.control_lower = (Eigen::VectorXd(2) << -5.0, -5.0 * cfg.params.mass).finished();
    c.control_upper = (Eigen::VectorXd(2) << 5.0, 5.0 * cfg.params.mass).finished();
    c.bound_scale = 1.0;
    // The tracking cost reaches 1e5-1e7 while the barrier rows sit near 0.1,
    // so cancellation noise forces a coarse difference step, and the active
    // multipliers near 1e4 make 1e-3 the reliable stationarity floor; that
    // still locates controls to ~1e-6 against the cost curvature.
    c.solver.finite_difference_step = 1e-5;
    c.solver.stationarity_tolerance = 1e-3;
    return cfg;
}

ControllerConfig make_controller(const RunConfig& cfg) {
    cfg.validate();
    const auto& s = cfg.controller;
    require(s.bound_scale > 0.0, "make_controller: bound scale must be positive");

    ControllerConfig out;
    out.variant = s.variant;
    out.beta = s.beta;
    out.model = unicycle_model(cfg.params);

    const Obstacle obs = cfg.obstacle;
    out.barrier.h = [obs](const StateVector& x) {
        const double dx = x[0] - obs.x;
        const double dy = x[1] - obs.y;
        return dx * dx + dy * dy - obs.radius * obs.radius;
    };
    out.barrier.m = static_cast<int>(s.lambdas.size());
    out.barrier.lambdas = s.lambdas;

    out.aux.ells = s.ells;
    out.aux.epsilon = s.epsilon;

    out.cost.control_weights = s.control_weights;
    out.cost.state_weights = s.state_weights;
    out.cost.aux_weight = s.aux_weight;
    out.cost.risk_weight = s.risk_weight;
    out.cost.x_ref = cfg.target_state;
    out.cost.nu_reference = s.nu_reference;

    out.control_lower = s.bound_scale * s.control_lower;
    out.control_upper = s.bound_scale * s.control_upper;
    out.solver = s.solver;
    out.validate();
    return out;
}

namespace {

double realized_psi1(const ControllerConfig& ctrl, const StateVector& x_t,
                     const StateVector& x_next, const AuxChainState& chain_t,
                     const AuxChainState& chain_next) {
    const double lambda1 = ctrl.barrier.lambdas.front();
    const double a_t = ctrl.has_aux() ? chain_t[0] : 1.0;
    const double a_next = ctrl.has_aux() ? chain_next[0] : 1.0;
    const double psi0_t = a_t * ctrl.barrier.h(x_t);
    const double psi0_next = a_next * ctrl.barrier.h(x_next);
    return psi0_next - psi0_t + lambda1 * psi0_t;
}

}  // namespace

TrajectoryLog run_closed_loop(const RunConfig& cfg) {
    const ControllerConfig ctrl = make_controller(cfg);
    const ScenarioSet scenarios = sample_scenarios(cfg.scenario_seed, cfg.scenario_count,
                                                   ctrl.barrier.m, cfg.noise_std,
                                                   cfg.scenario_mode);
    GaussianStream noise(cfg.noise_seed);

    TrajectoryLog log;
    log.states.reserve(cfg.total_steps + 1);
    log.records.reserve(cfg.total_steps);
    log.states.push_back(cfg.initial_state);

    AuxChainState chain = cfg.initial_chain;
    if (ctrl.has_aux()) {
        log.chains.reserve(cfg.total_steps + 1);
        log.chains.push_back(chain);
    }

    std::optional<StepWarmStart> warm;
    for (int t = 0; t < cfg.total_steps; ++t) {
        StepResult r;
        try {
            r = step(log.states.back(), chain, ctrl, scenarios, warm);
        } catch (const EvaluationError& err) {
            throw std::runtime_error("run_closed_loop: solver evaluation failed at step " +
                                     std::to_string(t) + ": " + err.what());
        }
        warm = StepWarmStart{r.solve.point, r.solve.multipliers};

        const bool optimal = r.solve.status == SolveStatus::optimal;
        const DisturbanceVector w = noise.next_vector(cfg.noise_std);
        const StateVector x_next = unicycle_step(log.states.back(), r.u, w, cfg.params);

        AuxChainState chain_next = chain;
        if (ctrl.has_aux()) chain_next = aux_step(chain, optimal ? r.nu : 0.0);

        StepRecord rec;
        rec.u = r.u;
        rec.nu = optimal ? r.nu : 0.0;
        rec.zeta = r.zeta;
        rec.sigmas = r.sigmas;
        rec.noise = w;
        rec.h = ctrl.barrier.h(log.states.back());
        rec.psi1 = realized_psi1(ctrl, log.states.back(), x_next, chain, chain_next);
        rec.psi_m_scenarios = r.psi_m_scenarios;
        rec.status = r.solve.status;
        rec.iterations = r.solve.iterations;
        log.records.push_back(std::move(rec));

        log.states.push_back(x_next);
        chain = chain_next;
        if (ctrl.has_aux()) log.chains.push_back(chain);
    }
    return log;
}

RunMetrics compute_metrics(const TrajectoryLog& log, const RunConfig& cfg) {
    require(!log.states.empty(), "compute_metrics: empty log");
    require(log.states.size() == log.records.size() + 1,
            "compute_metrics: state/record count mismatch");
    const ControllerConfig ctrl = make_controller(cfg);

    RunMetrics metrics;
    metrics.min_h = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < log.states.size(); ++t) {
        const double h = ctrl.barrier.h(log.states[t]);
        metrics.min_h = std::min(metrics.min_h, h);
        if (h < 0.0 && !metrics.first_violation_step)
            metrics.first_violation_step = static_cast<int>(t);
        const double dx = log.states[t][0] - cfg.target_state[0];
        const double dy = log.states[t][1] - cfg.target_state[1];
        if (std::sqrt(dx * dx + dy * dy) <= cfg.target_radius) metrics.reached_target = true;
    }

    const Eigen::VectorXd& lo = cfg.controller.control_lower;
    const Eigen::VectorXd& hi = cfg.controller.control_upper;
    const DisturbanceVector zero_w = DisturbanceVector::Zero(4);
    for (std::size_t t = 0; t < log.records.size(); ++t) {
        const auto& rec = log.records[t];
        if (rec.status == SolveStatus::optimal) ++metrics.feasible_steps;
        // Strict paper box, regardless of any bound expansion in force.
        if (((rec.u - hi).array() > 1e-9).any() || ((lo - rec.u).array() > 1e-9).any())
            ++metrics.input_bound_violations;

        const Eigen::VectorXd du = rec.u;
        metrics.accumulated_cost += du.dot(cfg.controller.control_weights.cwiseProduct(du));
        const StateVector x_nominal = unicycle_step(log.states[t], rec.u, zero_w, cfg.params);
        const Eigen::VectorXd dx = x_nominal - cfg.target_state;
        metrics.accumulated_cost += dx.dot(cfg.controller.state_weights.cwiseProduct(dx));
    }
    return metrics;
}

ComparisonTable batch_compare(const std::vector<BatchEntry>& entries,
                              const std::vector<std::uint64_t>& seeds) {
    require(!seeds.empty(), "batch_compare: at least one seed required");

    ComparisonTable table;
    for (const auto& entry : entries) {
        ComparisonAggregate agg;
        agg.label = entry.label;
        for (std::uint64_t seed : seeds) {
            RunConfig cfg = entry.cfg;
            cfg.scenario_seed = seed;
            cfg.noise_seed = derive_seed(seed);
            const TrajectoryLog log = run_closed_loop(cfg);
            const RunMetrics metrics = compute_metrics(log, cfg);

            agg.violation_fraction += metrics.min_h < 0.0 ? 1.0 : 0.0;
            agg.mean_min_h += metrics.min_h;
            agg.mean_feasible_fraction +=
                static_cast<double>(metrics.feasible_steps) / cfg.total_steps;
            agg.infeasible_seed_fraction +=
                metrics.feasible_steps < cfg.total_steps ? 1.0 : 0.0;
            table.rows.push_back({entry.label, seed, metrics});
        }
        const double n = static_cast<double>(seeds.size());
        agg.violation_fraction /= n;
        agg.mean_min_h /= n;
        agg.mean_feasible_fraction /= n;
        agg.infeasible_seed_fraction /= n;
        table.aggregates.push_back(std::move(agg));
    }
    return table;
}

}  // namespace racbf
