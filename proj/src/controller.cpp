#include "racbf/controller.hpp"

#include <cmath>
#include <memory>

namespace racbf {

const char* to_string(Variant v) {
    switch (v) {
        case Variant::racbf: return "racbf";
        case Variant::risk_aware_dhocbf: return "risk_aware_dhocbf";
        case Variant::risk_agnostic_dhocbf: return "risk_agnostic_dhocbf";
    }
    return "unknown";
}

Variant variant_from_string(const std::string& name) {
    if (name == "racbf") return Variant::racbf;
    if (name == "risk_aware_dhocbf") return Variant::risk_aware_dhocbf;
    if (name == "risk_agnostic_dhocbf") return Variant::risk_agnostic_dhocbf;
    throw ContractViolation("unknown controller variant: " + name);
}

void CostSpec::validate(int state_dim, int control_dim) const {
    require(control_weights.size() == control_dim, "CostSpec: control weight per input required");
    require(state_weights.size() == state_dim, "CostSpec: state weight per state required");
    require((control_weights.array() > 0.0).all() && (state_weights.array() > 0.0).all(),
            "CostSpec: diagonal weights must be positive");
    require(aux_weight > 0.0 && risk_weight > 0.0, "CostSpec: weights must be positive");
    require(x_ref.size() == state_dim, "CostSpec: reference state dimension mismatch");
}

void ControllerConfig::validate() const {
    require(static_cast<bool>(model.step), "ControllerConfig: model must be set");
    barrier.validate();
    if (has_aux()) aux.validate();
    if (has_risk()) require(beta > 0.0 && beta <= 1.0, "ControllerConfig: beta must lie in (0, 1]");
    cost.validate(model.state_dim, model.control_dim);
    require(control_lower.size() == model.control_dim
                && control_upper.size() == model.control_dim,
            "ControllerConfig: control bounds must match the input dimension");
    require((control_lower.array() <= control_upper.array()).all(),
            "ControllerConfig: control bounds inverted");
}

double scenario_psi_m(const StateVector& x, const ControlVector& u, double nu,
                      const AuxChainState& chain, const ControllerConfig& cfg,
                      const std::vector<DisturbanceVector>& scenario) {
    const int m = cfg.barrier.m;
    require(static_cast<int>(scenario.size()) >= m, "scenario_psi_m: scenario shorter than m");

    std::vector<StateVector> states;
    states.reserve(m + 1);
    states.push_back(x);
    for (auto& xs : predict(cfg.model, x, u, scenario, m)) states.push_back(std::move(xs));

    if (!cfg.has_aux()) return psi_chain(cfg.barrier, states).back();
    return davcbf_chain(cfg.barrier, states, {aux_predict(chain, nu, m)}).back();
}

namespace {

// Immutable snapshot shared by the problem closures; keeps the NlpProblem
// valid independently of the caller's config and scenario lifetimes.
struct StepContext {
    StateVector x;
    AuxChainState chain;
    ControllerConfig cfg;
    ScenarioSet scenarios;
    DecisionLayout layout;
    DisturbanceVector zero_w;
};

DecisionLayout make_layout(const ControllerConfig& cfg, int scenario_count) {
    DecisionLayout layout;
    layout.u_offset = 0;
    layout.u_size = cfg.model.control_dim;
    int next = layout.u_size;
    if (cfg.has_aux()) {
        layout.nu_offset = next;
        layout.nu_size = 1;
        next += 1;
    }
    if (cfg.has_risk()) {
        layout.zeta_offset = next++;
        layout.sigma_offset = next;
        layout.sigma_size = scenario_count;
        next += scenario_count;
    }
    layout.dim = next;
    return layout;
}

}  // namespace

std::pair<NlpProblem, DecisionLayout> build_step_problem(const StateVector& x,
                                                         const AuxChainState& chain,
                                                         const ControllerConfig& cfg,
                                                         const ScenarioSet& scenarios) {
    cfg.validate();
    require(all_finite(x), "build_step_problem: state must be finite");
    scenarios.validate();
    require(scenarios.horizon() == cfg.barrier.m,
            "build_step_problem: scenario horizon must equal the relative degree");

    auto ctx = std::make_shared<StepContext>();
    ctx->x = x;
    ctx->chain = chain;
    ctx->cfg = cfg;
    ctx->scenarios = scenarios;
    ctx->layout = make_layout(cfg, scenarios.count());
    ctx->zero_w = DisturbanceVector::Zero(cfg.model.state_dim);

    const DecisionLayout layout = ctx->layout;

    NlpProblem problem;
    problem.dim = layout.dim;
    problem.lower = Eigen::VectorXd::Constant(layout.dim, -std::numeric_limits<double>::infinity());
    problem.upper = Eigen::VectorXd::Constant(layout.dim, std::numeric_limits<double>::infinity());
    problem.lower.segment(layout.u_offset, layout.u_size) = cfg.control_lower;
    problem.upper.segment(layout.u_offset, layout.u_size) = cfg.control_upper;
    if (layout.sigma_size > 0)
        problem.lower.segment(layout.sigma_offset, layout.sigma_size).setZero();

    problem.objective = [ctx](const Eigen::VectorXd& z) {
        const auto& l = ctx->layout;
        const auto& cost = ctx->cfg.cost;
        const Eigen::VectorXd u = l.u(z);
        double value = u.dot(cost.control_weights.cwiseProduct(u));
        const StateVector x_nominal = ctx->cfg.model.step(ctx->x, u, ctx->zero_w);
        const Eigen::VectorXd dx = x_nominal - cost.x_ref;
        value += dx.dot(cost.state_weights.cwiseProduct(dx));
        if (l.nu_size > 0) {
            const double dn = l.nu(z) - cost.nu_reference;
            value += cost.aux_weight * dn * dn;
        }
        if (l.sigma_size > 0) {
            value += cost.risk_weight *
                     (l.zeta(z) + l.sigma(z).sum() /
                                      (ctx->cfg.beta * static_cast<double>(l.sigma_size)));
        }
        return value;
    };

    if (cfg.has_risk()) {
        // Budget row of the epigraph system.
        problem.inequality_constraints.push_back([ctx](const Eigen::VectorXd& z) {
            const auto& l = ctx->layout;
            return -(l.zeta(z) + l.sigma(z).sum() /
                                     (ctx->cfg.beta * static_cast<double>(l.sigma_size)));
        });
        for (int i = 0; i < scenarios.count(); ++i) {
            problem.inequality_constraints.push_back([ctx, i](const Eigen::VectorXd& z) {
                const auto& l = ctx->layout;
                const double psi = scenario_psi_m(ctx->x, l.u(z), l.nu(z), ctx->chain, ctx->cfg,
                                                  ctx->scenarios.sequences[i]);
                return z[l.sigma_offset + i] + psi + l.zeta(z);
            });
        }
        if (cfg.has_aux()) {
            problem.inequality_constraints.push_back([ctx](const Eigen::VectorXd& z) {
                return aux_constraint_residual(ctx->cfg.aux, ctx->chain, ctx->layout.nu(z)).value;
            });
        }
    } else {
        const std::vector<DisturbanceVector> zero_scenario(cfg.barrier.m, ctx->zero_w);
        problem.inequality_constraints.push_back([ctx, zero_scenario](const Eigen::VectorXd& z) {
            return scenario_psi_m(ctx->x, ctx->layout.u(z), 0.0, ctx->chain, ctx->cfg,
                                  zero_scenario);
        });
    }

    return {std::move(problem), layout};
}

StepResult step(const StateVector& x, const AuxChainState& chain, const ControllerConfig& cfg,
                const ScenarioSet& scenarios, const std::optional<StepWarmStart>& warm) {
    auto [problem, layout] = build_step_problem(x, chain, cfg, scenarios);

    std::optional<Eigen::VectorXd> warm_point;
    std::optional<Eigen::VectorXd> warm_multipliers;
    if (warm && warm->point.size() == layout.dim) {
        warm_point = warm->point;
        if (warm->multipliers.size() ==
            static_cast<Eigen::Index>(problem.inequality_constraints.size()))
            warm_multipliers = warm->multipliers;
    }

    StepResult out;
    out.layout = layout;
    out.solve = solve(problem, cfg.solver, warm_point, warm_multipliers);
    out.u = layout.u(out.solve.point);
    out.nu = layout.nu(out.solve.point);
    out.zeta = layout.zeta(out.solve.point);
    out.sigmas = layout.sigma(out.solve.point);

    out.psi_m_scenarios.reserve(scenarios.count());
    for (int i = 0; i < scenarios.count(); ++i)
        out.psi_m_scenarios.push_back(
            scenario_psi_m(x, out.u, out.nu, chain, cfg, scenarios.sequences[i]));
    return out;
}

}  // namespace racbf
