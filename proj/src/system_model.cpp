#include "racbf/system_model.hpp"

#include <cmath>

namespace racbf {

StateVector unicycle_step(const StateVector& x, const ControlVector& u,
                          const DisturbanceVector& w, const UnicycleParams& p) {
    p.validate();
    require(x.size() == 4, "unicycle_step: state must have dimension 4");
    require(u.size() == 2, "unicycle_step: control must have dimension 2");
    require(w.size() == 4, "unicycle_step: disturbance must have dimension 4");

    StateVector next(4);
    next[0] = x[0] + x[3] * std::cos(x[2]) * p.dt;
    next[1] = x[1] + x[3] * std::sin(x[2]) * p.dt;
    next[2] = x[2] + u[0] * p.dt;
    next[3] = x[3] + (u[1] / p.mass) * p.dt;
    return next + w;
}

DiscreteModel unicycle_model(const UnicycleParams& p) {
    p.validate();
    DiscreteModel model;
    model.state_dim = 4;
    model.control_dim = 2;
    model.step = [p](const StateVector& x, const ControlVector& u, const DisturbanceVector& w) {
        return unicycle_step(x, u, w, p);
    };
    return model;
}

std::vector<StateVector> predict(const DiscreteModel& model, const StateVector& x,
                                 const ControlVector& u,
                                 const std::vector<DisturbanceVector>& wseq, int steps) {
    require(steps >= 1, "predict: steps must be >= 1");
    require(static_cast<int>(wseq.size()) >= steps, "predict: disturbance sequence too short");

    std::vector<StateVector> out;
    out.reserve(steps);
    const ControlVector zero_u = ControlVector::Zero(model.control_dim);
    StateVector cur = model.step(x, u, wseq[0]);
    out.push_back(cur);
    for (int k = 1; k < steps; ++k) {
        cur = model.step(cur, zero_u, wseq[k]);
        out.push_back(cur);
    }
    return out;
}

AuxChainState aux_step(const AuxChainState& chain, double nu) {
    require(chain.size() >= 1, "aux_step: chain must have at least one entry");
    AuxChainState next = chain;
    const Eigen::Index last = chain.size() - 1;
    for (Eigen::Index j = 0; j < last; ++j) next[j] += chain[j + 1];
    next[last] += nu;
    return next;
}

std::vector<AuxChainState> aux_predict(const AuxChainState& chain, double nu, int steps) {
    require(steps >= 0, "aux_predict: steps must be >= 0");
    std::vector<AuxChainState> out;
    out.reserve(steps + 1);
    out.push_back(chain);
    for (int k = 0; k < steps; ++k) out.push_back(aux_step(out.back(), k == 0 ? nu : 0.0));
    return out;
}

int numeric_relative_degree(const DiscreteModel& model,
                            const std::function<double(const StateVector&)>& h,
                            const std::vector<StateVector>& probe_states,
                            const std::vector<ControlVector>& probe_controls) {
    require(!probe_states.empty(), "numeric_relative_degree: no probes given");
    require(probe_states.size() == probe_controls.size(),
            "numeric_relative_degree: probe lists must have equal length");

    const DisturbanceVector zero_w = DisturbanceVector::Zero(model.state_dim);
    const ControlVector zero_u = ControlVector::Zero(model.control_dim);

    // h along the controlled-first-step trajectory, i steps ahead.
    const auto h_ahead = [&](const StateVector& x, const ControlVector& u, int i) {
        StateVector cur = model.step(x, u, zero_w);
        for (int k = 1; k < i; ++k) cur = model.step(cur, zero_u, zero_w);
        return h(cur);
    };

    for (int i = 1; i <= model.state_dim; ++i) {
        for (std::size_t pidx = 0; pidx < probe_states.size(); ++pidx) {
            const StateVector& x = probe_states[pidx];
            const ControlVector& u = probe_controls[pidx];
            const double base = h_ahead(x, u, i);
            for (int j = 0; j < model.control_dim; ++j) {
                ControlVector up = u;
                up[j] += 1e-2 * std::max(1.0, std::abs(u[j]));
                if (std::abs(h_ahead(x, up, i) - base) > 1e-9) return i;
            }
        }
    }
    throw ContractViolation("numeric_relative_degree: degree undetermined up to state dimension");
}

}  // namespace racbf
