#ifndef RACBF_SYSTEM_MODEL_HPP
#define RACBF_SYSTEM_MODEL_HPP

#include <functional>
#include <vector>

#include "racbf/types.hpp"

namespace racbf {

/// Discrete-time stochastic dynamics x_{t+1} = step(x_t, u_t, w_t) with an
/// additive disturbance of the same dimension as the state.
struct DiscreteModel {
    int state_dim = 0;
    int control_dim = 0;
    std::function<StateVector(const StateVector&, const ControlVector&, const DisturbanceVector&)> step;
};

struct UnicycleParams {
    double mass = 1650.0;  // [kg]
    double dt = 0.1;       // [s]

    void validate() const {
        require(mass > 0.0, "UnicycleParams: mass must be positive");
        require(dt > 0.0, "UnicycleParams: dt must be positive");
    }
};

/// One step of the stochastic unicycle. State [x, y, theta, v], control
/// [angular velocity, driven force]; the disturbance enters additively on all
/// four states.
StateVector unicycle_step(const StateVector& x, const ControlVector& u,
                          const DisturbanceVector& w, const UnicycleParams& p);

DiscreteModel unicycle_model(const UnicycleParams& p);

/// Multi-step prediction x_{t+1..t+steps}: the control acts on the first step
/// only, later steps evolve with zero input; wseq[k] is added at step k+1.
std::vector<StateVector> predict(const DiscreteModel& model, const StateVector& x,
                                 const ControlVector& u,
                                 const std::vector<DisturbanceVector>& wseq, int steps);

/// Integrator-chain update: pi_j += pi_{j+1}, and the last entry += nu.
AuxChainState aux_step(const AuxChainState& chain, double nu);

/// Chain trajectory pi_{t..t+steps}: nu acts on the first step only, later
/// steps evolve with zero auxiliary input (mirrors predict).
std::vector<AuxChainState> aux_predict(const AuxChainState& chain, double nu, int steps);

/// Smallest i in 1..state_dim such that perturbing any control component
/// changes h(x_{t+i}) beyond 1e-9 on at least one probe. Probe states and
/// controls are paired index-wise. Throws if no sensitivity is detected.
int numeric_relative_degree(const DiscreteModel& model,
                            const std::function<double(const StateVector&)>& h,
                            const std::vector<StateVector>& probe_states,
                            const std::vector<ControlVector>& probe_controls);

}  // namespace racbf

#endif  // RACBF_SYSTEM_MODEL_HPP
