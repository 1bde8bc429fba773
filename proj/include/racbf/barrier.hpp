#ifndef RACBF_BARRIER_HPP
#define RACBF_BARRIER_HPP

#include <functional>
#include <vector>

#include "racbf/types.hpp"

namespace racbf {

/// Safety function h with relative degree m and linear class-kappa gains for
/// the psi-recursion, one gain per order.
struct BarrierSpec {
    std::function<double(const StateVector&)> h;
    int m = 1;
    std::vector<double> lambdas;

    void validate() const;
};

/// Gains and margin for one auxiliary chain's phi-recursion. The chain order
/// j_m equals the number of gains.
struct AuxBarrierSpec {
    std::vector<double> ells;
    double epsilon = 1e-10;

    int order() const { return static_cast<int>(ells.size()); }
    void validate() const;
};

/// Inequality residual; the constraint is satisfied iff value >= 0.
struct ConstraintResidual {
    double value = 0.0;
    bool satisfied() const { return value >= 0.0; }
};

/// The linear-gain difference recursion shared by the psi- and phi-chains:
/// given level-0 values at times t..t+N and gains g_1..g_N, returns the
/// chain values [c_0(t), ..., c_N(t)] with c_i(t) = c_{i-1}(t+1) - c_{i-1}(t)
/// + g_i c_{i-1}(t).
std::vector<double> linear_kappa_chain(const std::vector<double>& level0,
                                       const std::vector<double>& gains);

/// psi_0..psi_m evaluated at t from the state sequence x_t..x_{t+m}.
std::vector<double> psi_chain(const BarrierSpec& spec, const std::vector<StateVector>& states);

/// phi_0..phi_{j_m} evaluated at t from the chain sequence pi_t..pi_{t+j_m};
/// phi_0(pi) is the auxiliary variable pi_1.
std::vector<double> phi_chain(const AuxBarrierSpec& spec,
                              const std::vector<AuxChainState>& chain_traj);

/// Highest-order chain value assembled through the double binomial sum over
/// level-0 values and lower-order chain terms; agrees with the recursion.
double expanded_highest(const std::vector<double>& gains, const std::vector<double>& level0);

/// Residual of the auxiliary-chain admissibility condition,
/// phi_{j_m}(pi_t) - epsilon, from an explicit chain trajectory.
ConstraintResidual aux_constraint_residual(const AuxBarrierSpec& spec,
                                           const std::vector<AuxChainState>& chain_traj);

/// Same, rolling the trajectory internally: nu on the first step, zero after.
ConstraintResidual aux_constraint_residual(const AuxBarrierSpec& spec, const AuxChainState& chain,
                                           double nu);

/// Auxiliary-variable chain: psi_0 = a_1 h, intermediate orders multiplied by
/// a_{i+1} (1 where no chain is attached), plain top order. chain_trajs[i] is
/// the trajectory of the chain for a_{i+1} over t..t+m.
std::vector<double> davcbf_chain(const BarrierSpec& spec, const std::vector<StateVector>& states,
                                 const std::vector<std::vector<AuxChainState>>& chain_trajs);

/// Diagnostic comparison of the two one-step bound rewrites: the
/// auxiliary-on-function form a_t/a_next (1-lambda) phi and the
/// auxiliary-on-kappa form (1 - lambda a_t) phi.
struct RewriteBoundForms {
    double form_a;
    double form_b;
};

RewriteBoundForms rewrite_bound_forms(double a_t, double a_next, double lambda, double phi_val);

/// CVaR epigraph residuals for the scenario values of the highest-order
/// chain: [budget; sigma_i >= 0; sigma_i + psi_m^i + zeta >= 0]. All 2|W|+1
/// are nonnegative iff (zeta, sigma) certifies empirical CVaR_beta >= 0.
std::vector<ConstraintResidual> racbf_epigraph_residuals(const std::vector<double>& psi_m_per_scenario,
                                                         double zeta,
                                                         const std::vector<double>& sigmas,
                                                         double beta);

}  // namespace racbf

#endif  // RACBF_BARRIER_HPP
