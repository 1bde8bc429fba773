#ifndef RACBF_CONTROLLER_HPP
#define RACBF_CONTROLLER_HPP

#include <optional>
#include <utility>
#include <vector>

#include "racbf/barrier.hpp"
#include "racbf/nlp.hpp"
#include "racbf/scenario.hpp"
#include "racbf/system_model.hpp"

namespace racbf {

enum class Variant { racbf, risk_aware_dhocbf, risk_agnostic_dhocbf };

const char* to_string(Variant v);
Variant variant_from_string(const std::string& name);

/// Quadratic tracking cost plus auxiliary-input and CVaR-term weights.
struct CostSpec {
    Eigen::VectorXd control_weights;  // diagonal of Q
    Eigen::VectorXd state_weights;    // diagonal of R
    double aux_weight = 1000.0;       // W
    double risk_weight = 1.0;         // P
    StateVector x_ref;
    double nu_reference = 0.0;        // a_w

    void validate(int state_dim, int control_dim) const;
};

/// Everything the per-step program needs. The racbf variant carries one
/// auxiliary chain attached to the zeroth-order function (the case-study
/// shape); the dhocbf variants carry none.
struct ControllerConfig {
    Variant variant = Variant::racbf;
    double beta = 0.1;
    DiscreteModel model;
    BarrierSpec barrier;
    AuxBarrierSpec aux;
    CostSpec cost;
    Eigen::VectorXd control_lower;
    Eigen::VectorXd control_upper;
    SolverOptions solver;

    bool has_aux() const { return variant == Variant::racbf; }
    bool has_risk() const { return variant != Variant::risk_agnostic_dhocbf; }
    void validate() const;
};

/// Index map over the flat decision vector [u | nu | zeta | sigma]; absent
/// slices have offset -1 and size 0.
struct DecisionLayout {
    int dim = 0;
    int u_offset = 0;
    int u_size = 0;
    int nu_offset = -1;
    int nu_size = 0;
    int zeta_offset = -1;
    int sigma_offset = -1;
    int sigma_size = 0;

    Eigen::VectorXd u(const Eigen::VectorXd& z) const { return z.segment(u_offset, u_size); }
    double nu(const Eigen::VectorXd& z) const { return nu_size > 0 ? z[nu_offset] : 0.0; }
    double zeta(const Eigen::VectorXd& z) const { return zeta_offset >= 0 ? z[zeta_offset] : 0.0; }
    Eigen::VectorXd sigma(const Eigen::VectorXd& z) const {
        return sigma_size > 0 ? z.segment(sigma_offset, sigma_size) : Eigen::VectorXd();
    }
};

/// Top-of-chain value under one disturbance scenario: states propagate with u
/// on the first step and zero input after, the chain with nu likewise; the
/// racbf variant evaluates the auxiliary-variable chain, the dhocbf variants
/// the plain chain.
double scenario_psi_m(const StateVector& x, const ControlVector& u, double nu,
                      const AuxChainState& chain, const ControllerConfig& cfg,
                      const std::vector<DisturbanceVector>& scenario);

/// Assembles the per-step nonlinear program for the configured variant.
/// Constraint order: [budget, one epigraph row per scenario, auxiliary
/// admissibility] for risk variants (sigma >= 0 lives in the box bounds);
/// the risk-agnostic variant has the single zero-disturbance constraint.
std::pair<NlpProblem, DecisionLayout> build_step_problem(const StateVector& x,
                                                         const AuxChainState& chain,
                                                         const ControllerConfig& cfg,
                                                         const ScenarioSet& scenarios);

struct StepWarmStart {
    Eigen::VectorXd point;
    Eigen::VectorXd multipliers;
};

struct StepResult {
    ControlVector u;
    double nu = 0.0;
    double zeta = 0.0;
    Eigen::VectorXd sigmas;
    SolveResult solve;
    DecisionLayout layout;
    std::vector<double> psi_m_scenarios;  // evaluated at the returned point
};

/// Solves the per-step program. On a non-optimal solve the returned point is
/// the solver's bound-projected violation minimizer and the status is passed
/// through for the caller to flag.
StepResult step(const StateVector& x, const AuxChainState& chain, const ControllerConfig& cfg,
                const ScenarioSet& scenarios, const std::optional<StepWarmStart>& warm = {});

}  // namespace racbf

#endif  // RACBF_CONTROLLER_HPP
