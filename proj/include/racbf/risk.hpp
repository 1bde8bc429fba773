#ifndef RACBF_RISK_HPP
#define RACBF_RISK_HPP

#include <cstdint>
#include <vector>

namespace racbf {

/// Finite distribution of a scalar outcome. Higher values are safer; risk is
/// measured on the lower tail.
struct EmpiricalDistribution {
    std::vector<double> values;
    std::vector<double> pmf;

    static EmpiricalDistribution uniform(std::vector<double> vals);
    void validate() const;
    double mean() const;
    /// Minimum over the positive-mass support.
    double min_value() const;
};

enum class RiskMeasureKind { cvar, expectation, worst_case };

struct RiskMeasureSpec {
    RiskMeasureKind kind = RiskMeasureKind::cvar;
    double beta = 1.0;  // confidence level, used by cvar

    void validate() const;
};

/// Empirical lower-quantile VaR: sup { zeta : P(h <= zeta) <= beta }, resolved
/// on a discrete support as the smallest support point whose inclusive
/// cumulative mass exceeds beta. Requires 0 < beta < 1.
double var(const EmpiricalDistribution& d, double beta);

/// Lower-tail CVaR: probability-weighted average of the lowest beta mass, with
/// the boundary atom split fractionally so exactly beta mass is averaged.
/// beta = 1 is the mean. Requires 0 < beta <= 1.
double cvar_tail(const EmpiricalDistribution& d, double beta);

struct CvarDualResult {
    double value;
    double zeta_star;
};

/// Minimization form: -inf_zeta E[zeta + (-h - zeta)^+ / beta]. The minimizer
/// is attained at a support point of -h; ties resolve to the smallest zeta.
CvarDualResult cvar_dual(const EmpiricalDistribution& d, double beta);

/// Evaluates the one-step measure named by spec on d.
double apply_risk(const RiskMeasureSpec& spec, const EmpiricalDistribution& d);

/// Stage-indexed scenario tree; each node carries the stage value h_t and a
/// child distribution.
struct ScenarioTreeNode {
    double value = 0.0;
    std::vector<double> child_probs;
    std::vector<ScenarioTreeNode> children;
};

/// Time-consistent nested composition: leaves evaluate to h_N, inner nodes to
/// h_t + rho(child values).
double compose_nested(const ScenarioTreeNode& tree, const RiskMeasureSpec& one_step);

/// Worst observed violation of each coherence axiom (reward orientation) over
/// randomized empirical distributions.
struct CoherenceReport {
    double monotonicity = 0.0;
    double translation = 0.0;
    double positive_homogeneity = 0.0;
    double normalization = 0.0;
    double superadditivity = 0.0;

    double max_violation() const;
};

CoherenceReport coherence_check(const RiskMeasureSpec& measure, int trials, std::uint64_t rng_seed);

}  // namespace racbf

#endif  // RACBF_RISK_HPP
