#ifndef RACBF_SCENARIO_HPP
#define RACBF_SCENARIO_HPP

#include <cstdint>
#include <vector>

#include "racbf/types.hpp"

namespace racbf {

enum class ScenarioMode {
    first_step,  // one draw per scenario on the first step, propagating through
                 // the zero-input composition; later steps undisturbed
    per_step,    // independent disturbance per prediction step
    repeated,    // one draw per scenario, repeated across the horizon
};

/// Finite disturbance support: |W| sequences of per-step disturbances with a
/// probability mass function over the scenarios.
struct ScenarioSet {
    std::vector<std::vector<DisturbanceVector>> sequences;
    std::vector<double> pmf;

    int count() const { return static_cast<int>(sequences.size()); }
    int horizon() const { return sequences.empty() ? 0 : static_cast<int>(sequences.front().size()); }
    void validate() const;
};

/// count i.i.d. zero-mean Gaussian scenario sequences of the given horizon with
/// uniform pmf 1/count. Deterministic in the seed.
ScenarioSet sample_scenarios(std::uint64_t rng_seed, int count, int horizon,
                             const Eigen::VectorXd& std,
                             ScenarioMode mode = ScenarioMode::first_step);

/// The degenerate single-scenario set with zero disturbances (risk-agnostic
/// prediction).
ScenarioSet zero_scenarios(int horizon, int dim);

}  // namespace racbf

#endif  // RACBF_SCENARIO_HPP
