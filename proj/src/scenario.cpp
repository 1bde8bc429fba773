#include "racbf/scenario.hpp"

#include <cmath>

#include "racbf/random.hpp"

namespace racbf {

void ScenarioSet::validate() const {
    require(!sequences.empty(), "ScenarioSet: at least one scenario required");
    require(pmf.size() == sequences.size(), "ScenarioSet: pmf size must match scenario count");
    double sum = 0.0;
    for (double p : pmf) {
        require(p >= 0.0, "ScenarioSet: pmf entries must be nonnegative");
        sum += p;
    }
    require(std::abs(sum - 1.0) <= 1e-12, "ScenarioSet: pmf must sum to 1");
    const std::size_t m = sequences.front().size();
    require(m >= 1, "ScenarioSet: horizon must be >= 1");
    for (const auto& seq : sequences)
        require(seq.size() == m, "ScenarioSet: all sequences must share the horizon");
}

ScenarioSet sample_scenarios(std::uint64_t rng_seed, int count, int horizon,
                             const Eigen::VectorXd& std, ScenarioMode mode) {
    require(count >= 1, "sample_scenarios: count must be >= 1");
    require(horizon >= 1, "sample_scenarios: horizon must be >= 1");
    require((std.array() >= 0.0).all(), "sample_scenarios: std entries must be nonnegative");

    GaussianStream stream(rng_seed);
    ScenarioSet set;
    set.sequences.resize(count);
    for (int i = 0; i < count; ++i) {
        auto& seq = set.sequences[i];
        seq.reserve(horizon);
        switch (mode) {
            case ScenarioMode::first_step:
                seq.push_back(stream.next_vector(std));
                seq.resize(horizon, DisturbanceVector::Zero(std.size()));
                break;
            case ScenarioMode::per_step:
                for (int k = 0; k < horizon; ++k) seq.push_back(stream.next_vector(std));
                break;
            case ScenarioMode::repeated:
                seq.assign(horizon, stream.next_vector(std));
                break;
        }
    }
    set.pmf.assign(count, 1.0 / count);
    set.validate();
    return set;
}

ScenarioSet zero_scenarios(int horizon, int dim) {
    ScenarioSet set;
    set.sequences.assign(1, std::vector<DisturbanceVector>(horizon, DisturbanceVector::Zero(dim)));
    set.pmf.assign(1, 1.0);
    return set;
}

}  // namespace racbf
