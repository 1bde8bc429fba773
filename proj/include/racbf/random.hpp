#ifndef RACBF_RANDOM_HPP
#define RACBF_RANDOM_HPP

#include <cstdint>
#include <random>

#include "racbf/types.hpp"

namespace racbf {

// Derives an unrelated stream seed from a base seed (splitmix64 step).
std::uint64_t derive_seed(std::uint64_t seed);

// Deterministic standard-normal stream over mt19937_64. std::normal_distribution
// is implementation-defined, so logs would not be reproducible across
// toolchains; Box-Muller over raw 53-bit uniforms is pinned here instead.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

    double next();

    // Vector of independent draws, scaled componentwise by std.
    Eigen::VectorXd next_vector(const Eigen::VectorXd& std);

private:
    double uniform01();

    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace racbf

#endif  // RACBF_RANDOM_HPP
