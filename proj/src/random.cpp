#include "racbf/random.hpp"

#include <cmath>

namespace racbf {

std::uint64_t derive_seed(std::uint64_t seed) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double GaussianStream::uniform01() {
    // 53-bit mantissa draw in (0, 1]; the +1 keeps log() finite.
    const std::uint64_t bits = engine_() >> 11;
    return (static_cast<double>(bits) + 1.0) * 0x1p-53;
}

double GaussianStream::next() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

Eigen::VectorXd GaussianStream::next_vector(const Eigen::VectorXd& std) {
    Eigen::VectorXd out(std.size());
    for (Eigen::Index i = 0; i < std.size(); ++i) out[i] = std[i] * next();
    return out;
}

}  // namespace racbf
