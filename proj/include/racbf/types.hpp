#ifndef RACBF_TYPES_HPP
#define RACBF_TYPES_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace racbf {

// Semantic aliases for the dense real vectors used throughout. Dimensions are
// fixed per model and enforced at the operation boundaries.
using StateVector = Eigen::VectorXd;
using ControlVector = Eigen::VectorXd;
using DisturbanceVector = Eigen::VectorXd;

// Auxiliary integrator-chain state pi = [pi_1, ..., pi_k]; the auxiliary
// variable is the first entry.
using AuxChainState = Eigen::VectorXd;

struct ContractViolation : std::invalid_argument {
    explicit ContractViolation(const std::string& what) : std::invalid_argument(what) {}
};

inline void require(bool condition, const std::string& what) {
    if (!condition) throw ContractViolation(what);
}

inline bool all_finite(const Eigen::VectorXd& v) {
    return v.allFinite();
}

}  // namespace racbf

#endif  // RACBF_TYPES_HPP
