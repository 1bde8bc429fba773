#ifndef RACBF_NLP_HPP
#define RACBF_NLP_HPP

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "racbf/types.hpp"

namespace racbf {

/// Small dense nonlinear program: minimize objective subject to inequality
/// constraints (feasible iff value >= 0) and box bounds (+-inf allowed).
struct NlpProblem {
    int dim = 0;
    std::function<double(const Eigen::VectorXd&)> objective;
    std::vector<std::function<double(const Eigen::VectorXd&)>> inequality_constraints;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    void validate() const;
};

struct SolverOptions {
    int max_outer_iterations = 40;
    int max_inner_iterations = 400;
    double constraint_tolerance = 1e-6;
    double stationarity_tolerance = 1e-6;
    double finite_difference_step = 1e-7;
    double initial_penalty = 100.0;
    double penalty_growth = 10.0;

    void validate() const;
};

enum class SolveStatus { optimal, infeasible, iteration_limit };

const char* to_string(SolveStatus status);

struct SolveResult {
    SolveStatus status = SolveStatus::iteration_limit;
    Eigen::VectorXd point;
    double objective_value = 0.0;
    double max_constraint_violation = 0.0;
    int iterations = 0;
    Eigen::VectorXd multipliers;
};

/// Objective or constraint produced a non-finite value. index -1 marks the
/// objective, otherwise the constraint index.
struct EvaluationError : std::runtime_error {
    EvaluationError(const std::string& what, int index_in)
        : std::runtime_error(what), index(index_in) {}
    int index;
};

/// Augmented-Lagrangian solve with a projected quasi-Newton inner loop and
/// finite-difference gradients. status == optimal guarantees
/// max_constraint_violation <= constraint_tolerance; infeasible means the
/// violation-restoration phase stalled above tolerance and the returned point
/// is its bound-projected minimizer.
SolveResult solve(const NlpProblem& p, const SolverOptions& opts = {},
                  const std::optional<Eigen::VectorXd>& warm_start = {},
                  const std::optional<Eigen::VectorXd>& warm_multipliers = {});

/// Central differences with relative step scaling.
Eigen::VectorXd finite_diff_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                     const Eigen::VectorXd& point, double step);

struct KktReport {
    double stationarity = 0.0;
    double complementarity = 0.0;
    double feasibility = 0.0;
    bool satisfied = false;
};

/// First-order optimality residuals at (point, multipliers); stationarity is
/// measured through the bound-projected Lagrangian gradient.
KktReport check_kkt(const NlpProblem& p, const Eigen::VectorXd& point,
                    const Eigen::VectorXd& multipliers, double tol);

}  // namespace racbf

#endif  // RACBF_NLP_HPP
