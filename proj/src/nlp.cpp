#include "racbf/nlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace racbf {

void NlpProblem::validate() const {
    require(dim >= 1, "NlpProblem: dim must be >= 1");
    require(static_cast<bool>(objective), "NlpProblem: objective must be set");
    require(lower.size() == dim && upper.size() == dim, "NlpProblem: bounds must match dim");
    for (int i = 0; i < dim; ++i)
        require(lower[i] <= upper[i], "NlpProblem: lower bound exceeds upper bound");
    for (const auto& c : inequality_constraints)
        require(static_cast<bool>(c), "NlpProblem: null constraint callable");
}

void SolverOptions::validate() const {
    require(max_outer_iterations > 0 && max_inner_iterations > 0,
            "SolverOptions: iteration limits must be positive");
    require(constraint_tolerance > 0.0 && stationarity_tolerance > 0.0,
            "SolverOptions: tolerances must be positive");
    require(finite_difference_step > 0.0, "SolverOptions: fd step must be positive");
    require(initial_penalty > 0.0 && penalty_growth > 1.0,
            "SolverOptions: penalty parameters must be positive (growth > 1)");
}

const char* to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::iteration_limit: return "iteration_limit";
    }
    return "unknown";
}

Eigen::VectorXd finite_diff_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                     const Eigen::VectorXd& point, double step) {
    require(step > 0.0, "finite_diff_gradient: step must be positive");
    Eigen::VectorXd grad(point.size());
    Eigen::VectorXd x = point;
    for (Eigen::Index i = 0; i < point.size(); ++i) {
        const double h = step * std::max(1.0, std::abs(point[i]));
        x[i] = point[i] + h;
        const double fp = f(x);
        x[i] = point[i] - h;
        const double fm = f(x);
        x[i] = point[i];
        if (!std::isfinite(fp) || !std::isfinite(fm))
            throw EvaluationError("finite_diff_gradient: non-finite evaluation", -1);
        grad[i] = (fp - fm) / (2.0 * h);
    }
    return grad;
}

namespace {

constexpr double kPenaltyCap = 1e12;

Eigen::VectorXd clamp_to_box(const Eigen::VectorXd& x, const Eigen::VectorXd& lo,
                             const Eigen::VectorXd& hi) {
    return x.cwiseMax(lo).cwiseMin(hi);
}

// Objective + constraint stack with finiteness checks.
struct Stack {
    const NlpProblem& p;

    double objective(const Eigen::VectorXd& x) const {
        const double f = p.objective(x);
        if (!std::isfinite(f)) throw EvaluationError("objective returned a non-finite value", -1);
        return f;
    }

    Eigen::VectorXd constraints(const Eigen::VectorXd& x) const {
        Eigen::VectorXd c(static_cast<Eigen::Index>(p.inequality_constraints.size()));
        for (Eigen::Index i = 0; i < c.size(); ++i) {
            c[i] = p.inequality_constraints[static_cast<std::size_t>(i)](x);
            if (!std::isfinite(c[i]))
                throw EvaluationError(
                    "constraint " + std::to_string(i) + " returned a non-finite value",
                    static_cast<int>(i));
        }
        return c;
    }

    double max_violation(const Eigen::VectorXd& c) const {
        return c.size() == 0 ? 0.0 : std::max(0.0, -c.minCoeff());
    }
};

struct InnerResult {
    Eigen::VectorXd x;
    int iterations = 0;
    double projected_gradient = 0.0;
};

// Central-difference gradient of the objective and the full constraint
// Jacobian in one pass; f and all c_i are smooth, so differentiating them
// individually avoids the C1 kink of the assembled penalty function.
struct StackDerivatives {
    Eigen::VectorXd grad_f;
    Eigen::MatrixXd jacobian;  // n_con x dim
};

StackDerivatives stack_derivatives(const Stack& stack, const Eigen::VectorXd& point,
                                   double step) {
    const Eigen::Index n = point.size();
    const Eigen::Index m = static_cast<Eigen::Index>(stack.p.inequality_constraints.size());
    StackDerivatives out;
    out.grad_f.resize(n);
    out.jacobian.resize(m, n);
    Eigen::VectorXd x = point;
    for (Eigen::Index j = 0; j < n; ++j) {
        const double h = step * std::max(1.0, std::abs(point[j]));
        x[j] = point[j] + h;
        const double fp = stack.objective(x);
        const Eigen::VectorXd cp = stack.constraints(x);
        x[j] = point[j] - h;
        const double fm = stack.objective(x);
        const Eigen::VectorXd cm = stack.constraints(x);
        x[j] = point[j];
        out.grad_f[j] = (fp - fm) / (2.0 * h);
        if (m > 0) out.jacobian.col(j) = (cp - cm) / (2.0 * h);
    }
    return out;
}

// Projected BFGS with Armijo backtracking on the box. Values come from fn;
// gradients from grad (assembled by chain rule from smooth pieces). Steps
// whose f-change sinks into evaluation roundoff are judged by
// projected-gradient progress instead; the gradients stay informative far
// past the point where f-value comparisons turn into noise.
InnerResult minimize_in_box(const std::function<double(const Eigen::VectorXd&)>& fn,
                            const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& grad,
                            const Eigen::VectorXd& x0, const Eigen::VectorXd& lo,
                            const Eigen::VectorXd& hi, double tol, int max_iters,
                            double value_noise) {
    const Eigen::Index n = x0.size();
    Eigen::VectorXd x = clamp_to_box(x0, lo, hi);
    Eigen::VectorXd g = grad(x);
    Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(n, n);
    double fx = fn(x);

    const auto projected_gradient_norm = [&](const Eigen::VectorXd& at,
                                             const Eigen::VectorXd& grad) {
        return (at - clamp_to_box(at - grad, lo, hi)).cwiseAbs().maxCoeff();
    };
    const auto mask_active = [&](Eigen::VectorXd& d) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const bool at_lo =
                std::isfinite(lo[j]) && x[j] - lo[j] <= 1e-12 * (1.0 + std::abs(lo[j]));
            const bool at_hi =
                std::isfinite(hi[j]) && hi[j] - x[j] <= 1e-12 * (1.0 + std::abs(hi[j]));
            if ((at_lo && d[j] < 0.0) || (at_hi && d[j] > 0.0)) d[j] = 0.0;
        }
    };

    InnerResult res;
    int it = 0;
    bool scaled_init = false;
    for (; it < max_iters; ++it) {
        const double pg = projected_gradient_norm(x, g);
        if (pg <= tol) break;

        Eigen::VectorXd xn;
        Eigen::VectorXd gn;
        double fn_val = fx;
        bool have_gn = false;

        // Backtracking search along d. Armijo on f where the change is
        // resolvable; once |df| sinks into evaluation roundoff, accept on
        // projected-gradient progress instead (fd gradients stay informative
        // far below the f-comparison noise floor).
        const auto search = [&](const Eigen::VectorXd& d) {
            const double noise_band = value_noise + 16.0 * 1e-16 * (1.0 + std::abs(fx));
            double alpha = 1.0;
            int noise_tries = 0;
            for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
                xn = clamp_to_box(x + alpha * d, lo, hi);
                const double pred = g.dot(xn - x);
                if (pred >= 0.0) continue;
                if (-pred > noise_band) {
                    fn_val = fn(xn);
                    have_gn = false;
                    if (fn_val <= fx + 1e-4 * pred) return true;
                } else {
                    // Predicted decrease below f-resolution; only gradient
                    // progress counts as acceptance here.
                    if (++noise_tries > 8) return false;
                    gn = grad(xn);
                    have_gn = true;
                    if (projected_gradient_norm(xn, gn) < 0.999 * pg) {
                        fn_val = fn(xn);  // keep the Armijo baseline honest
                        return true;
                    }
                }
            }
            return false;
        };

        Eigen::VectorXd d = -(hinv * g);
        mask_active(d);
        bool accepted = d.dot(g) < 0.0 && d.cwiseAbs().maxCoeff() > 0.0 && search(d);
        if (!accepted) {
            // Quasi-Newton direction unusable; rebuild from steepest descent.
            hinv.setIdentity();
            scaled_init = false;
            d = -g;
            mask_active(d);
            if (d.cwiseAbs().maxCoeff() == 0.0) break;  // stationary at a corner
            accepted = search(d);
        }
        if (!accepted) break;

        if (!have_gn) gn = grad(xn);
        const Eigen::VectorXd s = xn - x;
        const Eigen::VectorXd y = gn - g;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            if (!scaled_init) {
                hinv *= sy / y.squaredNorm();
                scaled_init = true;
            }
            const Eigen::VectorXd hy = hinv * y;
            const double yhy = y.dot(hy);
            // BFGS update of the inverse Hessian.
            hinv += ((sy + yhy) / (sy * sy)) * (s * s.transpose()) -
                    (hy * s.transpose() + s * hy.transpose()) / sy;
        }
        x = xn;
        g = gn;
        fx = fn_val;
    }

    res.x = x;
    res.iterations = it;
    res.projected_gradient = projected_gradient_norm(x, g);
    return res;
}

}  // namespace

SolveResult solve(const NlpProblem& p, const SolverOptions& opts,
                  const std::optional<Eigen::VectorXd>& warm_start,
                  const std::optional<Eigen::VectorXd>& warm_multipliers) {
    p.validate();
    opts.validate();

    const Stack stack{p};
    const Eigen::Index n_con = static_cast<Eigen::Index>(p.inequality_constraints.size());

    // Start from the warm point, else the box projection of the origin.
    Eigen::VectorXd x = Eigen::VectorXd::Zero(p.dim);
    if (warm_start) {
        require(warm_start->size() == p.dim, "solve: warm start has wrong dimension");
        x = *warm_start;
    }
    x = clamp_to_box(x, p.lower, p.upper);

    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(n_con);
    if (warm_multipliers && warm_multipliers->size() == n_con)
        lambda = warm_multipliers->cwiseMax(0.0);

    double rho = opts.initial_penalty;

    // The objective is shifted by its start value so that line-search
    // comparisons are not drowned by a large constant offset.
    const double f_offset = stack.objective(x);

    const auto augmented = [&stack, &lambda, &rho, f_offset](const Eigen::VectorXd& z) {
        double value = stack.objective(z) - f_offset;
        if (lambda.size() > 0) {
            const Eigen::VectorXd c = stack.constraints(z);
            for (Eigen::Index i = 0; i < c.size(); ++i) {
                const double shifted = std::max(0.0, lambda[i] - rho * c[i]);
                value += (shifted * shifted - lambda[i] * lambda[i]) / (2.0 * rho);
            }
        }
        return value;
    };

    const auto augmented_gradient = [&stack, &lambda, &rho,
                                     &opts](const Eigen::VectorXd& z) {
        const StackDerivatives d = stack_derivatives(stack, z, opts.finite_difference_step);
        Eigen::VectorXd g = d.grad_f;
        if (lambda.size() > 0) {
            const Eigen::VectorXd c = stack.constraints(z);
            for (Eigen::Index i = 0; i < c.size(); ++i) {
                const double shifted = std::max(0.0, lambda[i] - rho * c[i]);
                if (shifted != 0.0) g -= shifted * d.jacobian.row(i).transpose();
            }
        }
        return g;
    };

    const auto violation_sq = [&stack](const Eigen::VectorXd& z) {
        const Eigen::VectorXd c = stack.constraints(z);
        double v = 0.0;
        for (Eigen::Index i = 0; i < c.size(); ++i) {
            const double neg = std::min(c[i], 0.0);
            v += neg * neg;
        }
        return v;
    };

    const auto violation_sq_gradient = [&stack, &opts](const Eigen::VectorXd& z) {
        const StackDerivatives d = stack_derivatives(stack, z, opts.finite_difference_step);
        const Eigen::VectorXd c = stack.constraints(z);
        Eigen::VectorXd g = Eigen::VectorXd::Zero(z.size());
        for (Eigen::Index i = 0; i < c.size(); ++i)
            if (c[i] < 0.0) g += 2.0 * c[i] * d.jacobian.row(i).transpose();
        return g;
    };

    // Projected Lagrangian gradient at (z, mults), assembled from the smooth
    // pieces.
    const auto lagrangian_gradient = [&stack, &opts](const Eigen::VectorXd& z,
                                                     const Eigen::VectorXd& mults) {
        const StackDerivatives d = stack_derivatives(stack, z, opts.finite_difference_step);
        Eigen::VectorXd g = d.grad_f;
        for (Eigen::Index i = 0; i < mults.size(); ++i)
            if (mults[i] != 0.0) g -= mults[i] * d.jacobian.row(i).transpose();
        return g;
    };

    // One Newton step on the active-set KKT system; cleans up the last mile
    // that a quasi-Newton inner loop leaves behind on ill-scaled instances.
    const auto kkt_polish = [&](Eigen::VectorXd& z, Eigen::VectorXd& mults, double& pg) {
        const StackDerivatives d = stack_derivatives(stack, z, opts.finite_difference_step);
        const Eigen::VectorXd c = stack.constraints(z);

        std::vector<Eigen::Index> free_vars;
        for (Eigen::Index j = 0; j < p.dim; ++j) {
            const bool at_lo = std::isfinite(p.lower[j]) &&
                               z[j] - p.lower[j] <= 1e-10 * (1.0 + std::abs(p.lower[j]));
            const bool at_hi = std::isfinite(p.upper[j]) &&
                               p.upper[j] - z[j] <= 1e-10 * (1.0 + std::abs(p.upper[j]));
            if (!at_lo && !at_hi) free_vars.push_back(j);
        }
        std::vector<Eigen::Index> active;
        for (Eigen::Index i = 0; i < c.size(); ++i)
            if (mults[i] > 0.0 || c[i] <= 10.0 * opts.constraint_tolerance) active.push_back(i);

        const Eigen::Index nf = static_cast<Eigen::Index>(free_vars.size());
        const Eigen::Index na = static_cast<Eigen::Index>(active.size());
        if (nf == 0) return;

        // Lagrangian Hessian on the free variables by differencing the
        // assembled gradient.
        Eigen::MatrixXd hess(nf, nf);
        Eigen::VectorXd zp = z;
        for (Eigen::Index jf = 0; jf < nf; ++jf) {
            const Eigen::Index j = free_vars[jf];
            const double h = opts.finite_difference_step * std::max(1.0, std::abs(z[j]));
            zp[j] = z[j] + h;
            const Eigen::VectorXd gp = lagrangian_gradient(zp, mults);
            zp[j] = z[j] - h;
            const Eigen::VectorXd gm = lagrangian_gradient(zp, mults);
            zp[j] = z[j];
            for (Eigen::Index kf = 0; kf < nf; ++kf)
                hess(kf, jf) = (gp[free_vars[kf]] - gm[free_vars[kf]]) / (2.0 * h);
        }
        hess = 0.5 * (hess + hess.transpose()).eval();
        // Epigraph-style programs carry exactly flat rays; a whisper of
        // Tikhonov keeps the KKT system regular.
        hess += 1e-8 * (1.0 + hess.cwiseAbs().maxCoeff()) *
                Eigen::MatrixXd::Identity(nf, nf);

        Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(nf + na, nf + na);
        kkt.topLeftCorner(nf, nf) = hess;
        Eigen::VectorXd rhs(nf + na);
        const Eigen::VectorXd gl = lagrangian_gradient(z, mults);
        for (Eigen::Index jf = 0; jf < nf; ++jf) rhs[jf] = -gl[free_vars[jf]];
        for (Eigen::Index ia = 0; ia < na; ++ia) {
            for (Eigen::Index jf = 0; jf < nf; ++jf) {
                const double a = d.jacobian(active[ia], free_vars[jf]);
                kkt(jf, nf + ia) = -a;
                kkt(nf + ia, jf) = a;
            }
            rhs[nf + ia] = -c[active[ia]];
        }

        const Eigen::VectorXd sol = Eigen::FullPivLU<Eigen::MatrixXd>(kkt).solve(rhs);
        if (!sol.allFinite()) return;

        Eigen::VectorXd z_new = z;
        for (Eigen::Index jf = 0; jf < nf; ++jf) z_new[free_vars[jf]] += sol[jf];
        z_new = clamp_to_box(z_new, p.lower, p.upper);
        Eigen::VectorXd mults_new = mults;
        for (Eigen::Index ia = 0; ia < na; ++ia)
            mults_new[active[ia]] = std::max(0.0, mults_new[active[ia]] + sol[nf + ia]);

        const Eigen::VectorXd c_new = stack.constraints(z_new);
        const Eigen::VectorXd gl_new = lagrangian_gradient(z_new, mults_new);
        const double pg_new =
            (z_new - clamp_to_box(z_new - gl_new, p.lower, p.upper)).cwiseAbs().maxCoeff();
        if (pg_new < pg && stack.max_violation(c_new) <= opts.constraint_tolerance) {
            z = z_new;
            mults = mults_new;
            pg = pg_new;
        }
    };

    SolveResult result;
    result.point = x;
    result.iterations = 0;

    const auto finish = [&](SolveStatus status, const Eigen::VectorXd& point) {
        result.status = status;
        result.point = point;
        result.objective_value = stack.objective(point);
        result.max_constraint_violation = stack.max_violation(stack.constraints(point));
        result.multipliers = lambda;
        return result;
    };

    // Values of the shifted objective are still computed from the unshifted
    // one, so their rounding noise carries the unshifted magnitude.
    const double value_noise = 16.0 * 1e-16 * (1.0 + std::abs(f_offset));

    // Restoration: minimize the squared violation; used both to escape stalls
    // and to certify that no feasible point was found.
    const auto restore = [&](const Eigen::VectorXd& from) {
        return minimize_in_box(violation_sq, violation_sq_gradient, from, p.lower, p.upper,
                               1e-14, 4 * opts.max_inner_iterations, 16.0 * 1e-16);
    };

    double prev_viol = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_x = x;
    double best_viol = stack.max_violation(stack.constraints(x));
    int restorations = 0;
    int stall_count = 0;

    for (int outer = 0; outer < opts.max_outer_iterations; ++outer) {
        const double inner_tol =
            n_con == 0 ? opts.stationarity_tolerance
                       : std::max(opts.stationarity_tolerance, 1e-3 * std::pow(0.1, outer));
        InnerResult inner = minimize_in_box(augmented, augmented_gradient, x, p.lower, p.upper,
                                            inner_tol, opts.max_inner_iterations, value_noise);
        x = inner.x;
        result.iterations += inner.iterations;

        const Eigen::VectorXd c = stack.constraints(x);
        const double viol = stack.max_violation(c);
        if (viol < best_viol) {
            best_viol = viol;
            best_x = x;
        }

        const double lambda_scale = 1.0 + (n_con > 0 ? lambda.cwiseAbs().maxCoeff() : 0.0);
        // Sub-resolution multiplier steps only induce limit cycling around the
        // noise floor once the iterate is pinned; freeze them there.
        double lambda_move = 0.0;
        for (Eigen::Index i = 0; i < n_con; ++i)
            lambda_move = std::max(lambda_move,
                                   std::abs(std::max(0.0, lambda[i] - rho * c[i]) - lambda[i]));
        const bool settled = viol <= opts.constraint_tolerance &&
                             lambda_move <= 0.1 * opts.stationarity_tolerance * lambda_scale;
        double complementarity = 0.0;
        for (Eigen::Index i = 0; i < n_con; ++i) {
            if (!settled) lambda[i] = std::max(0.0, lambda[i] - rho * c[i]);
            complementarity = std::max(complementarity, std::abs(lambda[i] * c[i]));
        }
        // Multiplier-scale-relative: |c| <= tol on the active rows.
        const double comp_rel = complementarity / lambda_scale;

        if (viol <= opts.constraint_tolerance && comp_rel <= opts.constraint_tolerance &&
            inner_tol <= opts.stationarity_tolerance) {
            double pg = inner.projected_gradient;
            for (int round = 0; round < 2 && pg > opts.stationarity_tolerance &&
                                pg <= 1e3 * opts.stationarity_tolerance;
                 ++round)
                kkt_polish(x, lambda, pg);
            if (pg <= opts.stationarity_tolerance) return finish(SolveStatus::optimal, x);
        }

        if (viol > opts.constraint_tolerance) {
            stall_count = prev_viol - viol < 1e-12 ? stall_count + 1 : 0;
            if (viol > 0.25 * prev_viol || stall_count > 0)
                rho = std::min(rho * opts.penalty_growth, kPenaltyCap);
            if (stall_count >= 2 || rho >= kPenaltyCap) {
                // Violation is pinned; let the restoration phase decide
                // between noise hovering and genuine infeasibility.
                InnerResult rest = restore(best_viol < viol ? best_x : x);
                result.iterations += rest.iterations;
                const double rest_viol = stack.max_violation(stack.constraints(rest.x));
                if (rest_viol > opts.constraint_tolerance)
                    return finish(SolveStatus::infeasible,
                                  rest_viol < best_viol ? rest.x : best_x);
                if (restorations >= 2) break;  // cycling; report truthfully
                ++restorations;
                x = rest.x;
                stall_count = 0;
                prev_viol = rest_viol;
                continue;
            }
        } else if (comp_rel > opts.constraint_tolerance) {
            // Feasible but loose multipliers: sharpen the penalty.
            rho = std::min(rho * opts.penalty_growth, kPenaltyCap);
            stall_count = 0;
        } else {
            stall_count = 0;
        }
        prev_viol = viol;
    }
    return finish(SolveStatus::iteration_limit, x);
}

KktReport check_kkt(const NlpProblem& p, const Eigen::VectorXd& point,
                    const Eigen::VectorXd& multipliers, double tol) {
    p.validate();
    require(point.size() == p.dim, "check_kkt: point has wrong dimension");
    require(multipliers.size() == static_cast<Eigen::Index>(p.inequality_constraints.size()),
            "check_kkt: one multiplier per constraint required");

    // Cube-root-rule step: the 1e-7 solver default drowns gradients of
    // large-magnitude objectives in cancellation noise.
    const double step = 5e-6;
    KktReport report;

    Eigen::VectorXd grad_lagrangian = finite_diff_gradient(p.objective, point, step);
    for (std::size_t i = 0; i < p.inequality_constraints.size(); ++i) {
        const double ci = p.inequality_constraints[i](point);
        report.feasibility = std::max(report.feasibility, -ci);
        report.complementarity =
            std::max(report.complementarity, std::abs(multipliers[static_cast<Eigen::Index>(i)] * ci));
        grad_lagrangian -= multipliers[static_cast<Eigen::Index>(i)] *
                           finite_diff_gradient(p.inequality_constraints[i], point, step);
    }
    for (int j = 0; j < p.dim; ++j) {
        report.feasibility = std::max(report.feasibility, p.lower[j] - point[j]);
        report.feasibility = std::max(report.feasibility, point[j] - p.upper[j]);
    }
    report.feasibility = std::max(report.feasibility, 0.0);

    // Bound multipliers are implicit: project the Lagrangian gradient step.
    const Eigen::VectorXd projected = clamp_to_box(point - grad_lagrangian, p.lower, p.upper);
    report.stationarity = (point - projected).cwiseAbs().maxCoeff();

    report.satisfied = report.stationarity <= tol && report.complementarity <= tol &&
                       report.feasibility <= tol;
    return report;
}

}  // namespace racbf
