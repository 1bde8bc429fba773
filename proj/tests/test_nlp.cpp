#include <doctest.h>

#include <cmath>
#include <random>

#include "qp_suite.hpp"
#include "racbf/nlp.hpp"

using namespace racbf;

namespace {

NlpProblem scalar_problem(std::function<double(double)> f,
                          std::vector<std::function<double(double)>> cons, double lo, double hi) {
    NlpProblem p;
    p.dim = 1;
    p.objective = [f](const Eigen::VectorXd& x) { return f(x[0]); };
    for (auto& c : cons)
        p.inequality_constraints.push_back([c](const Eigen::VectorXd& x) { return c(x[0]); });
    p.lower = (Eigen::VectorXd(1) << lo).finished();
    p.upper = (Eigen::VectorXd(1) << hi).finished();
    return p;
}

}  // namespace

TEST_CASE("active single constraint") {
    const auto p = scalar_problem([](double u) { return u * u; },
                                  {[](double u) { return u - 1.0; }}, -5.0, 5.0);
    const auto r = solve(p);
    CHECK(r.status == SolveStatus::optimal);
    CHECK(r.point[0] == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(r.objective_value == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(r.max_constraint_violation <= 1e-6);
    CHECK(r.multipliers[0] == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("interior optimum") {
    const auto p = scalar_problem([](double u) { return (u - 3.0) * (u - 3.0); }, {}, -5.0, 5.0);
    const auto r = solve(p);
    CHECK(r.status == SolveStatus::optimal);
    CHECK(r.point[0] == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("bound-constraint conflict is reported infeasible") {
    const auto p = scalar_problem([](double u) { return u * u; },
                                  {[](double u) { return u - 10.0; }}, -5.0, 5.0);
    const auto r = solve(p);
    CHECK(r.status == SolveStatus::infeasible);
    // The violation minimizer sits at the upper bound.
    CHECK(r.point[0] == doctest::Approx(5.0).epsilon(1e-6));
    CHECK(r.max_constraint_violation == doctest::Approx(5.0).epsilon(1e-6));
}

TEST_CASE("non-finite evaluations raise with the offending index") {
    auto p = scalar_problem([](double u) { return u; },
                            {[](double) { return std::numeric_limits<double>::quiet_NaN(); }},
                            -1.0, 1.0);
    try {
        solve(p);
        FAIL("expected EvaluationError");
    } catch (const EvaluationError& err) {
        CHECK(err.index == 0);
    }

    auto q = scalar_problem([](double) { return std::numeric_limits<double>::infinity(); }, {},
                            -1.0, 1.0);
    try {
        solve(q);
        FAIL("expected EvaluationError");
    } catch (const EvaluationError& err) {
        CHECK(err.index == -1);
    }
}

TEST_CASE("finite difference gradients") {
    const auto quad = [](const Eigen::VectorXd& x) { return x.squaredNorm(); };
    const Eigen::VectorXd p = (Eigen::VectorXd(2) << 1.0, 2.0).finished();
    const Eigen::VectorXd g = finite_diff_gradient(quad, p, 1e-7);
    CHECK(g[0] == doctest::Approx(2.0).epsilon(1e-5));
    CHECK(g[1] == doctest::Approx(4.0).epsilon(1e-5));

    const auto sine = [](const Eigen::VectorXd& x) { return std::sin(x[0]); };
    CHECK(finite_diff_gradient(sine, Eigen::VectorXd::Zero(1), 1e-7)[0] ==
          doctest::Approx(1.0).epsilon(1e-6));

    const auto prod = [](const Eigen::VectorXd& x) { return x[0] * x[1]; };
    const Eigen::VectorXd q = (Eigen::VectorXd(2) << 2.0, 3.0).finished();
    const Eigen::VectorXd gp = finite_diff_gradient(prod, q, 1e-7);
    CHECK(gp[0] == doctest::Approx(3.0).epsilon(1e-5));
    CHECK(gp[1] == doctest::Approx(2.0).epsilon(1e-5));
}

TEST_CASE("kkt report on hand-checked points") {
    const auto p = scalar_problem([](double u) { return u * u; },
                                  {[](double u) { return u - 1.0; }}, -5.0, 5.0);

    // Hand KKT: at u* = 1 stationarity needs multiplier 2.
    const auto good = check_kkt(p, (Eigen::VectorXd(1) << 1.0).finished(),
                                (Eigen::VectorXd(1) << 2.0).finished(), 1e-6);
    CHECK(good.stationarity <= 1e-6);
    CHECK(good.complementarity <= 1e-6);
    CHECK(good.feasibility <= 1e-6);
    CHECK(good.satisfied);

    const auto interior =
        scalar_problem([](double u) { return (u - 3.0) * (u - 3.0); }, {}, -5.0, 5.0);
    const auto ok = check_kkt(interior, (Eigen::VectorXd(1) << 3.0).finished(),
                              Eigen::VectorXd(), 1e-6);
    CHECK(ok.satisfied);

    const auto bad = check_kkt(p, (Eigen::VectorXd(1) << 2.5).finished(),
                               (Eigen::VectorXd(1) << 0.0).finished(), 1e-6);
    CHECK(bad.stationarity > 1e-6);
    CHECK_FALSE(bad.satisfied);
}

TEST_CASE("randomized convex qp suite against closed-form solutions") {
    std::mt19937_64 rng(2024);
    const SolverOptions opts = racbf_tests::qp_solver_options();
    for (int trial = 0; trial < 250; ++trial) {
        const auto qp = racbf_tests::make_qp_case(rng);
        const auto r = solve(qp.problem, opts);
        REQUIRE(r.status == SolveStatus::optimal);
        CHECK((r.point - qp.x_star).cwiseAbs().maxCoeff() <= 1e-4);
        const auto kkt = check_kkt(qp.problem, r.point, r.multipliers, 1e-6);
        CHECK(kkt.satisfied);
    }
}

TEST_CASE("solve is deterministic") {
    std::mt19937_64 rng(31);
    const auto qp = racbf_tests::make_qp_case(rng);
    const auto a = solve(qp.problem);
    const auto b = solve(qp.problem);
    CHECK(a.status == b.status);
    CHECK(a.iterations == b.iterations);
    CHECK(a.point == b.point);  // bitwise
    CHECK(a.objective_value == b.objective_value);
}

TEST_CASE("warm starts do not hurt on perturbed problems") {
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> nudge(-0.05, 0.05);
    const SolverOptions opts = racbf_tests::qp_solver_options();
    int regressions = 0;
    const int trials = 60;
    for (int trial = 0; trial < trials; ++trial) {
        const auto base = racbf_tests::make_qp_case(rng);
        const auto cold = solve(base.problem, opts);
        REQUIRE(cold.status == SolveStatus::optimal);

        // Perturb the objective center slightly; reuse the base constraints.
        NlpProblem perturbed = base.problem;
        Eigen::VectorXd shift(perturbed.dim);
        for (int i = 0; i < perturbed.dim; ++i) shift[i] = nudge(rng);
        const auto inner = base.problem.objective;
        perturbed.objective = [inner, shift](const Eigen::VectorXd& x) {
            return inner(x - shift);
        };

        const auto cold2 = solve(perturbed, opts);
        const auto warm = solve(perturbed, opts, cold.point, cold.multipliers);
        CHECK(warm.status == SolveStatus::optimal);
        CHECK((warm.point - cold2.point).cwiseAbs().maxCoeff() <= 1e-3);
        if (warm.iterations > 2 * cold2.iterations) ++regressions;
    }
    // 95th percentile smoke bound.
    CHECK(regressions <= trials / 20);
}
