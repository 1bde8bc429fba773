#include "racbf/risk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "racbf/types.hpp"

namespace racbf {

EmpiricalDistribution EmpiricalDistribution::uniform(std::vector<double> vals) {
    EmpiricalDistribution d;
    require(!vals.empty(), "EmpiricalDistribution: empty support");
    d.pmf.assign(vals.size(), 1.0 / static_cast<double>(vals.size()));
    d.values = std::move(vals);
    return d;
}

void EmpiricalDistribution::validate() const {
    require(!values.empty(), "EmpiricalDistribution: empty support");
    require(values.size() == pmf.size(), "EmpiricalDistribution: values/pmf size mismatch");
    double sum = 0.0;
    for (double p : pmf) {
        require(p >= 0.0, "EmpiricalDistribution: pmf entries must be nonnegative");
        sum += p;
    }
    require(std::abs(sum - 1.0) <= 1e-12, "EmpiricalDistribution: pmf must sum to 1");
}

double EmpiricalDistribution::mean() const {
    return std::inner_product(values.begin(), values.end(), pmf.begin(), 0.0);
}

double EmpiricalDistribution::min_value() const {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < values.size(); ++i)
        if (pmf[i] > 0.0) m = std::min(m, values[i]);
    return m;
}

void RiskMeasureSpec::validate() const {
    require(beta > 0.0 && beta <= 1.0, "RiskMeasureSpec: beta must lie in (0, 1]");
}

namespace {

// Support sorted ascending by value, pmf carried along.
std::vector<std::size_t> sorted_order(const std::vector<double>& values) {
    std::vector<std::size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    return idx;
}

}  // namespace

double var(const EmpiricalDistribution& d, double beta) {
    d.validate();
    require(beta > 0.0 && beta < 1.0, "var: beta must lie in (0, 1)");

    const auto order = sorted_order(d.values);
    double cum = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double v = d.values[order[i]];
        // P(h <= v) accumulates every atom sharing this value.
        while (i < order.size() && d.values[order[i]] == v) cum += d.pmf[order[i++]];
        if (cum > beta) return v;
    }
    return d.values[order.back()];
}

double cvar_tail(const EmpiricalDistribution& d, double beta) {
    d.validate();
    require(beta > 0.0 && beta <= 1.0, "cvar_tail: beta must lie in (0, 1]");

    const auto order = sorted_order(d.values);
    double taken = 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < order.size() && taken < beta; ++i) {
        const double take = std::min(d.pmf[order[i]], beta - taken);
        acc += take * d.values[order[i]];
        taken += take;
    }
    return acc / beta;
}

CvarDualResult cvar_dual(const EmpiricalDistribution& d, double beta) {
    d.validate();
    require(beta > 0.0 && beta <= 1.0, "cvar_dual: beta must lie in (0, 1]");

    // g(zeta) = zeta + E[(-h - zeta)^+]/beta is piecewise linear and convex
    // with breakpoints at zeta = -h_i, so scanning the breakpoints is exact.
    std::vector<double> candidates;
    candidates.reserve(d.values.size());
    for (double v : d.values) candidates.push_back(-v);
    std::sort(candidates.begin(), candidates.end());

    double best_g = std::numeric_limits<double>::infinity();
    double best_zeta = candidates.front();
    for (double zeta : candidates) {
        double expected = 0.0;
        for (std::size_t i = 0; i < d.values.size(); ++i)
            expected += d.pmf[i] * std::max(-d.values[i] - zeta, 0.0);
        const double g = zeta + expected / beta;
        if (g < best_g) {
            best_g = g;
            best_zeta = zeta;
        }
    }
    return {-best_g, best_zeta};
}

double apply_risk(const RiskMeasureSpec& spec, const EmpiricalDistribution& d) {
    spec.validate();
    switch (spec.kind) {
        case RiskMeasureKind::cvar:
            return cvar_tail(d, spec.beta);
        case RiskMeasureKind::expectation:
            return d.mean();
        case RiskMeasureKind::worst_case:
            return d.min_value();
    }
    throw ContractViolation("apply_risk: unknown risk measure kind");
}

double compose_nested(const ScenarioTreeNode& tree, const RiskMeasureSpec& one_step) {
    require(tree.children.size() == tree.child_probs.size(),
            "compose_nested: child/probability count mismatch");
    if (tree.children.empty()) return tree.value;

    double sum = 0.0;
    for (double p : tree.child_probs) {
        require(p >= 0.0, "compose_nested: child probabilities must be nonnegative");
        sum += p;
    }
    require(std::abs(sum - 1.0) <= 1e-9, "compose_nested: child probabilities must sum to 1");

    EmpiricalDistribution child_values;
    child_values.pmf = tree.child_probs;
    child_values.values.reserve(tree.children.size());
    for (const auto& child : tree.children)
        child_values.values.push_back(compose_nested(child, one_step));
    return tree.value + apply_risk(one_step, child_values);
}

double CoherenceReport::max_violation() const {
    return std::max({monotonicity, translation, positive_homogeneity, normalization, superadditivity});
}

namespace {

struct Uniform01 {
    std::mt19937_64 engine;
    explicit Uniform01(std::uint64_t seed) : engine(seed) {}
    double next() { return static_cast<double>(engine() >> 11) * 0x1p-53; }
    double range(double lo, double hi) { return lo + (hi - lo) * next(); }
};

EmpiricalDistribution random_distribution(Uniform01& rng, std::size_t k) {
    EmpiricalDistribution d;
    d.values.resize(k);
    d.pmf.resize(k);
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        d.values[i] = rng.range(-10.0, 10.0);
        d.pmf[i] = 0.05 + rng.next();
        sum += d.pmf[i];
    }
    for (auto& p : d.pmf) p /= sum;
    // Absorb the normalization roundoff into the heaviest atom.
    const auto top = std::max_element(d.pmf.begin(), d.pmf.end());
    *top += 1.0 - std::accumulate(d.pmf.begin(), d.pmf.end(), 0.0);
    return d;
}

}  // namespace

CoherenceReport coherence_check(const RiskMeasureSpec& measure, int trials, std::uint64_t rng_seed) {
    measure.validate();
    require(trials >= 1, "coherence_check: trials must be >= 1");

    Uniform01 rng(rng_seed);
    CoherenceReport report;
    for (int t = 0; t < trials; ++t) {
        const std::size_t k = 1 + static_cast<std::size_t>(rng.range(0.0, 19.0));
        EmpiricalDistribution h = random_distribution(rng, k);
        const double rho_h = apply_risk(measure, h);

        // Monotonicity: h' = h + nonnegative bump, same probability space.
        EmpiricalDistribution hp = h;
        for (auto& v : hp.values) v += rng.range(0.0, 5.0);
        report.monotonicity = std::max(report.monotonicity, rho_h - apply_risk(measure, hp));

        // Translation: rho(h + c) = rho(h) + c.
        const double c = rng.range(-5.0, 5.0);
        EmpiricalDistribution ht = h;
        for (auto& v : ht.values) v += c;
        report.translation =
            std::max(report.translation, std::abs(apply_risk(measure, ht) - rho_h - c));

        // Positive homogeneity: rho(s h) = s rho(h), s >= 0 (s = 0 every few trials).
        const double s = (t % 7 == 0) ? 0.0 : rng.range(0.0, 3.0);
        EmpiricalDistribution hs = h;
        for (auto& v : hs.values) v *= s;
        report.positive_homogeneity =
            std::max(report.positive_homogeneity, std::abs(apply_risk(measure, hs) - s * rho_h));

        // Normalization: rho(0) = 0 on this trial's probability space.
        EmpiricalDistribution hz = h;
        for (auto& v : hz.values) v = 0.0;
        report.normalization = std::max(report.normalization, std::abs(apply_risk(measure, hz)));

        // Superadditivity (reward orientation): rho(h + h') >= rho(h) + rho(h').
        EmpiricalDistribution g = h;
        for (auto& v : g.values) v = rng.range(-10.0, 10.0);
        EmpiricalDistribution hg = h;
        for (std::size_t i = 0; i < hg.values.size(); ++i) hg.values[i] += g.values[i];
        report.superadditivity =
            std::max(report.superadditivity,
                     rho_h + apply_risk(measure, g) - apply_risk(measure, hg));
    }
    return report;
}

}  // namespace racbf
