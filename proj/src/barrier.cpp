#include "racbf/barrier.hpp"

#include <cmath>

#include "racbf/system_model.hpp"

namespace racbf {

void BarrierSpec::validate() const {
    require(static_cast<bool>(h), "BarrierSpec: h must be set");
    require(m >= 1, "BarrierSpec: relative degree must be >= 1");
    require(static_cast<int>(lambdas.size()) == m, "BarrierSpec: one gain per order required");
    for (double l : lambdas)
        require(l > 0.0 && l <= 1.0, "BarrierSpec: gains must lie in (0, 1]");
}

void AuxBarrierSpec::validate() const {
    require(!ells.empty(), "AuxBarrierSpec: at least one gain required");
    for (double l : ells)
        require(l > 0.0 && l <= 1.0, "AuxBarrierSpec: gains must lie in (0, 1]");
    require(epsilon > 0.0, "AuxBarrierSpec: epsilon must be positive");
}

std::vector<double> linear_kappa_chain(const std::vector<double>& level0,
                                       const std::vector<double>& gains) {
    require(level0.size() == gains.size() + 1,
            "linear_kappa_chain: need one more value than gains");
    std::vector<double> out;
    out.reserve(level0.size());
    out.push_back(level0.front());

    std::vector<double> row = level0;
    for (std::size_t i = 0; i < gains.size(); ++i) {
        std::vector<double> next(row.size() - 1);
        for (std::size_t k = 0; k + 1 < row.size(); ++k)
            next[k] = row[k + 1] - row[k] + gains[i] * row[k];
        row = std::move(next);
        out.push_back(row.front());
    }
    return out;
}

std::vector<double> psi_chain(const BarrierSpec& spec, const std::vector<StateVector>& states) {
    spec.validate();
    require(static_cast<int>(states.size()) == spec.m + 1,
            "psi_chain: need exactly m+1 states");
    std::vector<double> level0;
    level0.reserve(states.size());
    for (const auto& x : states) level0.push_back(spec.h(x));
    return linear_kappa_chain(level0, spec.lambdas);
}

std::vector<double> phi_chain(const AuxBarrierSpec& spec,
                              const std::vector<AuxChainState>& chain_traj) {
    spec.validate();
    require(static_cast<int>(chain_traj.size()) == spec.order() + 1,
            "phi_chain: need exactly j_m+1 chain states");
    std::vector<double> level0;
    level0.reserve(chain_traj.size());
    for (const auto& pi : chain_traj) {
        require(pi.size() >= 1, "phi_chain: empty chain state");
        level0.push_back(pi[0]);
    }
    return linear_kappa_chain(level0, spec.ells);
}

namespace {

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double c = 1.0;
    for (int i = 0; i < k; ++i) c = c * (n - i) / (i + 1);
    return c;
}

int sign_pow(int e) { return (e % 2 == 0) ? 1 : -1; }

}  // namespace

double expanded_highest(const std::vector<double>& gains, const std::vector<double>& level0) {
    const int jm = static_cast<int>(gains.size());
    require(jm >= 1, "expanded_highest: at least one gain required");
    require(static_cast<int>(level0.size()) == jm + 1,
            "expanded_highest: need j_m+1 level-0 values");

    // Pure difference part over the level-0 values.
    double total = 0.0;
    for (int k = 0; k <= jm; ++k)
        total += sign_pow(jm - k) * binomial(jm, jm - k) * level0[k];

    // Lower-order chain values at shifted times, rows[n][k] = c_n(t+k).
    std::vector<std::vector<double>> rows;
    rows.push_back(level0);
    for (int n = 1; n < jm; ++n) {
        const auto& prev = rows.back();
        std::vector<double> row(prev.size() - 1);
        for (std::size_t k = 0; k + 1 < prev.size(); ++k)
            row[k] = prev[k + 1] - prev[k] + gains[n - 1] * prev[k];
        rows.push_back(std::move(row));
    }

    for (int n = 1; n <= jm; ++n)
        for (int k = 0; k <= jm - n; ++k)
            total += sign_pow(jm - n - k) * binomial(jm - n, k) * gains[n - 1] * rows[n - 1][k];
    return total;
}

ConstraintResidual aux_constraint_residual(const AuxBarrierSpec& spec,
                                           const std::vector<AuxChainState>& chain_traj) {
    return {phi_chain(spec, chain_traj).back() - spec.epsilon};
}

ConstraintResidual aux_constraint_residual(const AuxBarrierSpec& spec, const AuxChainState& chain,
                                           double nu) {
    spec.validate();
    require(static_cast<int>(chain.size()) == spec.order(),
            "aux_constraint_residual: chain length must match the gain count");
    return aux_constraint_residual(spec, aux_predict(chain, nu, spec.order()));
}

std::vector<double> davcbf_chain(const BarrierSpec& spec, const std::vector<StateVector>& states,
                                 const std::vector<std::vector<AuxChainState>>& chain_trajs) {
    spec.validate();
    require(static_cast<int>(states.size()) == spec.m + 1,
            "davcbf_chain: need exactly m+1 states");
    require(static_cast<int>(chain_trajs.size()) <= spec.m,
            "davcbf_chain: at most m auxiliary chains");
    for (const auto& traj : chain_trajs)
        require(traj.size() == states.size(),
                "davcbf_chain: chain trajectories must cover t..t+m");

    // a(i, k): auxiliary variable a_{i, t+k}; 1 for orders without a chain.
    const auto a = [&](int i, std::size_t k) -> double {
        if (i <= static_cast<int>(chain_trajs.size())) return chain_trajs[i - 1][k][0];
        return 1.0;
    };

    std::vector<double> out;
    out.reserve(spec.m + 1);

    std::vector<double> row(states.size());
    for (std::size_t k = 0; k < states.size(); ++k) row[k] = a(1, k) * spec.h(states[k]);
    out.push_back(row.front());

    for (int i = 1; i <= spec.m; ++i) {
        std::vector<double> next(row.size() - 1);
        for (std::size_t k = 0; k + 1 < row.size(); ++k) {
            const double plain = row[k + 1] - row[k] + spec.lambdas[i - 1] * row[k];
            next[k] = (i < spec.m) ? a(i + 1, k) * plain : plain;
        }
        row = std::move(next);
        out.push_back(row.front());
    }
    return out;
}

RewriteBoundForms rewrite_bound_forms(double a_t, double a_next, double lambda, double phi_val) {
    require(a_t > 0.0 && a_next > 0.0, "rewrite_bound_forms: auxiliary variables must be positive");
    require(lambda > 0.0 && lambda <= 1.0, "rewrite_bound_forms: lambda must lie in (0, 1]");
    return {(a_t / a_next) * (1.0 - lambda) * phi_val, (1.0 - lambda * a_t) * phi_val};
}

std::vector<ConstraintResidual> racbf_epigraph_residuals(const std::vector<double>& psi_m_per_scenario,
                                                         double zeta,
                                                         const std::vector<double>& sigmas,
                                                         double beta) {
    const std::size_t k = psi_m_per_scenario.size();
    require(k >= 1, "racbf_epigraph_residuals: at least one scenario");
    require(sigmas.size() == k, "racbf_epigraph_residuals: one sigma per scenario");
    require(beta > 0.0 && beta <= 1.0, "racbf_epigraph_residuals: beta must lie in (0, 1]");

    std::vector<ConstraintResidual> out;
    out.reserve(2 * k + 1);
    double sigma_sum = 0.0;
    for (double s : sigmas) sigma_sum += s;
    out.push_back({-(zeta + sigma_sum / (beta * static_cast<double>(k)))});
    for (double s : sigmas) out.push_back({s});
    for (std::size_t i = 0; i < k; ++i)
        out.push_back({sigmas[i] + psi_m_per_scenario[i] + zeta});
    return out;
}

}  // namespace racbf
