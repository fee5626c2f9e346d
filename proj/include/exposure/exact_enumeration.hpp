#pragma once

// Brute-force ground truth for small instances: exact marginals of the
// exposure model by enumeration of all completions of the observation, and
// exact eta maximization by grid search.
//
// A configuration's weight is a product of per-node factors
//
//     phi_i = eta^{s_i} (1-eta)^{1-s_i}   if some neighbor of i is perturbed
//     phi_i = 1 - s_i                     otherwise
//
// so every admissible configuration reduces to eta^a (1-eta)^b with integer
// exponents. Enumeration tallies configuration counts per (a, b) once; every
// eta evaluation afterwards is a small polynomial sum. Nodes whose factor
// cannot vary with the hidden states contribute constant exponent offsets.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "exposure/network.hpp"
#include "exposure/observation.hpp"

namespace exposure {

// Which nodes contribute factors to the joint weight. AllNodes is the honest
// joint (an observed perturbed node with an all-unperturbed neighborhood
// zeroes the configuration); UnobservedOnly treats observed states as pure
// boundary conditions, which is the measure the BP recursion actually solves.
enum class FactorScope { AllNodes, UnobservedOnly };

constexpr int kMaxEnumerationNodes = 22;

struct ExactMarginals {
    std::vector<double> p_unperturbed; // per node; observed entries clamped
    std::vector<int> unobserved;       // node indices that were enumerated
    double eta = 0.0;                  // eta the marginals were evaluated at
    double eta_grid_opt = 0.0;         // set by exact_eta_opt
    double partition_weight = 0.0;     // total weight at eta (may underflow on big instances)
    double partition_log_weight = 0.0;
};

namespace detail {

struct ExposureTally {
    std::vector<int> unobserved;
    int width = 0;                       // tables are width x width over (a, b)
    std::vector<double> total;           // counts per (a, b); exact integers
    std::vector<std::vector<double>> node_zero; // per unobserved node, configs with s_i = 0
    std::vector<std::vector<double>> node_one;
    long const_a = 0, const_b = 0;       // exponents from nodes with fixed factors
    bool identically_zero = false;       // a fixed-factor node forces weight 0

    double& at(std::vector<double>& t, int a, int b) const { return t[a * width + b]; }

    double poly(const std::vector<double>& t, double eta) const {
        double s = 0.0;
        for (int a = 0; a < width; ++a) {
            if (eta == 0.0 && a > 0) continue;
            for (int b = 0; b < width; ++b) {
                const double count = t[a * width + b];
                if (count == 0.0) continue;
                s += count * std::pow(eta, a) * std::pow(1.0 - eta, b);
            }
        }
        return s;
    }
};

inline ExposureTally enumerate_completions(const Network& net, const Observation& obs,
                                           FactorScope scope) {
    const auto state = obs.dense(net.node_count);
    ExposureTally tally;
    for (int i = 0; i < net.node_count; ++i)
        if (state[i] == kUnobserved) tally.unobserved.push_back(i);
    const int m = static_cast<int>(tally.unobserved.size());
    if (m > kMaxEnumerationNodes) throw std::runtime_error("instance too large for enumeration");

    std::vector<std::int8_t> sigma(state.begin(), state.end());
    std::vector<char> is_hidden(net.node_count, 0);
    for (int u : tally.unobserved) is_hidden[u] = 1;

    // Factor-bearing nodes per scope; a node's factor varies with the hidden
    // states only if the node is hidden or touches one.
    auto in_scope = [&](int i) {
        return scope == FactorScope::AllNodes || state[i] == kUnobserved;
    };
    auto factor_varies = [&](int i) {
        if (is_hidden[i]) return true;
        for (int j : net.adjacency[i])
            if (is_hidden[j]) return true;
        return false;
    };
    std::vector<int> active;
    for (int i = 0; i < net.node_count; ++i) {
        if (!in_scope(i)) continue;
        if (factor_varies(i)) {
            active.push_back(i);
        } else {
            // fixed factor: gamma determined by observed neighbors alone
            int gamma = 0;
            for (int j : net.adjacency[i]) gamma |= (state[j] == 1);
            if (gamma) {
                if (state[i] == 1) ++tally.const_a;
                else ++tally.const_b;
            } else if (state[i] == 1) {
                tally.identically_zero = true; // perturbed but unexposed
            }
        }
    }

    tally.width = static_cast<int>(active.size()) + 1;
    const size_t cells = static_cast<size_t>(tally.width) * tally.width;
    tally.total.assign(cells, 0.0);
    tally.node_zero.assign(m, std::vector<double>(cells, 0.0));
    tally.node_one.assign(m, std::vector<double>(cells, 0.0));
    if (tally.identically_zero) return tally;

    const std::uint32_t configs = 1u << m;
    for (std::uint32_t mask = 0; mask < configs; ++mask) {
        for (int k = 0; k < m; ++k) sigma[tally.unobserved[k]] = (mask >> k) & 1u;
        int a = 0, b = 0;
        bool admissible = true;
        for (int i : active) {
            int gamma = 0;
            for (int j : net.adjacency[i]) gamma |= sigma[j];
            if (gamma) {
                if (sigma[i]) ++a;
                else ++b;
            } else if (sigma[i]) {
                admissible = false; // hard constraint: a perturbed node must be exposed
                break;
            }
        }
        if (!admissible) continue;
        tally.at(tally.total, a, b) += 1.0;
        for (int k = 0; k < m; ++k) {
            auto& table = ((mask >> k) & 1u) ? tally.node_one[k] : tally.node_zero[k];
            tally.at(table, a, b) += 1.0;
        }
    }
    return tally;
}

inline ExactMarginals marginals_from_tally(const ExposureTally& tally, const Network& net,
                                           const Observation& obs, double eta) {
    const auto state = obs.dense(net.node_count);
    const double z = tally.poly(tally.total, eta);
    if (tally.identically_zero || z == 0.0)
        throw std::runtime_error("all configurations have zero weight");

    ExactMarginals out;
    out.eta = eta;
    out.unobserved = tally.unobserved;
    out.p_unperturbed.assign(net.node_count, 0.0);
    for (int i = 0; i < net.node_count; ++i)
        if (state[i] != kUnobserved) out.p_unperturbed[i] = state[i] ? 0.0 : 1.0;
    for (size_t k = 0; k < tally.unobserved.size(); ++k)
        out.p_unperturbed[tally.unobserved[k]] = tally.poly(tally.node_zero[k], eta) / z;

    double const_log = 0.0;
    if (tally.const_a > 0) const_log += tally.const_a * std::log(eta);
    if (tally.const_b > 0) const_log += tally.const_b * std::log1p(-eta);
    out.partition_log_weight = std::log(z) + const_log;
    out.partition_weight = std::exp(out.partition_log_weight);
    return out;
}

} // namespace detail

// Exact P(s_i = 0 | observation, eta) for every unobserved node, by
// enumeration of all 2^M completions.
inline ExactMarginals exact_marginals_at_eta(const Network& net, const Observation& obs,
                                             double eta,
                                             FactorScope scope = FactorScope::AllNodes) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must be in [0,1]");
    const auto tally = detail::enumerate_completions(net, obs, scope);
    auto out = detail::marginals_from_tally(tally, net, obs, eta);
    out.eta_grid_opt = eta;
    return out;
}

// Grid search over {step, 2*step, ..., 1-step} for the eta maximizing the
// total weight; ties broken toward smaller eta. Returns the marginals there.
inline ExactMarginals exact_eta_opt(const Network& net, const Observation& obs,
                                    double grid_step = 1e-3,
                                    FactorScope scope = FactorScope::AllNodes) {
    if (!(grid_step > 0.0 && grid_step <= 0.01))
        throw std::invalid_argument("grid_step must be in (0, 0.01]");
    const auto tally = detail::enumerate_completions(net, obs, scope);
    if (tally.identically_zero) throw std::runtime_error("all configurations have zero weight");

    double best_eta = 0.0;
    double best_log = -std::numeric_limits<double>::infinity();
    const int steps = static_cast<int>(std::floor(1.0 / grid_step + 0.5));
    for (int k = 1; k < steps; ++k) {
        const double eta = k * grid_step;
        const double s = tally.poly(tally.total, eta);
        if (s == 0.0) continue;
        double log_z = std::log(s);
        if (tally.const_a > 0) log_z += tally.const_a * std::log(eta);
        if (tally.const_b > 0) log_z += tally.const_b * std::log1p(-eta);
        if (log_z > best_log) {
            best_log = log_z;
            best_eta = eta;
        }
    }
    if (best_log == -std::numeric_limits<double>::infinity())
        throw std::runtime_error("all configurations have zero weight");
    auto out = detail::marginals_from_tally(tally, net, obs, best_eta);
    out.eta_grid_opt = best_eta;
    return out;
}

} // namespace exposure
