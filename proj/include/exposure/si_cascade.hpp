#pragma once

// Ground-truth perturbation generators: susceptible-infected spreading with a
// homogeneous or heterogeneous (per-attempt) transmission probability, plus
// masking of outcomes into partial observations.

#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <queue>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "exposure/network.hpp"
#include "exposure/observation.hpp"

namespace exposure {

enum class CascadeMode { Homogeneous, Heterogeneous };

struct CascadeParams {
    CascadeMode mode = CascadeMode::Homogeneous;
    double c = 0.0;     // homogeneous transmission probability
    double lower = 0.0; // heterogeneous range [lower, upper]
    double upper = 0.0;
};

struct PerturbationOutcome {
    std::vector<std::uint8_t> state; // 1 = perturbed
    int root = -1;
    CascadeParams params;
    std::uint64_t seed = 0;
    long attempts = 0; // transmission attempts made (one per attacked edge)

    int perturbed_count() const {
        int n = 0;
        for (auto s : state) n += s;
        return n;
    }
};

using AttemptLog = std::vector<std::pair<int, int>>; // ordered (attacker, target)

namespace detail {

// FIFO frontier; each ordered (attacker, target) pair is attempted at most
// once, and only while the target is still unperturbed. The final-set
// distribution is order-independent; FIFO pins per-seed determinism.
template <typename DrawProb>
PerturbationOutcome run_cascade(const Network& net, CascadeParams params, std::uint64_t seed,
                                std::optional<int> root, DrawProb&& draw_prob,
                                AttemptLog* attempt_log) {
    if (net.node_count == 0) throw std::invalid_argument("empty network");
    std::mt19937_64 rng(seed);

    int r;
    if (root) {
        r = *root;
        if (r < 0 || r >= net.node_count) throw std::invalid_argument("root out of range");
    } else {
        r = static_cast<int>(rng() % static_cast<std::uint64_t>(net.node_count));
    }

    PerturbationOutcome out;
    out.state.assign(net.node_count, 0);
    out.root = r;
    out.params = params;
    out.seed = seed;

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::queue<int> frontier;
    out.state[r] = 1;
    frontier.push(r);
    while (!frontier.empty()) {
        const int u = frontier.front();
        frontier.pop();
        for (int v : net.adjacency[u]) {
            if (out.state[v]) continue;
            ++out.attempts;
            if (attempt_log) attempt_log->emplace_back(u, v);
            const double p = draw_prob(rng);
            if (unit(rng) < p) {
                out.state[v] = 1;
                frontier.push(v);
            }
        }
    }
    return out;
}

} // namespace detail

inline PerturbationOutcome simulate_si_homogeneous(const Network& net, double c,
                                                   std::uint64_t seed,
                                                   std::optional<int> root = std::nullopt,
                                                   AttemptLog* attempt_log = nullptr) {
    if (!(c >= 0.0 && c <= 1.0)) throw std::invalid_argument("c must be in [0,1]");
    CascadeParams params;
    params.mode = CascadeMode::Homogeneous;
    params.c = c;
    return detail::run_cascade(net, params, seed, root,
                               [c](std::mt19937_64&) { return c; }, attempt_log);
}

// One uniform draw of the transmission probability per attempted edge.
inline PerturbationOutcome simulate_si_heterogeneous(const Network& net, double lower,
                                                     double upper, std::uint64_t seed,
                                                     std::optional<int> root = std::nullopt,
                                                     AttemptLog* attempt_log = nullptr) {
    if (!(lower >= 0.0 && lower <= upper && upper <= 1.0))
        throw std::invalid_argument("propagation range must satisfy 0 <= l <= u <= 1");
    CascadeParams params;
    params.mode = CascadeMode::Heterogeneous;
    params.lower = lower;
    params.upper = upper;
    std::uniform_real_distribution<double> range(lower, upper);
    return detail::run_cascade(net, params, seed, root,
                               [range](std::mt19937_64& rng) mutable { return range(rng); },
                               attempt_log);
}

// Observes floor(fraction * N) nodes: uniformly without replacement, or, when
// bias is given, by successive draws with weight `bias` for perturbed nodes
// versus 1 for unperturbed.
inline Observation mask_observation(const PerturbationOutcome& outcome, double fraction_observed,
                                    std::uint64_t seed, std::optional<double> bias = std::nullopt) {
    const int n = static_cast<int>(outcome.state.size());
    if (!(fraction_observed > 0.0 && fraction_observed <= 1.0))
        throw std::invalid_argument("fraction_observed must be in (0,1]");
    const int take = static_cast<int>(fraction_observed * n);
    if (take == 0) throw std::invalid_argument("empty observation");
    if (bias && !(*bias > 0.0)) throw std::invalid_argument("bias must be positive");

    std::mt19937_64 rng(seed);
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i;

    std::vector<std::pair<int, std::uint8_t>> picked;
    picked.reserve(take);
    if (!bias) {
        // partial Fisher-Yates
        for (int k = 0; k < take; ++k) {
            const int j = k + static_cast<int>(rng() % static_cast<std::uint64_t>(n - k));
            std::swap(pool[k], pool[j]);
            picked.emplace_back(pool[k], outcome.state[pool[k]]);
        }
    } else {
        std::vector<double> weight(n);
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            weight[i] = outcome.state[i] ? *bias : 1.0;
            total += weight[i];
        }
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        int remaining = n;
        for (int k = 0; k < take; ++k) {
            double target = unit(rng) * total;
            int chosen = remaining - 1;
            for (int idx = 0; idx < remaining; ++idx) {
                target -= weight[pool[idx]];
                if (target < 0.0) {
                    chosen = idx;
                    break;
                }
            }
            const int node = pool[chosen];
            picked.emplace_back(node, outcome.state[node]);
            total -= weight[node];
            pool[chosen] = pool[--remaining];
        }
    }
    return make_observation(std::move(picked));
}

inline std::string cascade_params_string(const CascadeParams& p) {
    char buf[80];
    if (p.mode == CascadeMode::Homogeneous) {
        std::snprintf(buf, sizeof(buf), "mode=homogeneous c=%.9g", p.c);
    } else {
        std::snprintf(buf, sizeof(buf), "mode=heterogeneous l=%.9g u=%.9g", p.lower, p.upper);
    }
    return buf;
}

// One line per node, "node_label<TAB>0|1", with a header comment recording
// mode, parameters, root, and seed.
inline void write_outcome(const PerturbationOutcome& outcome, const Network& net,
                          std::ostream& out) {
    out << "# " << cascade_params_string(outcome.params) << " root=" << net.label_of(outcome.root)
        << " seed=" << outcome.seed << '\n';
    for (int i = 0; i < net.node_count; ++i)
        out << net.label_of(i) << '\t' << int(outcome.state[i]) << '\n';
}

} // namespace exposure
