#pragma once

// Comparator methods: shortest-paths (parsimony) node ranking and clamped
// label propagation to the harmonic fixed point.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "exposure/network.hpp"
#include "exposure/observation.hpp"
#include "exposure/score.hpp"

namespace exposure {

// score(v) = number of observed-perturbed pairs (s,t) for which v lies on at
// least one shortest s-t path, i.e. d(s,v) + d(v,t) = d(s,t). Unreachable
// pairs are skipped. Pair-coverage counts give AUC more resolution than the
// binary membership they contain (threshold at >= 1 to recover it).
inline ScoreVector shortest_path_scores(const Network& net, const Observation& obs) {
    std::vector<int> perturbed;
    for (int k = 0; k < obs.size(); ++k)
        if (obs.states[k]) perturbed.push_back(obs.nodes[k]);
    if (perturbed.empty()) throw std::runtime_error("parsimony undefined");

    std::vector<std::vector<int>> dist;
    dist.reserve(perturbed.size());
    for (int s : perturbed) dist.push_back(bfs_distances(net, s));

    ScoreVector out;
    out.method_tag = "shortest_paths";
    out.score.assign(net.node_count, 0.0);
    const int p = static_cast<int>(perturbed.size());
    for (int a = 0; a < p; ++a) {
        for (int b = a + 1; b < p; ++b) {
            const int d_ab = dist[a][perturbed[b]];
            if (d_ab == kUnreachable) continue;
            for (int v = 0; v < net.node_count; ++v) {
                if (dist[a][v] == kUnreachable || dist[b][v] == kUnreachable) continue;
                if (dist[a][v] + dist[b][v] == d_ab) out.score[v] += 1.0;
            }
        }
    }
    return out;
}

// Observed nodes clamped to their state; every unobserved score repeatedly
// replaced by the arithmetic mean of its neighbors' scores (from 0.5) until
// the L-inf change drops below tolerance. Nodes in components without any
// observed node stay at 0.5; degree-0 nodes keep their value.
inline ScoreVector label_propagation_scores(const Network& net, const Observation& obs,
                                            double tolerance = 1e-7, int max_iters = 10000,
                                            bool* converged = nullptr) {
    if (obs.empty()) throw std::runtime_error("label propagation requires at least one observed node");
    const auto state = obs.dense(net.node_count);

    std::vector<double> cur(net.node_count, 0.5), nxt(net.node_count);
    for (int i = 0; i < net.node_count; ++i)
        if (state[i] != kUnobserved) cur[i] = state[i] ? 1.0 : 0.0;

    bool ok = false;
    for (int it = 0; it < max_iters; ++it) {
        double max_change = 0.0;
        for (int i = 0; i < net.node_count; ++i) {
            if (state[i] != kUnobserved || net.degree(i) == 0) {
                nxt[i] = cur[i];
                continue;
            }
            double sum = 0.0;
            for (int j : net.adjacency[i]) sum += cur[j];
            nxt[i] = sum / net.degree(i);
            max_change = std::max(max_change, std::abs(nxt[i] - cur[i]));
        }
        cur.swap(nxt);
        if (max_change < tolerance) {
            ok = true;
            break;
        }
    }
    if (converged) *converged = ok;

    ScoreVector out;
    out.method_tag = "label_propagation";
    out.score = std::move(cur);
    return out;
}

} // namespace exposure
