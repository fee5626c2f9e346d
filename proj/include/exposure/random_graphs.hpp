#pragma once

// Seeded generators for the synthetic networks used in tests and experiments.

#include <cstdint>
#include <random>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "exposure/network.hpp"

namespace exposure {

// G(n, m): m distinct edges drawn uniformly over unordered pairs.
inline Network erdos_renyi_gnm(int n, long m, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("need at least 2 nodes");
    const long max_edges = static_cast<long>(n) * (n - 1) / 2;
    if (m < 0 || m > max_edges) throw std::invalid_argument("edge count out of range");
    std::mt19937_64 rng(seed);
    std::set<std::pair<int, int>> chosen;
    std::uniform_int_distribution<int> pick(0, n - 1);
    while (static_cast<long>(chosen.size()) < m) {
        int a = pick(rng), b = pick(rng);
        if (a == b) continue;
        chosen.emplace(std::min(a, b), std::max(a, b));
    }
    return make_network(n, {chosen.begin(), chosen.end()});
}

inline Network erdos_renyi_mean_degree(int n, double mean_degree, std::uint64_t seed) {
    const long m = static_cast<long>(mean_degree * n / 2.0 + 0.5);
    return erdos_renyi_gnm(n, m, seed);
}

// Random recursive tree: node k attaches to a uniform earlier node.
inline Network random_tree(int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("need at least 1 node");
    std::mt19937_64 rng(seed);
    std::vector<std::pair<int, int>> edges;
    edges.reserve(n - 1);
    for (int k = 1; k < n; ++k) {
        const int parent = static_cast<int>(rng() % static_cast<std::uint64_t>(k));
        edges.emplace_back(parent, k);
    }
    return make_network(n, std::move(edges));
}

} // namespace exposure
