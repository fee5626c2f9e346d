#pragma once

// Shared fixtures and independent oracles for the test suites.

#include <cstdint>
#include <random>
#include <vector>

#include "exposure/metrics.hpp"
#include "exposure/network.hpp"
#include "exposure/observation.hpp"
#include "exposure/random_graphs.hpp"
#include "exposure/si_cascade.hpp"

namespace testsupport {

// Hand-encoded 18-node demo topology: two equally short paths (1-2-3-4-5-6
// and 1-11-12-13-14-6) between the observed perturbed endpoints. The
// unobserved region 7-10 forms live detours 3-7-8-4 and 4-9-10-5 around the
// first path, while the second path carries only the pendant 16 and the
// observed unperturbed nodes 15, 17, 18.
inline exposure::Network demo_network() {
    const char* text =
        "1 2\n2 3\n3 4\n4 5\n5 6\n"
        "1 11\n11 12\n12 13\n13 14\n14 6\n"
        "3 7\n7 8\n8 4\n4 9\n9 10\n10 5\n"
        "13 16\n"
        "12 15\n16 17\n14 18\n";
    return exposure::parse_edge_list(text).net;
}

inline exposure::Observation demo_observation(const exposure::Network& net) {
    return exposure::read_observation("1\t1\n6\t1\n15\t0\n17\t0\n18\t0\n", net);
}

inline int demo_index(const exposure::Network& net, const std::string& label) {
    return net.label_index().at(label);
}

// O(|P| * |N|) pairwise AUC with the half-credit tie rule; the independent
// check for the rank-based implementation.
inline double brute_force_auc(const exposure::ScoreVector& scores,
                              const exposure::EvaluationSet& eval) {
    double total = 0.0;
    for (int p : eval.positives) {
        for (int n : eval.negatives) {
            if (scores.score[p] > scores.score[n]) total += 1.0;
            else if (scores.score[p] == scores.score[n]) total += 0.5;
        }
    }
    return total / (static_cast<double>(eval.positives.size()) *
                    static_cast<double>(eval.negatives.size()));
}

struct RandomInstance {
    exposure::Network net;
    exposure::PerturbationOutcome outcome;
    exposure::Observation obs;
};

// Random small instance with an SI-generated observation and a bounded number
// of unobserved nodes. Alternates Erdos-Renyi graphs and random trees.
inline RandomInstance random_instance(std::uint64_t seed, int max_nodes = 30,
                                      int max_unobserved = 15) {
    std::mt19937_64 rng(seed);
    const int n = 8 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_nodes - 8 + 1));
    exposure::Network net;
    if (rng() % 2 == 0) {
        const double k = 2.0 + 2.0 * (rng() % 1000) / 1000.0; // mean degree in [2,4]
        net = exposure::giant_component(exposure::erdos_renyi_mean_degree(n, k, rng())).net;
    } else {
        net = exposure::random_tree(n, rng());
    }
    const double c = 0.2 + 0.6 * (rng() % 1000) / 1000.0;
    const auto outcome = exposure::simulate_si_homogeneous(net, c, rng());
    const int hidden =
        2 + static_cast<int>(rng() % static_cast<std::uint64_t>(
                                 std::max(1, std::min(max_unobserved, net.node_count - 2) - 1)));
    const double fraction = (net.node_count - hidden + 0.5) / net.node_count;
    const auto obs = exposure::mask_observation(outcome, fraction, rng());
    return {net, outcome, obs};
}

} // namespace testsupport
