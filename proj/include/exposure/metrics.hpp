#pragma once

// Ranking evaluation: AUC with the half-credit tie rule, Spearman rank
// correlation, and the hold-out protocol over an existing observation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "exposure/observation.hpp"
#include "exposure/score.hpp"

namespace exposure {

struct EvaluationSet {
    std::vector<int> positives; // true perturbed, unobserved
    std::vector<int> negatives; // true unperturbed, unobserved
};

// Unobserved nodes split by ground truth; the comparison population for AUC.
inline EvaluationSet make_evaluation_set(const std::vector<std::uint8_t>& truth,
                                         const Observation& obs) {
    const int n = static_cast<int>(truth.size());
    std::vector<char> observed(n, 0);
    for (int node : obs.nodes) observed[node] = 1;
    EvaluationSet out;
    for (int i = 0; i < n; ++i) {
        if (observed[i]) continue;
        (truth[i] ? out.positives : out.negatives).push_back(i);
    }
    return out;
}

// Midranks over the pooled values: average 1-based rank within each tie run.
inline std::vector<double> midranks(const std::vector<double>& values) {
    const int n = static_cast<int>(values.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return values[a] < values[b]; });
    std::vector<double> rank(n);
    int i = 0;
    while (i < n) {
        int j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double r = 0.5 * (i + j) + 1.0; // average of ranks i+1 .. j+1
        for (int k = i; k <= j; ++k) rank[order[k]] = r;
        i = j + 1;
    }
    return rank;
}

// Frequency with which a true perturbed node outranks a true unperturbed one,
// ties counted half. Rank-based Mann-Whitney form, O(m log m).
inline double auc(const ScoreVector& scores, const EvaluationSet& eval) {
    const auto np = eval.positives.size();
    const auto nn = eval.negatives.size();
    if (np == 0 || nn == 0) throw std::runtime_error("AUC undefined");

    std::vector<double> pooled;
    pooled.reserve(np + nn);
    for (int v : eval.positives) pooled.push_back(scores.score[v]);
    for (int v : eval.negatives) pooled.push_back(scores.score[v]);
    const auto rank = midranks(pooled);
    double rank_sum = 0.0;
    for (size_t k = 0; k < np; ++k) rank_sum += rank[k];
    const double u = rank_sum - 0.5 * np * (np + 1);
    return u / (static_cast<double>(np) * static_cast<double>(nn));
}

// Pearson correlation of midranks; NaN when either side has zero variance.
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("spearman needs two equal-length vectors, size >= 2");
    const auto rx = midranks(x);
    const auto ry = midranks(y);
    const int n = static_cast<int>(x.size());
    double mx = 0.0, my = 0.0;
    for (int i = 0; i < n; ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (int i = 0; i < n; ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return sxy / std::sqrt(sxx * syy);
}

struct HoldoutSplit {
    Observation reduced;
    EvaluationSet eval;
};

// Moves floor(hide_fraction * |O|) observed nodes (with their true states)
// into the evaluation set; redraws seed-deterministically until the set holds
// at least one node of each class, up to 100 attempts.
inline HoldoutSplit holdout_split(const Observation& obs, double hide_fraction,
                                  std::uint64_t seed) {
    if (!(hide_fraction > 0.0 && hide_fraction < 1.0))
        throw std::invalid_argument("hide_fraction must be in (0,1)");
    if (obs.empty()) throw std::invalid_argument("observation is empty");
    const int total = obs.size();
    const int hide = static_cast<int>(hide_fraction * total);
    if (hide == 0) throw std::runtime_error("hold-out hides zero nodes");

    std::mt19937_64 rng(seed);
    std::vector<int> idx(total);
    for (int attempt = 0; attempt < 100; ++attempt) {
        std::iota(idx.begin(), idx.end(), 0);
        for (int k = 0; k < hide; ++k) {
            const int j = k + static_cast<int>(rng() % static_cast<std::uint64_t>(total - k));
            std::swap(idx[k], idx[j]);
        }
        HoldoutSplit out;
        for (int k = 0; k < hide; ++k) {
            const int node = obs.nodes[idx[k]];
            (obs.states[idx[k]] ? out.eval.positives : out.eval.negatives).push_back(node);
        }
        if (out.eval.positives.empty() || out.eval.negatives.empty()) continue;
        std::vector<std::pair<int, std::uint8_t>> kept;
        for (int k = hide; k < total; ++k)
            kept.emplace_back(obs.nodes[idx[k]], obs.states[idx[k]]);
        out.reduced = make_observation(std::move(kept));
        std::sort(out.eval.positives.begin(), out.eval.positives.end());
        std::sort(out.eval.negatives.begin(), out.eval.negatives.end());
        return out;
    }
    throw std::runtime_error(
        "hold-out could not produce both classes in the evaluation set (100 attempts)");
}

inline double mean(const std::vector<double>& v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

inline double standard_error(const std::vector<double>& v) {
    const int n = static_cast<int>(v.size());
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / (n - 1)) / std::sqrt(static_cast<double>(n));
}

} // namespace exposure
