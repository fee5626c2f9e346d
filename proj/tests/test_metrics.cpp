#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "exposure/metrics.hpp"
#include "exposure/network.hpp"
#include "test_support.hpp"

using namespace exposure;

namespace {

ScoreVector scores_of(std::vector<double> v) {
    ScoreVector s;
    s.score = std::move(v);
    return s;
}

} // namespace

TEST_CASE("AUC separates a perfect ranking") {
    const auto s = scores_of({0.9, 0.1});
    EvaluationSet eval{{0}, {1}};
    REQUIRE(auc(s, eval) == 1.0);
}

TEST_CASE("AUC gives half credit to an all-tied ranking") {
    const auto s = scores_of({0.4, 0.4, 0.4, 0.4});
    EvaluationSet eval{{0, 1}, {2, 3}};
    REQUIRE(auc(s, eval) == 0.5);
}

TEST_CASE("AUC matches the enumerated pair count on the worked example") {
    // pairs: (0.8,0.6)=1 (0.8,0.1)=1 (0.2,0.6)=0 (0.2,0.1)=1 -> 3/4
    const auto s = scores_of({0.8, 0.2, 0.6, 0.1});
    EvaluationSet eval{{0, 1}, {2, 3}};
    REQUIRE(auc(s, eval) == 0.75);
    REQUIRE(auc(s, eval) == testsupport::brute_force_auc(s, eval));
}

TEST_CASE("AUC requires both classes") {
    const auto s = scores_of({0.8, 0.2});
    REQUIRE_THROWS_WITH(auc(s, EvaluationSet{{0, 1}, {}}),
                        Catch::Matchers::ContainsSubstring("AUC undefined"));
    REQUIRE_THROWS_WITH(auc(s, EvaluationSet{{}, {0, 1}}),
                        Catch::Matchers::ContainsSubstring("AUC undefined"));
}

TEST_CASE("rank-based AUC equals the brute-force pair count exactly") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const int np = 1 + int(rng() % 30);
        const int nn = 1 + int(rng() % 30);
        std::vector<double> values(np + nn);
        // coarse value grid engineers plenty of ties
        for (auto& v : values) v = double(rng() % 8) / 7.0;
        EvaluationSet eval;
        for (int i = 0; i < np; ++i) eval.positives.push_back(i);
        for (int i = np; i < np + nn; ++i) eval.negatives.push_back(i);
        const auto s = scores_of(values);
        REQUIRE(auc(s, eval) == testsupport::brute_force_auc(s, eval));
    }
}

TEST_CASE("AUC is invariant under strictly increasing transformations") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        const int np = 1 + int(rng() % 10), nn = 1 + int(rng() % 10);
        std::vector<double> values(np + nn);
        for (auto& v : values) v = double(rng() % 100) / 99.0;
        EvaluationSet eval;
        for (int i = 0; i < np; ++i) eval.positives.push_back(i);
        for (int i = np; i < np + nn; ++i) eval.negatives.push_back(i);
        const double base = auc(scores_of(values), eval);

        auto affine = values;
        for (auto& v : affine) v = 3.5 * v + 2.0;
        REQUIRE(auc(scores_of(affine), eval) == base);

        auto cubic = values;
        for (auto& v : cubic) v = v * v * v;
        REQUIRE(auc(scores_of(cubic), eval) == base);
    }
}

TEST_CASE("AUC complementarity without ties") {
    std::mt19937_64 rng(17);
    std::vector<double> values;
    for (int i = 0; i < 20; ++i) values.push_back(i * 0.05 + double(rng() % 100) * 1e-6);
    EvaluationSet eval;
    for (int i = 0; i < 8; ++i) eval.positives.push_back(i);
    for (int i = 8; i < 20; ++i) eval.negatives.push_back(i);
    auto negated = values;
    for (auto& v : negated) v = -v;
    REQUIRE(auc(scores_of(values), eval) + auc(scores_of(negated), eval) == 1.0);
}

TEST_CASE("evaluation sets split the unobserved nodes by ground truth") {
    std::vector<std::uint8_t> truth{1, 0, 1, 0, 1};
    const auto obs = make_observation({{0, 1}, {3, 0}});
    const auto eval = make_evaluation_set(truth, obs);
    REQUIRE(eval.positives == std::vector<int>{2, 4});
    REQUIRE(eval.negatives == std::vector<int>{1});
}

TEST_CASE("holdout_split moves the requested count into the evaluation set") {
    std::vector<std::pair<int, std::uint8_t>> entries;
    for (int i = 0; i < 10; ++i) entries.emplace_back(i, i < 4 ? 1 : 0);
    const auto obs = make_observation(std::move(entries));
    const auto split = holdout_split(obs, 0.3, 99);
    REQUIRE(split.reduced.size() == 7);
    REQUIRE(split.eval.positives.size() + split.eval.negatives.size() == 3);
    REQUIRE(!split.eval.positives.empty());
    REQUIRE(!split.eval.negatives.empty());

    // hidden and kept nodes partition the observation
    std::vector<int> all;
    all.insert(all.end(), split.reduced.nodes.begin(), split.reduced.nodes.end());
    all.insert(all.end(), split.eval.positives.begin(), split.eval.positives.end());
    all.insert(all.end(), split.eval.negatives.begin(), split.eval.negatives.end());
    std::sort(all.begin(), all.end());
    REQUIRE(all == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
}

TEST_CASE("holdout_split fails when a class is unavailable") {
    std::vector<std::pair<int, std::uint8_t>> entries;
    for (int i = 0; i < 10; ++i) entries.emplace_back(i, 0); // all unperturbed
    const auto obs = make_observation(std::move(entries));
    REQUIRE_THROWS_WITH(holdout_split(obs, 0.5, 3),
                        Catch::Matchers::ContainsSubstring("both classes"));
}

TEST_CASE("holdout_split with a metabolic-shaped observation") {
    // 103 observed: 19 perturbed, 84 unperturbed; hide half
    std::vector<std::pair<int, std::uint8_t>> entries;
    for (int i = 0; i < 103; ++i) entries.emplace_back(i, i < 19 ? 1 : 0);
    const auto obs = make_observation(std::move(entries));
    const auto split = holdout_split(obs, 0.5, 42);
    REQUIRE(split.eval.positives.size() + split.eval.negatives.size() == 51);
    REQUIRE(split.reduced.size() == 52);
    REQUIRE(!split.eval.positives.empty());
    REQUIRE(!split.eval.negatives.empty());
}

TEST_CASE("holdout_split replays deterministically") {
    std::vector<std::pair<int, std::uint8_t>> entries;
    for (int i = 0; i < 20; ++i) entries.emplace_back(i, i % 3 == 0 ? 1 : 0);
    const auto obs = make_observation(std::move(entries));
    const auto a = holdout_split(obs, 0.4, 7);
    const auto b = holdout_split(obs, 0.4, 7);
    REQUIRE(a.reduced.nodes == b.reduced.nodes);
    REQUIRE(a.eval.positives == b.eval.positives);
    REQUIRE(a.eval.negatives == b.eval.negatives);
}

TEST_CASE("spearman recovers monotone association and flags degeneracy") {
    REQUIRE(spearman({1, 2, 3, 4}, {10, 20, 30, 40}) == Catch::Approx(1.0));
    REQUIRE(spearman({1, 2, 3, 4}, {9, 7, 5, 3}) == Catch::Approx(-1.0));
    REQUIRE(std::isnan(spearman({1, 1, 1}, {1, 2, 3})));
    // hand value: ranks x = 1,2,3 vs y = 2,1,3 -> rho = 1 - 6*2/(3*8) = 0.5
    REQUIRE(spearman({1, 2, 3}, {5, 4, 9}) == Catch::Approx(0.5));
}

TEST_CASE("scores serialize with nine significant digits and a method header") {
    REQUIRE(format_score(1.0 / 3.0) == "0.333333333");
    REQUIRE(format_score(0.5) == "0.5");
    REQUIRE(format_score(1.0) == "1");
    const auto net = parse_edge_list("a b").net;
    ScoreVector s;
    s.score = {2.0 / 3.0, 0.25};
    s.method_tag = "exposure";
    std::ostringstream out;
    write_scores(s, net, out);
    REQUIRE(out.str() == "# method=exposure\na\t0.666666667\nb\t0.25\n");
}

TEST_CASE("mean and standard error basics") {
    std::vector<double> v{1.0, 2.0, 3.0, 4.0};
    REQUIRE(mean(v) == Catch::Approx(2.5));
    // sd = sqrt(5/3), se = sd/2
    REQUIRE(standard_error(v) == Catch::Approx(std::sqrt(5.0 / 3.0) / 2.0));
}
