#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "forge/bidegree.hpp"
#include "forge/degree_dist.hpp"
#include "forge/errors.hpp"
#include "forge/rng.hpp"

using forge::BiDegreeSample;
using forge::IncrementSide;
using forge::Rng;
using forge::SamplerParams;

TEST_CASE("delta_threshold is n to the power 1 - kappa + delta0") {
    CHECK(forge::delta_threshold(10000, 0.5, 0.25) ==
          doctest::Approx(1000.0).epsilon(1e-12));
    CHECK(forge::delta_threshold(1, 0.3, 0.1) ==
          doctest::Approx(1.0).epsilon(1e-15));
    // 256^(5/6), frozen from direct exponentiation
    CHECK(forge::delta_threshold(256, 1.0 / 3.0, 1.0 / 6.0) ==
          doctest::Approx(101.593667325964788).epsilon(1e-12));
}

TEST_CASE("choose_without_replacement edge cases") {
    Rng rng(1);
    CHECK(forge::choose_without_replacement(5, 0, rng).empty());

    auto full = forge::choose_without_replacement(5, 5, rng);
    std::sort(full.begin(), full.end());
    CHECK(full == std::vector<std::int64_t>{0, 1, 2, 3, 4});

    CHECK_THROWS_AS(forge::choose_without_replacement(3, 4, rng),
                    forge::ConfigError);
}

TEST_CASE("choose_without_replacement draws uniform subsets") {
    Rng rng(2024);
    std::map<std::pair<std::int64_t, std::int64_t>, int> counts;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        auto pick = forge::choose_without_replacement(4, 2, rng);
        REQUIRE(pick.size() == 2);
        REQUIRE(pick[0] != pick[1]);
        std::sort(pick.begin(), pick.end());
        ++counts[{pick[0], pick[1]}];
    }
    CHECK(counts.size() == 6);
    for (const auto& [pair, c] : counts) {
        const double freq = static_cast<double>(c) / draws;
        CHECK(freq > 1.0 / 6.0 - 0.01);
        CHECK(freq < 1.0 / 6.0 + 0.01);
    }
}

TEST_CASE("equalize_sums hand trace: surplus on the in side") {
    Rng rng(9);
    auto sample = forge::equalize_sums({2, 0, 1}, {0, 1, 0}, rng);
    const auto& diag = sample.diagnostics;
    CHECK(diag.raw_in_sum == 3);
    CHECK(diag.raw_out_sum == 1);
    CHECK(diag.delta == 2);
    CHECK(diag.incremented_side == IncrementSide::out_side);
    REQUIRE(diag.incremented_nodes.size() == 2);
    CHECK(diag.incremented_nodes[0] != diag.incremented_nodes[1]);

    // in-degrees untouched, out-degrees gained one unit at the chosen nodes
    CHECK(sample.sequence.in_degrees == std::vector<std::int64_t>{2, 0, 1});
    const auto out_total = std::accumulate(sample.sequence.out_degrees.begin(),
                                           sample.sequence.out_degrees.end(),
                                           std::int64_t{0});
    CHECK(out_total == 3);
    CHECK(sample.sequence.total == 3);
}

TEST_CASE("equalize_sums with deficit increments the in side") {
    Rng rng(10);
    auto sample = forge::equalize_sums({0, 0}, {1, 1}, rng);
    CHECK(sample.diagnostics.delta == -2);
    CHECK(sample.diagnostics.incremented_side == IncrementSide::in_side);
    CHECK(sample.sequence.in_degrees == std::vector<std::int64_t>{1, 1});
    CHECK(sample.sequence.out_degrees == std::vector<std::int64_t>{1, 1});
    CHECK(sample.sequence.total == 2);

    // more increments needed than there are nodes
    CHECK_THROWS_AS(forge::equalize_sums({0, 0}, {2, 2}, rng),
                    forge::ConfigError);

    Rng rng2(11);
    auto balanced = forge::equalize_sums({1, 1}, {0, 2}, rng2);
    CHECK(balanced.diagnostics.delta == 0);
    CHECK(balanced.diagnostics.incremented_side == IncrementSide::none);
    CHECK(balanced.diagnostics.incremented_nodes.empty());
}

TEST_CASE("point mass at 1 gives the all-ones sequence with no increments") {
    const auto point = forge::make_empirical({0, 1});
    Rng rng(3);
    const auto sample = forge::sample_bidegree(point, point, 50, {}, rng);
    CHECK(sample.sequence.in_degrees ==
          std::vector<std::int64_t>(50, 1));
    CHECK(sample.sequence.out_degrees ==
          std::vector<std::int64_t>(50, 1));
    CHECK(sample.sequence.total == 50);
    CHECK(sample.diagnostics.delta == 0);
    CHECK(sample.diagnostics.incremented_nodes.empty());
    CHECK(sample.diagnostics.resamples_used == 0);
}

TEST_CASE("sampler validates its inputs") {
    const auto pois2 = forge::make_poisson(2.0);
    const auto pois3 = forge::make_poisson(3.0);
    Rng rng(1);
    CHECK_THROWS_AS(forge::sample_bidegree(pois2, pois3, 10, {}, rng),
                    forge::MeanMismatch);
    CHECK_THROWS_AS(forge::sample_bidegree(pois2, pois2, 0, {}, rng),
                    forge::ConfigError);

    SamplerParams bad;
    bad.delta0 = 0.7; // kappa is 0.5 here
    CHECK_THROWS_AS(forge::sample_bidegree(pois2, pois2, 10, bad, rng),
                    forge::ConfigError);
    bad.delta0 = 0.0;
    CHECK_THROWS_AS(forge::sample_bidegree(pois2, pois2, 10, bad, rng),
                    forge::ConfigError);

    SamplerParams loose;
    loose.mean_tolerance = 2.0; // lets the mismatched pair past validation
    Rng rng2(1);
    // the balance gate takes over the rejecting: the sum gap grows like n
    // while the gate only admits n^0.75
    CHECK_THROWS_AS(forge::sample_bidegree(pois2, pois3, 200, loose, rng2),
                    forge::RetryExhausted);
    // at n = 2 the gate admits |delta| <= 1, which lucky draws reach
    Rng rng3(1);
    const auto s = forge::sample_bidegree(pois2, pois3, 2, loose, rng3);
    CHECK(s.sequence.total >= 0);
}

TEST_CASE("mean mismatch error message names the means") {
    const auto pois2 = forge::make_poisson(2.0);
    const auto pois3 = forge::make_poisson(3.0);
    Rng rng(1);
    try {
        forge::sample_bidegree(pois2, pois3, 10, {}, rng);
        FAIL("expected MeanMismatch");
    } catch (const forge::MeanMismatch& e) {
        CHECK(std::string(e.what()).find("mean") != std::string::npos);
        CHECK(e.in_mean == doctest::Approx(2.0));
        CHECK(e.out_mean == doctest::Approx(3.0));
    }
}

TEST_CASE("accepted samples satisfy the structural invariants") {
    const auto pois = forge::make_poisson(2.0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::int64_t n = 300;
        Rng trial_rng = Rng::stream(500, static_cast<std::uint64_t>(trial));
        const auto sample = forge::sample_bidegree(pois, pois, n, {}, trial_rng);
        const auto& seq = sample.sequence;
        const auto& diag = sample.diagnostics;

        const auto in_total = std::accumulate(seq.in_degrees.begin(),
                                              seq.in_degrees.end(),
                                              std::int64_t{0});
        const auto out_total = std::accumulate(seq.out_degrees.begin(),
                                               seq.out_degrees.end(),
                                               std::int64_t{0});
        REQUIRE(in_total == out_total);
        REQUIRE(in_total == seq.total);

        // the accepted draw obeys the gate
        const double threshold = forge::delta_threshold(n, 0.5, 0.25);
        REQUIRE(static_cast<double>(std::llabs(diag.delta)) <= threshold);

        // increments: |nodes| = |delta|, all distinct, correct side
        REQUIRE(static_cast<std::int64_t>(diag.incremented_nodes.size()) ==
                std::llabs(diag.delta));
        std::set<std::int64_t> unique(diag.incremented_nodes.begin(),
                                      diag.incremented_nodes.end());
        REQUIRE(unique.size() == diag.incremented_nodes.size());
        if (diag.delta > 0)
            REQUIRE(diag.incremented_side == IncrementSide::out_side);
        if (diag.delta < 0)
            REQUIRE(diag.incremented_side == IncrementSide::in_side);

        // raw sums plus the top-up reconstruct the final sums
        const auto surplus = std::llabs(diag.delta);
        REQUIRE(seq.total == std::max(diag.raw_in_sum, diag.raw_out_sum));
        REQUIRE(diag.raw_in_sum + (diag.delta < 0 ? surplus : 0) == seq.total);
        REQUIRE(diag.raw_out_sum + (diag.delta > 0 ? surplus : 0) == seq.total);
    }
}

TEST_CASE("each node is perturbed by at most one unit and only on one side") {
    // Reconstruct the raw draws by replaying the rng: the sampler consumes
    // n in-draws then n out-draws from the same stream before equalizing.
    const auto pois = forge::make_poisson(2.0);
    const std::int64_t n = 1000;
    Rng rng(808);
    const auto sample = forge::sample_bidegree(pois, pois, n, {}, rng);
    REQUIRE(sample.diagnostics.resamples_used == 0);

    Rng replay(808);
    std::vector<std::int64_t> gamma(n), xi(n);
    for (auto& g : gamma) g = pois.sample(replay);
    for (auto& x : xi) x = pois.sample(replay);

    std::int64_t touched = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        const auto din = sample.sequence.in_degrees[i] - gamma[i];
        const auto dout = sample.sequence.out_degrees[i] - xi[i];
        REQUIRE(din >= 0);
        REQUIRE(din <= 1);
        REQUIRE(dout >= 0);
        REQUIRE(dout <= 1);
        REQUIRE(din * dout == 0);
        touched += din + dout;
    }
    CHECK(touched == std::llabs(sample.diagnostics.delta));
}

TEST_CASE("retry budget exhaustion raises RetryExhausted") {
    // Distinct point masses at 1 and at 3 with a huge tolerance: every draw
    // has delta = -2n, far beyond any threshold, so every attempt fails.
    const auto ones = forge::make_empirical({0, 1});
    const auto threes = forge::make_empirical({0, 0, 0, 1});
    SamplerParams params;
    params.mean_tolerance = 10.0;
    params.max_resamples = 25;
    Rng rng(4);
    try {
        forge::sample_bidegree(ones, threes, 100, params, rng);
        FAIL("expected RetryExhausted");
    } catch (const forge::RetryExhausted& e) {
        CHECK(e.attempts == 25);
    }
}

TEST_CASE("joint degree frequencies factorize at large n") {
    const auto pois = forge::make_poisson(2.0);
    const std::int64_t n = 100000;
    Rng rng(13);
    const auto sample = forge::sample_bidegree(pois, pois, n, {}, rng);

    std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> joint;
    for (std::int64_t i = 0; i < n; ++i)
        ++joint[{sample.sequence.in_degrees[i], sample.sequence.out_degrees[i]}];

    double worst = 0;
    for (std::int64_t a = 0; a <= 8; ++a) {
        for (std::int64_t b = 0; b <= 8; ++b) {
            const double model = pois.pmf(a) * pois.pmf(b);
            if (model < 1e-3) continue;
            const auto it = joint.find({a, b});
            const double freq =
                it == joint.end()
                    ? 0.0
                    : static_cast<double>(it->second) / static_cast<double>(n);
            worst = std::max(worst, std::fabs(freq - model));
        }
    }
    CHECK(worst <= 0.01);
}

TEST_CASE("plug-in moments land near the independent-product values") {
    const auto pois = forge::make_poisson(2.0);
    const std::int64_t n = 100000;
    Rng rng(14);
    const auto sample = forge::sample_bidegree(pois, pois, n, {}, rng);
    double sum_in = 0, sum_out = 0, sum_prod = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        sum_in += static_cast<double>(sample.sequence.in_degrees[i]);
        sum_out += static_cast<double>(sample.sequence.out_degrees[i]);
        sum_prod += static_cast<double>(sample.sequence.in_degrees[i] *
                                        sample.sequence.out_degrees[i]);
    }
    const auto dn = static_cast<double>(n);
    CHECK(std::fabs(sum_in / dn - 2.0) / 2.0 <= 0.02);
    CHECK(std::fabs(sum_out / dn - 2.0) / 2.0 <= 0.02);
    CHECK(std::fabs(sum_prod / dn - 4.0) / 4.0 <= 0.02);
}
