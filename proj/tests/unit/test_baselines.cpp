#include "bwd/baselines.hpp"
#include "bwd/errors.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace bwd;
using testing_support::binomial_se;
using testing_support::random_unit_rows;

namespace {

const std::vector<double> kHalf{0.5, 0.5};

Baseline make(BaselineKind kind, std::vector<double> p, std::size_t n = 100, std::size_t d = 2,
              std::uint64_t seed = 1) {
    return Baseline(kind, std::move(p), n, d, BaselineParams{}, Rng(seed));
}

// Feeds units until the counts reach the target, choosing the assignment order greedily.
void drive_to_counts(Baseline& b, std::vector<std::size_t> target) {
    const std::vector<double> x{0.0, 0.0};
    for (int guard = 0; guard < 100000; ++guard) {
        const auto c = b.counts();
        if (std::equal(c.begin(), c.end(), target.begin())) return;
        b.assign(x);
        for (std::size_t j = 0; j < target.size(); ++j)
            if (b.counts()[j] > target[j]) return;
    }
}

double l2_imbalance(BaselineKind kind, std::size_t n, std::uint64_t seed) {
    auto b = make(kind, kHalf, n, 3, seed);
    std::vector<double> w(3, 0.0);
    for (const auto& x : random_unit_rows(n, 3, seed + 17)) {
        const double eta = b.assign(x) == 1 ? 1.0 : -1.0;
        for (std::size_t j = 0; j < 3; ++j) w[j] += eta * x[j];
    }
    return std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]);
}

} // namespace

TEST_CASE("efron: fair coin on ties, under-assigned arm otherwise") {
    auto b = make(BaselineKind::Efron, kHalf);
    auto p0 = b.next_probabilities(std::vector<double>{0.0, 0.0});
    CHECK(p0[0] == doctest::Approx(0.5));
    CHECK(p0[1] == doctest::Approx(0.5));

    // reach counts (6, 4) along any sample path
    for (std::uint64_t seed = 1; seed < 200; ++seed) {
        auto e = make(BaselineKind::Efron, kHalf, 100, 2, seed);
        drive_to_counts(e, {6, 4});
        if (e.counts()[0] != 6 || e.counts()[1] != 4) continue;
        const auto p = e.next_probabilities(std::vector<double>{0.0, 0.0});
        CHECK(p[1] == doctest::Approx(2.0 / 3.0));
        CHECK(p[0] == doctest::Approx(1.0 / 3.0));
        return;
    }
    FAIL("no sample path reached counts (6, 4)");
}

TEST_CASE("efron keeps the arms within a few units") {
    auto b = make(BaselineKind::Efron, kHalf, 10000);
    const std::vector<double> x{0.0, 0.0};
    std::size_t max_gap = 0;
    for (std::size_t i = 0; i < 10000; ++i) {
        b.assign(x);
        const auto c = b.counts();
        max_gap = std::max(max_gap, c[0] > c[1] ? c[0] - c[1] : c[1] - c[0]);
    }
    CHECK(max_gap < 40);
}

TEST_CASE("smith weights by the other arms' counts") {
    for (std::uint64_t seed = 1; seed < 200; ++seed) {
        auto s = make(BaselineKind::Smith, kHalf, 100, 2, seed);
        drive_to_counts(s, {3, 1});
        if (s.counts()[0] != 3 || s.counts()[1] != 1) continue;
        const auto p = s.next_probabilities(std::vector<double>{0.0, 0.0});
        CHECK(p[0] == doctest::Approx(0.2));
        CHECK(p[1] == doctest::Approx(0.8));
        return;
    }
    FAIL("no sample path reached counts (3, 1)");
}

TEST_CASE("largest remainder quotas") {
    CHECK(largest_remainder_quotas(std::vector<double>{0.5, 0.5}, 101) == std::vector<std::size_t>{51, 50});
    CHECK(largest_remainder_quotas(std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3}, 100) ==
          std::vector<std::size_t>{34, 33, 33});
    CHECK(largest_remainder_quotas(std::vector<double>{0.2, 0.3, 0.5}, 7) == std::vector<std::size_t>{1, 2, 4});
    for (std::size_t n : {1u, 9u, 1000u, 12345u}) {
        const std::vector<double> p{0.17, 0.41, 0.42};
        const auto q = largest_remainder_quotas(p, n);
        CHECK(std::accumulate(q.begin(), q.end(), std::size_t{0}) == n);
        for (std::size_t j = 0; j < p.size(); ++j) {
            CHECK(static_cast<double>(q[j]) >= std::floor(p[j] * n));
            CHECK(static_cast<double>(q[j]) <= std::floor(p[j] * n) + 1.0);
        }
    }
}

TEST_CASE("complete randomization hits the quotas exactly") {
    const std::vector<double> p{0.2, 0.3, 0.5};
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const std::size_t n = 97;
        auto b = make(BaselineKind::Complete, p, n, 2, seed);
        const auto expected = largest_remainder_quotas(p, n);
        const std::vector<double> x{0.1, 0.2};
        for (std::size_t i = 0; i < n; ++i) {
            b.assign(x);
            for (auto left : b.remaining_quota()) CHECK(left <= n);
        }
        CHECK(std::vector<std::size_t>(b.counts().begin(), b.counts().end()) == expected);
        for (auto left : b.remaining_quota()) CHECK(left == 0);
        CHECK_THROWS_AS(b.assign(x), HorizonExceeded);
    }
}

TEST_CASE("every baseline keeps the first-unit marginal at p") {
    const std::size_t draws = 40000;
    struct Case {
        BaselineKind kind;
        std::vector<double> p;
    };
    const std::vector<Case> cases{{BaselineKind::Bernoulli, {0.3, 0.7}},
                                  {BaselineKind::Complete, {0.25, 0.25, 0.5}},
                                  {BaselineKind::Efron, kHalf},
                                  {BaselineKind::Smith, {1.0 / 3, 1.0 / 3, 1.0 / 3}},
                                  {BaselineKind::Alweiss, kHalf}};
    const std::vector<double> x{0.6, 0.8};
    for (const auto& c : cases) {
        std::vector<std::size_t> counts(c.p.size(), 0);
        for (std::size_t r = 0; r < draws; ++r) {
            auto b = make(c.kind, c.p, 100, 2, Rng::derive(11, r));
            ++counts[b.assign(x)];
        }
        for (std::size_t j = 0; j < c.p.size(); ++j)
            CHECK(std::abs(static_cast<double>(counts[j]) / draws - c.p[j]) <= 4.0 * binomial_se(c.p[j], draws));
    }
}

TEST_CASE("bernoulli imbalance grows like sqrt(n)") {
    const std::size_t reps = 300;
    double small = 0.0, large = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
        small += l2_imbalance(BaselineKind::Bernoulli, 1000, 100 + r);
        large += l2_imbalance(BaselineKind::Bernoulli, 4000, 9000 + r);
    }
    const double ratio = large / small;
    CHECK(ratio > 1.6);
    CHECK(ratio < 2.4);
}

TEST_CASE("alweiss walk threshold and balancing") {
    auto b = make(BaselineKind::Alweiss, kHalf, 1000, 4);
    CHECK(b.alweiss_threshold() == doctest::Approx(30.0 * std::log(1000.0 * 4.0 / 0.05)));
    double alweiss = 0.0, bernoulli = 0.0;
    for (std::uint64_t r = 0; r < 50; ++r) {
        alweiss += l2_imbalance(BaselineKind::Alweiss, 2000, r);
        bernoulli += l2_imbalance(BaselineKind::Bernoulli, 2000, r);
    }
    CHECK(alweiss < bernoulli);
}

TEST_CASE("alweiss probability follows the running sum") {
    auto b = make(BaselineKind::Alweiss, kHalf, 1000, 2);
    const std::vector<double> x{1.0, 0.0};
    b.assign(x);
    const double sign = b.counts()[1] == 1 ? 1.0 : -1.0;
    const auto p = b.next_probabilities(x);
    CHECK(p[1] == doctest::Approx(0.5 * (1.0 - sign / b.alweiss_threshold())));
}

TEST_CASE("baselines reject unsupported configurations") {
    CHECK_THROWS_AS(make(BaselineKind::Efron, {0.3, 0.7}), InvalidParameter);
    CHECK_THROWS_AS(make(BaselineKind::Efron, {1.0 / 3, 1.0 / 3, 1.0 / 3}), InvalidParameter);
    CHECK_THROWS_AS(make(BaselineKind::Smith, {0.3, 0.7}), InvalidParameter);
    CHECK_THROWS_AS(make(BaselineKind::Alweiss, {0.3, 0.7}), InvalidParameter);
    CHECK_THROWS_AS(make(BaselineKind::Bernoulli, {1.0}), InvalidParameter);
    CHECK_THROWS_AS(make(BaselineKind::Bernoulli, {0.5, 0.6}), InvalidParameter);
    CHECK_THROWS_AS(make(BaselineKind::Bernoulli, {0.0, 1.0}), InvalidParameter);
    CHECK_THROWS_AS(parse_baseline("coinflip"), InvalidParameter);
    CHECK(parse_baseline("smith") == BaselineKind::Smith);
}
