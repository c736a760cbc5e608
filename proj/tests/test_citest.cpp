#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "epn/independence.hpp"
#include "epn/stats.hpp"
#include "oracles.hpp"

using namespace epn;

namespace {

Partition partition_with(Cra cra, const std::vector<EventType>& types) {
    Partition p;
    p.cra = cra;
    double ts = 0.0;
    for (EventType t : types) p.events.emplace_back(ts += 1.0, t, cra);
    return p;
}

/// Store built from explicit presence patterns (one vector of present types
/// per sample).
PresenceSampleStore store_of(std::uint32_t n_types,
                             const std::vector<std::vector<EventType>>& samples,
                             std::size_t capacity = 1000) {
    PresenceSampleStore store(n_types, capacity);
    Cra cra = 0;
    for (const auto& s : samples) store.record(partition_with(++cra, s));
    return store;
}

}  // namespace

TEST_CASE("record_partition sets one bit per occurring type") {
    PresenceSampleStore store(4, 10);
    record_partition(partition_with(1, {1, 3, 1}), store);
    REQUIRE(store.sample_count() == 1);
    CHECK(store.present(0, 1));
    CHECK_FALSE(store.present(0, 2));
    CHECK(store.present(0, 3));
    CHECK_FALSE(store.present(0, 4));
    CHECK(store.total_events() == 3);
}

TEST_CASE("eviction is strictly oldest-first") {
    PresenceSampleStore store(2, 2);
    store.record(partition_with(1, {1}));
    store.record(partition_with(2, {2}));
    store.record(partition_with(3, {1, 2}));
    REQUIRE(store.sample_count() == 2);
    // oldest ({1}) is gone; remaining are {2} and {1,2} in age order
    CHECK_FALSE(store.present(0, 1));
    CHECK(store.present(0, 2));
    CHECK(store.present(1, 1));
    CHECK(store.present(1, 2));
}

TEST_CASE("marginal counts match a brute-force scan over random partitions") {
    std::mt19937_64 rng(7);
    const std::uint32_t n_types = 6;
    PresenceSampleStore store(n_types, 200);
    std::vector<std::vector<EventType>> raw;
    for (int i = 0; i < 100; ++i) {
        std::vector<EventType> types;
        const std::size_t len = 1 + rng() % 8;
        for (std::size_t j = 0; j < len; ++j)
            types.push_back(1 + static_cast<EventType>(rng() % n_types));
        raw.push_back(types);
        store.record(partition_with(Cra(i + 1), types));
    }
    for (EventType t = 1; t <= n_types; ++t) {
        std::uint64_t expected = 0;
        for (const auto& types : raw)
            expected += std::find(types.begin(), types.end(), t) != types.end();
        CHECK(store.marginal_count(t) == expected);
    }
}

TEST_CASE("cmi is zero for exactly factorized counts") {
    // 4 samples covering all 2x2 cells once
    const auto store = store_of(2, {{}, {1}, {2}, {1, 2}});
    CHECK(cmi(store, 1, 2, {}) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("cmi of identical uniform variables is one bit") {
    std::vector<std::vector<EventType>> samples;
    for (int i = 0; i < 16; ++i) samples.push_back({1, 2});
    for (int i = 0; i < 16; ++i) samples.push_back({});
    const auto store = store_of(2, samples);
    CHECK(cmi(store, 1, 2, {}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cmi on a fixed 8-sample conditioned table matches the direct sum") {
    const auto store = store_of(3, {{1, 2, 3},
                                    {1, 3},
                                    {2, 3},
                                    {3},
                                    {1, 2},
                                    {1},
                                    {},
                                    {2}});
    const std::vector<EventType> cond{3};
    const double expected = oracles::direct_sum_cmi(store, 1, 2, cond);
    CHECK(cmi(store, 1, 2, cond) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("cmi argument errors") {
    PresenceSampleStore empty(3, 4);
    CHECK_THROWS_AS(cmi(empty, 1, 2, {}), std::invalid_argument);
    const auto store = store_of(3, {{1}, {2}});
    const std::vector<EventType> bad{1};
    CHECK_THROWS_AS(cmi(store, 1, 2, bad), std::invalid_argument);
    CHECK_THROWS_AS(cmi(store, 1, 1, {}), std::invalid_argument);
}

TEST_CASE("cmi is symmetric and non-negative on random stores") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 60; ++trial) {
        const std::uint32_t n_types = 4;
        std::vector<std::vector<EventType>> samples;
        const std::size_t n = 3 + rng() % 40;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<EventType> s;
            for (EventType t = 1; t <= n_types; ++t)
                if (rng() % 2) s.push_back(t);
            samples.push_back(s);
        }
        const auto store = store_of(n_types, samples);
        const std::vector<EventType> cond{3};
        const double a = cmi(store, 1, 2, cond);
        const double b = cmi(store, 2, 1, cond);
        CHECK(a == doctest::Approx(b).epsilon(1e-12));
        CHECK(a >= -1e-12);
    }
}

TEST_CASE("g2 arithmetic") {
    CHECK(g2_statistic(0.0, 50) == 0.0);
    CHECK(g2_statistic(1.0, 100) == doctest::Approx(138.62943611).epsilon(1e-9));
    // linearity in the information term
    CHECK(g2_statistic(0.42, 77) * 2.0 ==
          doctest::Approx(g2_statistic(0.84, 77)).epsilon(1e-12));
}

TEST_CASE("doubling every sample doubles g2 at fixed distribution") {
    std::vector<std::vector<EventType>> samples{{1, 2}, {1}, {2}, {}, {1, 2}, {1, 2}};
    const auto once = store_of(2, samples);
    auto twice_samples = samples;
    twice_samples.insert(twice_samples.end(), samples.begin(), samples.end());
    const auto twice = store_of(2, twice_samples);

    const double c1 = cmi(once, 1, 2, {});
    const double c2 = cmi(twice, 1, 2, {});
    CHECK(c1 == doctest::Approx(c2).epsilon(1e-12));
    CHECK(2.0 * g2_statistic(c1, once.sample_count()) ==
          doctest::Approx(g2_statistic(c2, twice.sample_count())).epsilon(1e-12));
}

TEST_CASE("chi-squared quantiles match the standard table") {
    CHECK(chi2_quantile(1, 0.95) == doctest::Approx(3.84146).epsilon(1e-5));
    CHECK(chi2_quantile(2, 0.95) == doctest::Approx(5.99146).epsilon(1e-5));
    CHECK(chi2_quantile(4, 0.95) == doctest::Approx(9.48773).epsilon(1e-5));
    CHECK(chi2_quantile(10, 0.95) == doctest::Approx(18.3070).epsilon(1e-5));
    CHECK_THROWS_AS(chi2_quantile(0, 0.95), std::invalid_argument);
    CHECK_THROWS_AS(chi2_quantile(3, 1.0), std::invalid_argument);
}

TEST_CASE("chi-squared quantile inverts the quadrature CDF") {
    for (unsigned df : {1u, 2u, 4u, 7u, 10u}) {
        for (double alpha : {0.5, 0.9, 0.95, 0.99}) {
            const double q = chi2_quantile(df, alpha);
            CHECK(oracles::chi2_cdf_quadrature(q, df) ==
                  doctest::Approx(alpha).epsilon(1e-5));
        }
    }
}

TEST_CASE("chi-squared quantile is strictly increasing in df and alpha") {
    for (unsigned df = 1; df < 12; ++df)
        CHECK(chi2_quantile(df + 1, 0.95) > chi2_quantile(df, 0.95));
    double prev = 0.0;
    for (double alpha : {0.05, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99}) {
        const double q = chi2_quantile(5, alpha);
        CHECK(q > prev);
        prev = q;
    }
}

TEST_CASE("is_independent accepts factorized counts and rejects identical ones") {
    const auto factorized = store_of(2, {{}, {1}, {2}, {1, 2}});
    const IndependenceVerdict a = is_independent(factorized, 1, 2, {}, 0.95);
    CHECK(a.independent);
    CHECK(a.g2 == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(a.df == 1);

    std::vector<std::vector<EventType>> identical;
    for (int i = 0; i < 50; ++i) identical.push_back({1, 2});
    for (int i = 0; i < 50; ++i) identical.push_back({});
    const auto dependent = store_of(2, identical);
    const IndependenceVerdict b = is_independent(dependent, 1, 2, {}, 0.95);
    CHECK_FALSE(b.independent);
    CHECK(b.g2 == doctest::Approx(138.62943611).epsilon(1e-9));
    CHECK(b.threshold == doctest::Approx(3.84146).epsilon(1e-5));
}

TEST_CASE("two condition variables give df four and the matching threshold") {
    std::mt19937_64 rng(3);
    std::vector<std::vector<EventType>> samples;
    for (int i = 0; i < 64; ++i) {
        std::vector<EventType> s;
        for (EventType t = 1; t <= 4; ++t)
            if (rng() % 2) s.push_back(t);
        samples.push_back(s);
    }
    const auto store = store_of(4, samples);
    const std::vector<EventType> cond{3, 4};
    const IndependenceVerdict v = is_independent(store, 1, 2, cond, 0.95);
    CHECK(v.df == 4);
    CHECK(v.threshold == doctest::Approx(9.48773).epsilon(1e-5));
    CHECK(v.g2 == doctest::Approx(g2_statistic(v.cmi_bits, store.sample_count()))
                      .epsilon(1e-9));
    CHECK(v.independent == (v.g2 <= v.threshold));
}

TEST_CASE("event-count ns mode scales g2 by instances instead of samples") {
    // two samples, five underlying events
    PresenceSampleStore store(2, 10);
    store.record(partition_with(1, {1, 2, 1}));
    store.record(partition_with(2, {2, 2}));
    const IndependenceVerdict by_samples =
        is_independent(store, 1, 2, {}, 0.95, NsMode::samples);
    const IndependenceVerdict by_events =
        is_independent(store, 1, 2, {}, 0.95, NsMode::events);
    CHECK(by_samples.cmi_bits == doctest::Approx(by_events.cmi_bits));
    if (by_samples.cmi_bits > 0) {
        CHECK(by_events.g2 ==
              doctest::Approx(by_samples.g2 * 5.0 / 2.0).epsilon(1e-9));
    }
    CHECK(store.total_events() == 5);
}

TEST_CASE("condition sets beyond the cap are truncated with a warning count") {
    std::mt19937_64 rng(9);
    std::vector<std::vector<EventType>> samples;
    for (int i = 0; i < 32; ++i) {
        std::vector<EventType> s;
        for (EventType t = 1; t <= 6; ++t)
            if (rng() % 2) s.push_back(t);
        samples.push_back(s);
    }
    const auto store = store_of(6, samples);
    const std::vector<EventType> cond{3, 4, 5, 6};
    std::uint64_t truncations = 0;
    const IndependenceVerdict v =
        is_independent(store, 1, 2, cond, 0.95, NsMode::samples, 2, &truncations);
    CHECK(truncations == 1);
    CHECK(v.df == 4);  // 2^2 after truncation to the first two entries

    auto tester_store = std::make_shared<PresenceSampleStore>(store);
    CiConfig config;
    config.cond_cap = 2;
    CiTester tester(tester_store, config);
    tester.test(1, 2, cond);
    tester.test(1, 2, cond);  // memoized: no second truncation
    CHECK(tester.truncation_count() == 1);
    CHECK(tester.test_count() == 2);
}

TEST_CASE("memoized tester returns the same verdict as the direct call") {
    std::mt19937_64 rng(21);
    std::vector<std::vector<EventType>> samples;
    for (int i = 0; i < 40; ++i) {
        std::vector<EventType> s;
        for (EventType t = 1; t <= 5; ++t)
            if (rng() % 3 == 0) s.push_back(t);
        samples.push_back(s);
    }
    auto store = std::make_shared<PresenceSampleStore>(store_of(5, samples));
    CiTester tester(store, CiConfig{});
    const std::vector<EventType> cond{4, 5};
    const IndependenceVerdict direct = is_independent(*store, 2, 3, cond, 0.95);
    const IndependenceVerdict first = tester.test(2, 3, cond);
    const IndependenceVerdict again = tester.test(2, 3, cond);
    CHECK(first.independent == direct.independent);
    CHECK(first.g2 == doctest::Approx(direct.g2).epsilon(1e-12));
    CHECK(again.g2 == doctest::Approx(direct.g2).epsilon(1e-12));
}

TEST_CASE("cmi equals the direct-sum oracle across conditioned tables") {
    std::mt19937_64 rng(123);
    int checked = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t c = trial % 4;  // |cond| in 0..3
        const std::uint32_t n_types = static_cast<std::uint32_t>(2 + c);
        const std::size_t n = 1 + rng() % 64;
        std::vector<std::vector<EventType>> samples;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<EventType> s;
            for (EventType t = 1; t <= n_types; ++t)
                if (rng() % 2) s.push_back(t);
            samples.push_back(s);
        }
        const auto store = store_of(n_types, samples);
        std::vector<EventType> cond;
        for (std::size_t b = 0; b < c; ++b)
            cond.push_back(static_cast<EventType>(3 + b));
        const double expected = oracles::direct_sum_cmi(store, 1, 2, cond);
        const double got = cmi(store, 1, 2, cond);
        REQUIRE(got == doctest::Approx(expected).epsilon(1e-9));
        REQUIRE(got >= -1e-12);
        ++checked;
    }
    CHECK(checked == 300);
}
