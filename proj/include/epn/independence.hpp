#pragma once

#include <span>
#include <unordered_map>

#include "epn/presence.hpp"

namespace epn {

/// Outcome of one conditional independence test.
struct IndependenceVerdict {
    bool independent = false;
    double cmi_bits = 0.0;
    double g2 = 0.0;
    unsigned df = 1;
    double threshold = 0.0;  // chi-squared critical value at alpha
};

/// Conditional mutual information, in bits, between the presence variables
/// of x and y given the presence variables in cond, over the store's
/// samples. Maximum-likelihood cell probabilities; zero-count cells
/// contribute 0. Throws std::invalid_argument on an empty store or when
/// cond contains x or y.
double cmi(const PresenceSampleStore& store, EventType x, EventType y,
           std::span<const EventType> cond);

/// G^2 = 2 * n_s * ln(2) * cmi_bits.
double g2_statistic(double cmi_bits, std::uint64_t n_s);

/// Which sample count N_s enters the G^2 statistic.
enum class NsMode {
    samples,        // presence samples currently in the store (default)
    events,   // raw event instances behind the store
};

struct CiConfig {
    double alpha = 0.95;
    std::size_t cond_cap = 8;  // larger condition sets are truncated
    NsMode ns_mode = NsMode::samples;
};

/// Full independence decision: binary variables give df = 2^|cond| and the
/// verdict is independent iff g2 <= chi2_quantile(df, alpha). cond is
/// expected in caller-priority order; entries beyond cond_cap are dropped
/// (counted through *truncations when provided).
IndependenceVerdict is_independent(const PresenceSampleStore& store, EventType x,
                                   EventType y, std::span<const EventType> cond,
                                   double alpha, NsMode ns_mode = NsMode::samples,
                                   std::size_t cond_cap = 8,
                                   std::uint64_t* truncations = nullptr);

/// Interface the query algorithms test edges through; lets tests script
/// outcomes for fixture-driven tests.
class CiOracle {
public:
    virtual ~CiOracle() = default;
    virtual IndependenceVerdict test(EventType x, EventType y,
                                     std::span<const EventType> cond) = 0;
};

/// Production oracle over a frozen store. Verdicts are memoized; the store
/// must not change behind an instance. Not thread-safe: use one instance
/// per thread.
class CiTester final : public CiOracle {
public:
    CiTester(std::shared_ptr<const PresenceSampleStore> store, CiConfig config)
        : store_(std::move(store)), config_(config) {}

    IndependenceVerdict test(EventType x, EventType y,
                             std::span<const EventType> cond) override;

    std::uint64_t truncation_count() const { return truncations_; }
    std::uint64_t test_count() const { return tests_; }
    const CiConfig& config() const { return config_; }

private:
    std::shared_ptr<const PresenceSampleStore> store_;
    CiConfig config_;
    std::unordered_map<std::string, IndependenceVerdict> memo_;
    std::uint64_t truncations_ = 0;
    std::uint64_t tests_ = 0;
};

/// Never prunes: every edge is reported dependent.
class AlwaysDependentOracle final : public CiOracle {
public:
    IndependenceVerdict test(EventType, EventType,
                             std::span<const EventType> cond) override {
        return IndependenceVerdict{false, 0.0, 0.0,
                                   static_cast<unsigned>(1u << std::min<std::size_t>(
                                       cond.size(), 20)),
                                   0.0};
    }
};

/// Declares exactly the listed (x, y) pairs independent, everything else
/// dependent, regardless of the condition set.
class ScriptedIndependenceOracle final : public CiOracle {
public:
    explicit ScriptedIndependenceOracle(
        std::vector<std::pair<EventType, EventType>> independent_pairs)
        : pairs_(std::move(independent_pairs)) {}

    IndependenceVerdict test(EventType x, EventType y,
                             std::span<const EventType>) override {
        for (const auto& [a, b] : pairs_)
            if (a == x && b == y) return IndependenceVerdict{true, 0.0, 0.0, 1, 0.0};
        return IndependenceVerdict{false, 0.0, 0.0, 1, 0.0};
    }

private:
    std::vector<std::pair<EventType, EventType>> pairs_;
};

}  // namespace epn
