#pragma once

#include <iosfwd>
#include <map>
#include <span>

#include <json.hpp>

#include "epn/query.hpp"

namespace epn {

/// Train/test division by CRA: every CRA lands wholly on one side.
struct SplitSpec {
    double train_fraction = 0.70;
};

struct SplitResult {
    std::vector<EventInstance> train;
    std::vector<EventInstance> test;
    std::size_t train_cras = 0;
    std::size_t test_cras = 0;
};

/// Distinct CRAs are ordered by a seeded hash and the first
/// round(fraction * count) of them become the training side; within each
/// side the original stream order is preserved.
SplitResult split(std::span<const EventInstance> events, SplitSpec spec,
                  std::uint64_t seed);

/// 1 if the observed type appears anywhere in the ranked list, else 0.
double hit_or_miss(EventType observed, const RankedPrediction& prediction);

/// 0 on a miss; on a hit, score(observed) / max score in the list (1.0 when
/// observed tops the list; degenerate all-zero lists also score 1.0).
double weighted_hit(EventType observed, const RankedPrediction& prediction);

enum class Algorithm { es, rset };
std::string_view algorithm_name(Algorithm a);

struct ReplayOptions {
    std::vector<Algorithm> algorithms{Algorithm::es, Algorithm::rset};
    std::vector<std::size_t> ks{1, 3, 5, 7, 9};
    std::size_t max_delta = 20;  // EOP indexes >= max_delta pool into one bucket
    bool ci = true;              // run-time causal inference on/off
    CiConfig ci_config;
    bool parallel = false;  // OpenMP accuracy-only mode (no per-query timing)
};

/// delta == 0 encodes the all-deltas aggregate row; delta == max_delta is
/// the overflow bucket.
struct CellKey {
    Algorithm algorithm;
    std::size_t k;
    std::size_t delta;
    auto operator<=>(const CellKey&) const = default;
};

struct CellStats {
    std::uint64_t n_tests = 0;
    std::uint64_t n_hits = 0;
    double weighted_sum = 0.0;
    double elapsed_us_sum = 0.0;
    std::uint64_t explored_sum = 0;

    double hit_or_miss() const {
        return n_tests ? double(n_hits) / double(n_tests) : 0.0;
    }
    double weighted() const { return n_tests ? weighted_sum / double(n_tests) : 0.0; }
    double mean_elapsed_us() const {
        return n_tests ? elapsed_us_sum / double(n_tests) : 0.0;
    }
    double mean_explored() const {
        return n_tests ? double(explored_sum) / double(n_tests) : 0.0;
    }
};

struct EvaluationReport {
    std::map<CellKey, CellStats> cells;
    std::size_t max_delta = 20;
    bool timed = true;  // false for parallel accuracy-only runs
    nlohmann::json config_echo;

    const CellStats* cell(Algorithm a, std::size_t k, std::size_t delta) const {
        auto it = cells.find(CellKey{a, k, delta});
        return it == cells.end() ? nullptr : &it->second;
    }

    std::string delta_label(std::size_t delta) const;
    void write_csv(std::ostream& out) const;
    nlohmann::json to_json() const;
};

/// Replays a test stream against a snapshot built from training data only.
/// Each event at position >= 2 of its partition becomes one test point: the
/// earlier events form the causes, the event at the EOP index delta is the
/// most recent cause, and the arriving event is the observation both
/// metrics score. Wall-clock time covers the query call only.
EvaluationReport replay_evaluate(std::span<const EventInstance> test_events,
                                 std::shared_ptr<const EpnSnapshot> snapshot,
                                 std::shared_ptr<const PresenceSampleStore> store,
                                 const ReplayOptions& options);

}  // namespace epn
