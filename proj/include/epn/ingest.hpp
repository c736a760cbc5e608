#pragma once

#include <iosfwd>

#include <json.hpp>

#include "epn/types.hpp"

namespace epn {

/// A parsed stream plus bookkeeping so callers can verify the parse was
/// lossless modulo rejected records.
struct ParsedStream {
    TypeRegistry registry;
    std::vector<EventInstance> events;
    std::uint64_t accepted_records = 0;  // sessions (msnbc) or data rows (csv)
    std::uint64_t rejected_records = 0;  // malformed lines/rows
    std::uint64_t skipped_records = 0;   // blanks, comments, headers, stop rows
    std::uint64_t cra_count = 0;         // distinct CRAs emitted
};

/// UCI click-stream format: optional '%' comment lines and a category-name
/// header line, then one space-separated line of category ids per session.
/// Line ordinals (over accepted lines) become the session CRA; within a
/// session event j gets synthetic timestamp j. Ids outside [1,17] reject
/// the line. Category names default to E1..E17 when no header is present.
ParsedStream parse_msnbc(std::istream& in);

/// Cascading-outage CSV: timestamp, component id, blackout id, event
/// indicator (0 initiating, 1 dependent, -1 stop). Stop rows are dropped;
/// initiating and dependent events are treated identically; the blackout id
/// is the CRA. Component ids register as type names on first appearance.
ParsedStream parse_cascades(std::istream& in);

/// Generic CSV with a header row: timestamp, type, cra. Types and CRAs may
/// be arbitrary strings; both are interned in first-appearance order.
ParsedStream parse_generic_csv(std::istream& in);

enum class StreamFormat { msnbc, cascades, csv };

StreamFormat parse_format_name(std::string_view name);  // throws UsageError

/// Reads `path` with the given format; "auto" sniffs from content.
ParsedStream parse_file(const std::string& path, const std::string& format);

/// Ground-truth description of a synthetic absorbing Markov stream.
struct SyntheticSpec {
    std::uint32_t n_types = 0;
    std::vector<double> transition;  // n x n row-major, zero diagonal
    std::vector<double> absorb;      // per-type termination probability
    std::vector<double> start;       // start distribution; empty = uniform
    std::size_t n_partitions = 0;
    std::uint64_t seed = 1;
    std::size_t max_partition_len = 1000;
    bool interleave = false;  // shuffle partitions into each other

    /// Checks: row + absorb sums to 1, zero diagonal, valid start.
    void validate() const;

    /// A -> B -> ... -> terminal chain with deterministic transitions.
    static SyntheticSpec chain(std::uint32_t n_types, std::size_t n_partitions,
                               std::uint64_t seed = 1);

    static SyntheticSpec from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct SyntheticResult {
    ParsedStream stream;  // registry E1..EN, globally monotone timestamps
    /// Row-stochastic next-step truth conditioned on the walk continuing:
    /// transition[i][j] / (1 - absorb[i]); the oracle learned probabilities
    /// are compared against.
    std::vector<double> next_given_continue;

    double truth(EventType i, EventType j) const {
        return next_given_continue[std::size_t(i - 1) * n + (j - 1)];
    }
    std::uint32_t n = 0;
};

/// Samples each partition as a first-order absorbing Markov walk from the
/// start distribution. Deterministic for a fixed spec (platform-stable
/// sampling, no std distributions).
SyntheticResult generate_synthetic(const SyntheticSpec& spec);

}  // namespace epn
