#pragma once

#include <filesystem>
#include <iosfwd>

#include "epn/graph.hpp"
#include "epn/query.hpp"

namespace epn {

/// Writes the versioned text format: a header line "EPN v1 N=<n>" followed
/// by one "i j count" triple per nonzero cell, sorted by (i, j).
/// Deterministic byte-for-byte for a given snapshot.
void save_epn(const EpnSnapshot& snapshot, std::ostream& out);
void save_epn_file(const EpnSnapshot& snapshot, const std::filesystem::path& path);
std::string to_epn_string(const EpnSnapshot& snapshot);

/// Reads the EPN v1 format. Types are named "E1".."EN" unless a registry is
/// supplied. Total-events-seen is not part of the format and loads as 0.
EpnSnapshot load_epn(std::istream& in);
EpnSnapshot load_epn(std::istream& in, TypeRegistry registry);
EpnSnapshot load_epn_file(const std::filesystem::path& path);
EpnSnapshot load_epn_file(const std::filesystem::path& path, TypeRegistry registry);

/// Reads one type name per line; used to attach real names to an EPN file.
TypeRegistry load_names_file(const std::filesystem::path& path);

/// One JSON object per ranked entry:
/// {"rank":..,"type_id":..,"type_name":..,"score":..,"explored_count":..,
///  "elapsed":..,"algorithm":..}   (elapsed in microseconds)
void write_prediction_jsonl(std::ostream& out, const RankedPrediction& prediction,
                            const TypeRegistry& registry, std::string_view algorithm,
                            double elapsed_us);

}  // namespace epn
