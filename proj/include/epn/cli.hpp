#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "epn/engine.hpp"
#include "epn/eval.hpp"

namespace epn::cli {

/// Shared windowing knobs. Mode "batch" builds one window over the whole
/// stream (the learned EPN is provably identical to any segmentation);
/// "time" rolls windows of --window-period stream-time units; "count"
/// rolls every --window-every events.
struct WindowConfig {
    std::string mode = "batch";
    double period = 0.0;
    std::uint64_t every = 0;

    WindowPolicy policy() const;
    nlohmann::json to_json() const;
    void from_json(const nlohmann::json& j);
};

struct BuildConfig {
    std::string input;
    std::string format = "auto";
    std::string output;
    WindowConfig window;
    bool parallel = false;  // OpenMP observation kernel
    bool print_config = false;

    nlohmann::json to_json() const;
    void from_json(const nlohmann::json& j);
};

struct PredictConfig {
    std::string epn_file;
    std::string names_file;  // optional: one type name per line
    std::string causes;      // comma-separated names or ids; last is the EOP
    std::size_t k = 1;
    std::string algorithm = "both";  // es | rset | both
    std::string output;              // empty = stdout
    bool print_config = false;

    nlohmann::json to_json() const;
    void from_json(const nlohmann::json& j);
};

struct EvaluateConfig {
    std::string input;
    std::string format = "auto";
    double train_fraction = 0.70;
    std::uint64_t seed = 42;
    std::vector<std::size_t> ks;  // empty = defaults keyed on N
    std::size_t max_delta = 20;
    std::string algorithm = "both";
    double alpha = 0.95;
    bool ci = true;
    std::size_t store_capacity = 100000;
    std::size_t cond_cap = 8;
    std::string ns_mode = "samples";  // samples | events
    bool parallel = false;            // accuracy-only OpenMP replay
    WindowConfig window;
    std::string out_csv;   // empty = stdout
    std::string out_json;  // optional
    bool print_config = false;

    nlohmann::json to_json() const;
    void from_json(const nlohmann::json& j);
};

struct GenerateConfig {
    std::string spec_file;       // JSON SyntheticSpec
    std::uint32_t chain = 0;     // or: chain preset with this many types
    std::size_t n_partitions = 1000;
    std::uint64_t seed = 1;
    std::string out_stream;      // generic CSV
    std::string out_truth;       // optional ground-truth JSON
    bool print_config = false;

    nlohmann::json to_json() const;
    void from_json(const nlohmann::json& j);
};

struct InspectConfig {
    std::string epn_file;
    std::string names_file;
    std::size_t top = 5;

    nlohmann::json to_json() const;
};

int run_build(const BuildConfig& config, std::ostream& out);
int run_predict(const PredictConfig& config, std::ostream& out);
int run_evaluate(const EvaluateConfig& config, std::ostream& out);
int run_generate(const GenerateConfig& config, std::ostream& out);
int run_inspect(const InspectConfig& config, std::ostream& out);

/// Maps exceptions to the documented exit codes: 1 usage, 2 data.
int guarded(const std::function<int()>& fn, std::ostream& err);

}  // namespace epn::cli
