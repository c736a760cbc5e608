#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "epn/cli.hpp"

namespace {

/// Finds "--config <path>" / "--config=<path>" ahead of full parsing so the
/// file can seed the config struct; explicit flags then override fields.
std::string config_path_from_argv(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string_view arg = argv[i];
        if (arg == "--config" && i + 1 < argc) return argv[i + 1];
        if (arg.starts_with("--config=")) return std::string(arg.substr(9));
    }
    return {};
}

template <typename Config>
void preload_config(Config& config, const std::string& path) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw epn::DataError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw epn::DataError("bad config file " + path + ": " + e.what());
    }
    config.from_json(j);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Incremental event precedence networks with continuous top-k "
                 "next-event prediction"};
    app.require_subcommand(1);

    epn::cli::BuildConfig build;
    std::string build_config_path;
    auto* cmd_build = app.add_subcommand(
        "build", "Learn an EPN from an event stream and persist it");
    cmd_build->add_option("--config", build_config_path, "JSON config file");
    cmd_build->add_option("-i,--input", build.input, "input stream file");
    cmd_build->add_option("-f,--format", build.format,
                          "msnbc | cascades | csv | auto");
    cmd_build->add_option("-o,--output", build.output, "EPN output file");
    cmd_build->add_option("--window-mode", build.window.mode,
                          "batch | time | count");
    cmd_build->add_option("--window-period", build.window.period,
                          "observation period for time windows");
    cmd_build->add_option("--window-every", build.window.every,
                          "events per count window");
    cmd_build->add_flag("--parallel", build.parallel,
                        "OpenMP observation kernel");
    cmd_build->add_flag("--print-config", build.print_config,
                        "print resolved config and exit");

    epn::cli::PredictConfig predict;
    std::string predict_config_path;
    auto* cmd_predict = app.add_subcommand(
        "predict", "Run a top-k next-event query against a persisted EPN");
    cmd_predict->add_option("--config", predict_config_path, "JSON config file");
    cmd_predict->add_option("--epn", predict.epn_file, "EPN file from build");
    cmd_predict->add_option("--names", predict.names_file,
                            "optional type-name file (one per line)");
    cmd_predict->add_option("--causes", predict.causes,
                            "comma-separated cause types, most recent last");
    cmd_predict->add_option("-k", predict.k, "result size");
    cmd_predict->add_option("-a,--algorithm", predict.algorithm,
                            "es | rset | both");
    cmd_predict->add_option("-o,--output", predict.output,
                            "JSON-lines output file (default stdout)");
    cmd_predict->add_flag("--print-config", predict.print_config,
                          "print resolved config and exit");

    epn::cli::EvaluateConfig evaluate;
    std::string evaluate_config_path;
    auto* cmd_evaluate = app.add_subcommand(
        "evaluate", "Train/test split, replay, accuracy and runtime report");
    cmd_evaluate->add_option("--config", evaluate_config_path, "JSON config file");
    cmd_evaluate->add_option("-i,--input", evaluate.input, "input stream file");
    cmd_evaluate->add_option("-f,--format", evaluate.format,
                             "msnbc | cascades | csv | auto");
    cmd_evaluate->add_option("--train-fraction", evaluate.train_fraction,
                             "fraction of CRAs used for training");
    cmd_evaluate->add_option("--seed", evaluate.seed, "split seed");
    cmd_evaluate->add_option("--ks", evaluate.ks,
                             "k values to sweep (default keyed on N)");
    cmd_evaluate->add_option("--max-delta", evaluate.max_delta,
                             "EOP indexes >= this pool into one bucket");
    cmd_evaluate->add_option("-a,--algorithm", evaluate.algorithm,
                             "es | rset | both");
    cmd_evaluate->add_option("--alpha", evaluate.alpha,
                             "CI significance level");
    cmd_evaluate->add_flag("--ci,!--no-ci", evaluate.ci,
                           "run-time causal inference on/off");
    cmd_evaluate->add_option("--store-capacity", evaluate.store_capacity,
                             "presence sample ring capacity");
    cmd_evaluate->add_option("--cond-cap", evaluate.cond_cap,
                             "condition set size cap");
    cmd_evaluate->add_option("--ns-mode", evaluate.ns_mode,
                             "samples | events");
    cmd_evaluate->add_flag("--parallel", evaluate.parallel,
                           "OpenMP accuracy-only replay");
    cmd_evaluate->add_option("--window-mode", evaluate.window.mode,
                             "batch | time | count");
    cmd_evaluate->add_option("--window-period", evaluate.window.period,
                             "observation period for time windows");
    cmd_evaluate->add_option("--window-every", evaluate.window.every,
                             "events per count window");
    cmd_evaluate->add_option("--out-csv", evaluate.out_csv,
                             "report CSV file (default stdout)");
    cmd_evaluate->add_option("--out-json", evaluate.out_json,
                             "report JSON file");
    cmd_evaluate->add_flag("--print-config", evaluate.print_config,
                           "print resolved config and exit");

    epn::cli::GenerateConfig generate;
    std::string generate_config_path;
    auto* cmd_generate = app.add_subcommand(
        "generate", "Emit a synthetic stream with known ground truth");
    cmd_generate->add_option("--config", generate_config_path, "JSON config file");
    cmd_generate->add_option("--spec", generate.spec_file,
                             "SyntheticSpec JSON file");
    cmd_generate->add_option("--chain", generate.chain,
                             "deterministic chain preset with n types");
    cmd_generate->add_option("--n-partitions", generate.n_partitions,
                             "partitions for the chain preset");
    cmd_generate->add_option("--seed", generate.seed, "generator seed");
    cmd_generate->add_option("--out-stream", generate.out_stream,
                             "stream CSV output");
    cmd_generate->add_option("--out-truth", generate.out_truth,
                             "ground-truth JSON output");
    cmd_generate->add_flag("--print-config", generate.print_config,
                           "print resolved config and exit");

    epn::cli::InspectConfig inspect;
    auto* cmd_inspect = app.add_subcommand("inspect", "Dump a persisted EPN");
    cmd_inspect->add_option("--epn", inspect.epn_file, "EPN file");
    cmd_inspect->add_option("--names", inspect.names_file, "type-name file");
    cmd_inspect->add_option("--top", inspect.top, "children shown per node");

    const std::string preload_path = config_path_from_argv(argc, argv);
    if (!preload_path.empty() && argc > 1) {
        const std::string_view sub = argv[1];
        const int code = epn::cli::guarded(
            [&]() -> int {
                if (sub == "build") preload_config(build, preload_path);
                if (sub == "predict") preload_config(predict, preload_path);
                if (sub == "evaluate") preload_config(evaluate, preload_path);
                if (sub == "generate") preload_config(generate, preload_path);
                return 0;
            },
            std::cerr);
        if (code != 0) return code;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    auto run = [&]() -> int {
        if (cmd_build->parsed()) return epn::cli::run_build(build, std::cout);
        if (cmd_predict->parsed()) return epn::cli::run_predict(predict, std::cout);
        if (cmd_evaluate->parsed())
            return epn::cli::run_evaluate(evaluate, std::cout);
        if (cmd_generate->parsed())
            return epn::cli::run_generate(generate, std::cout);
        if (cmd_inspect->parsed()) return epn::cli::run_inspect(inspect, std::cout);
        return 1;
    };
    return epn::cli::guarded(run, std::cerr);
}
