#include "epn/cli.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>

#include "epn/epn_io.hpp"
#include "epn/ingest.hpp"

namespace epn::cli {

namespace {

void get_if(const nlohmann::json& j, const char* key, auto& target) {
    if (j.contains(key)) target = j.at(key).get<std::decay_t<decltype(target)>>();
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path);
    return out;
}

std::vector<Algorithm> parse_algorithms(const std::string& name) {
    if (name == "es") return {Algorithm::es};
    if (name == "rset") return {Algorithm::rset};
    if (name == "both") return {Algorithm::es, Algorithm::rset};
    throw UsageError("unknown algorithm: " + name + " (expected es, rset or both)");
}

TypeRegistry registry_for(const std::string& epn_file, const std::string& names_file,
                          EpnSnapshot& snapshot_out) {
    if (names_file.empty()) {
        snapshot_out = load_epn_file(epn_file);
    } else {
        snapshot_out = load_epn_file(epn_file, load_names_file(names_file));
    }
    return snapshot_out.registry();
}

}  // namespace

WindowPolicy WindowConfig::policy() const {
    if (mode == "batch") return WindowPolicy::batch();
    if (mode == "time") {
        if (!(period > 0.0)) throw UsageError("time windows need --window-period > 0");
        return WindowPolicy::by_time(period);
    }
    if (mode == "count") {
        if (every < 1) throw UsageError("count windows need --window-every >= 1");
        return WindowPolicy::by_count(every);
    }
    throw UsageError("unknown window mode: " + mode);
}

nlohmann::json WindowConfig::to_json() const {
    return {{"mode", mode}, {"period", period}, {"every", every}};
}

void WindowConfig::from_json(const nlohmann::json& j) {
    get_if(j, "mode", mode);
    get_if(j, "period", period);
    get_if(j, "every", every);
}

nlohmann::json BuildConfig::to_json() const {
    return {{"input", input},
            {"format", format},
            {"output", output},
            {"window", window.to_json()},
            {"parallel", parallel}};
}

void BuildConfig::from_json(const nlohmann::json& j) {
    get_if(j, "input", input);
    get_if(j, "format", format);
    get_if(j, "output", output);
    if (j.contains("window")) window.from_json(j.at("window"));
    get_if(j, "parallel", parallel);
}

nlohmann::json PredictConfig::to_json() const {
    return {{"epn_file", epn_file}, {"names_file", names_file}, {"causes", causes},
            {"k", k},               {"algorithm", algorithm},   {"output", output}};
}

void PredictConfig::from_json(const nlohmann::json& j) {
    get_if(j, "epn_file", epn_file);
    get_if(j, "names_file", names_file);
    get_if(j, "causes", causes);
    get_if(j, "k", k);
    get_if(j, "algorithm", algorithm);
    get_if(j, "output", output);
}

nlohmann::json EvaluateConfig::to_json() const {
    return {{"input", input},
            {"format", format},
            {"train_fraction", train_fraction},
            {"seed", seed},
            {"ks", ks},
            {"max_delta", max_delta},
            {"algorithm", algorithm},
            {"alpha", alpha},
            {"ci", ci},
            {"store_capacity", store_capacity},
            {"cond_cap", cond_cap},
            {"ns_mode", ns_mode},
            {"parallel", parallel},
            {"window", window.to_json()},
            {"out_csv", out_csv},
            {"out_json", out_json}};
}

void EvaluateConfig::from_json(const nlohmann::json& j) {
    get_if(j, "input", input);
    get_if(j, "format", format);
    get_if(j, "train_fraction", train_fraction);
    get_if(j, "seed", seed);
    get_if(j, "ks", ks);
    get_if(j, "max_delta", max_delta);
    get_if(j, "algorithm", algorithm);
    get_if(j, "alpha", alpha);
    get_if(j, "ci", ci);
    get_if(j, "store_capacity", store_capacity);
    get_if(j, "cond_cap", cond_cap);
    get_if(j, "ns_mode", ns_mode);
    get_if(j, "parallel", parallel);
    if (j.contains("window")) window.from_json(j.at("window"));
    get_if(j, "out_csv", out_csv);
    get_if(j, "out_json", out_json);
}

nlohmann::json GenerateConfig::to_json() const {
    return {{"spec_file", spec_file},   {"chain", chain},
            {"n_partitions", n_partitions}, {"seed", seed},
            {"out_stream", out_stream}, {"out_truth", out_truth}};
}

void GenerateConfig::from_json(const nlohmann::json& j) {
    get_if(j, "spec_file", spec_file);
    get_if(j, "chain", chain);
    get_if(j, "n_partitions", n_partitions);
    get_if(j, "seed", seed);
    get_if(j, "out_stream", out_stream);
    get_if(j, "out_truth", out_truth);
}

nlohmann::json InspectConfig::to_json() const {
    return {{"epn_file", epn_file}, {"names_file", names_file}, {"top", top}};
}

int run_build(const BuildConfig& config, std::ostream& out) {
    if (config.print_config) {
        out << config.to_json().dump(2) << '\n';
        return 0;
    }
    if (config.input.empty()) throw UsageError("build needs --input");
    if (config.output.empty()) throw UsageError("build needs --output");

    const ParsedStream parsed = parse_file(config.input, config.format);
    if (parsed.events.empty()) throw DataError("no events parsed from " + config.input);

    EngineConfig engine_config;
    engine_config.window = config.window.policy();
    engine_config.parallel_observe = config.parallel;
    StreamEngine engine(parsed.registry, engine_config);
    for (const EventInstance& ev : parsed.events) engine.feed(ev);
    engine.finish();

    const auto snapshot = engine.snapshot();
    save_epn_file(*snapshot, config.output);

    out << "N=" << snapshot->type_count() << " edges=" << snapshot->edge_count()
        << " events=" << snapshot->total_events_seen()
        << " windows=" << engine.windows_closed()
        << " rejected=" << engine.events_rejected() << '\n';
    if (parsed.rejected_records > 0)
        out << "rejected_input_records=" << parsed.rejected_records << '\n';
    return 0;
}

int run_predict(const PredictConfig& config, std::ostream& out) {
    if (config.print_config) {
        out << config.to_json().dump(2) << '\n';
        return 0;
    }
    if (config.epn_file.empty()) throw UsageError("predict needs --epn");
    if (config.causes.empty()) throw UsageError("predict needs --causes");
    if (config.k < 1) throw UsageError("k must be at least 1");

    EpnSnapshot snapshot;
    const TypeRegistry registry =
        registry_for(config.epn_file, config.names_file, snapshot);

    std::vector<EventType> causes;
    std::size_t begin = 0;
    const std::string& s = config.causes;
    while (begin <= s.size()) {
        std::size_t end = s.find(',', begin);
        if (end == std::string::npos) end = s.size();
        std::string token = s.substr(begin, end - begin);
        while (!token.empty() && token.front() == ' ') token.erase(token.begin());
        while (!token.empty() && token.back() == ' ') token.pop_back();
        if (!token.empty()) causes.push_back(registry.require(token));
        begin = end + 1;
    }
    if (causes.empty()) throw UsageError("predict needs at least one cause");

    std::ofstream file_out;
    std::ostream* sink = &out;
    if (!config.output.empty()) {
        file_out = open_output(config.output);
        sink = &file_out;
    }

    for (Algorithm alg : parse_algorithms(config.algorithm)) {
        QueryContext ctx;
        ctx.snapshot = &snapshot;
        ctx.causes = causes;
        ctx.k = config.k;
        const auto t0 = std::chrono::steady_clock::now();
        const RankedPrediction pred =
            alg == Algorithm::es ? es_topk(ctx) : rset_topk(ctx);
        const auto t1 = std::chrono::steady_clock::now();
        const double us = std::chrono::duration<double, std::micro>(t1 - t0).count();
        write_prediction_jsonl(*sink, pred, registry, algorithm_name(alg), us);
    }
    return 0;
}

int run_evaluate(const EvaluateConfig& config, std::ostream& out) {
    if (config.print_config) {
        out << config.to_json().dump(2) << '\n';
        return 0;
    }
    if (config.input.empty()) throw UsageError("evaluate needs --input");
    if (!(config.alpha > 0.0 && config.alpha < 1.0))
        throw UsageError("alpha must be in (0,1)");

    const ParsedStream parsed = parse_file(config.input, config.format);
    if (parsed.events.empty()) throw DataError("no events parsed from " + config.input);

    SplitSpec split_spec;
    split_spec.train_fraction = config.train_fraction;
    const SplitResult divided = split(parsed.events, split_spec, config.seed);

    EngineConfig engine_config;
    engine_config.window = config.window.policy();
    engine_config.store_capacity = config.store_capacity;
    StreamEngine engine(parsed.registry, engine_config);
    for (const EventInstance& ev : divided.train) engine.feed(ev);
    engine.finish();

    ReplayOptions options;
    options.algorithms = parse_algorithms(config.algorithm);
    options.ks = config.ks;
    if (options.ks.empty())
        options.ks = parsed.registry.count() <= 20
                         ? std::vector<std::size_t>{1, 3, 5, 7, 9}
                         : std::vector<std::size_t>{1, 5, 10, 15, 20};
    options.max_delta = config.max_delta;
    options.ci = config.ci;
    options.ci_config.alpha = config.alpha;
    options.ci_config.cond_cap = config.cond_cap;
    if (config.ns_mode == "events")
        options.ci_config.ns_mode = NsMode::events;
    else if (config.ns_mode != "samples")
        throw UsageError("unknown ns-mode: " + config.ns_mode);
    options.parallel = config.parallel;

    EvaluationReport report =
        replay_evaluate(divided.test, engine.snapshot(), engine.store(), options);
    nlohmann::json echo = config.to_json();
    echo["resolved_ks"] = options.ks;
    echo["train_cras"] = divided.train_cras;
    echo["test_cras"] = divided.test_cras;
    echo["train_events"] = divided.train.size();
    echo["test_events"] = divided.test.size();
    report.config_echo = std::move(echo);

    if (config.out_csv.empty()) {
        report.write_csv(out);
    } else {
        auto csv = open_output(config.out_csv);
        report.write_csv(csv);
    }
    if (!config.out_json.empty()) {
        auto js = open_output(config.out_json);
        js << report.to_json().dump(2) << '\n';
    }
    return 0;
}

int run_generate(const GenerateConfig& config, std::ostream& out) {
    if (config.print_config) {
        out << config.to_json().dump(2) << '\n';
        return 0;
    }
    SyntheticSpec spec;
    if (!config.spec_file.empty()) {
        std::ifstream in(config.spec_file);
        if (!in) throw DataError("cannot open spec file: " + config.spec_file);
        nlohmann::json j;
        in >> j;
        spec = SyntheticSpec::from_json(j);
    } else if (config.chain >= 2) {
        spec = SyntheticSpec::chain(config.chain, config.n_partitions, config.seed);
    } else {
        throw UsageError("generate needs --spec or --chain <n_types>");
    }
    if (config.out_stream.empty()) throw UsageError("generate needs --out-stream");

    const SyntheticResult result = generate_synthetic(spec);

    auto stream_out = open_output(config.out_stream);
    stream_out << "timestamp,type,cra\n";
    char buf[64];
    for (const EventInstance& ev : result.stream.events) {
        std::snprintf(buf, sizeof buf, "%.17g", ev.timestamp);
        stream_out << buf << ',' << result.stream.registry.name(ev.type) << ','
                   << ev.cra << '\n';
    }

    if (!config.out_truth.empty()) {
        auto truth_out = open_output(config.out_truth);
        nlohmann::json j{{"spec", spec.to_json()},
                         {"next_given_continue", result.next_given_continue}};
        truth_out << j.dump(2) << '\n';
    }

    out << "events=" << result.stream.events.size()
        << " partitions=" << spec.n_partitions << " n_types=" << spec.n_types << '\n';
    return 0;
}

int run_inspect(const InspectConfig& config, std::ostream& out) {
    if (config.epn_file.empty()) throw UsageError("inspect needs --epn");
    EpnSnapshot snapshot;
    const TypeRegistry registry =
        registry_for(config.epn_file, config.names_file, snapshot);

    std::uint64_t absorbing = 0;
    for (EventType t = 1; t <= snapshot.type_count(); ++t)
        absorbing += snapshot.absorbing(t);
    out << "N=" << snapshot.type_count() << " edges=" << snapshot.edge_count()
        << " pair_observations=" << snapshot.freq().total()
        << " absorbing_nodes=" << absorbing << '\n';

    for (EventType t = 1; t <= snapshot.type_count(); ++t) {
        const auto kids = snapshot.children(t);
        if (kids.empty()) continue;
        out << registry.name(t) << " ->";
        std::size_t shown = 0;
        for (const ChildEdge& e : kids) {
            if (shown++ == config.top) {
                out << " ...";
                break;
            }
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.4g", e.prob);
            out << ' ' << registry.name(e.child) << '(' << buf << ')';
        }
        out << '\n';
    }
    return 0;
}

int guarded(const std::function<int()>& fn, std::ostream& err) {
    try {
        return fn();
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const DataError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace epn::cli
