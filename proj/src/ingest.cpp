#include "epn/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <span>
#include <sstream>

namespace epn {

namespace {

constexpr std::uint32_t kMsnbcCategories = 17;

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
    std::vector<std::string_view> fields;
    std::size_t begin = 0;
    while (begin <= line.size()) {
        const std::size_t end = line.find(sep, begin);
        if (end == std::string_view::npos) {
            fields.push_back(line.substr(begin));
            break;
        }
        fields.push_back(line.substr(begin, end - begin));
        begin = end + 1;
    }
    return fields;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

bool parse_long(std::string_view s, long& out) {
    s = trim(s);
    if (s.empty()) return false;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (s.empty()) return false;
    char* end = nullptr;
    const std::string tmp(s);
    out = std::strtod(tmp.c_str(), &end);
    return end == tmp.c_str() + tmp.size() && std::isfinite(out);
}

/// Interns arbitrary CRA strings to dense uint64 ids.
class CraInterner {
public:
    Cra intern(std::string_view s) {
        auto [it, fresh] = ids_.try_emplace(std::string(s), ids_.size() + 1);
        return it->second;
    }
    std::size_t count() const { return ids_.size(); }

private:
    std::unordered_map<std::string, Cra> ids_;
};

}  // namespace

ParsedStream parse_msnbc(std::istream& in) {
    ParsedStream out;
    out.registry = TypeRegistry::numbered(kMsnbcCategories);

    std::string line;
    bool header_done = false;
    bool names_seen = false;
    Cra session = 0;
    while (std::getline(in, line)) {
        std::string_view sv = trim(line);
        if (sv.empty()) {
            ++out.skipped_records;
            continue;
        }
        if (!header_done) {
            if (sv.front() == '%') {
                ++out.skipped_records;
                continue;
            }
            long probe;
            if (!names_seen && !parse_long(split_fields(sv, ' ').front(), probe)) {
                // the category-name header line
                TypeRegistry named;
                for (std::string_view tok : split_fields(sv, ' ')) {
                    tok = trim(tok);
                    if (!tok.empty()) named.add(std::string(tok));
                }
                if (named.count() == kMsnbcCategories) out.registry = named;
                names_seen = true;
                ++out.skipped_records;
                continue;
            }
            header_done = true;
        }

        std::vector<EventType> types;
        bool ok = true;
        for (std::string_view tok : split_fields(sv, ' ')) {
            tok = trim(tok);
            if (tok.empty()) continue;
            long v;
            if (!parse_long(tok, v) || v < 1 || v > kMsnbcCategories) {
                ok = false;
                break;
            }
            types.push_back(static_cast<EventType>(v));
        }
        if (!ok || types.empty()) {
            ++out.rejected_records;
            continue;
        }
        ++session;
        ++out.accepted_records;
        for (std::size_t j = 0; j < types.size(); ++j)
            out.events.emplace_back(double(j + 1), types[j], session);
    }
    out.cra_count = session;
    return out;
}

ParsedStream parse_cascades(std::istream& in) {
    ParsedStream out;
    CraInterner cras;
    std::unordered_map<std::string, EventType> components;

    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        std::string_view sv = trim(line);
        if (sv.empty()) {
            ++out.skipped_records;
            continue;
        }
        const auto fields = split_fields(sv, ',');
        double ts;
        if (first) {
            first = false;
            if (fields.size() >= 4 && !parse_double(fields[0], ts)) {
                ++out.skipped_records;  // header row
                continue;
            }
        }
        long indicator;
        if (fields.size() != 4 || !parse_double(fields[0], ts) ||
            !parse_long(fields[3], indicator) ||
            (indicator != 0 && indicator != 1 && indicator != -1)) {
            ++out.rejected_records;
            continue;
        }
        if (indicator == -1) {
            ++out.skipped_records;  // stop events are not real events
            continue;
        }
        const std::string comp(trim(fields[1]));
        if (comp.empty()) {
            ++out.rejected_records;
            continue;
        }
        auto [it, fresh] = components.try_emplace(comp, 0);
        if (fresh) it->second = out.registry.add(comp);
        const Cra cra = cras.intern(trim(fields[2]));
        out.events.emplace_back(ts, it->second, cra);
        ++out.accepted_records;
    }
    out.cra_count = cras.count();
    return out;
}

ParsedStream parse_generic_csv(std::istream& in) {
    ParsedStream out;
    CraInterner cras;
    std::unordered_map<std::string, EventType> types;

    std::string line;
    if (std::getline(in, line)) ++out.skipped_records;  // header row
    while (std::getline(in, line)) {
        std::string_view sv = trim(line);
        if (sv.empty()) {
            ++out.skipped_records;
            continue;
        }
        const auto fields = split_fields(sv, ',');
        double ts;
        if (fields.size() != 3 || !parse_double(fields[0], ts) ||
            trim(fields[1]).empty() || trim(fields[2]).empty()) {
            ++out.rejected_records;
            continue;
        }
        const std::string type_name(trim(fields[1]));
        auto [it, fresh] = types.try_emplace(type_name, 0);
        if (fresh) it->second = out.registry.add(type_name);
        out.events.emplace_back(ts, it->second, cras.intern(trim(fields[2])));
        ++out.accepted_records;
    }
    out.cra_count = cras.count();
    return out;
}

StreamFormat parse_format_name(std::string_view name) {
    if (name == "msnbc") return StreamFormat::msnbc;
    if (name == "cascades") return StreamFormat::cascades;
    if (name == "csv") return StreamFormat::csv;
    throw UsageError("unknown input format: " + std::string(name));
}

ParsedStream parse_file(const std::string& path, const std::string& format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open input: " + path);

    std::string fmt = format;
    if (fmt == "auto") {
        std::string probe;
        while (std::getline(in, probe) && trim(probe).empty()) {
        }
        const std::string_view sv = trim(probe);
        if (sv.empty()) throw DataError("input is empty: " + path);
        if (sv.find(',') == std::string_view::npos)
            fmt = "msnbc";
        else
            fmt = split_fields(sv, ',').size() == 4 ? "cascades" : "csv";
        in.clear();
        in.seekg(0);
    }
    switch (parse_format_name(fmt)) {
        case StreamFormat::msnbc:
            return parse_msnbc(in);
        case StreamFormat::cascades:
            return parse_cascades(in);
        case StreamFormat::csv:
            return parse_generic_csv(in);
    }
    throw UsageError("unknown input format: " + format);
}

void SyntheticSpec::validate() const {
    if (n_types < 1) throw std::invalid_argument("synthetic spec needs n_types >= 1");
    if (n_partitions < 1)
        throw std::invalid_argument("synthetic spec needs n_partitions >= 1");
    if (transition.size() != std::size_t(n_types) * n_types)
        throw std::invalid_argument("transition matrix must be n_types x n_types");
    if (absorb.size() != n_types)
        throw std::invalid_argument("absorb vector must have n_types entries");
    if (!start.empty() && start.size() != n_types)
        throw std::invalid_argument("start vector must have n_types entries");
    for (std::uint32_t i = 0; i < n_types; ++i) {
        if (transition[std::size_t(i) * n_types + i] != 0.0)
            throw std::invalid_argument("transition diagonal must be zero");
        double row = absorb[i];
        if (absorb[i] < 0.0 || absorb[i] > 1.0)
            throw std::invalid_argument("absorb probabilities must be in [0,1]");
        for (std::uint32_t j = 0; j < n_types; ++j) {
            const double p = transition[std::size_t(i) * n_types + j];
            if (p < 0.0) throw std::invalid_argument("negative transition probability");
            row += p;
        }
        if (std::fabs(row - 1.0) > 1e-9)
            throw std::invalid_argument("transition row plus absorb must sum to 1");
    }
    if (!start.empty()) {
        double s = 0.0;
        for (double p : start) {
            if (p < 0.0) throw std::invalid_argument("negative start probability");
            s += p;
        }
        if (std::fabs(s - 1.0) > 1e-9)
            throw std::invalid_argument("start distribution must sum to 1");
    }
}

SyntheticSpec SyntheticSpec::chain(std::uint32_t n_types, std::size_t n_partitions,
                                   std::uint64_t seed) {
    SyntheticSpec spec;
    spec.n_types = n_types;
    spec.n_partitions = n_partitions;
    spec.seed = seed;
    spec.transition.assign(std::size_t(n_types) * n_types, 0.0);
    spec.absorb.assign(n_types, 0.0);
    spec.start.assign(n_types, 0.0);
    spec.start[0] = 1.0;
    for (std::uint32_t i = 0; i + 1 < n_types; ++i)
        spec.transition[std::size_t(i) * n_types + i + 1] = 1.0;
    spec.absorb[n_types - 1] = 1.0;
    return spec;
}

SyntheticSpec SyntheticSpec::from_json(const nlohmann::json& j) {
    SyntheticSpec spec;
    spec.n_types = j.at("n_types").get<std::uint32_t>();
    spec.n_partitions = j.at("n_partitions").get<std::size_t>();
    spec.transition = j.at("transition").get<std::vector<double>>();
    spec.absorb = j.at("absorb").get<std::vector<double>>();
    if (j.contains("start")) spec.start = j.at("start").get<std::vector<double>>();
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("max_partition_len"))
        spec.max_partition_len = j.at("max_partition_len").get<std::size_t>();
    if (j.contains("interleave")) spec.interleave = j.at("interleave").get<bool>();
    spec.validate();
    return spec;
}

nlohmann::json SyntheticSpec::to_json() const {
    nlohmann::json j{{"n_types", n_types},
                     {"n_partitions", n_partitions},
                     {"transition", transition},
                     {"absorb", absorb},
                     {"seed", seed},
                     {"max_partition_len", max_partition_len},
                     {"interleave", interleave}};
    if (!start.empty()) j["start"] = start;
    return j;
}

namespace {

/// Platform-stable uniform double in [0,1).
double next_uniform(std::mt19937_64& rng) {
    return double(rng() >> 11) * 0x1.0p-53;
}

std::uint32_t sample_index(std::span<const double> weights, double u) {
    double acc = 0.0;
    for (std::uint32_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (u < acc) return i;
    }
    return static_cast<std::uint32_t>(weights.size() - 1);
}

}  // namespace

SyntheticResult generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    const std::uint32_t n = spec.n_types;

    SyntheticResult out;
    out.n = n;
    out.stream.registry = TypeRegistry::numbered(n);
    out.next_given_continue.assign(std::size_t(n) * n, 0.0);
    for (std::uint32_t i = 0; i < n; ++i) {
        const double cont = 1.0 - spec.absorb[i];
        if (cont <= 0.0) continue;
        for (std::uint32_t j = 0; j < n; ++j)
            out.next_given_continue[std::size_t(i) * n + j] =
                spec.transition[std::size_t(i) * n + j] / cont;
    }

    std::mt19937_64 rng(spec.seed);
    const std::vector<double> uniform_start(n, 1.0 / n);
    std::span<const double> start =
        spec.start.empty() ? std::span<const double>(uniform_start)
                           : std::span<const double>(spec.start);

    std::vector<std::vector<EventType>> walks(spec.n_partitions);
    for (std::size_t p = 0; p < spec.n_partitions; ++p) {
        auto& walk = walks[p];
        std::uint32_t state = sample_index(start, next_uniform(rng));
        walk.push_back(state + 1);
        while (walk.size() < spec.max_partition_len) {
            const double u = next_uniform(rng);
            if (u < spec.absorb[state]) break;
            // the remaining mass u - absorb falls exactly on the row, which
            // sums to 1 - absorb
            const std::span<const double> row(&spec.transition[std::size_t(state) * n],
                                              n);
            state = sample_index(row, u - spec.absorb[state]);
            walk.push_back(state + 1);
        }
    }

    double clock = 0.0;
    auto emit = [&](std::size_t partition, EventType type) {
        clock += 1.0;
        out.stream.events.emplace_back(clock, type, Cra(partition + 1));
    };

    if (!spec.interleave) {
        for (std::size_t p = 0; p < walks.size(); ++p)
            for (EventType t : walks[p]) emit(p, t);
    } else {
        // random merge preserving per-partition order
        std::vector<std::size_t> cursor(walks.size(), 0);
        std::vector<std::size_t> active;
        for (std::size_t p = 0; p < walks.size(); ++p)
            if (!walks[p].empty()) active.push_back(p);
        while (!active.empty()) {
            const std::size_t pick = std::min(
                static_cast<std::size_t>(next_uniform(rng) * double(active.size())),
                active.size() - 1);
            const std::size_t p = active[pick];
            emit(p, walks[p][cursor[p]]);
            if (++cursor[p] == walks[p].size()) {
                active[pick] = active.back();
                active.pop_back();
            }
        }
    }

    out.stream.accepted_records = out.stream.events.size();
    out.stream.cra_count = spec.n_partitions;
    return out;
}

}  // namespace epn
