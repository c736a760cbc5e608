#include "epn/epn_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace epn {

void save_epn(const EpnSnapshot& snapshot, std::ostream& out) {
    const std::uint32_t n = snapshot.type_count();
    out << "EPN v1 N=" << n << '\n';
    for (EventType i = 1; i <= n; ++i)
        for (EventType j = 1; j <= n; ++j)
            if (i != j && snapshot.freq().at(i, j) > 0)
                out << i << ' ' << j << ' ' << snapshot.freq().at(i, j) << '\n';
}

void save_epn_file(const EpnSnapshot& snapshot, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path.string());
    save_epn(snapshot, out);
    if (!out) throw DataError("write failed: " + path.string());
}

std::string to_epn_string(const EpnSnapshot& snapshot) {
    std::ostringstream out;
    save_epn(snapshot, out);
    return out.str();
}

namespace {

EpnSnapshot load_epn_impl(std::istream& in, TypeRegistry* registry) {
    std::string header;
    if (!std::getline(in, header)) throw DataError("empty EPN file");
    std::uint32_t n = 0;
    if (std::sscanf(header.c_str(), "EPN v1 N=%u", &n) != 1 || n == 0)
        throw DataError("bad EPN header: " + header);
    TypeRegistry reg = registry ? std::move(*registry) : TypeRegistry::numbered(n);
    if (reg.count() != n)
        throw DataError("registry has " + std::to_string(reg.count()) +
                        " names but EPN header says N=" + std::to_string(n));

    FrequencyMatrix freq(n);
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        unsigned long long i = 0, j = 0, c = 0;
        if (std::sscanf(line.c_str(), "%llu %llu %llu", &i, &j, &c) != 3)
            throw DataError("bad EPN line " + std::to_string(line_no) + ": " + line);
        if (i < 1 || i > n || j < 1 || j > n || i == j || c == 0)
            throw DataError("invalid EPN triple at line " + std::to_string(line_no));
        freq.add_count(static_cast<EventType>(i), static_cast<EventType>(j), c);
    }
    return EpnSnapshot(std::move(reg), std::move(freq), 0);
}

}  // namespace

EpnSnapshot load_epn(std::istream& in) { return load_epn_impl(in, nullptr); }

EpnSnapshot load_epn(std::istream& in, TypeRegistry registry) {
    return load_epn_impl(in, &registry);
}

EpnSnapshot load_epn_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open EPN file: " + path.string());
    return load_epn(in);
}

EpnSnapshot load_epn_file(const std::filesystem::path& path, TypeRegistry registry) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open EPN file: " + path.string());
    return load_epn(in, std::move(registry));
}

TypeRegistry load_names_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open names file: " + path.string());
    TypeRegistry reg;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
            line.pop_back();
        if (line.empty()) continue;
        reg.add(line);
    }
    if (reg.count() == 0) throw DataError("names file is empty: " + path.string());
    return reg;
}

void write_prediction_jsonl(std::ostream& out, const RankedPrediction& prediction,
                            const TypeRegistry& registry, std::string_view algorithm,
                            double elapsed_us) {
    std::size_t rank = 1;
    for (const auto& [type, score] : prediction.entries) {
        nlohmann::json rec{{"rank", rank},
                           {"type_id", type},
                           {"type_name", registry.name(type)},
                           {"score", score},
                           {"explored_count", prediction.explored_count},
                           {"elapsed", elapsed_us},
                           {"algorithm", std::string(algorithm)}};
        out << rec.dump() << '\n';
        ++rank;
    }
}

}  // namespace epn
