#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace epn {

/// Dense event-type id. Valid ids are 1..N; 0 is "no type".
using EventType = std::uint32_t;

/// Common relational attribute value (session id, blackout id, ...).
/// Opaque to every algorithm; string CRAs are interned to ids by the parsers.
using Cra = std::uint64_t;

/// Opaque key/value payload carried on events, never interpreted.
using AttributeSet = std::vector<std::pair<std::string, std::string>>;

/// Input data could not be parsed or is inconsistent (CLI exit code 2).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad command line or configuration (CLI exit code 1).
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An event arrived before the start of the currently open window.
class OutOfOrderError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One timestamped occurrence in the stream.
struct EventInstance {
    double timestamp = 0.0;
    EventType type = 0;
    Cra cra = 0;
    /// Shared so that copies of an event stay cheap; null means empty set.
    std::shared_ptr<const AttributeSet> attributes;

    EventInstance() = default;
    EventInstance(double ts, EventType t, Cra c,
                  std::shared_ptr<const AttributeSet> attrs = nullptr)
        : timestamp(ts), type(t), cra(c), attributes(std::move(attrs)) {}

    bool operator==(const EventInstance& o) const {
        return timestamp == o.timestamp && type == o.type && cra == o.cra;
    }
};

/// Bijective mapping between dense type ids 1..N and names.
/// Fixed after the configuration phase; never grows mid-stream.
class TypeRegistry {
public:
    TypeRegistry() = default;

    /// Registers a new name, returning the next dense id. Throws on duplicates.
    EventType add(std::string name) {
        if (ids_.contains(name))
            throw std::invalid_argument("duplicate event type name: " + name);
        names_.push_back(std::move(name));
        const auto id = static_cast<EventType>(names_.size());
        ids_.emplace(names_.back(), id);
        return id;
    }

    /// Registry with n types named "<prefix>1".."<prefix>n".
    static TypeRegistry numbered(std::uint32_t n, std::string_view prefix = "E") {
        TypeRegistry reg;
        for (std::uint32_t i = 1; i <= n; ++i)
            reg.add(std::string(prefix) + std::to_string(i));
        return reg;
    }

    std::uint32_t count() const { return static_cast<std::uint32_t>(names_.size()); }

    bool contains(EventType id) const { return id >= 1 && id <= names_.size(); }

    std::optional<EventType> find(std::string_view name) const {
        auto it = ids_.find(std::string(name));
        if (it == ids_.end()) return std::nullopt;
        return it->second;
    }

    /// Resolves a name or a decimal id string; throws DataError naming the token.
    EventType require(std::string_view token) const {
        if (auto id = find(token)) return *id;
        // fall back to a raw numeric id
        try {
            std::size_t pos = 0;
            const long v = std::stol(std::string(token), &pos);
            if (pos == token.size() && v >= 1 &&
                static_cast<std::uint64_t>(v) <= names_.size())
                return static_cast<EventType>(v);
        } catch (const std::exception&) {
        }
        throw DataError("unknown event type: " + std::string(token));
    }

    const std::string& name(EventType id) const {
        if (!contains(id)) throw std::out_of_range("event type id out of range");
        return names_[id - 1];
    }

    bool operator==(const TypeRegistry& o) const { return names_ == o.names_; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, EventType> ids_;
};

/// splitmix64; used wherever a seeded, platform-stable hash is needed.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace epn
