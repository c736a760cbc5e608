#include "epn/independence.hpp"

#include <cmath>

#include "epn/stats.hpp"

namespace epn {

namespace {

constexpr std::size_t kHardCondLimit = 20;  // 2^20 contingency cells

void check_arguments(const PresenceSampleStore& store, EventType x, EventType y,
                     std::span<const EventType> cond) {
    if (store.empty()) throw std::invalid_argument("presence store has no samples");
    if (x == y) throw std::invalid_argument("cmi needs two distinct variables");
    if (x < 1 || x > store.type_count() || y < 1 || y > store.type_count())
        throw std::invalid_argument("event type id outside presence store");
    for (EventType c : cond) {
        if (c == x || c == y)
            throw std::invalid_argument("condition set must exclude the tested pair");
        if (c < 1 || c > store.type_count())
            throw std::invalid_argument("condition type id outside presence store");
    }
    if (cond.size() > kHardCondLimit)
        throw std::invalid_argument("condition set too large for contingency table");
}

}  // namespace

double cmi(const PresenceSampleStore& store, EventType x, EventType y,
           std::span<const EventType> cond) {
    check_arguments(store, x, y, cond);

    const std::size_t n_cells = std::size_t(1) << cond.size();
    // joint[c][x][y], marginals per condition assignment
    std::vector<std::uint64_t> joint(n_cells * 4, 0);
    const std::size_t n = store.sample_count();

    for (std::size_t s = 0; s < n; ++s) {
        std::size_t c = 0;
        for (std::size_t b = 0; b < cond.size(); ++b)
            c |= std::size_t(store.present(s, cond[b])) << b;
        const std::size_t xv = store.present(s, x);
        const std::size_t yv = store.present(s, y);
        ++joint[c * 4 + xv * 2 + yv];
    }

    const double total = static_cast<double>(n);
    double result = 0.0;
    for (std::size_t c = 0; c < n_cells; ++c) {
        const std::uint64_t* cell = &joint[c * 4];
        const std::uint64_t n_c = cell[0] + cell[1] + cell[2] + cell[3];
        if (n_c == 0) continue;
        const std::uint64_t nx[2] = {cell[0] + cell[1], cell[2] + cell[3]};
        const std::uint64_t ny[2] = {cell[0] + cell[2], cell[1] + cell[3]};
        for (int xv = 0; xv < 2; ++xv) {
            for (int yv = 0; yv < 2; ++yv) {
                const std::uint64_t nxy = cell[xv * 2 + yv];
                if (nxy == 0) continue;
                const double ratio = (static_cast<double>(nxy) * static_cast<double>(n_c)) /
                                     (static_cast<double>(nx[xv]) * static_cast<double>(ny[yv]));
                result += (static_cast<double>(nxy) / total) * std::log2(ratio);
            }
        }
    }
    return result;
}

double g2_statistic(double cmi_bits, std::uint64_t n_s) {
    if (cmi_bits < 0.0 && cmi_bits > -1e-9) cmi_bits = 0.0;
    if (cmi_bits < 0.0) throw std::invalid_argument("cmi must be non-negative");
    if (n_s < 1) throw std::invalid_argument("g2 needs at least one sample");
    return 2.0 * static_cast<double>(n_s) * std::log(2.0) * cmi_bits;
}

IndependenceVerdict is_independent(const PresenceSampleStore& store, EventType x,
                                   EventType y, std::span<const EventType> cond,
                                   double alpha, NsMode ns_mode, std::size_t cond_cap,
                                   std::uint64_t* truncations) {
    std::span<const EventType> used = cond;
    if (used.size() > cond_cap) {
        used = used.first(cond_cap);
        if (truncations) ++*truncations;
    }

    IndependenceVerdict v;
    v.cmi_bits = cmi(store, x, y, used);
    const std::uint64_t n_s = ns_mode == NsMode::events
                                  ? store.total_events()
                                  : store.sample_count();
    v.g2 = g2_statistic(v.cmi_bits, n_s);
    v.df = static_cast<unsigned>(1u << used.size());
    v.threshold = chi2_quantile(v.df, alpha);
    v.independent = v.g2 <= v.threshold;
    return v;
}

IndependenceVerdict CiTester::test(EventType x, EventType y,
                                   std::span<const EventType> cond) {
    ++tests_;
    std::string key;
    key.reserve((cond.size() + 2) * 5);
    auto append = [&key](EventType t) {
        key.append(reinterpret_cast<const char*>(&t), sizeof(t));
    };
    append(x);
    append(y);
    for (EventType c : cond) append(c);

    if (auto it = memo_.find(key); it != memo_.end()) return it->second;

    const IndependenceVerdict v =
        is_independent(*store_, x, y, cond, config_.alpha, config_.ns_mode,
                       config_.cond_cap, &truncations_);
    memo_.emplace(std::move(key), v);
    return v;
}

}  // namespace epn
