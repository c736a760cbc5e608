#include "epn/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace epn {

SplitResult split(std::span<const EventInstance> events, SplitSpec spec,
                  std::uint64_t seed) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
        throw std::invalid_argument("train_fraction must be in (0,1)");

    std::vector<Cra> cras;
    {
        std::unordered_map<Cra, char> seen;
        for (const EventInstance& ev : events)
            if (seen.emplace(ev.cra, 1).second) cras.push_back(ev.cra);
    }

    std::vector<std::pair<std::uint64_t, Cra>> hashed;
    hashed.reserve(cras.size());
    for (Cra c : cras) hashed.emplace_back(mix64(c ^ mix64(seed)), c);
    std::sort(hashed.begin(), hashed.end());

    const std::size_t n_train = static_cast<std::size_t>(
        std::llround(spec.train_fraction * double(cras.size())));
    std::unordered_map<Cra, char> is_train;
    is_train.reserve(hashed.size());
    for (std::size_t i = 0; i < hashed.size(); ++i)
        is_train.emplace(hashed[i].second, i < n_train ? 1 : 0);

    SplitResult out;
    out.train_cras = n_train;
    out.test_cras = cras.size() - n_train;
    for (const EventInstance& ev : events) {
        if (is_train.at(ev.cra))
            out.train.push_back(ev);
        else
            out.test.push_back(ev);
    }
    return out;
}

double hit_or_miss(EventType observed, const RankedPrediction& prediction) {
    return prediction.contains(observed) ? 1.0 : 0.0;
}

double weighted_hit(EventType observed, const RankedPrediction& prediction) {
    double observed_score = 0.0;
    double max_score = 0.0;
    bool hit = false;
    for (const auto& [type, score] : prediction.entries) {
        max_score = std::max(max_score, score);
        if (type == observed) {
            observed_score = score;
            hit = true;
        }
    }
    if (!hit) return 0.0;
    if (max_score <= 0.0) return 1.0;  // all-tied degenerate list
    return observed_score / max_score;
}

std::string_view algorithm_name(Algorithm a) {
    return a == Algorithm::es ? "es" : "rset";
}

std::string EvaluationReport::delta_label(std::size_t delta) const {
    if (delta == 0) return "all";
    if (delta >= max_delta) return std::to_string(max_delta) + "+";
    return std::to_string(delta);
}

void EvaluationReport::write_csv(std::ostream& out) const {
    out << "# config: " << config_echo.dump() << '\n';
    out << "algorithm,k,delta,n_tests,n_hits,hit_or_miss,weighted,"
           "mean_query_elapsed_us,mean_explored\n";
    char buf[64];
    for (const auto& [key, stats] : cells) {
        out << algorithm_name(key.algorithm) << ',' << key.k << ','
            << delta_label(key.delta) << ',' << stats.n_tests << ',' << stats.n_hits
            << ',';
        std::snprintf(buf, sizeof buf, "%.9g", stats.hit_or_miss());
        out << buf << ',';
        std::snprintf(buf, sizeof buf, "%.9g", stats.weighted());
        out << buf << ',';
        if (timed) {
            std::snprintf(buf, sizeof buf, "%.6g", stats.mean_elapsed_us());
            out << buf;
        }
        out << ',';
        std::snprintf(buf, sizeof buf, "%.6g", stats.mean_explored());
        out << buf << '\n';
    }
}

nlohmann::json EvaluationReport::to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& [key, stats] : cells) {
        nlohmann::json row{{"algorithm", std::string(algorithm_name(key.algorithm))},
                           {"k", key.k},
                           {"delta", delta_label(key.delta)},
                           {"n_tests", stats.n_tests},
                           {"n_hits", stats.n_hits},
                           {"hit_or_miss", stats.hit_or_miss()},
                           {"weighted", stats.weighted()},
                           {"mean_explored", stats.mean_explored()}};
        if (timed)
            row["mean_query_elapsed_us"] = stats.mean_elapsed_us();
        else
            row["mean_query_elapsed_us"] = nullptr;
        rows.push_back(std::move(row));
    }
    return nlohmann::json{{"config", config_echo}, {"cells", std::move(rows)}};
}

namespace {

struct TestPoint {
    EventType eop = 0;
    EventType observed = 0;
    std::uint32_t delta = 0;  // EOP index: number of causes observed so far
};

std::vector<TestPoint> collect_test_points(std::span<const EventInstance> events) {
    // partitions in first-appearance order, events in arrival order
    std::unordered_map<Cra, std::vector<EventType>> by_cra;
    std::vector<Cra> order;
    for (const EventInstance& ev : events) {
        auto [it, fresh] = by_cra.try_emplace(ev.cra);
        if (fresh) order.push_back(ev.cra);
        it->second.push_back(ev.type);
    }
    std::vector<TestPoint> points;
    for (Cra cra : order) {
        const auto& seq = by_cra.at(cra);
        for (std::size_t pos = 1; pos < seq.size(); ++pos)
            points.push_back(TestPoint{seq[pos - 1], seq[pos],
                                       static_cast<std::uint32_t>(pos)});
    }
    return points;
}

struct PointResult {
    float weighted = 0.0f;
    std::uint32_t explored = 0;
    std::uint8_t hit = 0;
};

}  // namespace

EvaluationReport replay_evaluate(std::span<const EventInstance> test_events,
                                 std::shared_ptr<const EpnSnapshot> snapshot,
                                 std::shared_ptr<const PresenceSampleStore> store,
                                 const ReplayOptions& options) {
    if (!snapshot) throw std::invalid_argument("replay needs a snapshot");
    if (options.ks.empty()) throw std::invalid_argument("replay needs at least one k");
    for (std::size_t k : options.ks)
        if (k < 1) throw std::invalid_argument("k must be at least 1");
    if (options.max_delta < 1)
        throw std::invalid_argument("max_delta must be at least 1");

    const std::vector<TestPoint> points = collect_test_points(test_events);

    EvaluationReport report;
    report.max_delta = options.max_delta;
    report.timed = !options.parallel;

    const std::size_t n_runs = options.algorithms.size() * options.ks.size();
    auto run_query = [&](const TestPoint& tp, Algorithm alg, std::size_t k,
                         CiOracle* oracle) {
        QueryContext ctx;
        ctx.snapshot = snapshot.get();
        ctx.causes = {tp.eop};
        ctx.k = k;
        ctx.ci = oracle;
        return alg == Algorithm::es ? es_topk(ctx) : rset_topk(ctx);
    };
    auto accumulate = [&](const TestPoint& tp, Algorithm alg, std::size_t k,
                          const PointResult& r, double elapsed_us) {
        const std::size_t bucket = std::min<std::size_t>(tp.delta, options.max_delta);
        for (std::size_t delta : {bucket, std::size_t(0)}) {
            CellStats& cell = report.cells[CellKey{alg, k, delta}];
            ++cell.n_tests;
            cell.n_hits += r.hit;
            cell.weighted_sum += r.weighted;
            cell.elapsed_us_sum += elapsed_us;
            cell.explored_sum += r.explored;
        }
    };

    if (!options.parallel) {
        std::unique_ptr<CiTester> tester;
        if (options.ci && store)
            tester = std::make_unique<CiTester>(store, options.ci_config);
        for (const TestPoint& tp : points) {
            for (Algorithm alg : options.algorithms) {
                for (std::size_t k : options.ks) {
                    const auto t0 = std::chrono::steady_clock::now();
                    const RankedPrediction pred = run_query(tp, alg, k, tester.get());
                    const auto t1 = std::chrono::steady_clock::now();
                    PointResult r;
                    r.hit = pred.contains(tp.observed) ? 1 : 0;
                    r.weighted = static_cast<float>(weighted_hit(tp.observed, pred));
                    r.explored = static_cast<std::uint32_t>(pred.explored_count);
                    const double us =
                        std::chrono::duration<double, std::micro>(t1 - t0).count();
                    accumulate(tp, alg, k, r, us);
                }
            }
        }
    } else {
        // Accuracy-only parallel mode: per-point results land in a
        // preallocated block buffer and are folded in index order, so the
        // report is bit-identical to the serial one regardless of threads.
        constexpr std::size_t kBlock = 16384;
        std::vector<PointResult> results;
#ifdef _OPENMP
        const int n_threads = omp_get_max_threads();
#else
        const int n_threads = 1;
#endif
        std::vector<std::unique_ptr<CiTester>> testers(n_threads);
        if (options.ci && store)
            for (auto& t : testers)
                t = std::make_unique<CiTester>(store, options.ci_config);

        for (std::size_t begin = 0; begin < points.size(); begin += kBlock) {
            const std::size_t end = std::min(points.size(), begin + kBlock);
            results.assign((end - begin) * n_runs, PointResult{});
            #pragma omp parallel for schedule(dynamic, 64)
            for (std::int64_t idx = static_cast<std::int64_t>(begin);
                 idx < static_cast<std::int64_t>(end); ++idx) {
#ifdef _OPENMP
                CiOracle* oracle = testers[omp_get_thread_num()].get();
#else
                CiOracle* oracle = testers.empty() ? nullptr : testers[0].get();
#endif
                const TestPoint& tp = points[idx];
                std::size_t run = 0;
                for (Algorithm alg : options.algorithms) {
                    for (std::size_t k : options.ks) {
                        const RankedPrediction pred = run_query(tp, alg, k, oracle);
                        PointResult& r = results[(idx - begin) * n_runs + run];
                        r.hit = pred.contains(tp.observed) ? 1 : 0;
                        r.weighted =
                            static_cast<float>(weighted_hit(tp.observed, pred));
                        r.explored = static_cast<std::uint32_t>(pred.explored_count);
                        ++run;
                    }
                }
            }
            for (std::size_t idx = begin; idx < end; ++idx) {
                std::size_t run = 0;
                for (Algorithm alg : options.algorithms) {
                    for (std::size_t k : options.ks) {
                        accumulate(points[idx], alg, k,
                                   results[(idx - begin) * n_runs + run], 0.0);
                        ++run;
                    }
                }
            }
        }
    }
    return report;
}

}  // namespace epn
