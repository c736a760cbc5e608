// Benchmark comparing the serial reference kernels against the OpenMP
// variants: batch observation over a partitioned window, and evaluation
// replay in accuracy-only mode. Verifies that the parallel paths reproduce
// the serial results before reporting timings.

#include <chrono>
#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "epn/engine.hpp"
#include "epn/eval.hpp"
#include "epn/ingest.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

epn::SyntheticSpec dense_spec(std::uint32_t n_types, std::size_t n_partitions,
                              std::uint64_t seed) {
    epn::SyntheticSpec spec;
    spec.n_types = n_types;
    spec.n_partitions = n_partitions;
    spec.seed = seed;
    spec.max_partition_len = 60;
    spec.absorb.assign(n_types, 0.10);
    spec.transition.assign(std::size_t(n_types) * n_types, 0.0);
    for (std::uint32_t i = 0; i < n_types; ++i) {
        double remaining = 0.90;
        for (std::uint32_t j = 0; j < n_types; ++j) {
            if (i == j) continue;
            const double w =
                double(epn::mix64(seed ^ (std::uint64_t(i) << 32) ^ j) % 1000) + 1.0;
            spec.transition[std::size_t(i) * n_types + j] = w;
        }
        double sum = 0.0;
        for (std::uint32_t j = 0; j < n_types; ++j)
            sum += spec.transition[std::size_t(i) * n_types + j];
        for (std::uint32_t j = 0; j < n_types; ++j)
            spec.transition[std::size_t(i) * n_types + j] *= remaining / sum;
    }
    return spec;
}

int run(std::uint32_t n_types, std::size_t n_partitions, std::size_t repeats) {
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (compiled without OpenMP)\n");
#endif
    std::printf("generating synthetic stream: N=%u partitions=%zu\n", n_types,
                n_partitions);
    const epn::SyntheticResult data =
        generate_synthetic(dense_spec(n_types, n_partitions, 7));

    epn::PartitionedWindow window = epn::PartitionedWindow::unbounded();
    for (const epn::EventInstance& ev : data.stream.events) window.ingest(ev);

    // --- observation kernel ---
    epn::FrequencyMatrix serial_freq(n_types);
    auto t0 = Clock::now();
    for (std::size_t r = 0; r < repeats; ++r) {
        serial_freq = epn::FrequencyMatrix(n_types);
        epn::observe(window, serial_freq);
    }
    const double observe_serial = seconds_since(t0) / double(repeats);

    epn::FrequencyMatrix parallel_freq(n_types);
    t0 = Clock::now();
    for (std::size_t r = 0; r < repeats; ++r) {
        parallel_freq = epn::FrequencyMatrix(n_types);
        epn::observe_parallel(window, parallel_freq);
    }
    const double observe_parallel_s = seconds_since(t0) / double(repeats);

    if (!(serial_freq == parallel_freq)) {
        std::fprintf(stderr, "FAIL: parallel observation diverged from serial\n");
        return 1;
    }
    std::printf("observe   serial %.4fs  parallel %.4fs  speedup %.2fx  (equal: yes)\n",
                observe_serial, observe_parallel_s,
                observe_serial / observe_parallel_s);

    // --- replay kernel ---
    epn::SplitSpec split_spec;
    const epn::SplitResult divided = epn::split(data.stream.events, split_spec, 11);
    epn::StreamEngine engine(data.stream.registry, epn::EngineConfig{});
    for (const epn::EventInstance& ev : divided.train) engine.feed(ev);
    engine.finish();

    epn::ReplayOptions options;
    options.ks = {1, 3, 5};
    options.ci = false;

    options.parallel = false;
    t0 = Clock::now();
    const epn::EvaluationReport serial_report =
        replay_evaluate(divided.test, engine.snapshot(), engine.store(), options);
    const double replay_serial = seconds_since(t0);

    options.parallel = true;
    t0 = Clock::now();
    const epn::EvaluationReport parallel_report =
        replay_evaluate(divided.test, engine.snapshot(), engine.store(), options);
    const double replay_parallel = seconds_since(t0);

    bool equal = serial_report.cells.size() == parallel_report.cells.size();
    if (equal) {
        for (const auto& [key, stats] : serial_report.cells) {
            const epn::CellStats* other =
                parallel_report.cell(key.algorithm, key.k, key.delta);
            if (!other || other->n_tests != stats.n_tests ||
                other->n_hits != stats.n_hits ||
                other->weighted_sum != stats.weighted_sum) {
                equal = false;
                break;
            }
        }
    }
    if (!equal) {
        std::fprintf(stderr, "FAIL: parallel replay accuracy diverged from serial\n");
        return 1;
    }
    std::printf("replay    serial %.4fs  parallel %.4fs  speedup %.2fx  (equal: yes)\n",
                replay_serial, replay_parallel, replay_serial / replay_parallel);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    std::uint32_t n_types = 80;
    std::size_t n_partitions = 60000;
    std::size_t repeats = 5;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--smoke") {
            n_types = 20;
            n_partitions = 2000;
            repeats = 2;
        } else if (arg == "--n-types" && i + 1 < argc) {
            n_types = static_cast<std::uint32_t>(std::stoul(argv[++i]));
        } else if (arg == "--n-partitions" && i + 1 < argc) {
            n_partitions = std::stoul(argv[++i]);
        } else if (arg == "--repeats" && i + 1 < argc) {
            repeats = std::stoul(argv[++i]);
        } else {
            std::fprintf(stderr,
                         "usage: epn-bench [--smoke] [--n-types N] "
                         "[--n-partitions P] [--repeats R]\n");
            return 1;
        }
    }
    return run(n_types, n_partitions, repeats);
}
