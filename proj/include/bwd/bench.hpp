#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace bwd {

struct BenchRow {
    std::string design;
    std::size_t n = 0;
    std::size_t d = 0;
    std::int64_t total_ns = 0;      ///< one uninstrumented pass over all n units
    double ns_per_assign = 0.0;
    double latency_p50 = 0.0;       ///< per-assignment latency quantiles, ns
    double latency_p90 = 0.0;
    double latency_p99 = 0.0;
    double slope_ns_per_step = 0.0; ///< trend of latency against step index
    double drift_fraction = 0.0;    ///< slope * (n - 1) / median latency
};

/// Units per latency sample; single calls are below clock resolution.
inline constexpr std::size_t kLatencyBatch = 32;

/*
Times `design` (two arms, q = 1/2, phi = 0) on random unit vectors of width d.
For every n: a warm-up pass, an uninstrumented timed pass for the total, and
an instrumented pass that records the latency of each batch of kLatencyBatch
assignments. The trend is a least-squares line through the medians of 50
equal blocks of batch latencies.
*/
std::vector<BenchRow> run_bench(std::span<const std::size_t> n_list, std::size_t d,
                                const std::string& design, std::uint64_t seed = 1);

void write_bench_csv(std::span<const BenchRow> rows, std::ostream& out);

} // namespace bwd
