#include "bwd/bench.hpp"

#include "bwd/dgp.hpp"
#include "bwd/errors.hpp"
#include "bwd/estimators.hpp"
#include "bwd/online_design.hpp"
#include "bwd/rng.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <random>

namespace bwd {

namespace {

using Clock = std::chrono::steady_clock;

std::vector<double> random_unit_rows(std::size_t n, std::size_t d, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> normal;
    std::vector<double> rows(n * d);
    for (std::size_t i = 0; i < n; ++i) {
        double sq = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            rows[i * d + j] = normal(rng);
            sq += rows[i * d + j] * rows[i * d + j];
        }
        const double norm = std::sqrt(sq);
        for (std::size_t j = 0; j < d; ++j) rows[i * d + j] /= norm;
    }
    return rows;
}

std::int64_t elapsed_ns(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(b - a).count();
}

} // namespace

std::vector<BenchRow> run_bench(std::span<const std::size_t> n_list, std::size_t d,
                                const std::string& design, std::uint64_t seed) {
    for (std::size_t i = 1; i < n_list.size(); ++i)
        if (n_list[i] < n_list[i - 1]) throw InvalidParameter("n", "bench sizes must be ascending");

    DesignSpec spec;
    spec.design = design;
    spec.probs = {0.5, 0.5};
    std::vector<BenchRow> rows;
    volatile int sink = 0;

    for (std::size_t n : n_list) {
        if (n < kLatencyBatch) throw InvalidParameter("n", "bench size below latency batch");
        const auto data = random_unit_rows(n, d, Rng::derive(seed, n));
        auto pass = [&](std::uint64_t design_seed) {
            auto dsg = make_design(spec, n, d, design_seed);
            int acc = 0;
            for (std::size_t i = 0; i < n; ++i) acc += dsg->assign({data.data() + i * d, d});
            sink = sink + acc;
        };

        pass(Rng::derive(seed, 0));  // warm-up

        const auto t0 = Clock::now();
        pass(Rng::derive(seed, 1));
        const auto t1 = Clock::now();

        BenchRow row;
        row.design = design;
        row.n = n;
        row.d = d;
        row.total_ns = elapsed_ns(t0, t1);
        row.ns_per_assign = static_cast<double>(row.total_ns) / static_cast<double>(n);

        auto dsg = make_design(spec, n, d, Rng::derive(seed, 2));
        const std::size_t batches = n / kLatencyBatch;
        std::vector<double> latency(batches);
        int acc = 0;
        for (std::size_t b = 0; b < batches; ++b) {
            const auto s0 = Clock::now();
            for (std::size_t i = b * kLatencyBatch; i < (b + 1) * kLatencyBatch; ++i)
                acc += dsg->assign({data.data() + i * d, d});
            const auto s1 = Clock::now();
            latency[b] = static_cast<double>(elapsed_ns(s0, s1)) / kLatencyBatch;
        }
        sink = sink + acc;

        row.latency_p50 = quantile(latency, 0.5);
        row.latency_p90 = quantile(latency, 0.9);
        row.latency_p99 = quantile(latency, 0.99);

        // Least squares through block medians, x = block centre in steps.
        const std::size_t blocks = std::min<std::size_t>(50, batches);
        const std::size_t per_block = batches / blocks;
        std::vector<double> xs, ys;
        for (std::size_t b = 0; b < blocks; ++b) {
            std::vector<double> chunk(latency.begin() + static_cast<std::ptrdiff_t>(b * per_block),
                                      latency.begin() + static_cast<std::ptrdiff_t>((b + 1) * per_block));
            xs.push_back((static_cast<double>(b) + 0.5) * static_cast<double>(per_block * kLatencyBatch));
            ys.push_back(quantile(std::move(chunk), 0.5));
        }
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            mx += xs[i] / static_cast<double>(xs.size());
            my += ys[i] / static_cast<double>(ys.size());
        }
        double sxy = 0, sxx = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sxy += (xs[i] - mx) * (ys[i] - my);
            sxx += (xs[i] - mx) * (xs[i] - mx);
        }
        row.slope_ns_per_step = sxx > 0 ? sxy / sxx : 0.0;
        row.drift_fraction = row.latency_p50 > 0
                                 ? row.slope_ns_per_step * static_cast<double>(n - 1) / row.latency_p50
                                 : 0.0;
        rows.push_back(row);
    }
    return rows;
}

void write_bench_csv(std::span<const BenchRow> rows, std::ostream& out) {
    out << "design,n,d,total_ns,ns_per_assign,latency_p50_ns,latency_p90_ns,latency_p99_ns,"
           "slope_ns_per_step,drift_fraction\n";
    for (const auto& r : rows)
        out << r.design << ',' << r.n << ',' << r.d << ',' << r.total_ns << ','
            << format_double(r.ns_per_assign) << ',' << format_double(r.latency_p50) << ','
            << format_double(r.latency_p90) << ',' << format_double(r.latency_p99) << ','
            << format_double(r.slope_ns_per_step) << ',' << format_double(r.drift_fraction) << '\n';
}

} // namespace bwd
