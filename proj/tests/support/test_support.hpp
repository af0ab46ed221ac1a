#pragma once

#include "bwd/rng.hpp"

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

namespace testing_support {

inline std::vector<double> random_unit(bwd::Rng& rng, std::size_t d) {
    std::normal_distribution<double> normal;
    std::vector<double> x(d);
    double sq = 0.0;
    for (double& v : x) {
        v = normal(rng);
        sq += v * v;
    }
    for (double& v : x) v /= std::sqrt(sq);
    return x;
}

inline std::vector<std::vector<double>> random_unit_rows(std::size_t n, std::size_t d, std::uint64_t seed) {
    bwd::Rng rng(seed);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < n; ++i) rows.push_back(random_unit(rng, d));
    return rows;
}

/// Standard error of a binomial proportion.
inline double binomial_se(double p, std::size_t trials) {
    return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

inline double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double sample_sd(const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

} // namespace testing_support
