#pragma once

#include "bwd/dgp.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace bwd {

/// Horvitz-Thompson difference estimate for two arms:
/// (1/n) sum z_i / p_i * Y_i with p_i = q for z_i = +1, 1 - q otherwise.
double dim_estimate(std::span<const int> z, std::span<const double> y_observed, double q);

/// k-arm contrasts against arm 0: (1/n) sum [1{g=a}/p_a - 1{g=0}/p_0] Y_i, a = 1..k-1.
std::vector<double> ht_contrasts(std::span<const int> groups, std::span<const double> y_observed,
                                 std::span<const double> probs);

/// Mean of y(arm) - y(reference) over the sample.
double sate_true(const Matrix& Y, std::size_t arm, std::size_t reference);

/// mu_i = y_i(1)/(4q) + y_i(0)/(4(1-q)).
std::vector<double> mu_vector(std::span<const double> y1, std::span<const double> y0, double q);

struct Imbalance {
    double l2 = 0.0;
    double linf = 0.0;
};

/// Norms of sum_i eta_i x_i.
Imbalance imbalance(std::span<const double> eta, const Matrix& X);

/// Per-group sums of assigned covariate rows.
std::vector<std::vector<double>> group_sums(std::span<const int> groups, const Matrix& X, std::size_t k);

/// Worst arm-vs-control weighted imbalance, 2 (s_a/p_a - s_0/p_0) / (1/p_a + 1/p_0).
/// For two arms this is exactly sum eta_i x_i.
Imbalance control_imbalance(std::span<const int> groups, const Matrix& X, std::span<const double> probs);

/// -sum p_j ln p_j / ln k over the empirical shares.
double entropy_normalized(std::span<const std::size_t> counts);

struct ReplicationRecord {
    std::size_t rep = 0;
    std::vector<double> tau_hat;
    std::vector<double> tau_true;
    double imbalance_l2 = 0.0;
    double imbalance_linf = 0.0;
    double multi_disc = 0.0;
    double entropy = 0.0;
    std::vector<std::size_t> group_counts;
    std::size_t overflow_count = 0;
    std::int64_t runtime_ns = 0;
};

struct Summary {
    std::size_t replications = 0;
    std::vector<double> bias;   ///< per arm contrast
    std::vector<double> mse;    ///< per arm contrast
    double mean_bias = 0.0;
    double mise = 0.0;          ///< unweighted mean of per-arm MSE
    double median_imbalance_l2 = 0.0;
    double median_imbalance_linf = 0.0;
    double median_multi_disc = 0.0;
    double mean_entropy = 0.0;
    double violation_rate = 0.0;  ///< share of replications with an overflow
    double mean_tau_hat = 0.0;
    double mean_tau_true = 0.0;
    std::int64_t runtime_p50 = 0;
    std::int64_t runtime_p90 = 0;
    std::int64_t runtime_p99 = 0;
};

Summary aggregate(std::span<const ReplicationRecord> records);

/// Nearest-rank quantile of an unsorted sample, p in [0, 1].
double quantile(std::vector<double> values, double p);

/// Largest eigenvalue of a symmetric PSD matrix by power iteration.
double power_iteration(const Matrix& A, double tolerance = 1e-8, std::size_t max_iter = 200000);

struct CovarianceEstimate {
    Matrix cov;
    double lambda_max = 0.0;
};

/// Draws `design(X, rep)` for rep = 0..reps-1, each a +-1 vector of length n,
/// and returns the sample covariance of z with its top eigenvalue.
CovarianceEstimate empirical_z_covariance(
    const Matrix& X, const std::function<std::vector<int>(const Matrix&, std::size_t)>& design,
    std::size_t reps);

} // namespace bwd
