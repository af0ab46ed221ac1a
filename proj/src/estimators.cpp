#include "bwd/estimators.hpp"

#include "bwd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace bwd {

double dim_estimate(std::span<const int> z, std::span<const double> y_observed, double q) {
    if (z.empty()) throw InvalidParameter("z", "empty assignment vector");
    if (z.size() != y_observed.size()) throw DimensionMismatch("z and Y differ in length");
    if (!(q > 0.0 && q < 1.0)) throw InvalidParameter("q", "must lie in (0, 1)");
    double total = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i)
        total += z[i] > 0 ? y_observed[i] / q : -y_observed[i] / (1.0 - q);
    return total / static_cast<double>(z.size());
}

std::vector<double> ht_contrasts(std::span<const int> groups, std::span<const double> y_observed,
                                 std::span<const double> probs) {
    if (groups.empty()) throw InvalidParameter("groups", "empty assignment vector");
    if (groups.size() != y_observed.size()) throw DimensionMismatch("groups and Y differ in length");
    const std::size_t k = probs.size();
    std::vector<double> arm_totals(k, 0.0);
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const auto g = static_cast<std::size_t>(groups[i]);
        if (g >= k) throw InvalidParameter("groups", "group index out of range");
        arm_totals[g] += y_observed[i] / probs[g];
    }
    const double n = static_cast<double>(groups.size());
    std::vector<double> out;
    for (std::size_t a = 1; a < k; ++a) out.push_back((arm_totals[a] - arm_totals[0]) / n);
    return out;
}

double sate_true(const Matrix& Y, std::size_t arm, std::size_t reference) {
    const auto k = static_cast<std::size_t>(Y.cols());
    if (arm >= k || reference >= k) throw InvalidParameter("arm", "arm index out of range");
    return (Y.col(static_cast<Eigen::Index>(arm)) - Y.col(static_cast<Eigen::Index>(reference))).mean();
}

std::vector<double> mu_vector(std::span<const double> y1, std::span<const double> y0, double q) {
    if (y1.size() != y0.size()) throw DimensionMismatch("potential outcome vectors differ in length");
    std::vector<double> mu(y1.size());
    for (std::size_t i = 0; i < mu.size(); ++i) mu[i] = y1[i] / (4.0 * q) + y0[i] / (4.0 * (1.0 - q));
    return mu;
}

namespace {

Imbalance norms(std::span<const double> v) {
    Imbalance out;
    double sq = 0.0;
    for (double x : v) {
        sq += x * x;
        out.linf = std::max(out.linf, std::abs(x));
    }
    out.l2 = std::sqrt(sq);
    return out;
}

} // namespace

Imbalance imbalance(std::span<const double> eta, const Matrix& X) {
    if (eta.size() != static_cast<std::size_t>(X.rows())) throw DimensionMismatch("eta and X differ in length");
    std::vector<double> w(static_cast<std::size_t>(X.cols()), 0.0);
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        for (Eigen::Index j = 0; j < X.cols(); ++j) w[j] += eta[i] * X(i, j);
    return norms(w);
}

std::vector<std::vector<double>> group_sums(std::span<const int> groups, const Matrix& X, std::size_t k) {
    if (groups.size() != static_cast<std::size_t>(X.rows())) throw DimensionMismatch("groups and X differ in length");
    std::vector<std::vector<double>> sums(k, std::vector<double>(static_cast<std::size_t>(X.cols()), 0.0));
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        auto& s = sums.at(static_cast<std::size_t>(groups[i]));
        for (Eigen::Index j = 0; j < X.cols(); ++j) s[j] += X(i, j);
    }
    return sums;
}

Imbalance control_imbalance(std::span<const int> groups, const Matrix& X, std::span<const double> probs) {
    const auto sums = group_sums(groups, X, probs.size());
    Imbalance worst;
    std::vector<double> diff(static_cast<std::size_t>(X.cols()));
    for (std::size_t a = 1; a < probs.size(); ++a) {
        const double scale = 2.0 / (1.0 / probs[a] + 1.0 / probs[0]);
        for (std::size_t j = 0; j < diff.size(); ++j)
            diff[j] = scale * (sums[a][j] / probs[a] - sums[0][j] / probs[0]);
        const Imbalance m = norms(diff);
        worst.l2 = std::max(worst.l2, m.l2);
        worst.linf = std::max(worst.linf, m.linf);
    }
    return worst;
}

double entropy_normalized(std::span<const std::size_t> counts) {
    if (counts.size() < 2) throw InvalidParameter("counts", "need at least two groups");
    const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::size_t{0}));
    if (total < 1.0) throw InvalidParameter("counts", "no assignments");
    double h = 0.0;
    for (std::size_t c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / total;
        h -= p * std::log(p);
    }
    return h / std::log(static_cast<double>(counts.size()));
}

double quantile(std::vector<double> values, double p) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(values.size())));
    return values[std::clamp<std::size_t>(rank, 1, values.size()) - 1];
}

Summary aggregate(std::span<const ReplicationRecord> records) {
    Summary s;
    s.replications = records.size();
    if (records.empty()) return s;
    const double R = static_cast<double>(records.size());
    const std::size_t arms = records.front().tau_hat.size();
    s.bias.assign(arms, 0.0);
    s.mse.assign(arms, 0.0);

    std::vector<double> l2, linf, disc, runtime;
    double entropy = 0.0;
    std::size_t violations = 0;
    for (const auto& r : records) {
        for (std::size_t a = 0; a < arms; ++a) {
            const double err = r.tau_hat[a] - r.tau_true[a];
            s.bias[a] += err / R;
            s.mse[a] += err * err / R;
        }
        s.mean_tau_hat += (arms ? r.tau_hat[0] : 0.0) / R;
        s.mean_tau_true += (arms ? r.tau_true[0] : 0.0) / R;
        l2.push_back(r.imbalance_l2);
        linf.push_back(r.imbalance_linf);
        disc.push_back(r.multi_disc);
        runtime.push_back(static_cast<double>(r.runtime_ns));
        entropy += r.entropy;
        if (r.overflow_count > 0) ++violations;
    }
    if (arms > 0) {
        s.mean_bias = std::accumulate(s.bias.begin(), s.bias.end(), 0.0) / static_cast<double>(arms);
        s.mise = std::accumulate(s.mse.begin(), s.mse.end(), 0.0) / static_cast<double>(arms);
    }
    s.median_imbalance_l2 = quantile(l2, 0.5);
    s.median_imbalance_linf = quantile(linf, 0.5);
    s.median_multi_disc = quantile(disc, 0.5);
    s.mean_entropy = entropy / R;
    s.violation_rate = static_cast<double>(violations) / R;
    s.runtime_p50 = static_cast<std::int64_t>(quantile(runtime, 0.5));
    s.runtime_p90 = static_cast<std::int64_t>(quantile(runtime, 0.9));
    s.runtime_p99 = static_cast<std::int64_t>(quantile(runtime, 0.99));
    return s;
}

double power_iteration(const Matrix& A, double tolerance, std::size_t max_iter) {
    if (A.rows() != A.cols()) throw DimensionMismatch("power iteration needs a square matrix");
    const Eigen::Index n = A.rows();
    if (n == 0) return 0.0;
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = 1.0 + 1e-3 * static_cast<double>(i % 7);
    v.normalize();
    double lambda = 0.0;
    for (std::size_t it = 0; it < max_iter; ++it) {
        Eigen::VectorXd next = A * v;
        const double norm = next.norm();
        if (norm == 0.0) return 0.0;
        const double updated = v.dot(next);
        next /= norm;
        const bool converged = std::abs(updated - lambda) <= tolerance * std::abs(updated);
        lambda = updated;
        v = next;
        if (converged && it > 0) break;
    }
    return lambda;
}

CovarianceEstimate empirical_z_covariance(
    const Matrix& X, const std::function<std::vector<int>(const Matrix&, std::size_t)>& design,
    std::size_t reps) {
    if (reps < 2) throw InvalidParameter("reps", "need at least two replications");
    const Eigen::Index n = X.rows();
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
    Matrix second = Matrix::Zero(n, n);
    Eigen::VectorXd z(n);
    for (std::size_t r = 0; r < reps; ++r) {
        const auto draw = design(X, r);
        if (draw.size() != static_cast<std::size_t>(n)) throw DimensionMismatch("design returned wrong length");
        for (Eigen::Index i = 0; i < n; ++i) z(i) = draw[i];
        mean += z;
        second.selfadjointView<Eigen::Lower>().rankUpdate(z);
    }
    const double R = static_cast<double>(reps);
    mean /= R;
    Matrix full = second.selfadjointView<Eigen::Lower>();
    CovarianceEstimate out;
    out.cov = (full - R * mean * mean.transpose()) / (R - 1.0);
    out.lambda_max = power_iteration(out.cov);
    return out;
}

} // namespace bwd
