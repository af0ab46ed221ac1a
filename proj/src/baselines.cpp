#include "bwd/baselines.hpp"

#include "bwd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace bwd {

std::string_view to_string(BaselineKind kind) {
    switch (kind) {
    case BaselineKind::Bernoulli: return "bernoulli";
    case BaselineKind::Complete: return "complete";
    case BaselineKind::Efron: return "efron";
    case BaselineKind::Smith: return "smith";
    case BaselineKind::Alweiss: return "alweiss";
    }
    return "?";
}

BaselineKind parse_baseline(std::string_view text) {
    if (text == "bernoulli") return BaselineKind::Bernoulli;
    if (text == "complete") return BaselineKind::Complete;
    if (text == "efron") return BaselineKind::Efron;
    if (text == "smith") return BaselineKind::Smith;
    if (text == "alweiss") return BaselineKind::Alweiss;
    throw InvalidParameter("design", "unknown baseline '" + std::string(text) + "'");
}

std::vector<std::size_t> largest_remainder_quotas(std::span<const double> probs, std::size_t n) {
    std::vector<std::size_t> quota(probs.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t used = 0;
    for (std::size_t j = 0; j < probs.size(); ++j) {
        const double exact = probs[j] * static_cast<double>(n);
        quota[j] = static_cast<std::size_t>(std::floor(exact));
        used += quota[j];
        remainders.emplace_back(exact - static_cast<double>(quota[j]), j);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; used < n; ++i, ++used) ++quota[remainders[i % remainders.size()].second];
    return quota;
}

namespace {

bool is_uniform(std::span<const double> p) {
    return std::all_of(p.begin(), p.end(), [&](double v) { return std::abs(v - p[0]) < 1e-12; });
}

} // namespace

Baseline::Baseline(BaselineKind kind, std::vector<double> probs, std::size_t n, std::size_t d,
                   const BaselineParams& params, Rng rng)
    : kind_(kind), probs_(std::move(probs)), n_(n), params_(params), rng_(rng),
      counts_(probs_.size(), 0) {
    if (probs_.size() < 2) throw InvalidParameter("p", "need at least two groups");
    for (double p : probs_)
        if (!(p > 0.0)) throw InvalidParameter("p", "probabilities must be positive");
    if (std::abs(std::accumulate(probs_.begin(), probs_.end(), 0.0) - 1.0) > 1e-9)
        throw InvalidParameter("p", "probabilities must sum to 1");
    if (n_ < 1) throw InvalidParameter("n", "horizon must be at least 1");

    switch (kind_) {
    case BaselineKind::Complete:
        quota_ = largest_remainder_quotas(probs_, n_);
        break;
    case BaselineKind::Efron:
        if (probs_.size() != 2 || !is_uniform(probs_))
            throw InvalidParameter("design", "efron requires two arms with q = 1/2");
        if (!(params_.efron_bias >= 0.5 && params_.efron_bias <= 1.0))
            throw InvalidParameter("efron_bias", "must lie in [1/2, 1]");
        break;
    case BaselineKind::Smith:
        if (!is_uniform(probs_)) throw InvalidParameter("design", "smith requires uniform p");
        if (!(params_.smith_rho >= 0.0)) throw InvalidParameter("smith_rho", "must be non-negative");
        break;
    case BaselineKind::Alweiss:
        if (probs_.size() != 2 || !is_uniform(probs_))
            throw InvalidParameter("design", "alweiss requires two arms with q = 1/2");
        if (!(params_.delta > 0.0 && params_.delta < 1.0))
            throw InvalidParameter("delta", "must lie in (0, 1)");
        w_.assign(d, 0.0);
        c_alweiss_ = params_.alweiss_constant *
                     std::log(static_cast<double>(n_) * static_cast<double>(d) / params_.delta);
        break;
    case BaselineKind::Bernoulli:
        break;
    }
}

std::vector<double> Baseline::next_probabilities(std::span<const double> x) const {
    const std::size_t k = probs_.size();
    std::vector<double> out(k, 0.0);
    switch (kind_) {
    case BaselineKind::Bernoulli:
        out = probs_;
        break;
    case BaselineKind::Complete: {
        const auto left = std::accumulate(quota_.begin(), quota_.end(), std::size_t{0});
        if (left == 0) throw HorizonExceeded("complete randomization quota exhausted");
        for (std::size_t j = 0; j < k; ++j)
            out[j] = static_cast<double>(quota_[j]) / static_cast<double>(left);
        break;
    }
    case BaselineKind::Efron:
        if (counts_[0] == counts_[1]) {
            out = {0.5, 0.5};
        } else {
            const std::size_t under = counts_[0] < counts_[1] ? 0 : 1;
            out[under] = params_.efron_bias;
            out[1 - under] = 1.0 - params_.efron_bias;
        }
        break;
    case BaselineKind::Smith: {
        const auto total = std::accumulate(counts_.begin(), counts_.end(), std::size_t{0});
        double norm = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            out[j] = std::pow(static_cast<double>(total - counts_[j]) + 1.0, params_.smith_rho);
            norm += out[j];
        }
        for (double& v : out) v /= norm;
        break;
    }
    case BaselineKind::Alweiss: {
        if (x.size() != w_.size()) throw DimensionMismatch("covariate dimension mismatch");
        const double s = std::inner_product(w_.begin(), w_.end(), x.begin(), 0.0);
        const double p = (fallback_ || std::abs(s) > c_alweiss_) ? 0.5 : 0.5 * (1.0 - s / c_alweiss_);
        out = {1.0 - p, p};
        break;
    }
    }
    return out;
}

int Baseline::draw(std::span<const double> probs) {
    const double u = rng_.uniform();
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < probs.size(); ++j) {
        acc += probs[j];
        if (u < acc) return static_cast<int>(j);
    }
    // last group with positive probability
    for (std::size_t j = probs.size(); j-- > 0;)
        if (probs[j] > 0.0) return static_cast<int>(j);
    return static_cast<int>(probs.size() - 1);
}

int Baseline::assign(std::span<const double> x) {
    if (kind_ == BaselineKind::Complete && assigned_ >= n_)
        throw HorizonExceeded("complete randomization quota exhausted");
    if (kind_ == BaselineKind::Alweiss && !fallback_) {
        if (x.size() != w_.size()) throw DimensionMismatch("covariate dimension mismatch");
        const double s = std::inner_product(w_.begin(), w_.end(), x.begin(), 0.0);
        if (std::abs(s) > c_alweiss_) {
            fallback_ = true;
            ++overflows_;
        }
    }
    const auto probs = next_probabilities(x);
    const int g = draw(probs);
    ++counts_[g];
    ++assigned_;
    if (kind_ == BaselineKind::Complete) --quota_[g];
    if (kind_ == BaselineKind::Alweiss && !fallback_) {
        const double sign = g == 1 ? 1.0 : -1.0;
        for (std::size_t j = 0; j < w_.size(); ++j) w_[j] += sign * x[j];
    }
    return g;
}

} // namespace bwd
