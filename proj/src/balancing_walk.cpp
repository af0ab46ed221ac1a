#include "bwd/balancing_walk.hpp"

#include "bwd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace bwd {

std::string_view to_string(OverflowPolicy policy) {
    switch (policy) {
    case OverflowPolicy::Strict: return "strict";
    case OverflowPolicy::RandomFallback: return "random";
    case OverflowPolicy::Restart: return "restart";
    }
    return "?";
}

OverflowPolicy parse_policy(std::string_view text) {
    if (text == "strict") return OverflowPolicy::Strict;
    if (text == "random" || text == "random-fallback") return OverflowPolicy::RandomFallback;
    if (text == "restart") return OverflowPolicy::Restart;
    throw InvalidParameter("policy", "unknown overflow policy '" + std::string(text) + "'");
}

DesignParams DesignParams::make(std::size_t n, std::size_t d, double q, double phi, double delta,
                                OverflowPolicy policy) {
    if (n < 1) throw InvalidParameter("n", "horizon must be at least 1");
    if (d < 1) throw InvalidParameter("d", "dimension must be at least 1");
    if (!(q > 0.0 && q < 1.0)) throw InvalidParameter("q", "must lie in (0, 1)");
    if (!(phi >= 0.0 && phi < 1.0)) throw InvalidParameter("phi", "must lie in [0, 1)");
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidParameter("delta", "must lie in (0, 1)");

    DesignParams p;
    p.n = n;
    p.d = d;
    p.q = q;
    p.phi = phi;
    p.delta = delta;
    p.policy = policy;
    p.c = std::min(1.0 / p.q_eff(), 9.3) * std::log(2.0 * static_cast<double>(n) / delta);
    return p;
}

ConcentrationConstants DesignParams::constants() const noexcept {
    ConcentrationConstants k;
    k.sigma_sq = sub_gaussian_branch() ? c / (2.0 * q_eff()) : 12.0 * k.A * c;
    return k;
}

double balance_bound_l2(const DesignParams& p) {
    const double d = static_cast<double>(p.d);
    const double n = static_cast<double>(p.n);
    const double denom = 2.0 * (1.0 - p.phi) * p.phi;
    if (denom <= 0.0) return std::numeric_limits<double>::infinity();
    return std::min(1.0 / p.q_eff(), 9.3) *
           std::sqrt(d * std::log(4.0 * d / p.delta) * std::log(4.0 * n / p.delta) / denom);
}

double balance_bound_linf(const DesignParams& p) {
    return balance_bound_l2(p) / std::sqrt(static_cast<double>(p.d));
}

bool within_unit_ball(std::span<const double> x) noexcept {
    double sq = 0.0;
    for (double v : x) sq += v * v;
    constexpr double limit = (1.0 + 1e-9) * (1.0 + 1e-9);
    return sq <= limit;
}

BalancingWalk::BalancingWalk(const DesignParams& params, Rng rng)
    : params_(params), rng_(rng), w_(params.d, 0.0) {}

BalancingWalk BalancingWalk::restore(const DesignParams& params, const WalkSnapshot& snapshot) {
    if (snapshot.w.size() != params.d)
        throw DimensionMismatch("walk snapshot has " + std::to_string(snapshot.w.size()) +
                                " coordinates, design expects " + std::to_string(params.d));
    if (snapshot.step > params.n)
        throw HorizonExceeded("walk snapshot step exceeds horizon");
    BalancingWalk walk(params, Rng(snapshot.rng_state));
    walk.w_ = snapshot.w;
    walk.step_ = snapshot.step;
    walk.fallback_active_ = snapshot.fallback_active;
    walk.restarts_ = snapshot.restarts;
    walk.overflows_ = snapshot.overflows;
    return walk;
}

WalkSnapshot BalancingWalk::snapshot() const {
    return WalkSnapshot{step_, w_, fallback_active_, restarts_, overflows_, rng_.state()};
}

void BalancingWalk::check_input(std::span<const double> x) const {
    if (x.size() != params_.d)
        throw DimensionMismatch("covariate vector has " + std::to_string(x.size()) +
                                " entries, design expects " + std::to_string(params_.d));
    if (!within_unit_ball(x)) throw InputNormError("covariate vector has norm above 1");
}

double BalancingWalk::effective_inner(std::span<const double> x) const {
    check_input(x);
    const double dot = std::inner_product(w_.begin(), w_.end(), x.begin(), 0.0);
    return (1.0 - params_.phi) * dot;
}

double BalancingWalk::treat_probability(double s) const noexcept {
    if (params_.label_swap()) return 1.0 - plus_probability(params_.q_eff(), -s, params_.c);
    return plus_probability(params_.q_eff(), s, params_.c);
}

void BalancingWalk::reset() noexcept {
    std::fill(w_.begin(), w_.end(), 0.0);
    fallback_active_ = false;
}

void BalancingWalk::add_scaled(double coef, std::span<const double> x) noexcept {
    for (std::size_t j = 0; j < w_.size(); ++j) w_[j] += coef * x[j];
}

Assignment BalancingWalk::assign(std::span<const double> x) {
    if (step_ >= params_.n)
        throw HorizonExceeded("assignment " + std::to_string(step_ + 1) + " exceeds horizon n = " +
                              std::to_string(params_.n));
    Assignment out;
    const double u = rng_.uniform();

    if (fallback_active_) {
        check_input(x);
        out.z = u < params_.q ? 1 : -1;
        out.eta = eta_for(out.z);
        out.fallback = true;
        ++step_;
        return out;
    }

    double s = effective_inner(x);
    if (std::abs(s) > params_.c) {
        out.was_overflow = true;
        ++overflows_;
        switch (params_.policy) {
        case OverflowPolicy::Strict:
            // w is pulled towards zero along x; the unit itself gets a q-coin.
            out.w_increment = -2.0 * params_.q_eff() * s / params_.c;
            add_scaled(out.w_increment, x);
            out.z = u < params_.q ? 1 : -1;
            ++step_;
            return out;
        case OverflowPolicy::RandomFallback:
            fallback_active_ = true;
            out.z = u < params_.q ? 1 : -1;
            out.eta = eta_for(out.z);
            out.fallback = true;
            ++step_;
            return out;
        case OverflowPolicy::Restart:
            std::fill(w_.begin(), w_.end(), 0.0);
            ++restarts_;
            s = 0.0;
            break;
        }
    }

    // The walk runs with q_eff; a swapped walk sees the negated inner product.
    const bool swap = params_.label_swap();
    const double p_plus = plus_probability(params_.q_eff(), swap ? -s : s, params_.c);
    const int internal = u < p_plus ? 1 : -1;
    out.z = swap ? -internal : internal;
    out.eta = eta_for(out.z);
    out.w_increment = *out.eta;
    add_scaled(out.w_increment, x);
    ++step_;
    return out;
}

} // namespace bwd
