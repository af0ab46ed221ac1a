#pragma once

#include "bwd/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace bwd {

/// What the walk does when the effective inner product leaves [-c, c].
enum class OverflowPolicy {
    Strict,         ///< deterministic shrink of w; the unit gets an independent q-coin
    RandomFallback, ///< freeze w and assign by independent q-coins from here on
    Restart,        ///< zero w and redo the step
};

std::string_view to_string(OverflowPolicy policy);
OverflowPolicy parse_policy(std::string_view text);

/// Constants of the sub-Gaussian / sub-exponential tail analysis.
struct ConcentrationConstants {
    double A = 0.5803;
    double B = 0.4310;
    double alpha = 2.0 / 0.4310;
    double sigma_sq = 0.0;
};

struct DesignParams {
    std::size_t n = 1;
    std::size_t d = 1;
    double q = 0.5;
    double phi = 0.0;
    double delta = 0.05;
    OverflowPolicy policy = OverflowPolicy::Restart;
    double c = 0.0;

    /// Validates every field and derives the threshold
    /// c = min(1/q_eff, 9.3) * ln(2n/delta).
    static DesignParams make(std::size_t n, std::size_t d, double q, double phi, double delta,
                             OverflowPolicy policy = OverflowPolicy::Restart);

    /// min(q, 1-q); the walk always runs with this probability.
    double q_eff() const noexcept { return q < 0.5 ? q : 1.0 - q; }

    /// True when q > 1/2 and treatment/control labels are swapped internally.
    bool label_swap() const noexcept { return q > 0.5; }

    /// True when c was set by the 1/q branch of the threshold formula.
    bool sub_gaussian_branch() const noexcept { return 1.0 / q_eff() <= 9.3; }

    ConcentrationConstants constants() const noexcept;
};

struct Assignment {
    int z = 0;                  ///< +1 treatment, -1 control
    std::optional<double> eta;  ///< 2(1-q) or -2q; empty for a Strict overflow unit
    bool was_overflow = false;  ///< |s| > c was observed on this step
    bool fallback = false;      ///< drawn by the random-fallback coin
    double w_increment = 0.0;   ///< coefficient of x added to w on this step
};

/// Everything needed to resume a walk bit-exactly.
struct WalkSnapshot {
    std::size_t step = 0;
    std::vector<double> w;
    bool fallback_active = false;
    std::size_t restarts = 0;
    std::size_t overflows = 0;
    std::uint64_t rng_state = 0;
};

/*
Online weighted balancing walk for two arms.

w holds the plain running sum of eta_j * x_j (d coordinates). Robustness phi is
applied by rescaling inner products by (1 - phi), which is what the walk over
covariates augmented with sqrt(phi) e_i would see, without ever materialising
the n extra coordinates.

Each call to assign() draws exactly one uniform from the walk's stream,
whatever branch it takes.
*/
class BalancingWalk {
public:
    BalancingWalk(const DesignParams& params, Rng rng);

    static BalancingWalk restore(const DesignParams& params, const WalkSnapshot& snapshot);

    Assignment assign(std::span<const double> x);

    /// (1 - phi) * <w, x>. Throws on dimension or norm violations.
    double effective_inner(std::span<const double> x) const;

    /// P(z = +1) when the effective inner product is s and |s| <= c.
    double treat_probability(double s) const noexcept;

    /// Zero w and clear the fallback flag; the step counter is kept.
    void reset() noexcept;

    WalkSnapshot snapshot() const;

    const DesignParams& params() const noexcept { return params_; }
    std::span<const double> w() const noexcept { return w_; }
    std::size_t step() const noexcept { return step_; }
    bool fallback_active() const noexcept { return fallback_active_; }
    std::size_t restarts() const noexcept { return restarts_; }
    std::size_t overflows() const noexcept { return overflows_; }
    const Rng& rng() const noexcept { return rng_; }

    /// Internal-label probability q_eff * (1 - s/c); no clamping.
    static double plus_probability(double q_eff, double s, double c) noexcept {
        return q_eff * (1.0 - s / c);
    }

private:
    void check_input(std::span<const double> x) const;
    double eta_for(int z) const noexcept { return z > 0 ? 2.0 * (1.0 - params_.q) : -2.0 * params_.q; }
    void add_scaled(double coef, std::span<const double> x) noexcept;

    DesignParams params_;
    Rng rng_;
    std::vector<double> w_;
    std::size_t step_ = 0;
    bool fallback_active_ = false;
    std::size_t restarts_ = 0;
    std::size_t overflows_ = 0;
};

/// High-probability bound on ||sum eta_i x_i||_2:
/// min(1/q, 9.3) sqrt(d ln(4d/delta) ln(4n/delta) / (2 (1 - phi) phi)).
/// Infinite when phi = 0.
double balance_bound_l2(const DesignParams& params);

/// The same bound divided by sqrt(d), which is what it gives for the max norm.
double balance_bound_linf(const DesignParams& params);

/// Checks ||x||_2 <= 1 with 1e-9 slack.
bool within_unit_ball(std::span<const double> x) noexcept;

} // namespace bwd
