#pragma once

#include "bwd/rng.hpp"

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace bwd {

enum class BaselineKind { Bernoulli, Complete, Efron, Smith, Alweiss };

std::string_view to_string(BaselineKind kind);
BaselineKind parse_baseline(std::string_view text);

struct BaselineParams {
    double efron_bias = 2.0 / 3.0;   ///< probability of the under-assigned arm
    double smith_rho = 2.0;
    double alweiss_constant = 30.0;  ///< c_A = constant * ln(n d / delta)
    double delta = 0.05;
};

/*
Comparator designs. Group indices are 0..k-1; for two arms group 1 is treatment.

Bernoulli    independent draws from p.
Complete     fixed margins: quotas floor(n p_j) topped up by largest remainder,
             each unit drawn proportionally to the remaining quotas.
Efron        two arms, p = (1/2, 1/2): fair coin on ties, otherwise the
             under-assigned arm with probability efron_bias.
Smith        uniform p: P(j) proportional to (sum_{l != j} counts_l + 1)^rho.
Alweiss      two arms, q = 1/2: self-balancing walk with threshold c_A,
             P(treat) = (1 - <w, x>/c_A)/2, fair coins after the first overflow.
*/
class Baseline {
public:
    Baseline(BaselineKind kind, std::vector<double> probs, std::size_t n, std::size_t d,
             const BaselineParams& params, Rng rng);

    int assign(std::span<const double> x);

    /// Probability of each group for the next unit given the current state.
    std::vector<double> next_probabilities(std::span<const double> x) const;

    BaselineKind kind() const noexcept { return kind_; }
    std::span<const std::size_t> counts() const noexcept { return counts_; }
    std::span<const std::size_t> remaining_quota() const noexcept { return quota_; }
    std::span<const double> w() const noexcept { return w_; }
    double alweiss_threshold() const noexcept { return c_alweiss_; }
    std::size_t assigned() const noexcept { return assigned_; }
    std::size_t overflows() const noexcept { return overflows_; }

private:
    int draw(std::span<const double> probs);

    BaselineKind kind_;
    std::vector<double> probs_;
    std::size_t n_;
    BaselineParams params_;
    Rng rng_;
    std::vector<std::size_t> counts_;
    std::vector<std::size_t> quota_;
    std::vector<double> w_;
    double c_alweiss_ = 0.0;
    bool fallback_ = false;
    std::size_t assigned_ = 0;
    std::size_t overflows_ = 0;
};

/// floor(n p_j) per group, remaining units to the largest fractional parts
/// (ties to the lower index).
std::vector<std::size_t> largest_remainder_quotas(std::span<const double> probs, std::size_t n);

} // namespace bwd
