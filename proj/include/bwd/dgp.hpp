#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bwd {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class DgpKind { QuickBlock, Linear, LinearDrift, LinearSeason, Quadratic, Cubic, Sinusoidal };

std::string_view to_string(DgpKind kind);
DgpKind parse_dgp(std::string_view name);

/// Covariate width a DGP produces when no override is given (4 or 2).
std::size_t default_dimension(DgpKind kind);

struct DgpSample {
    Matrix X;       ///< design covariates, rows normalised
    Matrix X_raw;   ///< covariates before normalisation (outcomes are built from these)
    Matrix Y;       ///< n x k potential outcomes, column a = y(a)
    std::vector<double> tau_true;  ///< k-1 true SATEs against arm 0
    std::string name;

    std::size_t n() const noexcept { return static_cast<std::size_t>(X.rows()); }
    std::size_t d() const noexcept { return static_cast<std::size_t>(X.cols()); }
    std::size_t k() const noexcept { return static_cast<std::size_t>(Y.cols()); }
    std::span<const double> row(std::size_t i) const noexcept {
        return {X.data() + i * X.cols(), static_cast<std::size_t>(X.cols())};
    }
};

/*
Simulation data generating processes. Every unit index i runs 1..n. Outcomes
are computed from the raw covariates; rows are then scaled to unit norm, or,
for QuickBlock, divided by the largest row norm.

Arm a >= 1 adds the constant a to the arm-0 structure with its own noise draw
(QuickBlock reuses the arm-0 noise). `d` overrides the width of the linear
family; 0 means the default.
*/
DgpSample generate(DgpKind kind, std::size_t n, std::uint64_t seed, std::size_t k, std::size_t d = 0);
DgpSample generate(std::string_view name, std::size_t n, std::uint64_t seed, std::size_t k,
                   std::size_t d = 0);

/// Arrival order of units. Drift and seasonality live in the covariates, so
/// this is always the identity.
std::vector<std::size_t> arrival_order(DgpKind kind, std::size_t n);

double quadratic_mu0(double x1, double x2) noexcept;
double cubic_mu0(double x1, double x2) noexcept;
double sinusoidal_mu0(double x1, double x2) noexcept;

/// CSV with header index,x_1..x_d,y_0..y_{k-1}.
void write_csv(const DgpSample& sample, std::ostream& out);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

} // namespace bwd
