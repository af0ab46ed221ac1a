#include "bwd/dgp.hpp"

#include "bwd/errors.hpp"
#include "bwd/rng.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

namespace bwd {

namespace {

constexpr std::array<std::pair<DgpKind, std::string_view>, 7> kNames{{
    {DgpKind::QuickBlock, "QuickBlockDGP"},
    {DgpKind::Linear, "LinearDGP"},
    {DgpKind::LinearDrift, "LinearDriftDGP"},
    {DgpKind::LinearSeason, "LinearSeasonDGP"},
    {DgpKind::Quadratic, "QuadraticDGP"},
    {DgpKind::Cubic, "CubicDGP"},
    {DgpKind::Sinusoidal, "SinusoidalDGP"},
}};

bool linear_family(DgpKind kind) {
    return kind == DgpKind::Linear || kind == DgpKind::LinearDrift || kind == DgpKind::LinearSeason;
}

} // namespace

std::string_view to_string(DgpKind kind) {
    for (const auto& [k, name] : kNames)
        if (k == kind) return name;
    return "?";
}

DgpKind parse_dgp(std::string_view name) {
    for (const auto& [k, full] : kNames) {
        // accept the short form without the DGP suffix as well
        if (name == full || name == full.substr(0, full.size() - 3)) return k;
    }
    throw InvalidParameter("dgp", "unknown data generating process '" + std::string(name) + "'");
}

std::size_t default_dimension(DgpKind kind) { return linear_family(kind) ? 4 : 2; }

double quadratic_mu0(double x1, double x2) noexcept {
    return x1 - x2 + x1 * x1 + x2 * x2 - 2.0 * x1 * x2;
}

double cubic_mu0(double x1, double x2) noexcept {
    return quadratic_mu0(x1, x2) + x1 * x1 * x1 - x2 * x2 * x2 - 3.0 * x1 * x1 * x2 +
           3.0 * x1 * x2 * x2;
}

double sinusoidal_mu0(double x1, double x2) noexcept {
    constexpr double pi = std::numbers::pi;
    return std::sin(pi / 3.0 + pi * x1 / 3.0 - 2.0 * pi * x2 / 3.0) -
           6.0 * std::sin(pi * x1 / 3.0 + pi * x2 / 4.0) +
           6.0 * std::sin(pi * x1 / 3.0 + pi * x2 / 6.0);
}

DgpSample generate(DgpKind kind, std::size_t n, std::uint64_t seed, std::size_t k, std::size_t d) {
    if (n < 1) throw InvalidParameter("n", "need at least one unit");
    if (k < 2) throw InvalidParameter("k", "need at least two arms");
    if (d == 0) d = default_dimension(kind);
    if (!linear_family(kind) && d != 2)
        throw InvalidParameter("d", std::string(to_string(kind)) + " has exactly 2 covariates");

    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    auto uniform = [&rng] { return rng.uniform(); };

    DgpSample s;
    s.name = std::string(to_string(kind));
    s.X_raw.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    s.Y.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));

    std::vector<double> beta;
    if (linear_family(kind)) {
        beta.resize(d);
        for (double& b : beta) b = uniform();
    }

    const double N = static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r) {
        const auto i = static_cast<Eigen::Index>(r);
        const double index = static_cast<double>(r + 1);
        double mu0 = 0.0;
        switch (kind) {
        case DgpKind::QuickBlock: {
            const double x1 = 10.0 * uniform();
            const double x2 = 10.0 * uniform();
            s.X_raw(i, 0) = x1;
            s.X_raw(i, 1) = x2;
            const double y0 = x1 * x2 + normal(rng);
            s.Y(i, 0) = y0;
            for (std::size_t a = 1; a < k; ++a) s.Y(i, static_cast<Eigen::Index>(a)) = static_cast<double>(a) + y0;
            continue;
        }
        case DgpKind::Linear:
        case DgpKind::LinearDrift:
        case DgpKind::LinearSeason: {
            double shift = 0.0;
            if (kind == DgpKind::LinearDrift) shift = index / N;
            if (kind == DgpKind::LinearSeason) shift = std::sin(2.0 * std::numbers::pi * index / N);
            for (std::size_t j = 0; j < d; ++j) {
                const double x = shift + normal(rng);
                s.X_raw(i, static_cast<Eigen::Index>(j)) = x;
                mu0 += x * beta[j];
            }
            break;
        }
        case DgpKind::Quadratic:
        case DgpKind::Cubic:
        case DgpKind::Sinusoidal: {
            const double x1 = 2.0 * uniform() - 1.0;
            const double x2 = 2.0 * uniform() - 1.0;
            s.X_raw(i, 0) = x1;
            s.X_raw(i, 1) = x2;
            mu0 = kind == DgpKind::Quadratic ? quadratic_mu0(x1, x2)
                  : kind == DgpKind::Cubic   ? cubic_mu0(x1, x2)
                                             : sinusoidal_mu0(x1, x2);
            break;
        }
        }
        for (std::size_t a = 0; a < k; ++a)
            s.Y(i, static_cast<Eigen::Index>(a)) = static_cast<double>(a) + mu0 + normal(rng) / 10.0;
    }

    s.X = s.X_raw;
    if (kind == DgpKind::QuickBlock) {
        const double max_norm = s.X.rowwise().norm().maxCoeff();
        if (max_norm > 0.0) s.X /= max_norm;
    } else {
        for (Eigen::Index i = 0; i < s.X.rows(); ++i) {
            const double norm = s.X.row(i).norm();
            if (norm > 0.0) s.X.row(i) /= norm;
        }
    }

    for (std::size_t a = 1; a < k; ++a)
        s.tau_true.push_back((s.Y.col(static_cast<Eigen::Index>(a)) - s.Y.col(0)).mean());
    return s;
}

DgpSample generate(std::string_view name, std::size_t n, std::uint64_t seed, std::size_t k, std::size_t d) {
    return generate(parse_dgp(name), n, seed, k, d);
}

std::vector<std::size_t> arrival_order(DgpKind, std::size_t n) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    return order;
}

std::string format_double(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

void write_csv(const DgpSample& sample, std::ostream& out) {
    out << "index";
    for (std::size_t j = 1; j <= sample.d(); ++j) out << ",x_" << j;
    for (std::size_t a = 0; a < sample.k(); ++a) out << ",y_" << a;
    out << '\n';
    for (Eigen::Index i = 0; i < sample.X.rows(); ++i) {
        out << i + 1;
        for (Eigen::Index j = 0; j < sample.X.cols(); ++j) out << ',' << format_double(sample.X(i, j));
        for (Eigen::Index a = 0; a < sample.Y.cols(); ++a) out << ',' << format_double(sample.Y(i, a));
        out << '\n';
    }
}

} // namespace bwd
