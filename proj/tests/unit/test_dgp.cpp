#include "bwd/dgp.hpp"
#include "bwd/errors.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace bwd;

namespace {

const std::vector<DgpKind> kAll{DgpKind::QuickBlock, DgpKind::Linear,    DgpKind::LinearDrift,
                                DgpKind::LinearSeason, DgpKind::Quadratic, DgpKind::Cubic,
                                DgpKind::Sinusoidal};

std::vector<double> column(const Matrix& M, Eigen::Index j) {
    std::vector<double> out(static_cast<std::size_t>(M.rows()));
    for (Eigen::Index i = 0; i < M.rows(); ++i) out[i] = M(i, j);
    return out;
}

} // namespace

TEST_CASE("closed-form outcome surfaces") {
    CHECK(quadratic_mu0(1.0, -1.0) == doctest::Approx(6.0));
    CHECK(quadratic_mu0(0.0, 0.0) == 0.0);
    CHECK(cubic_mu0(1.0, -1.0) == doctest::Approx(14.0));
    CHECK(cubic_mu0(0.5, 0.5) == doctest::Approx(0.0));
    CHECK(sinusoidal_mu0(0.0, 0.0) == doctest::Approx(std::sin(std::numbers::pi / 3.0)));
}

TEST_CASE("names parse with or without the suffix") {
    for (DgpKind kind : kAll) {
        const std::string name(to_string(kind));
        CHECK(parse_dgp(name) == kind);
        CHECK(parse_dgp(name.substr(0, name.size() - 3)) == kind);
    }
    CHECK_THROWS_AS(parse_dgp("NoSuchDGP"), InvalidParameter);
}

TEST_CASE("samples are deterministic in the seed") {
    for (DgpKind kind : kAll) {
        const auto a = generate(kind, 200, 42, 3);
        const auto b = generate(kind, 200, 42, 3);
        const auto c = generate(kind, 200, 43, 3);
        CHECK(a.X == b.X);
        CHECK(a.Y == b.Y);
        CHECK(a.X != c.X);
    }
}

TEST_CASE("shapes, normalisation and the true effects") {
    for (DgpKind kind : kAll) {
        const auto s = generate(kind, 500, 7, 4);
        CHECK(s.n() == 500);
        CHECK(s.d() == default_dimension(kind));
        CHECK(s.k() == 4);
        double max_norm = 0.0;
        for (Eigen::Index i = 0; i < s.X.rows(); ++i) {
            const double norm = s.X.row(i).norm();
            max_norm = std::max(max_norm, norm);
            CHECK(norm <= 1.0 + 1e-12);
            if (kind != DgpKind::QuickBlock) CHECK(norm == doctest::Approx(1.0));
        }
        CHECK(max_norm == doctest::Approx(1.0));

        REQUIRE(s.tau_true.size() == 3);
        for (std::size_t a = 1; a < 4; ++a) {
            double diff = 0.0;
            for (Eigen::Index i = 0; i < s.Y.rows(); ++i) diff += s.Y(i, static_cast<Eigen::Index>(a)) - s.Y(i, 0);
            CHECK(s.tau_true[a - 1] == doctest::Approx(diff / 500.0));
            // noise sd is 1/10 around a constant shift of a
            if (kind != DgpKind::QuickBlock) CHECK(std::abs(s.tau_true[a - 1] - static_cast<double>(a)) < 0.05);
        }
    }
}

TEST_CASE("outcomes come from the raw covariates") {
    const auto q = generate(DgpKind::Quadratic, 300, 3, 2);
    const auto c = generate(DgpKind::Cubic, 300, 3, 2);
    const auto s = generate(DgpKind::Sinusoidal, 300, 3, 2);
    for (Eigen::Index i = 0; i < 300; ++i) {
        CHECK(std::abs(q.Y(i, 0) - quadratic_mu0(q.X_raw(i, 0), q.X_raw(i, 1))) < 0.6);
        CHECK(std::abs(c.Y(i, 0) - cubic_mu0(c.X_raw(i, 0), c.X_raw(i, 1))) < 0.6);
        CHECK(std::abs(s.Y(i, 0) - sinusoidal_mu0(s.X_raw(i, 0), s.X_raw(i, 1))) < 0.6);
        CHECK(std::abs(q.X_raw(i, 0)) <= 1.0);
    }
    const auto qb = generate(DgpKind::QuickBlock, 300, 3, 2);
    for (Eigen::Index i = 0; i < 300; ++i) {
        CHECK(qb.X_raw(i, 0) >= 0.0);
        CHECK(qb.X_raw(i, 0) <= 10.0);
    }
}

TEST_CASE("quickblock arms are shifted copies of the control outcome") {
    const auto s = generate(DgpKind::QuickBlock, 200, 5, 3);
    for (Eigen::Index i = 0; i < s.Y.rows(); ++i) {
        CHECK(s.Y(i, 1) == doctest::Approx(1.0 + s.Y(i, 0)));
        CHECK(s.Y(i, 2) == doctest::Approx(2.0 + s.Y(i, 0)));
    }
    CHECK(s.tau_true[0] == doctest::Approx(1.0));
    CHECK(s.tau_true[1] == doctest::Approx(2.0));
    // X is divided by one common factor
    const double scale = s.X_raw(0, 0) / s.X(0, 0);
    for (Eigen::Index i = 0; i < s.X.rows(); ++i) CHECK(s.X_raw(i, 1) / scale == doctest::Approx(s.X(i, 1)));
}

TEST_CASE("linear covariates are centred before the shift") {
    const std::size_t n = 10000;
    const auto s = generate(DgpKind::Linear, n, 99, 2);
    for (Eigen::Index j = 0; j < 4; ++j) {
        const auto col = column(s.X_raw, j);
        const double se = testing_support::sample_sd(col) / std::sqrt(static_cast<double>(n));
        CHECK(std::abs(testing_support::mean(col)) <= 4.0 * se);
    }
}

TEST_CASE("drift and season follow the unit index") {
    const std::size_t n = 20000;
    const auto drift = generate(DgpKind::LinearDrift, n, 8, 2);
    const auto season = generate(DgpKind::LinearSeason, n, 8, 2);
    // average the first and last tenth; the shift is i/N and sin(2 pi i/N)
    auto block_mean = [](const Matrix& M, std::size_t from, std::size_t to) {
        double total = 0.0;
        for (std::size_t i = from; i < to; ++i) total += M.row(static_cast<Eigen::Index>(i)).mean();
        return total / static_cast<double>(to - from);
    };
    CHECK(std::abs(block_mean(drift.X_raw, 0, n / 10) - 0.05) < 0.05);
    CHECK(std::abs(block_mean(drift.X_raw, n - n / 10, n) - 0.95) < 0.05);
    // quarter period peaks at +1, three quarters at -1
    CHECK(block_mean(season.X_raw, n / 5, n / 5 + n / 10) > 0.8);
    CHECK(block_mean(season.X_raw, 7 * n / 10, 7 * n / 10 + n / 10) < -0.8);
}

TEST_CASE("arrival order is the generation order") {
    for (DgpKind kind : kAll) {
        const auto order = arrival_order(kind, 50);
        for (std::size_t i = 0; i < order.size(); ++i) CHECK(order[i] == i);
    }
}

TEST_CASE("dimension override applies to the linear family only") {
    const auto s = generate(DgpKind::Linear, 100, 1, 2, 7);
    CHECK(s.d() == 7);
    CHECK_THROWS_AS(generate(DgpKind::Quadratic, 100, 1, 2, 5), InvalidParameter);
    CHECK(generate(DgpKind::Cubic, 100, 1, 2, 2).d() == 2);
    CHECK_THROWS_AS(generate(DgpKind::Linear, 0, 1, 2), InvalidParameter);
    CHECK_THROWS_AS(generate(DgpKind::Linear, 10, 1, 1), InvalidParameter);
}

TEST_CASE("csv export round-trips the values") {
    const auto s = generate(DgpKind::Quadratic, 5, 1, 3);
    std::ostringstream out;
    write_csv(s, out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "index,x_1,x_2,y_0,y_1,y_2");
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        std::istringstream fields(line);
        std::string cell;
        std::vector<double> values;
        while (std::getline(fields, cell, ',')) values.push_back(std::stod(cell));
        REQUIRE(values.size() == 6);
        CHECK(values[0] == static_cast<double>(rows + 1));
        CHECK(values[1] == s.X(static_cast<Eigen::Index>(rows), 0));
        CHECK(values[5] == s.Y(static_cast<Eigen::Index>(rows), 2));
        ++rows;
    }
    CHECK(rows == 5);
    CHECK(format_double(0.1) == "0.1");
}
