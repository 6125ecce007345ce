#include "radiomap/leverage.hpp"
#include "radiomap/theory.hpp"

#include <doctest.h>

#include <Eigen/QR>

#include <cmath>
#include <vector>

using namespace radiomap;

namespace {

Vector profile(int n, double center, double beta) {
    Vector u(n);
    for (int x = 0; x < n; ++x)
        u(x) = std::exp(-beta * (x - center) * (x - center));
    return u;
}

/// Unclipped leverage probability of the pair field from the QR projector
/// onto span(u1, u2), independent of any SVD.
Matrix projector_probability(int n, int offset, double beta, double c) {
    Matrix basis(n, 2);
    basis.col(0) = profile(n, 0, beta);
    basis.col(1) = profile(n, offset, beta);
    Eigen::HouseholderQR<Matrix> qr(basis);
    const Matrix q = qr.householderQ() * Matrix::Identity(n, 2);
    const Vector mu = n * q.rowwise().squaredNorm() / 2.0;
    const double l = std::log(2.0 * n);
    return c * 2 * l * l / n * (mu.replicate(1, n) + mu.transpose().replicate(n, 1));
}

Matrix pair_field(int n, int offset, double beta, double alpha) {
    const Vector u1 = profile(n, 0, beta), u2 = profile(n, offset, beta);
    return alpha * (u1 * u1.transpose() + u2 * u2.transpose());
}

} // namespace

TEST_CASE("pseudo-image region covers rows L1 +- delta and columns 0..delta") {
    const RegionSpec r{RegionKind::pseudo_image, 32, 4};
    const auto cells = r.cells();
    CHECK(cells.size() == 45);
    CHECK(cells.front() == Cell{28, 0});
    CHECK(cells.back() == Cell{36, 4});
    const RegionSpec j{RegionKind::source, 32, 4};
    CHECK(j.cells().size() == 81);
    CHECK(j.cells().front() == Cell{28, 28});
    CHECK(RegionSpec{RegionKind::source, 32, 0}.cells() == std::vector<Cell>{{32, 32}});
}

TEST_CASE("region validation") {
    CHECK_NOTHROW(RegionSpec(RegionKind::pseudo_image, 32, 4).validate(64));
    CHECK_THROWS_AS(RegionSpec(RegionKind::pseudo_image, 8, 4).validate(64), ConfigError);
    CHECK_THROWS_AS(RegionSpec(RegionKind::source, 62, 4).validate(64), ConfigError);
    CHECK_THROWS_AS(RegionSpec(RegionKind::source, 32, -1).validate(64), ConfigError);
}

TEST_CASE("pseudo-image ratios agree with direct evaluation") {
    const std::vector<double> betas{0.05, 0.1, 0.2, 0.4};
    const RatioTrace t = pseudo_image_trace(64, 32, 4, betas, 1.0, 1.0);
    REQUIRE(t.ratios.size() == 4);
    const RegionSpec region{RegionKind::pseudo_image, 32, 4};
    for (std::size_t k = 0; k < betas.size(); ++k) {
        const Matrix h = pair_field(64, 32, betas[k], 1.0);
        const Matrix p = projector_probability(64, 32, betas[k], 1.0);
        double worst = 0;
        for (const Cell &c : region.cells())
            worst = std::max(worst, h(c.row, c.col) / p(c.row, c.col));
        CHECK(t.ratios[k] == doctest::Approx(worst).epsilon(1e-9));
        CHECK(t.references[k] == doctest::Approx(h(32, 32) / p(32, 32)).epsilon(1e-9));
        CHECK(t.clipped_cells[k] == (p.array() > 1.0).count());
    }
}

TEST_CASE("pseudo-image ratios at the default preset") {
    const std::vector<double> betas{0.05, 0.1, 0.2, 0.4};
    const RatioTrace t = pseudo_image_trace(64, 32, 4, betas, 1.0, 1.0);
    const double expected[] = {3.7148123859764175e-18, 5.740468385743839e-35,
                               1.886646856327475e-68, 2.778037751325243e-135};
    const long clipped[] = {1413, 1099, 960, 620};
    for (int k = 0; k < 4; ++k) {
        CHECK(t.ratios[k] == doctest::Approx(expected[k]).epsilon(1e-9));
        CHECK(t.clipped_cells[k] == clipped[k]);
    }
    for (int k = 1; k < 4; ++k)
        CHECK(t.ratios[k] < t.ratios[k - 1]);
    CHECK(t.ratios.back() / t.ratios.front() < 1e-3);
}

TEST_CASE("pseudo-image ratio is negligible against the source ratio") {
    const std::vector<double> betas{0.05, 0.1};
    const RatioTrace t = pseudo_image_trace(64, 32, 4, betas, 1.0, 1.0);
    for (std::size_t k = 0; k < betas.size(); ++k)
        CHECK(t.ratios[k] < 1e-12 * t.references[k]);
}

TEST_CASE("ratios scale with alpha over C") {
    const std::vector<double> betas{0.1, 0.2};
    const RatioTrace a = pseudo_image_trace(64, 32, 4, betas, 1.0, 1.0);
    const RatioTrace b = pseudo_image_trace(64, 32, 4, betas, 3.0, 0.5);
    for (std::size_t k = 0; k < betas.size(); ++k)
        CHECK(b.ratios[k] == doctest::Approx(6.0 * a.ratios[k]).epsilon(1e-9));
}

TEST_CASE("pseudo-image trace rejects bad inputs") {
    const std::vector<double> decreasing{0.2, 0.1};
    const std::vector<double> empty;
    const std::vector<double> ok{0.1};
    CHECK_THROWS_AS(pseudo_image_trace(64, 32, 4, decreasing, 1, 1), ConfigError);
    CHECK_THROWS_AS(pseudo_image_trace(64, 32, 4, empty, 1, 1), ConfigError);
    CHECK_THROWS_AS(pseudo_image_trace(64, 32, 20, ok, 1, 1), ConfigError);
    CHECK_THROWS_AS(pseudo_image_trace(64, 63, 4, ok, 1, 1), ConfigError);
    CHECK_THROWS_AS(pseudo_image_trace(64, 32, 4, ok, 0, 1), ConfigError);
    CHECK_THROWS_AS(pseudo_image_trace(64, 32, 4, ok, 1, -1), ConfigError);
}

TEST_CASE("consistency trace reports C'/C and the isolated-source limit") {
    const std::vector<int> deltas{4, 2, 1, 0};
    const RatioTrace t = consistency_trace(64, 32, 0.1, deltas, 1.0, 1.0);
    const double l = std::log(128.0);
    const double c_ratio = 1.0 / (4 * l * l);
    const double exact = profile(64, 32, 0.1).squaredNorm() / (2 * l * l);
    const Matrix h = pair_field(64, 32, 0.1, 1.0);
    const Matrix p = projector_probability(64, 32, 0.1, 1.0);
    for (std::size_t k = 0; k < deltas.size(); ++k) {
        CHECK(t.references[k] == doctest::Approx(c_ratio).epsilon(1e-14));
        CHECK(t.exact_references[k] == doctest::Approx(exact).epsilon(1e-14));
        CHECK(t.ratios[k] == doctest::Approx(h(32, 32) / p(32, 32)).epsilon(1e-9));
    }
    for (std::size_t k = 1; k < deltas.size(); ++k) {
        CHECK(t.deviations[k] <= t.deviations[k - 1] * (1 + 1e-12));
        CHECK(t.exact_deviations[k] <= t.exact_deviations[k - 1]);
    }
    // At the source center the exact-SVD ratio equals the isolated-source limit.
    CHECK(t.exact_deviations.back() < 1e-9);
    CHECK(t.deviations.back() == doctest::Approx(exact / c_ratio - 1).epsilon(1e-9));
}

TEST_CASE("consistency trace deviations from direct evaluation") {
    const std::vector<int> deltas{3, 1};
    const RatioTrace t = consistency_trace(64, 32, 0.1, deltas, 1.0, 1.0);
    const Matrix h = pair_field(64, 32, 0.1, 1.0);
    const Matrix p = projector_probability(64, 32, 0.1, 1.0);
    const double l = std::log(128.0);
    const double ref = 1.0 / (4 * l * l);
    for (std::size_t k = 0; k < deltas.size(); ++k) {
        double worst = 0;
        for (const Cell &c : RegionSpec{RegionKind::source, 32, deltas[k]}.cells())
            worst = std::max(worst, std::abs(h(c.row, c.col) / p(c.row, c.col) - ref) / ref);
        CHECK(t.deviations[k] == doctest::Approx(worst).epsilon(1e-9));
    }
}

TEST_CASE("consistency trace preconditions") {
    const std::vector<int> deltas{2, 1};
    const std::vector<int> rising{1, 2};
    CHECK_THROWS_AS(consistency_trace(64, 32, 0.01, deltas, 1, 1), ConfigError);
    CHECK_THROWS_AS(consistency_trace(64, 32, 0.1, rising, 1, 1), ConfigError);
    CHECK_THROWS_AS(consistency_trace(64, 32, 0.1, std::vector<int>{40}, 1, 1), ConfigError);
}

TEST_CASE("exact probability matches the normalized closed form when sources decouple") {
    const Matrix exact = projector_probability(64, 32, 0.1, 1.0);
    const Matrix normalized = pair_probability_normalized_form(64, 32, 0.1, 1.0);
    CHECK((exact - normalized).cwiseAbs().maxCoeff() <= 1e-9 * exact.maxCoeff());
}

TEST_CASE("literal closed form differs from the normalized one by 2 |u|^2 near each source") {
    const double beta = 0.1;
    const Matrix literal = pair_probability_closed_form(64, 32, beta, 1.0);
    const Matrix normalized = pair_probability_normalized_form(64, 32, beta, 1.0);
    const double n1 = profile(64, 0, beta).squaredNorm();
    const double n2 = profile(64, 32, beta).squaredNorm();
    CHECK(literal(32, 32) / normalized(32, 32) == doctest::Approx(2 * n2).epsilon(1e-9));
    CHECK(literal(0, 0) / normalized(0, 0) == doctest::Approx(2 * n1).epsilon(1e-9));
    CHECK(n1 != doctest::Approx(n2));
}
