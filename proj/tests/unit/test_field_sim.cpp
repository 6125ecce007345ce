#include "radiomap/field_sim.hpp"
#include "radiomap/rng.hpp"

#include <doctest.h>

#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <vector>

using namespace radiomap;

namespace {

FieldSpec quiet_spec(int n) {
    FieldSpec spec;
    spec.n = n;
    spec.shadowing.enabled = false;
    spec.noise_sigma = 0;
    return spec;
}

int numerical_rank(const Matrix &m, double rel) {
    Eigen::JacobiSVD<Matrix> svd(m);
    const Vector &s = svd.singularValues();
    int r = 0;
    while (r < s.size() && s(r) > rel * s(0))
        ++r;
    return r;
}

} // namespace

TEST_CASE("gaussian path gain is alpha exp(-beta d^2)") {
    const GaussianSource g{2.5, 3e-4};
    for (double d : {0.0, 10.0, 57.5, 300.0})
        CHECK(path_gain(g, d) == doctest::Approx(2.5 * std::exp(-3e-4 * d * d)).epsilon(1e-14));
}

TEST_CASE("underwater path gain at a 3-4-5 slant range") {
    UnderwaterSource w;
    // horizontal 300 m, depth 400 m: slant 0.5 km
    CHECK(path_gain(w, 300.0) == doctest::Approx(252.98221281347034).epsilon(1e-13));
    w.sign = AbsorptionSign::literal;
    CHECK(path_gain(w, 300.0) == doctest::Approx(316.22776601683796).epsilon(1e-13));
}

TEST_CASE("underwater gain decays with distance under the decaying sign") {
    const UnderwaterSource w;
    double last = path_gain(w, 0.0);
    for (double d = 100; d < 3000; d += 100) {
        const double g = path_gain(w, d);
        CHECK(g < last);
        last = g;
    }
}

TEST_CASE("cell centers sit at (i + 1/2) L / N") {
    FieldSpec spec = quiet_spec(10);
    spec.side = 100;
    const Point c = spec.cell_center(0, 9);
    CHECK(c.x == doctest::Approx(5.0));
    CHECK(c.y == doctest::Approx(95.0));
}

TEST_CASE("no sources and no shadowing give a zero map") {
    const RadioMap h = build_ground_truth(quiet_spec(12));
    CHECK(h.values.rows() == 12);
    CHECK(h.values.cwiseAbs().maxCoeff() == 0.0);
    CHECK(h.spec.has_value());
}

TEST_CASE("centered gaussian source is symmetric under half-turn rotation") {
    FieldSpec spec = quiet_spec(100);
    spec.sources = {{{1000, 1000}, GaussianSource{1.0, 1e-5}}};
    const Matrix h = build_ground_truth(spec).values;
    const int n = spec.n;
    double worst = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            worst = std::max(worst, std::abs(h(i, j) - h(n - 1 - i, n - 1 - j)));
    CHECK(worst <= 1e-15);
    const double peak = h.maxCoeff();
    for (int i : {49, 50})
        for (int j : {49, 50})
            CHECK(h(i, j) == doctest::Approx(peak).epsilon(1e-15));
    CHECK(h(48, 49) < peak);
}

TEST_CASE("single gaussian source without shadowing has numerical rank one") {
    FieldSpec spec = quiet_spec(40);
    spec.side = 400;
    spec.sources = {{{130, 250}, GaussianSource{3.0, 2e-4}}};
    CHECK(numerical_rank(build_ground_truth(spec).values, 1e-10) == 1);
}

TEST_CASE("shadowed ground truth is strictly positive and seed-deterministic") {
    FieldSpec spec;
    spec.n = 40;
    spec.side = 800;
    spec.shadowing.resolution = 20;
    spec.sources = place_sources(3, spec.side, UnderwaterSource{}, 0.1, 9);
    spec.seed = 77;
    const RadioMap a = build_ground_truth(spec);
    const RadioMap b = build_ground_truth(spec);
    CHECK(a.values.minCoeff() > 0);
    CHECK(a.values.allFinite());
    CHECK(a.values == b.values);

    spec.seed = 78;
    CHECK(build_ground_truth(spec).values != a.values);
}

TEST_CASE("a shared shadowing generator reproduces the standalone build") {
    FieldSpec spec;
    spec.n = 30;
    spec.side = 600;
    spec.shadowing.resolution = 15;
    spec.seed = 5;
    const ShadowingGenerator gen(spec.side, spec.shadowing);
    CHECK(build_ground_truth(spec, gen).values == build_ground_truth(spec).values);

    ShadowingSpec other = spec.shadowing;
    other.corr_distance = 50;
    const ShadowingGenerator mismatched(spec.side, other);
    CHECK_THROWS_AS(build_ground_truth(spec, mismatched), ConfigError);
}

TEST_CASE("coarse shadowing autocorrelation follows exp(-d / d_c)") {
    ShadowingSpec s;
    s.variance = 1.0;
    s.corr_distance = 200;
    s.resolution = 21;
    const ShadowingGenerator gen(1000, s);
    REQUIRE(gen.node_spacing() == doctest::Approx(50.0));
    const int g = gen.resolution();

    const int lags[] = {2, 4, 8};
    double sum[3] = {0, 0, 0};
    double pairs[3] = {0, 0, 0};
    double var_sum = 0, var_count = 0;
    Rng rng(derive_seed(2024, {1}));
    for (int draw = 0; draw < 2000; ++draw) {
        const Matrix f = gen.sample_coarse(rng);
        var_sum += f.squaredNorm();
        var_count += static_cast<double>(f.size());
        for (int q = 0; q < 3; ++q) {
            const int lag = lags[q];
            for (int a = 0; a < g; ++a)
                for (int b = 0; b + lag < g; ++b) {
                    sum[q] += f(a, b) * f(a, b + lag) + f(b, a) * f(b + lag, a);
                    pairs[q] += 2;
                }
        }
    }
    CHECK(var_sum / var_count == doctest::Approx(1.0).epsilon(0.05));
    for (int q = 0; q < 3; ++q) {
        const double expected = std::exp(-lags[q] * gen.node_spacing() / s.corr_distance);
        const double got = sum[q] / pairs[q];
        INFO("lag " << lags[q] * gen.node_spacing() << " m");
        CHECK(std::abs(got - expected) <= 0.15 * expected);
    }
}

TEST_CASE("refinement reproduces a coarse field that is affine in position") {
    ShadowingSpec s;
    s.resolution = 11;
    const ShadowingGenerator gen(1000, s);
    Matrix coarse(11, 11);
    for (int a = 0; a < 11; ++a)
        for (int b = 0; b < 11; ++b)
            coarse(a, b) = 0.3 + 0.002 * a * 100 - 0.001 * b * 100;
    const Matrix fine = gen.refine(coarse, 20);
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j) {
            const double x = (i + 0.5) * 50, y = (j + 0.5) * 50;
            CHECK(fine(i, j) == doctest::Approx(0.3 + 0.002 * x - 0.001 * y).epsilon(1e-12));
        }
}

TEST_CASE("zero shadowing variance leaves unit shadowing factors") {
    FieldSpec spec = quiet_spec(16);
    spec.shadowing.enabled = true;
    spec.shadowing.variance = 0;
    spec.shadowing.resolution = 8;
    CHECK(build_ground_truth(spec).values.isConstant(1.0));
}

TEST_CASE("noiseless measurement returns the map entries") {
    FieldSpec spec = quiet_spec(8);
    spec.sources = {{{500, 700}, GaussianSource{}}};
    const RadioMap h = build_ground_truth(spec);
    const std::vector<Cell> cells{{0, 0}, {3, 5}, {7, 7}};
    const SampleSet s = measure(h, cells, 0.0, 3);
    REQUIRE(s.size() == 3);
    for (const auto &e : s) {
        CHECK(e.value == h.values(e.cell.row, e.cell.col));
        CHECK(e.origin == Origin::measured);
    }
}

TEST_CASE("measurement noise has the configured mean and spread") {
    RadioMap h{Matrix::Constant(2, 2, 4.0), std::nullopt};
    const std::vector<Cell> cell{{1, 0}};
    const int reps = 100000;
    double sum = 0, sq = 0;
    for (int r = 0; r < reps; ++r) {
        const double v = measure(h, cell, 0.1, derive_seed(11, {static_cast<std::uint64_t>(r)}))
                             .entries()
                             .front()
                             .value;
        sum += v;
        sq += v * v;
    }
    const double mean = sum / reps;
    const double sd = std::sqrt(sq / reps - mean * mean);
    CHECK(std::abs(mean - 4.0) < 0.01);
    CHECK(sd == doctest::Approx(0.1).epsilon(0.05));
}

TEST_CASE("measurement rejects duplicate or out-of-range cells") {
    RadioMap h{Matrix::Ones(4, 4), std::nullopt};
    const std::vector<Cell> dup{{1, 1}, {1, 1}};
    const std::vector<Cell> outside{{4, 0}};
    CHECK_THROWS_AS(measure(h, dup, 0.1, 1), ConfigError);
    CHECK_THROWS_AS(measure(h, outside, 0.1, 1), ConfigError);
}

TEST_CASE("gaussian pair field matches term-by-term evaluation") {
    const double beta = 0.1, alpha = 1.0;
    const int l1 = 32, n = 64;
    const Matrix h = gaussian_pair_field(l1, beta, alpha, n).values;
    const double far = std::exp(-beta * l1 * l1);
    CHECK(h(0, 0) == doctest::Approx(alpha * (1 + std::exp(-2 * beta * l1 * l1))).epsilon(1e-14));
    // Row x = L1, column y = 0: u1(L1) u1(0) + u2(L1) u2(0) = 2 exp(-beta L1^2).
    CHECK(h(l1, 0) == doctest::Approx(2 * far).epsilon(1e-12));
    for (int i : {0, 5, 31, 40})
        for (int j : {0, 7, 32, 63}) {
            const double u1i = std::exp(-beta * i * i), u1j = std::exp(-beta * j * j);
            const double u2i = std::exp(-beta * (i - l1) * (i - l1));
            const double u2j = std::exp(-beta * (j - l1) * (j - l1));
            CHECK(h(i, j) == doctest::Approx(alpha * (u1i * u1j + u2i * u2j)).epsilon(1e-13));
        }
}

TEST_CASE("gaussian pair field has numerical rank two") {
    for (double beta : {0.01, 0.1, 0.4})
        CHECK(numerical_rank(gaussian_pair_field(20, beta, 1.0, 48).values, 1e-10) == 2);
}

TEST_CASE("gaussian pair field rejects bad parameters") {
    CHECK_THROWS_AS(gaussian_pair_field(0, 0.1, 1.0, 16), ConfigError);
    CHECK_THROWS_AS(gaussian_pair_field(15, 0.1, 1.0, 16), ConfigError);
    CHECK_THROWS_AS(gaussian_pair_field(4, 0.0, 1.0, 16), ConfigError);
    CHECK_THROWS_AS(gaussian_pair_field(4, 0.1, -1.0, 16), ConfigError);
}

TEST_CASE("field spec validation") {
    FieldSpec spec;
    CHECK_NOTHROW(spec.validate());
    spec.n = 1;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec = FieldSpec{};
    spec.side = 0;
    CHECK_THROWS_AS(build_ground_truth(spec), ConfigError);
    spec = FieldSpec{};
    spec.noise_sigma = -0.1;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec = FieldSpec{};
    spec.sources = {{{std::numeric_limits<double>::quiet_NaN(), 0}, GaussianSource{}}};
    CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("source placement stays inside the margin and is seeded") {
    const auto a = place_sources(50, 2000, UnderwaterSource{}, 0.1, 4);
    const auto b = place_sources(50, 2000, UnderwaterSource{}, 0.1, 4);
    REQUIRE(a.size() == 50);
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].location.x >= 200);
        CHECK(a[k].location.x <= 1800);
        CHECK(a[k].location.y >= 200);
        CHECK(a[k].location.y <= 1800);
        CHECK(a[k].location.x == b[k].location.x);
    }
}
