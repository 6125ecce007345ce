#include "radiomap/field_sim.hpp"
#include "radiomap/rng.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

namespace radiomap {

double path_gain(const SourceModel &model, double d) {
    if (const auto *g = std::get_if<GaussianSource>(&model))
        return g->alpha * std::exp(-g->beta * d * d);
    const auto &u = std::get<UnderwaterSource>(model);
    const double dist = std::sqrt(d * d + u.depth * u.depth) / u.distance_unit;
    if (dist <= 0)
        throw ConfigError("underwater source evaluated at zero distance");
    const double exponent = u.sign == AbsorptionSign::decaying ? dist : -dist;
    return u.power * std::pow(dist, -1.5) * std::pow(u.absorption, exponent);
}

ShadowingGenerator::ShadowingGenerator(double side, const ShadowingSpec &spec)
    : side_(side), spec_(spec), resolution_(spec.resolution) {
    if (!std::isfinite(side) || side <= 0)
        throw ConfigError("area side length must be positive");
    if (resolution_ < 2)
        throw ConfigError("shadowing generator resolution must be at least 2");
    if (!std::isfinite(spec.corr_distance) || spec.corr_distance <= 0)
        throw ConfigError("shadowing correlation distance must be positive");
    if (!std::isfinite(spec.variance) || spec.variance < 0)
        throw ConfigError("shadowing variance must be nonnegative");

    const int g = resolution_;
    const Eigen::Index count = static_cast<Eigen::Index>(g) * g;
    const double h = node_spacing();
    Matrix cov(count, count);
    for (Eigen::Index a = 0; a < count; ++a) {
        const double ax = (a / g) * h, ay = (a % g) * h;
        for (Eigen::Index b = 0; b <= a; ++b) {
            const double bx = (b / g) * h, by = (b % g) * h;
            const double d = std::hypot(ax - bx, ay - by);
            cov(a, b) = cov(b, a) = spec.variance * std::exp(-d / spec.corr_distance);
        }
    }
    if (spec.variance == 0) {
        factor_ = Matrix::Zero(count, count);
        return;
    }
    Eigen::LLT<Matrix> llt(cov);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("shadowing covariance is not positive definite");
    factor_ = llt.matrixL();
}

Matrix ShadowingGenerator::sample_coarse(Rng &rng) const {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector z(factor_.rows());
    for (Eigen::Index k = 0; k < z.size(); ++k)
        z(k) = normal(rng);
    const Vector s = factor_.triangularView<Eigen::Lower>() * z;
    Matrix out(resolution_, resolution_);
    for (int a = 0; a < resolution_; ++a)
        for (int b = 0; b < resolution_; ++b)
            out(a, b) = s(static_cast<Eigen::Index>(a) * resolution_ + b);
    return out;
}

Matrix ShadowingGenerator::refine(const Matrix &coarse, int n) const {
    const double h = node_spacing();
    const double cell = side_ / n;
    const int last = resolution_ - 1;
    auto locate = [&](double coord, int &lo, double &t) {
        const double f = std::clamp(coord / h, 0.0, static_cast<double>(last));
        lo = std::min(static_cast<int>(std::floor(f)), last - 1);
        t = f - lo;
    };
    Matrix out(n, n);
    for (int i = 0; i < n; ++i) {
        int a;
        double tx;
        locate((i + 0.5) * cell, a, tx);
        for (int j = 0; j < n; ++j) {
            int b;
            double ty;
            locate((j + 0.5) * cell, b, ty);
            out(i, j) = (1 - tx) * (1 - ty) * coarse(a, b) + tx * (1 - ty) * coarse(a + 1, b) +
                        (1 - tx) * ty * coarse(a, b + 1) + tx * ty * coarse(a + 1, b + 1);
        }
    }
    return out;
}

Matrix ShadowingGenerator::sample(int n, Rng &rng) const { return refine(sample_coarse(rng), n); }

Matrix source_field(const FieldSpec &spec) {
    Matrix h = Matrix::Zero(spec.n, spec.n);
    for (const auto &src : spec.sources)
        for (int i = 0; i < spec.n; ++i)
            for (int j = 0; j < spec.n; ++j) {
                const Point c = spec.cell_center(i, j);
                h(i, j) += path_gain(src.model, std::hypot(c.x - src.location.x,
                                                           c.y - src.location.y));
            }
    return h;
}

namespace {

RadioMap assemble(const FieldSpec &spec, const ShadowingGenerator *shadowing) {
    spec.validate();
    RadioMap map{source_field(spec), spec};
    if (spec.shadowing.enabled) {
        Rng rng(derive_seed(spec.seed, {0x5ad0}));
        std::optional<ShadowingGenerator> local;
        if (!shadowing)
            shadowing = &local.emplace(spec.side, spec.shadowing);
        const Matrix s = shadowing->sample(spec.n, rng);
        map.values += s.unaryExpr([](double v) { return std::pow(10.0, v); });
    }
    if (!map.values.allFinite())
        throw std::runtime_error("ground truth has non-finite entries");
    return map;
}

} // namespace

RadioMap build_ground_truth(const FieldSpec &spec) { return assemble(spec, nullptr); }

RadioMap build_ground_truth(const FieldSpec &spec, const ShadowingGenerator &shadowing) {
    if (shadowing.side() != spec.side || shadowing.spec().variance != spec.shadowing.variance ||
        shadowing.spec().corr_distance != spec.shadowing.corr_distance ||
        shadowing.resolution() != spec.shadowing.resolution)
        throw ConfigError("shadowing generator does not match the field spec");
    return assemble(spec, &shadowing);
}

SampleSet measure(const RadioMap &map, std::span<const Cell> locations, double noise_sigma,
                  std::uint64_t seed) {
    if (!std::isfinite(noise_sigma) || noise_sigma < 0)
        throw ConfigError("noise sigma must be nonnegative");
    Rng rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    SampleSet out(map.size());
    for (const Cell &c : locations) {
        const double eps = noise_sigma > 0 ? noise_sigma * noise(rng) : 0.0;
        if (c.row < 0 || c.col < 0 || c.row >= map.size() || c.col >= map.size())
            throw ConfigError("measurement location outside the grid");
        out.add({c, map.values(c.row, c.col) + eps, Origin::measured});
    }
    return out;
}

RadioMap gaussian_pair_field(int offset, double beta, double alpha, int n) {
    if (n < 2)
        throw ConfigError("grid size must be at least 2");
    if (offset <= 0 || offset >= n - 1)
        throw ConfigError("source offset must satisfy 0 < L1 < N - 1");
    if (!std::isfinite(beta) || beta <= 0)
        throw ConfigError("decay beta must be positive");
    if (!std::isfinite(alpha) || alpha <= 0)
        throw ConfigError("amplitude alpha must be positive");
    Vector u1(n), u2(n);
    for (int x = 0; x < n; ++x) {
        u1(x) = std::exp(-beta * x * x);
        u2(x) = std::exp(-beta * (x - offset) * (x - offset));
    }
    return {alpha * (u1 * u1.transpose() + u2 * u2.transpose()), std::nullopt};
}

std::vector<SourceSpec> place_sources(int count, double side, const SourceModel &model,
                                      double margin, std::uint64_t seed) {
    if (count < 0)
        throw ConfigError("source count must be nonnegative");
    if (!(margin >= 0 && margin < 0.5))
        throw ConfigError("placement margin must lie in [0, 0.5)");
    Rng rng(seed);
    std::uniform_real_distribution<double> coord(margin * side, (1 - margin) * side);
    std::vector<SourceSpec> out;
    for (int k = 0; k < count; ++k) {
        const double x = coord(rng);
        const double y = coord(rng);
        out.push_back({{x, y}, model});
    }
    return out;
}

} // namespace radiomap
