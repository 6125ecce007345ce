#include "radiomap/theory.hpp"
#include "radiomap/field_sim.hpp"
#include "radiomap/leverage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace radiomap {

namespace {

constexpr double ratio_floor = 1e-300;

double log2n_sq(int n) {
    const double l = std::log(2.0 * n);
    return l * l;
}

/// log H_ij of the two-source construction, exact in log space.
double log_pair_field(int i, int j, int offset, double beta, double alpha) {
    const double a = -beta * (double(i) * i + double(j) * j);
    const double di = i - offset, dj = j - offset;
    const double b = -beta * (di * di + dj * dj);
    const double hi = std::max(a, b), lo = std::min(a, b);
    return std::log(alpha) + hi + std::log1p(std::exp(lo - hi));
}

struct PairAnalysis {
    Matrix p;
    long clipped = 0;
};

PairAnalysis analyze_pair(int n, int offset, double beta, double alpha, double c) {
    const RadioMap h = gaussian_pair_field(offset, beta, alpha, n);
    const Matrix p = leverage_probability_unclipped(leverage_scores(truncated_svd(h.values, 2)), c);
    return {p, static_cast<long>((p.array() > 1.0).count())};
}

double ratio_at(const PairAnalysis &pa, Cell cell, int offset, double beta, double alpha) {
    const double log_ratio =
        log_pair_field(cell.row, cell.col, offset, beta, alpha) - std::log(pa.p(cell.row, cell.col));
    return std::max(std::exp(log_ratio), ratio_floor);
}

void check_common(int n, int offset, double alpha, double c) {
    if (n < 4)
        throw ConfigError("theory traces need N >= 4");
    if (offset <= 0 || offset >= n - 1)
        throw ConfigError("source offset must satisfy 0 < L1 < N - 1");
    if (!std::isfinite(alpha) || alpha <= 0)
        throw ConfigError("alpha must be positive");
    if (!std::isfinite(c) || c <= 0)
        throw ConfigError("C must be positive");
}

Vector gaussian_profile(int n, double center, double beta) {
    Vector u(n);
    for (int x = 0; x < n; ++x)
        u(x) = std::exp(-beta * (x - center) * (x - center));
    return u;
}

} // namespace

void RegionSpec::validate(int n) const {
    if (half_width < 0)
        throw ConfigError("region half-width must be nonnegative");
    if (offset - half_width < 0 || offset + half_width > n - 1)
        throw ConfigError("region exceeds the grid");
    if (kind == RegionKind::pseudo_image && !(2 * half_width < offset))
        throw ConfigError("pseudo-image region needs delta < L1 / 2");
}

std::vector<Cell> RegionSpec::cells() const {
    std::vector<Cell> out;
    const int col_lo = kind == RegionKind::pseudo_image ? 0 : offset - half_width;
    const int col_hi = kind == RegionKind::pseudo_image ? half_width : offset + half_width;
    for (int i = offset - half_width; i <= offset + half_width; ++i)
        for (int j = col_lo; j <= col_hi; ++j)
            out.push_back({i, j});
    return out;
}

RatioTrace pseudo_image_trace(int n, int offset, int delta, std::span<const double> betas,
                              double alpha, double c) {
    check_common(n, offset, alpha, c);
    const RegionSpec region{RegionKind::pseudo_image, offset, delta};
    region.validate(n);
    if (betas.empty())
        throw ConfigError("pseudo-image trace needs at least one beta");
    for (std::size_t k = 0; k < betas.size(); ++k)
        if (!(betas[k] > 0) || !std::isfinite(betas[k]) || (k > 0 && !(betas[k] > betas[k - 1])))
            throw ConfigError("betas must be positive and strictly increasing");

    const auto cells = region.cells();
    RatioTrace trace;
    for (double beta : betas) {
        const PairAnalysis pa = analyze_pair(n, offset, beta, alpha, c);
        double worst = 0;
        for (const Cell &cell : cells)
            worst = std::max(worst, ratio_at(pa, cell, offset, beta, alpha));
        trace.parameters.push_back(beta);
        trace.ratios.push_back(worst);
        trace.references.push_back(ratio_at(pa, {offset, offset}, offset, beta, alpha));
        trace.clipped_cells.push_back(pa.clipped);
    }
    return trace;
}

RatioTrace consistency_trace(int n, int offset, double beta, std::span<const int> deltas,
                             double alpha, double c) {
    check_common(n, offset, alpha, c);
    if (!std::isfinite(beta) || beta <= 0)
        throw ConfigError("beta must be positive");
    if (offset * std::sqrt(beta) < 4)
        throw ConfigError("consistency trace needs L1 * sqrt(beta) >= 4");
    if (deltas.empty())
        throw ConfigError("consistency trace needs at least one delta");
    for (std::size_t k = 0; k < deltas.size(); ++k) {
        if (deltas[k] < 0 || (k > 0 && !(deltas[k] < deltas[k - 1])))
            throw ConfigError("deltas must be nonnegative and strictly decreasing");
        RegionSpec{RegionKind::source, offset, deltas[k]}.validate(n);
    }

    const PairAnalysis pa = analyze_pair(n, offset, beta, alpha, c);
    const double reference = alpha / (4.0 * log2n_sq(n)) / c;
    const double exact_reference =
        alpha * gaussian_profile(n, offset, beta).squaredNorm() / (2.0 * c * log2n_sq(n));

    RatioTrace trace;
    for (int delta : deltas) {
        double worst = 0, worst_exact = 0;
        for (const Cell &cell : RegionSpec{RegionKind::source, offset, delta}.cells()) {
            const double r = ratio_at(pa, cell, offset, beta, alpha);
            worst = std::max(worst, std::abs(r - reference) / reference);
            worst_exact = std::max(worst_exact, std::abs(r - exact_reference) / exact_reference);
        }
        trace.parameters.push_back(delta);
        trace.ratios.push_back(ratio_at(pa, {offset, offset}, offset, beta, alpha));
        trace.references.push_back(reference);
        trace.deviations.push_back(worst);
        trace.exact_references.push_back(exact_reference);
        trace.exact_deviations.push_back(worst_exact);
        trace.clipped_cells.push_back(pa.clipped);
    }
    return trace;
}

Matrix pair_probability_closed_form(int n, int offset, double beta, double c) {
    const Vector sq = gaussian_profile(n, 0, beta).cwiseAbs2() +
                      gaussian_profile(n, offset, beta).cwiseAbs2();
    return 2.0 * c * log2n_sq(n) *
           (sq.replicate(1, n) + sq.transpose().replicate(n, 1));
}

Matrix pair_probability_normalized_form(int n, int offset, double beta, double c) {
    const Vector u1 = gaussian_profile(n, 0, beta).normalized();
    const Vector u2 = gaussian_profile(n, offset, beta).normalized();
    const Vector sq = u1.cwiseAbs2() + u2.cwiseAbs2();
    // r = 2: p = C (mu_i + nu_j) * 2 log^2(2N) / N with mu_i = N sq_i / 2.
    return c * log2n_sq(n) * (sq.replicate(1, n) + sq.transpose().replicate(n, 1));
}

} // namespace radiomap
