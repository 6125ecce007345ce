#pragma once

#include "radiomap/types.hpp"

#include <span>
#include <vector>

namespace radiomap {

enum class RegionKind {
    /// I(L1, d): rows [L1 - d, L1 + d], cols [0, d] (zero-based). The RSS
    /// vanishes there while leverage probability stays large.
    pseudo_image,
    /// J(L1, d): rows and cols [L1 - d, L1 + d] around the second source.
    source,
};

struct RegionSpec {
    RegionKind kind = RegionKind::pseudo_image;
    int offset = 1;
    int half_width = 0;

    /// Throws ConfigError unless the region fits an n x n grid (and
    /// half_width < offset / 2 for pseudo-image regions).
    void validate(int n) const;
    std::vector<Cell> cells() const;
};

/// Ratios H_ij / p_ij on the two-source Gaussian construction, with p_ij the
/// unclipped leverage probability of the exact rank-2 SVD.
struct RatioTrace {
    std::vector<double> parameters;
    /// Pseudo-image trace: max over I. Consistency trace: the center cell of J.
    std::vector<double> ratios;
    /// Pseudo-image trace: center-of-J ratio at the same beta.
    /// Consistency trace: C'/C with C' = alpha / (4 log^2(2N)).
    std::vector<double> references;
    /// Consistency trace: max over J of |H/p - C'/C| / (C'/C).
    std::vector<double> deviations;
    /// Consistency trace: the isolated-source limit alpha |u2|^2 / (2 C log^2(2N))
    /// of the exact SVD, and deviations against it.
    std::vector<double> exact_references;
    std::vector<double> exact_deviations;
    /// Cells of the whole grid whose unclipped probability exceeds 1.
    std::vector<long> clipped_cells;
};

/// Max over I(L1, delta) of H/p for each beta (positive, increasing).
/// Ratios are formed in log space and floored at 1e-300.
RatioTrace pseudo_image_trace(int n, int offset, int delta, std::span<const double> betas,
                              double alpha, double c);

/// Worst-case relative deviation of H/p from C'/C over J(L1, delta) for each
/// delta (nonnegative, decreasing). Requires offset * sqrt(beta) >= 4.
RatioTrace consistency_trace(int n, int offset, double beta, std::span<const int> deltas,
                             double alpha, double c);

/// Closed expression 2 C log^2(2N) (u1_i^2 + u2_i^2 + u1_j^2 + u2_j^2)
/// for the construction's leverage probability (unnormalized Gaussians).
Matrix pair_probability_closed_form(int n, int offset, double beta, double c);

/// Same with each Gaussian profile normalized to unit norm; the exact-SVD
/// probability approaches this as the two profiles decouple.
Matrix pair_probability_normalized_form(int n, int offset, double beta, double c);

} // namespace radiomap
