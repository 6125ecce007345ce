#pragma once

#include "radiomap/types.hpp"

namespace radiomap {

/// Top-r singular triplets: u (rows x r) and v (cols x r) with orthonormal
/// columns, singular values nonincreasing.
struct SvdFactors {
    Matrix u;
    Vector singular_values;
    Matrix v;

    int rank() const { return static_cast<int>(singular_values.size()); }
};

/// Row scores mu_i = N |U^T e_i|^2 / r and column scores nu_j = N |V^T e_j|^2 / r.
/// Each vector sums to its dimension.
struct LeverageScores {
    Vector row;
    Vector col;
    int rank = 0;
};

/// Per-entry inclusion probabilities in [0, 1] and the expected sample count.
struct ProbabilityField {
    Matrix p;
    double target_count = 0;
};

SvdFactors truncated_svd(const Matrix &h, int rank);

/// Throws ConfigError when a retained singular value is numerically zero.
LeverageScores leverage_scores(const SvdFactors &factors);

/// p_ij = min(C (mu_i + nu_j) r log^2(2N) / N, 1). Requires a square grid.
ProbabilityField leverage_probability(const LeverageScores &scores, double c);

/// The unclipped argument C (mu_i + nu_j) r log^2(2N) / N of the above.
Matrix leverage_probability_unclipped(const LeverageScores &scores, double c);

/// p_hat_ij = mu_i + nu_j.
Matrix raw_score_field(const LeverageScores &scores);

/// Smallest r whose leading singular values hold at least `energy` of the
/// squared Frobenius norm, capped at `max_rank`.
int select_rank(const Vector &singular_values, double energy = 0.99, int max_rank = 10);

} // namespace radiomap
