#pragma once

#include "radiomap/types.hpp"

#include <optional>
#include <span>
#include <vector>

namespace radiomap {

/// Singular value thresholding parameters. Unset `tau` and `step` resolve
/// to 5N and 1.2 N^2 / |observed| at solve time.
///
/// Observations are divided by their RMS before iterating and the result is
/// scaled back, so `tau` is in units of the normalized data and the solver
/// is equivariant under positive scaling of the inputs.
struct SvtParams {
    std::optional<double> tau;
    std::optional<double> step;
    int max_iters = 500;
    double rel_tol = 1e-4;

    void validate() const;
};

struct CompletionResult {
    RadioMap map;
    int iterations = 0;
    /// |P_obs(X - M)|_F / |P_obs(M)|_F at the last iterate.
    double final_residual = 0;
    bool converged = false;
};

/// Per-iteration relative residuals, recorded when requested.
using ResidualTrace = std::vector<double>;

/// Nuclear-norm completion by singular value thresholding:
///   X_k = shrink_tau(Y_{k-1}),  Y_k = Y_{k-1} + step * P_obs(M - X_k),
/// with Y_0 = k0 * step * P_obs(M) and k0 = ceil(tau / (step |P_obs(M)|_2)).
CompletionResult svt_complete(const SampleSet &samples, int n, const SvtParams &params,
                              ResidualTrace *trace = nullptr);

/// Unweighted mean of the k nearest samples (Euclidean grid distance, ties
/// by row then column) for each target. Uses every sample when fewer than k.
std::vector<double> knn_interpolate(const SampleSet &samples, std::span<const Cell> targets,
                                    int k);

/// n x n map holding sample values at sampled cells and k-NN values elsewhere.
Matrix knn_fill(const SampleSet &samples, int n, int k);

/// SVT on the measured samples augmented with k-NN pseudo-measurements at
/// `interp_cells` (origin = interpolated). Measured cells win on overlap.
CompletionResult interpolation_assisted_complete(const SampleSet &samples,
                                                 std::span<const Cell> interp_cells, int k,
                                                 int n, const SvtParams &params);

/// |estimate - truth|_F^2 / |truth|_F^2.
double nmse(const Matrix &estimate, const Matrix &truth);
double nmse(const RadioMap &estimate, const RadioMap &truth);

} // namespace radiomap
