#pragma once

#include "radiomap/rng.hpp"
#include "radiomap/types.hpp"

#include <Eigen/Cholesky>

#include <cstdint>
#include <span>

namespace radiomap {

/// Path gain of one source at distance `d` meters (horizontal distance for
/// the underwater model; depth is added internally).
double path_gain(const SourceModel &model, double d);

/// Draws zero-mean Gaussian log10-shadowing fields with exponential
/// covariance  variance * exp(-|c - c'| / corr_distance).
///
/// The field is realized exactly on a coarse `resolution x resolution` grid
/// spanning [0, side]^2 (nodes at g * side / (resolution - 1)) via a Cholesky
/// factor of its covariance, then bilinearly interpolated onto cell centers.
/// Construction costs O(resolution^6); build once and reuse across trials.
class ShadowingGenerator {
  public:
    ShadowingGenerator(double side, const ShadowingSpec &spec);

    int resolution() const { return resolution_; }
    double node_spacing() const { return side_ / (resolution_ - 1); }
    const ShadowingSpec &spec() const { return spec_; }
    double side() const { return side_; }

    /// log10 shadowing on the coarse grid, row-major by (x, y) node.
    Matrix sample_coarse(Rng &rng) const;

    /// log10 shadowing at the centers of an n x n grid.
    Matrix sample(int n, Rng &rng) const;

    /// Bilinear interpolation of a coarse field onto n x n cell centers.
    Matrix refine(const Matrix &coarse, int n) const;

  private:
    double side_;
    ShadowingSpec spec_;
    int resolution_;
    Matrix factor_;
};

/// Deterministic part of the field: sum of source path gains at cell centers.
Matrix source_field(const FieldSpec &spec);

/// H_ij = sum_k g_k(|s_k - c_ij|) + 10^s(c_ij), s the correlated log10
/// shadowing (omitted when disabled). Deterministic in `spec.seed`.
RadioMap build_ground_truth(const FieldSpec &spec);

/// Same, reusing a prebuilt shadowing generator matching `spec`.
RadioMap build_ground_truth(const FieldSpec &spec, const ShadowingGenerator &shadowing);

/// Noisy point measurements value = H_ij + N(0, noise_sigma^2).
SampleSet measure(const RadioMap &map, std::span<const Cell> locations, double noise_sigma,
                  std::uint64_t seed);

/// Two-source Gaussian construction on the unit grid x = y = [0, n-1], with
/// sources at (0, 0) and (offset, offset):
///   H_ij = alpha * (u1_i u1_j + u2_i u2_j),  u1 = exp(-beta x^2),
///   u2 = exp(-beta (x - offset)^2).
RadioMap gaussian_pair_field(int offset, double beta, double alpha, int n);

/// Places `count` sources uniformly at random in the central
/// (1 - 2 * margin) fraction of the area.
std::vector<SourceSpec> place_sources(int count, double side, const SourceModel &model,
                                      double margin, std::uint64_t seed);

} // namespace radiomap
