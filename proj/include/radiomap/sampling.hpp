#pragma once

#include "radiomap/leverage.hpp"
#include "radiomap/types.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace radiomap {

enum class Strategy { uniform, leverage, energy_modified };
enum class SampleMode { bernoulli, exact_count };
/// How second-round weights are formed before drawing: `raw` uses the score
/// field (mu + nu, or sqrt(H * (mu + nu))) directly; `clipped` first
/// water-fills it into probabilities min(C w, 1) with the round's target count.
enum class WeightForm { raw, clipped };
enum class Round { first, second };

std::string to_string(Strategy s);
std::string to_string(SampleMode m);
std::string to_string(WeightForm w);
Strategy strategy_from_string(const std::string &s);
SampleMode sample_mode_from_string(const std::string &s);
WeightForm weight_form_from_string(const std::string &s);

/// Rank used for leverage scores of an estimated map.
struct RankRule {
    double energy = 0.99;
    int max_rank = 10;
};

struct SamplingPlan {
    Strategy strategy = Strategy::uniform;
    /// Total measurement budget M.
    int budget = 1;
    /// First-round fraction iota; ignored for the uniform strategy.
    double first_round_fraction = 0.7;
    SampleMode mode = SampleMode::exact_count;
    WeightForm weights = WeightForm::raw;
    RankRule rank;
    std::uint64_t seed = 1;

    void validate(int n) const;
    int first_round_count() const;
};

struct SampleIndexSet {
    std::vector<Cell> cells;
    std::vector<Round> rounds;

    std::size_t size() const { return cells.size(); }
};

/// Exactly m distinct cells, uniformly without replacement.
SampleIndexSet uniform_sample(int n, int m, std::uint64_t seed);

/// Each cell independently with probability p_ij, in row-major order.
SampleIndexSet bernoulli_sample(const ProbabilityField &field, std::uint64_t seed);

/// Exactly m distinct cells by successive sampling without replacement with
/// probability proportional to the remaining weights.
SampleIndexSet exact_count_sample(const Matrix &weights, int m, std::uint64_t seed);

/// p_ij = min(C w_ij, 1) with C chosen so that sum p = target. Entries that
/// clip are fixed at 1 and the rest renormalized until the target is met.
ProbabilityField water_fill(const Matrix &weights, double target);

/// p~_ij = min(C1 sqrt(max(H_ij, 0) * p_hat_ij), 1), C1 water-filled to hit
/// `target_count` in expectation.
ProbabilityField energy_modified_field(const Matrix &h_hat, const Matrix &p_hat,
                                       double target_count);

/// Second-round importance weights from an estimated map: mu + nu of its
/// leading singular subspace (leverage) or sqrt(max(H, 0) * (mu + nu))
/// (energy_modified). The uniform strategy yields all ones.
Matrix importance_weights(const Matrix &h_hat, Strategy strategy, const RankRule &rank);

/// Draws `count` cells from `weights` (cells with zero weight are never
/// chosen) according to the mode and weight form.
std::vector<Cell> draw_cells(const Matrix &weights, int count, SampleMode mode, WeightForm form,
                             std::uint64_t seed);

/// Builds an estimate of the map from first-round samples.
using Interpolator = std::function<Matrix(const SampleSet &, int)>;

struct PlanResult {
    SampleSet samples;
    /// Parallel to samples.entries().
    std::vector<Round> rounds;
};

/// Uniform strategy: M uniform measurements (M/N^2 Bernoulli field in
/// bernoulli mode). Leverage / energy_modified: floor(iota M) uniform
/// measurements, an estimate from `interpolate`, then (1 - iota) M
/// second-round cells drawn from importance weights among the unmeasured ones.
PlanResult run_two_round_plan(const RadioMap &truth, const SamplingPlan &plan,
                              const Interpolator &interpolate, double noise_sigma);

} // namespace radiomap
