#pragma once

#include "radiomap/completion.hpp"
#include "radiomap/field_sim.hpp"
#include "radiomap/sampling.hpp"
#include "radiomap/types.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace radiomap {

/// `completion`: two-round sampling followed by plain SVT.
/// `interpolation`: M uniform measurements, M0 k-NN pseudo-measurements at
/// cells chosen per strategy, then SVT on the union.
enum class Scheme { completion, interpolation };
enum class SweepAxis { sampling_ratio, interpolation_ratio };
/// Strategies of a sweep. Under the interpolation scheme `uniform`,
/// `leverage` and `energy_modified` pick the interpolated cells; `knn`
/// reports the k-NN map of the measurements alone under either scheme.
enum class Method { uniform, leverage, energy_modified, knn };

std::string to_string(Scheme s);
std::string to_string(SweepAxis a);
std::string to_string(Method m);
Scheme scheme_from_string(const std::string &s);
SweepAxis sweep_axis_from_string(const std::string &s);
Method method_from_string(const std::string &s);

/// Per-trial random source placement.
struct SourceTemplate {
    enum class Kind { underwater, gaussian };

    int count = 3;
    Kind kind = Kind::underwater;
    UnderwaterSource underwater;
    GaussianSource gaussian;
    double margin = 0.1;

    SourceModel model() const {
        if (kind == Kind::gaussian)
            return gaussian;
        return underwater;
    }
};

struct ExperimentConfig {
    /// Field geometry, shadowing and noise; `field.sources` is replaced by a
    /// fresh placement from `sources` in every trial.
    FieldSpec field;
    SourceTemplate sources;
    Scheme scheme = Scheme::completion;
    std::vector<Method> strategies{Method::uniform, Method::leverage, Method::energy_modified};
    SweepAxis axis = SweepAxis::sampling_ratio;
    std::vector<double> values{0.1, 0.2, 0.3, 0.4};
    /// M / N^2 when sweeping the interpolation ratio.
    double sampling_ratio = 0.1;
    /// M0 when sweeping the sampling ratio.
    int interp_count = 3000;
    int trials = 20;
    std::uint64_t seed = 1;
    int workers = 1;
    double first_round_fraction = 0.7;
    SampleMode mode = SampleMode::exact_count;
    WeightForm weights = WeightForm::raw;
    RankRule rank;
    SvtParams svt;
    int k = 3;
    std::string output_path;

    void validate() const;
    int grid_cells() const { return field.n * field.n; }
    /// (M, M0) for a sweep value.
    std::pair<int, int> counts(double sweep_value) const;
};

struct ReportRow {
    std::string strategy;
    double sweep_value = 0;
    int trial = 0;
    std::uint64_t seed = 0;
    double nmse = 0;
    int iterations = 0;
    bool converged = false;
    double wall_time_seconds = 0;
    bool ok = true;
    std::string error;
    std::uint64_t truth_hash = 0;
};

struct SummaryRow {
    std::string strategy;
    double sweep_value = 0;
    double mean = 0;
    double std_error = 0;
    int count = 0;
};

struct NmseReport {
    /// Ordered by (strategy, sweep value, trial).
    std::vector<ReportRow> rows;

    /// Mean and standard error of NMSE over successful trials.
    std::vector<SummaryRow> summary() const;
    SummaryRow find(const std::string &strategy, double sweep_value) const;
};

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

/// Runs every (strategy, sweep value, trial) cell. Trial t of every strategy
/// and sweep value shares the ground truth seeded by (master, t); sampling
/// streams are seeded by (master, sweep index, t) and shared across
/// strategies. Along the interpolation axis the M measurements of trial t are
/// also shared across sweep values. Failures are recorded in their row.
NmseReport run_experiment(const ExperimentConfig &config, const ProgressFn &progress = {});

/// Column order: strategy,sweep_value,trial,seed,truth_hash,nmse,
/// solver_iterations,converged,status. Wall time is excluded so that reruns
/// are byte-identical; see write_timing_csv.
void write_report_csv(std::ostream &os, const NmseReport &report);
void write_summary_csv(std::ostream &os, const NmseReport &report);
void write_timing_csv(std::ostream &os, const NmseReport &report);

std::uint64_t hash_matrix(const Matrix &m);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

} // namespace radiomap
