#pragma once

#include <Eigen/Dense>

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace radiomap {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Raised for malformed input: bad parameters, invalid configuration,
/// out-of-range indices. The CLI maps it to exit code 1.
class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Grid cell, zero-based. `row` indexes the x axis, `col` the y axis.
struct Cell {
    int row = 0;
    int col = 0;

    friend auto operator<=>(const Cell &, const Cell &) = default;
};

struct Point {
    double x = 0;
    double y = 0;
};

/// g(d) = alpha * exp(-beta * d^2), d in meters.
struct GaussianSource {
    double alpha = 1.0;
    double beta = 1e-5;
};

enum class AbsorptionSign {
    /// A^(+d/unit): attenuates with distance when A < 1.
    decaying,
    /// A^(-d/unit), the sign as printed for the underwater model.
    literal,
};

/// g(d) = P * (d/unit)^-1.5 * A^(+-d/unit) with d = sqrt(dx^2 + dy^2 + depth^2).
struct UnderwaterSource {
    double power = 100.0;
    double absorption = 0.8;
    double depth = 400.0;
    double distance_unit = 1000.0;
    AbsorptionSign sign = AbsorptionSign::decaying;
};

using SourceModel = std::variant<GaussianSource, UnderwaterSource>;

struct SourceSpec {
    Point location;
    SourceModel model;
};

struct ShadowingSpec {
    bool enabled = true;
    /// Variance of the log10 shadowing field.
    double variance = 1.0;
    /// Correlation distance in meters.
    double corr_distance = 200.0;
    /// Side count of the coarse grid the Gaussian field is drawn on.
    int resolution = 50;
};

struct FieldSpec {
    double side = 2000.0;
    int n = 100;
    std::vector<SourceSpec> sources;
    ShadowingSpec shadowing;
    double noise_sigma = 0.1;
    std::uint64_t seed = 1;

    /// Center of cell (row, col) in meters.
    Point cell_center(int row, int col) const;

    /// Throws ConfigError when any invariant is violated.
    void validate() const;
};

/// N x N matrix of linear-scale RSS. `spec` is set for simulated ground
/// truth and empty for reconstructions.
struct RadioMap {
    Matrix values;
    std::optional<FieldSpec> spec;

    int size() const { return static_cast<int>(values.rows()); }
};

enum class Origin { measured, interpolated };

struct Sample {
    Cell cell;
    double value = 0;
    Origin origin = Origin::measured;
};

/// Observed entries of an N x N grid; cells are in range and unique.
class SampleSet {
  public:
    explicit SampleSet(int n);

    int grid_size() const { return n_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    bool contains(Cell c) const;

    /// Throws ConfigError on an out-of-range or duplicate cell.
    void add(const Sample &s);
    /// Adds unless the cell is already present; returns whether it was added.
    bool try_add(const Sample &s);

    const std::vector<Sample> &entries() const { return entries_; }
    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

    std::size_t count(Origin origin) const;
    std::vector<Cell> cells() const;

  private:
    void check_range(Cell c) const;

    int n_;
    std::vector<Sample> entries_;
    std::vector<char> occupied_;
};

std::string to_string(Origin origin);
Origin origin_from_string(const std::string &s);

} // namespace radiomap
