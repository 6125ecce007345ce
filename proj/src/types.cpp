#include "radiomap/types.hpp"

#include <cmath>

namespace radiomap {

namespace {

bool finite(double v) { return std::isfinite(v); }

void validate_source(const SourceSpec &s, double side) {
    if (!finite(s.location.x) || !finite(s.location.y) || s.location.x < 0 ||
        s.location.y < 0 || s.location.x > side || s.location.y > side)
        throw ConfigError("source location outside the area");
    if (const auto *g = std::get_if<GaussianSource>(&s.model)) {
        if (!finite(g->alpha) || !finite(g->beta) || g->alpha <= 0 || g->beta <= 0)
            throw ConfigError("gaussian source needs alpha > 0 and beta > 0");
    } else {
        const auto &u = std::get<UnderwaterSource>(s.model);
        if (!finite(u.power) || u.power <= 0)
            throw ConfigError("underwater source power must be positive");
        if (!finite(u.absorption) || u.absorption <= 0)
            throw ConfigError("underwater absorption factor must be positive");
        if (!finite(u.depth) || u.depth < 0)
            throw ConfigError("underwater depth must be nonnegative");
        if (!finite(u.distance_unit) || u.distance_unit <= 0)
            throw ConfigError("distance unit must be positive");
    }
}

} // namespace

Point FieldSpec::cell_center(int row, int col) const {
    const double h = side / n;
    return {(row + 0.5) * h, (col + 0.5) * h};
}

void FieldSpec::validate() const {
    if (n < 2)
        throw ConfigError("grid size N must be at least 2");
    if (!finite(side) || side <= 0)
        throw ConfigError("area side length must be positive");
    if (!finite(noise_sigma) || noise_sigma < 0)
        throw ConfigError("noise sigma must be nonnegative");
    for (const auto &s : sources)
        validate_source(s, side);
    if (shadowing.enabled) {
        if (!finite(shadowing.variance) || shadowing.variance < 0)
            throw ConfigError("shadowing variance must be nonnegative");
        if (!finite(shadowing.corr_distance) || shadowing.corr_distance <= 0)
            throw ConfigError("shadowing correlation distance must be positive");
        if (shadowing.resolution < 2)
            throw ConfigError("shadowing generator resolution must be at least 2");
    }
}

SampleSet::SampleSet(int n) : n_(n), occupied_(static_cast<std::size_t>(n) * n, 0) {
    if (n < 1)
        throw ConfigError("sample set grid size must be positive");
}

void SampleSet::check_range(Cell c) const {
    if (c.row < 0 || c.col < 0 || c.row >= n_ || c.col >= n_)
        throw ConfigError("sample cell (" + std::to_string(c.row) + ", " +
                          std::to_string(c.col) + ") outside the grid");
}

bool SampleSet::contains(Cell c) const {
    check_range(c);
    return occupied_[static_cast<std::size_t>(c.row) * n_ + c.col] != 0;
}

void SampleSet::add(const Sample &s) {
    if (!try_add(s))
        throw ConfigError("duplicate sample cell (" + std::to_string(s.cell.row) + ", " +
                          std::to_string(s.cell.col) + ")");
}

bool SampleSet::try_add(const Sample &s) {
    check_range(s.cell);
    if (!std::isfinite(s.value))
        throw ConfigError("sample value must be finite");
    char &slot = occupied_[static_cast<std::size_t>(s.cell.row) * n_ + s.cell.col];
    if (slot)
        return false;
    slot = 1;
    entries_.push_back(s);
    return true;
}

std::size_t SampleSet::count(Origin origin) const {
    std::size_t k = 0;
    for (const auto &e : entries_)
        k += e.origin == origin;
    return k;
}

std::vector<Cell> SampleSet::cells() const {
    std::vector<Cell> out;
    out.reserve(entries_.size());
    for (const auto &e : entries_)
        out.push_back(e.cell);
    return out;
}

std::string to_string(Origin origin) {
    return origin == Origin::measured ? "measured" : "interpolated";
}

Origin origin_from_string(const std::string &s) {
    if (s == "measured")
        return Origin::measured;
    if (s == "interpolated")
        return Origin::interpolated;
    throw ConfigError("unknown sample origin '" + s + "'");
}

} // namespace radiomap
