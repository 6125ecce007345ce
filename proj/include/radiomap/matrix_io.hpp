#pragma once

#include "radiomap/types.hpp"

#include <iosfwd>
#include <string>

namespace radiomap {

/// Matrices: a `# N=<n>` comment line, then n comma-separated rows.
void write_matrix_csv(std::ostream &os, const Matrix &m);
Matrix read_matrix_csv(std::istream &is);

/// Samples: a `# N=<n>` comment line, a `row,col,value,origin` header, one
/// zero-based entry per line.
void write_samples_csv(std::ostream &os, const SampleSet &samples);
SampleSet read_samples_csv(std::istream &is);

Matrix load_matrix_csv(const std::string &path);
SampleSet load_samples_csv(const std::string &path);

} // namespace radiomap
