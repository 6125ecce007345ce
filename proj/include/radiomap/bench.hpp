#pragma once

#include "radiomap/config.hpp"
#include "radiomap/theory.hpp"

#include <iosfwd>

namespace radiomap {

inline constexpr const char *version_string = "0.1.0";

/// Runs the trace selected by `config.preset`.
RatioTrace run_theory(const TheoryConfig &config);

/// theorem1: parameter,ratio,reference,clipped_cells (one row per beta;
/// reference is the center-of-J ratio).
/// theorem2: parameter,ratio,reference,deviation,exact_reference,
/// exact_deviation,clipped_cells (one row per delta).
void write_trace_csv(std::ostream &os, const RatioTrace &trace, TheoryPreset preset);

/// Subcommands simulate, sample, complete, bench, theory, keys, version.
/// Returns 0 on success, 1 on usage or configuration errors, 2 on runtime
/// failures.
int cli_main(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace radiomap
