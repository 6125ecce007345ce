#pragma once

#include "radiomap/experiment.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace radiomap {

enum class TheoryPreset { theorem1, theorem2 };

std::string to_string(TheoryPreset p);
TheoryPreset theory_preset_from_string(const std::string &s);

/// Pseudo-image (theorem1) and consistency (theorem2) trace parameters.
struct TheoryConfig {
    TheoryPreset preset = TheoryPreset::theorem1;
    int n = 64;
    int offset = 32;
    double alpha = 1.0;
    double c = 1.0;
    int delta = 4;
    std::vector<double> betas{0.05, 0.1, 0.2, 0.4};
    double beta = 0.1;
    std::vector<int> deltas{4, 2, 1, 0};
};

struct RunConfig {
    ExperimentConfig experiment;
    TheoryConfig theory;
};

/// Parses `key = value` lines with dotted section prefixes. Blank lines and
/// `#` comments are ignored; unknown or repeated keys are errors.
RunConfig parse_config(std::istream &is, const std::string &source = "<config>");
RunConfig parse_config_string(const std::string &text);
RunConfig load_config(const std::string &path);

/// Writes every key with its current value; parse_config reads it back.
void write_config(std::ostream &os, const RunConfig &config);

struct ConfigKey {
    std::string name;
    std::string description;
};
const std::vector<ConfigKey> &config_keys();

} // namespace radiomap
