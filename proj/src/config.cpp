#include "radiomap/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace radiomap {

std::string to_string(TheoryPreset p) {
    return p == TheoryPreset::theorem1 ? "theorem1" : "theorem2";
}

TheoryPreset theory_preset_from_string(const std::string &s) {
    if (s == "theorem1")
        return TheoryPreset::theorem1;
    if (s == "theorem2")
        return TheoryPreset::theorem2;
    throw ConfigError("unknown theory preset '" + s + "'");
}

namespace {

std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T> T parse_number(const std::string &text) {
    const std::string s = trim(text);
    T value{};
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || s.empty())
        throw ConfigError("invalid number '" + s + "'");
    return value;
}

bool parse_bool(const std::string &text) {
    const std::string s = trim(text);
    if (s == "true" || s == "1" || s == "on")
        return true;
    if (s == "false" || s == "0" || s == "off")
        return false;
    throw ConfigError("invalid boolean '" + s + "'");
}

std::vector<std::string> split_list(const std::string &text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (auto t = trim(item); !t.empty())
            out.push_back(t);
    return out;
}

template <class T> std::vector<T> parse_list(const std::string &text) {
    std::vector<T> out;
    for (const auto &item : split_list(text))
        out.push_back(parse_number<T>(item));
    return out;
}

template <class T> std::string join(const std::vector<T> &v) {
    std::string out;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (k)
            out += ", ";
        if constexpr (std::is_floating_point_v<T>)
            out += format_double(v[k]);
        else
            out += std::to_string(v[k]);
    }
    return out;
}

std::string fmt_bool(bool b) { return b ? "true" : "false"; }

std::string fmt_optional(const std::optional<double> &v) {
    return v ? format_double(*v) : "auto";
}

std::optional<double> parse_optional(const std::string &text) {
    if (trim(text) == "auto")
        return std::nullopt;
    return parse_number<double>(text);
}

struct Entry {
    std::string name;
    std::string description;
    std::function<void(RunConfig &, const std::string &)> set;
    std::function<std::string(const RunConfig &)> get;
};

#define RM_NUM(key, desc, member, type)                                                            \
    Entry {                                                                                        \
        key, desc, [](RunConfig &c, const std::string &v) { c.member = parse_number<type>(v); },   \
            [](const RunConfig &c) {                                                               \
                if constexpr (std::is_floating_point_v<type>)                                      \
                    return format_double(c.member);                                                \
                else                                                                               \
                    return std::to_string(c.member);                                               \
            }                                                                                      \
    }

const std::vector<Entry> &entries() {
    static const std::vector<Entry> table = {
        RM_NUM("field.side", "area side length L in meters", experiment.field.side, double),
        RM_NUM("field.N", "grid side count N", experiment.field.n, int),
        RM_NUM("field.noise_sigma", "measurement noise standard deviation",
               experiment.field.noise_sigma, double),
        RM_NUM("field.seed", "ground-truth seed used by `simulate`", experiment.field.seed,
               std::uint64_t),
        RM_NUM("field.sources", "number of randomly placed sources K", experiment.sources.count,
               int),
        {"field.source.model", "underwater | gaussian",
         [](RunConfig &c, const std::string &v) {
             const auto s = trim(v);
             if (s == "underwater")
                 c.experiment.sources.kind = SourceTemplate::Kind::underwater;
             else if (s == "gaussian")
                 c.experiment.sources.kind = SourceTemplate::Kind::gaussian;
             else
                 throw ConfigError("unknown source model '" + s + "'");
         },
         [](const RunConfig &c) -> std::string {
             return c.experiment.sources.kind == SourceTemplate::Kind::gaussian ? "gaussian"
                                                                               : "underwater";
         }},
        RM_NUM("field.source.margin", "placement margin; sources lie in the central 1-2m fraction",
               experiment.sources.margin, double),
        RM_NUM("field.source.power", "underwater source power P", experiment.sources.underwater.power,
               double),
        RM_NUM("field.source.absorption", "underwater absorption factor A(f)",
               experiment.sources.underwater.absorption, double),
        RM_NUM("field.source.depth", "underwater depth h in meters",
               experiment.sources.underwater.depth, double),
        RM_NUM("field.source.distance_unit", "meters per distance unit in g(d)",
               experiment.sources.underwater.distance_unit, double),
        {"field.source.absorption_sign", "decaying (A^+d) | literal (A^-d)",
         [](RunConfig &c, const std::string &v) {
             const auto s = trim(v);
             if (s == "decaying")
                 c.experiment.sources.underwater.sign = AbsorptionSign::decaying;
             else if (s == "literal")
                 c.experiment.sources.underwater.sign = AbsorptionSign::literal;
             else
                 throw ConfigError("unknown absorption sign '" + s + "'");
         },
         [](const RunConfig &c) -> std::string {
             return c.experiment.sources.underwater.sign == AbsorptionSign::decaying ? "decaying"
                                                                                   : "literal";
         }},
        RM_NUM("field.source.alpha", "gaussian source amplitude", experiment.sources.gaussian.alpha,
               double),
        RM_NUM("field.source.beta", "gaussian source decay per m^2",
               experiment.sources.gaussian.beta, double),
        {"field.shadowing.enabled", "true | false",
         [](RunConfig &c, const std::string &v) {
             c.experiment.field.shadowing.enabled = parse_bool(v);
         },
         [](const RunConfig &c) { return fmt_bool(c.experiment.field.shadowing.enabled); }},
        RM_NUM("field.shadowing.variance", "variance of log10 shadowing",
               experiment.field.shadowing.variance, double),
        RM_NUM("field.shadowing.corr_distance", "correlation distance in meters",
               experiment.field.shadowing.corr_distance, double),
        RM_NUM("field.shadowing.resolution", "coarse generator grid side count",
               experiment.field.shadowing.resolution, int),
        {"experiment.scheme", "completion | interpolation",
         [](RunConfig &c, const std::string &v) {
             c.experiment.scheme = scheme_from_string(trim(v));
         },
         [](const RunConfig &c) { return to_string(c.experiment.scheme); }},
        {"experiment.strategies", "comma list of uniform, leverage, energy_modified, knn",
         [](RunConfig &c, const std::string &v) {
             c.experiment.strategies.clear();
             for (const auto &s : split_list(v))
                 c.experiment.strategies.push_back(method_from_string(s));
         },
         [](const RunConfig &c) {
             std::string out;
             for (std::size_t k = 0; k < c.experiment.strategies.size(); ++k)
                 out += (k ? ", " : "") + to_string(c.experiment.strategies[k]);
             return out;
         }},
        {"experiment.sweep.axis", "sampling_ratio | interpolation_ratio",
         [](RunConfig &c, const std::string &v) {
             c.experiment.axis = sweep_axis_from_string(trim(v));
         },
         [](const RunConfig &c) { return to_string(c.experiment.axis); }},
        {"experiment.sweep.values", "comma list of ratios in (0, 1]",
         [](RunConfig &c, const std::string &v) {
             c.experiment.values = parse_list<double>(v);
         },
         [](const RunConfig &c) { return join(c.experiment.values); }},
        RM_NUM("experiment.sampling_ratio", "M / N^2 when sweeping the interpolation ratio",
               experiment.sampling_ratio, double),
        RM_NUM("experiment.M0", "interpolated cell count when sweeping the sampling ratio",
               experiment.interp_count, int),
        RM_NUM("experiment.trials", "paired trials per sweep value", experiment.trials, int),
        RM_NUM("experiment.seed", "master seed", experiment.seed, std::uint64_t),
        RM_NUM("experiment.workers", "concurrent trial workers", experiment.workers, int),
        {"experiment.output", "report CSV path",
         [](RunConfig &c, const std::string &v) { c.experiment.output_path = trim(v); },
         [](const RunConfig &c) { return c.experiment.output_path; }},
        RM_NUM("sampling.iota", "first-round fraction", experiment.first_round_fraction, double),
        {"sampling.mode", "exact_count | bernoulli",
         [](RunConfig &c, const std::string &v) {
             c.experiment.mode = sample_mode_from_string(trim(v));
         },
         [](const RunConfig &c) { return to_string(c.experiment.mode); }},
        {"sampling.weights", "raw | clipped",
         [](RunConfig &c, const std::string &v) {
             c.experiment.weights = weight_form_from_string(trim(v));
         },
         [](const RunConfig &c) { return to_string(c.experiment.weights); }},
        RM_NUM("sampling.rank_energy", "energy fraction for the estimated-map rank",
               experiment.rank.energy, double),
        RM_NUM("sampling.max_rank", "rank cap for the estimated map", experiment.rank.max_rank, int),
        {"svt.tau", "singular value threshold on RMS-normalized data, or auto (5N)",
         [](RunConfig &c, const std::string &v) { c.experiment.svt.tau = parse_optional(v); },
         [](const RunConfig &c) { return fmt_optional(c.experiment.svt.tau); }},
        {"svt.step", "SVT step size, or auto (1.2 N^2 / |observed|)",
         [](RunConfig &c, const std::string &v) { c.experiment.svt.step = parse_optional(v); },
         [](const RunConfig &c) { return fmt_optional(c.experiment.svt.step); }},
        RM_NUM("svt.max_iters", "SVT iteration cap", experiment.svt.max_iters, int),
        RM_NUM("svt.rel_tol", "relative observed-residual tolerance", experiment.svt.rel_tol,
               double),
        RM_NUM("knn.k", "k-NN neighbor count", experiment.k, int),
        {"theory.preset", "theorem1 | theorem2",
         [](RunConfig &c, const std::string &v) {
             c.theory.preset = theory_preset_from_string(trim(v));
         },
         [](const RunConfig &c) { return to_string(c.theory.preset); }},
        RM_NUM("theory.N", "grid side count", theory.n, int),
        RM_NUM("theory.L1", "offset of the second source", theory.offset, int),
        RM_NUM("theory.alpha", "source amplitude", theory.alpha, double),
        RM_NUM("theory.C", "leverage probability constant", theory.c, double),
        RM_NUM("theory.delta", "pseudo-image region half-width", theory.delta, int),
        {"theory.betas", "comma list of increasing decay rates (theorem1)",
         [](RunConfig &c, const std::string &v) { c.theory.betas = parse_list<double>(v); },
         [](const RunConfig &c) { return join(c.theory.betas); }},
        RM_NUM("theory.beta", "decay rate (theorem2)", theory.beta, double),
        {"theory.deltas", "comma list of decreasing half-widths (theorem2)",
         [](RunConfig &c, const std::string &v) { c.theory.deltas = parse_list<int>(v); },
         [](const RunConfig &c) { return join(c.theory.deltas); }},
    };
    return table;
}

#undef RM_NUM

} // namespace

RunConfig parse_config(std::istream &is, const std::string &source) {
    std::map<std::string, const Entry *> index;
    for (const auto &e : entries())
        index.emplace(e.name, &e);

    RunConfig config;
    std::set<std::string> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (body.empty())
            continue;
        const auto where = source + ":" + std::to_string(lineno) + ": ";
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where + "expected `key = value`");
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        const auto it = index.find(key);
        if (it == index.end())
            throw ConfigError(where + "unknown key '" + key + "'");
        if (!seen.insert(key).second)
            throw ConfigError(where + "repeated key '" + key + "'");
        try {
            it->second->set(config, value);
        } catch (const ConfigError &e) {
            throw ConfigError(where + key + ": " + e.what());
        }
    }
    return config;
}

RunConfig parse_config_string(const std::string &text) {
    std::istringstream is(text);
    return parse_config(is);
}

RunConfig load_config(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in, path);
}

void write_config(std::ostream &os, const RunConfig &config) {
    for (const auto &e : entries())
        os << e.name << " = " << e.get(config) << '\n';
}

const std::vector<ConfigKey> &config_keys() {
    static const std::vector<ConfigKey> keys = [] {
        std::vector<ConfigKey> out;
        for (const auto &e : entries())
            out.push_back({e.name, e.description});
        return out;
    }();
    return keys;
}

} // namespace radiomap
