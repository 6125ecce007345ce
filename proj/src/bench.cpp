#include "radiomap/bench.hpp"
#include "radiomap/completion.hpp"
#include "radiomap/experiment.hpp"
#include "radiomap/field_sim.hpp"
#include "radiomap/matrix_io.hpp"
#include "radiomap/rng.hpp"
#include "radiomap/sampling.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

namespace radiomap {

RatioTrace run_theory(const TheoryConfig &config) {
    if (config.preset == TheoryPreset::theorem1)
        return pseudo_image_trace(config.n, config.offset, config.delta, config.betas,
                                  config.alpha, config.c);
    return consistency_trace(config.n, config.offset, config.beta, config.deltas, config.alpha,
                             config.c);
}

void write_trace_csv(std::ostream &os, const RatioTrace &trace, TheoryPreset preset) {
    if (preset == TheoryPreset::theorem1) {
        os << "parameter,ratio,reference,clipped_cells\n";
        for (std::size_t k = 0; k < trace.parameters.size(); ++k)
            os << format_double(trace.parameters[k]) << ',' << format_double(trace.ratios[k]) << ','
               << format_double(trace.references[k]) << ',' << trace.clipped_cells[k] << '\n';
        return;
    }
    os << "parameter,ratio,reference,deviation,exact_reference,exact_deviation,clipped_cells\n";
    for (std::size_t k = 0; k < trace.parameters.size(); ++k)
        os << format_double(trace.parameters[k]) << ',' << format_double(trace.ratios[k]) << ','
           << format_double(trace.references[k]) << ',' << format_double(trace.deviations[k])
           << ',' << format_double(trace.exact_references[k]) << ','
           << format_double(trace.exact_deviations[k]) << ',' << trace.clipped_cells[k] << '\n';
}

namespace {

/// Raised for failures after the inputs were accepted; maps to exit code 2.
struct RuntimeFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void emit(const std::string &path, const std::string &content, std::ostream &out) {
    if (path.empty()) {
        out << content;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw RuntimeFailure("cannot write '" + path + "'");
    f << content;
    if (!f)
        throw RuntimeFailure("failed writing '" + path + "'");
}

std::string sibling(const std::string &path, const std::string &suffix) {
    std::filesystem::path p(path);
    const auto stem = p.stem().string();
    return (p.parent_path() / (stem + suffix)).string();
}

RunConfig config_or_default(const std::string &path) {
    return path.empty() ? RunConfig{} : load_config(path);
}

FieldSpec simulation_spec(const RunConfig &config, std::optional<std::uint64_t> seed) {
    const auto &exp = config.experiment;
    FieldSpec spec = exp.field;
    if (seed)
        spec.seed = *seed;
    spec.sources = place_sources(exp.sources.count, spec.side, exp.sources.model(),
                                 exp.sources.margin, derive_seed(spec.seed, {0x50c}));
    return spec;
}

} // namespace

int cli_main(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Radio map construction by leverage-guided sampling and matrix completion",
                 "radiomap"};
    app.require_subcommand(1);

    std::string config_path, out_path, truth_path, samples_path, strategy_name = "energy_modified",
                                                                  preset;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers, budget;
    std::optional<double> ratio;

    auto *simulate = app.add_subcommand("simulate", "write a simulated ground-truth map (CSV)");
    simulate->add_option("--config", config_path, "config file")->check(CLI::ExistingFile);
    simulate->add_option("--seed", seed, "ground-truth seed (overrides field.seed)");
    simulate->add_option("--out", out_path, "output matrix CSV (default stdout)");

    auto *sample = app.add_subcommand("sample", "draw and measure a sample set (CSV)");
    sample->add_option("--config", config_path, "config file")->check(CLI::ExistingFile);
    sample->add_option("--truth", truth_path, "ground-truth matrix CSV")->required();
    sample->add_option("--strategy", strategy_name, "uniform | leverage | energy_modified");
    auto *budget_opt = sample->add_option("--budget", budget, "measurement budget M");
    sample->add_option("--ratio", ratio, "budget as M / N^2")->excludes(budget_opt);
    sample->add_option("--seed", seed, "sampling seed (default experiment.seed)");
    sample->add_option("--out", out_path, "output samples CSV (default stdout)");

    auto *complete = app.add_subcommand("complete", "complete a sample set by SVT");
    complete->add_option("--config", config_path, "config file (svt.* keys)")
        ->check(CLI::ExistingFile);
    complete->add_option("--samples", samples_path, "samples CSV")->required();
    complete->add_option("--truth", truth_path, "ground-truth matrix CSV; prints NMSE");
    complete->add_option("--out", out_path, "output matrix CSV");

    auto *bench = app.add_subcommand("bench", "run an NMSE sweep");
    bench->add_option("--config", config_path, "experiment config file")->required();
    bench->add_option("--seed", seed, "master seed (overrides experiment.seed)");
    bench->add_option("--workers", workers, "concurrent trials (env RADIOMAP_WORKERS)");
    bench->add_option("--out", out_path, "report CSV (default experiment.output, else stdout)");

    auto *theory = app.add_subcommand("theory", "emit a ratio trace CSV");
    theory->add_option("--config", config_path, "config file (theory.* keys)")
        ->check(CLI::ExistingFile);
    theory->add_option("--preset", preset, "theorem1 | theorem2 (overrides theory.preset)");
    theory->add_option("--out", out_path, "output CSV (default stdout)");

    auto *version = app.add_subcommand("version", "print the version");
    auto *keys = app.add_subcommand("keys", "list config keys with their defaults");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError &e) {
        err << e.what() << "\n\n" << app.help();
        return 1;
    }

    try {
        if (*version) {
            out << "radiomap " << version_string << '\n';
            return 0;
        }

        if (*keys) {
            std::ostringstream defaults;
            write_config(defaults, RunConfig{});
            std::map<std::string, std::string> value;
            std::istringstream lines(defaults.str());
            for (std::string line; std::getline(lines, line);)
                if (const auto eq = line.find(" = "); eq != std::string::npos)
                    value[line.substr(0, eq)] = line.substr(eq + 3);
            out << "| key | default | meaning |\n|---|---|---|\n";
            for (const auto &k : config_keys()) {
                std::string meaning;
                for (char ch : k.description)
                    meaning += ch == '|' ? std::string("\\|") : std::string(1, ch);
                out << "| `" << k.name << "` | `" << value[k.name] << "` | " << meaning << " |\n";
            }
            return 0;
        }

        if (*simulate) {
            const RunConfig config = config_or_default(config_path);
            const FieldSpec spec = simulation_spec(config, seed);
            RadioMap truth;
            try {
                truth = build_ground_truth(spec);
            } catch (const ConfigError &) {
                throw;
            } catch (const std::exception &e) {
                throw RuntimeFailure(e.what());
            }
            std::ostringstream buf;
            write_matrix_csv(buf, truth.values);
            emit(out_path, buf.str(), out);
            return 0;
        }

        if (*sample) {
            const RunConfig config = config_or_default(config_path);
            const auto &exp = config.experiment;
            const Matrix truth_values = load_matrix_csv(truth_path);
            const int n = static_cast<int>(truth_values.rows());
            SamplingPlan plan;
            plan.strategy = strategy_from_string(strategy_name);
            plan.budget = budget ? *budget
                                 : static_cast<int>(std::lround(ratio.value_or(exp.values.front()) *
                                                                n * n));
            plan.first_round_fraction = exp.first_round_fraction;
            plan.mode = exp.mode;
            plan.weights = exp.weights;
            plan.rank = exp.rank;
            plan.seed = seed.value_or(exp.seed);
            plan.validate(n);
            const Interpolator knn = [k = exp.k](const SampleSet &s, int size) {
                return knn_fill(s, size, k);
            };
            std::ostringstream buf;
            try {
                const PlanResult result = run_two_round_plan({truth_values, std::nullopt}, plan,
                                                             knn, exp.field.noise_sigma);
                write_samples_csv(buf, result.samples);
            } catch (const ConfigError &) {
                throw;
            } catch (const std::exception &e) {
                throw RuntimeFailure(e.what());
            }
            emit(out_path, buf.str(), out);
            return 0;
        }

        if (*complete) {
            const RunConfig config = config_or_default(config_path);
            const SampleSet samples = load_samples_csv(samples_path);
            std::optional<Matrix> truth;
            if (!truth_path.empty())
                truth = load_matrix_csv(truth_path);
            const CompletionResult result =
                svt_complete(samples, samples.grid_size(), config.experiment.svt);
            if (!out_path.empty()) {
                std::ostringstream buf;
                write_matrix_csv(buf, result.map.values);
                emit(out_path, buf.str(), out);
            }
            out << "iterations=" << result.iterations
                << " converged=" << (result.converged ? "true" : "false")
                << " residual=" << format_double(result.final_residual) << '\n';
            if (truth)
                out << "nmse=" << format_double(nmse(result.map.values, *truth)) << '\n';
            if (out_path.empty() && !truth)
                write_matrix_csv(out, result.map.values);
            return 0;
        }

        if (*bench) {
            RunConfig config = load_config(config_path);
            auto &exp = config.experiment;
            if (seed)
                exp.seed = *seed;
            if (workers) {
                exp.workers = *workers;
            } else if (const char *env = std::getenv("RADIOMAP_WORKERS")) {
                try {
                    exp.workers = std::stoi(env);
                } catch (const std::exception &) {
                    throw ConfigError("RADIOMAP_WORKERS must be an integer");
                }
            }
            if (!out_path.empty())
                exp.output_path = out_path;
            exp.validate();
            const NmseReport report = run_experiment(exp, [&](std::size_t done, std::size_t total) {
                err << "\rtrials " << done << "/" << total << std::flush;
                if (done == total)
                    err << '\n';
            });
            std::ostringstream rows, summary, timing;
            write_report_csv(rows, report);
            write_summary_csv(summary, report);
            write_timing_csv(timing, report);
            emit(exp.output_path, rows.str(), out);
            if (!exp.output_path.empty()) {
                emit(sibling(exp.output_path, ".summary.csv"), summary.str(), out);
                emit(sibling(exp.output_path, ".timing.csv"), timing.str(), out);
            } else {
                err << summary.str();
            }
            std::size_t failed = 0;
            for (const auto &r : report.rows)
                if (!r.ok) {
                    ++failed;
                    err << "failed: " << r.strategy << " value=" << format_double(r.sweep_value)
                        << " trial=" << r.trial << ": " << r.error << '\n';
                }
            return failed == 0 ? 0 : 2;
        }

        if (*theory) {
            RunConfig config = config_or_default(config_path);
            if (!preset.empty())
                config.theory.preset = theory_preset_from_string(preset);
            const RatioTrace trace = run_theory(config.theory);
            std::ostringstream buf;
            write_trace_csv(buf, trace, config.theory.preset);
            emit(out_path, buf.str(), out);
            return 0;
        }
    } catch (const ConfigError &e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}

} // namespace radiomap
