#include "radiomap/experiment.hpp"
#include "radiomap/rng.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <thread>

namespace radiomap {

std::string to_string(Scheme s) { return s == Scheme::completion ? "completion" : "interpolation"; }

std::string to_string(SweepAxis a) {
    return a == SweepAxis::sampling_ratio ? "sampling_ratio" : "interpolation_ratio";
}

std::string to_string(Method m) {
    switch (m) {
    case Method::uniform: return "uniform";
    case Method::leverage: return "leverage";
    case Method::energy_modified: return "energy_modified";
    case Method::knn: return "knn";
    }
    return "?";
}

Scheme scheme_from_string(const std::string &s) {
    if (s == "completion")
        return Scheme::completion;
    if (s == "interpolation")
        return Scheme::interpolation;
    throw ConfigError("unknown scheme '" + s + "'");
}

SweepAxis sweep_axis_from_string(const std::string &s) {
    if (s == "sampling_ratio")
        return SweepAxis::sampling_ratio;
    if (s == "interpolation_ratio")
        return SweepAxis::interpolation_ratio;
    throw ConfigError("unknown sweep axis '" + s + "'");
}

Method method_from_string(const std::string &s) {
    if (s == "knn")
        return Method::knn;
    switch (strategy_from_string(s)) {
    case Strategy::uniform: return Method::uniform;
    case Strategy::leverage: return Method::leverage;
    case Strategy::energy_modified: return Method::energy_modified;
    }
    throw ConfigError("unknown strategy '" + s + "'");
}

namespace {

Strategy as_strategy(Method m) {
    switch (m) {
    case Method::leverage: return Strategy::leverage;
    case Method::energy_modified: return Strategy::energy_modified;
    default: return Strategy::uniform;
    }
}

int round_count(double ratio, int cells) {
    return static_cast<int>(std::lround(ratio * cells));
}

} // namespace

void ExperimentConfig::validate() const {
    FieldSpec probe = field;
    probe.sources.clear();
    probe.validate();
    if (sources.count < 0)
        throw ConfigError("source count must be nonnegative");
    if (!(sources.margin >= 0 && sources.margin < 0.5))
        throw ConfigError("source placement margin must lie in [0, 0.5)");
    for (const auto &s : place_sources(sources.count, field.side, sources.model(), sources.margin, 0))
        probe.sources.push_back(s);
    probe.validate();
    if (strategies.empty())
        throw ConfigError("experiment needs at least one strategy");
    if (values.empty())
        throw ConfigError("sweep needs at least one value");
    if (trials < 1)
        throw ConfigError("trials must be at least 1");
    if (workers < 1)
        throw ConfigError("workers must be at least 1");
    if (k < 1)
        throw ConfigError("k-NN neighbor count must be positive");
    if (!(first_round_fraction >= 0 && first_round_fraction <= 1))
        throw ConfigError("first-round fraction iota must lie in [0, 1]");
    if (!(rank.energy > 0 && rank.energy <= 1) || rank.max_rank < 1)
        throw ConfigError("invalid rank selection rule");
    svt.validate();
    for (double v : values) {
        if (!(v > 0 && v <= 1))
            throw ConfigError("sweep values must lie in (0, 1]");
    }
    if (!(sampling_ratio > 0 && sampling_ratio <= 1))
        throw ConfigError("sampling ratio must lie in (0, 1]");
    if (interp_count < 0)
        throw ConfigError("interpolation count M0 must be nonnegative");
    for (double v : values) {
        const auto [m, m0] = counts(v);
        if (m < 1)
            throw ConfigError("sweep value yields M < 1");
        if (scheme == Scheme::interpolation && m0 > grid_cells() - m)
            throw ConfigError("M + M0 exceeds the number of grid cells");
    }
}

std::pair<int, int> ExperimentConfig::counts(double sweep_value) const {
    if (axis == SweepAxis::sampling_ratio)
        return {round_count(sweep_value, grid_cells()), interp_count};
    return {round_count(sampling_ratio, grid_cells()), round_count(sweep_value, grid_cells())};
}

std::vector<SummaryRow> NmseReport::summary() const {
    std::vector<SummaryRow> out;
    std::map<std::pair<std::string, double>, std::size_t> slot;
    std::vector<std::vector<double>> values;
    for (const auto &row : rows) {
        const auto key = std::make_pair(row.strategy, row.sweep_value);
        auto it = slot.find(key);
        if (it == slot.end()) {
            it = slot.emplace(key, out.size()).first;
            out.push_back({row.strategy, row.sweep_value, 0, 0, 0});
            values.emplace_back();
        }
        if (row.ok)
            values[it->second].push_back(row.nmse);
    }
    for (std::size_t s = 0; s < out.size(); ++s) {
        const auto &v = values[s];
        const double count = static_cast<double>(v.size());
        out[s].count = static_cast<int>(v.size());
        if (v.empty()) {
            out[s].mean = out[s].std_error = std::nan("");
            continue;
        }
        double mean = 0;
        for (double x : v)
            mean += x;
        mean /= count;
        double ss = 0;
        for (double x : v)
            ss += (x - mean) * (x - mean);
        out[s].mean = mean;
        out[s].std_error = v.size() > 1 ? std::sqrt(ss / (count - 1) / count) : 0.0;
    }
    return out;
}

SummaryRow NmseReport::find(const std::string &strategy, double sweep_value) const {
    for (const auto &s : summary())
        if (s.strategy == strategy && s.sweep_value == sweep_value)
            return s;
    throw ConfigError("no summary for strategy '" + strategy + "' at " + format_double(sweep_value));
}

std::uint64_t hash_matrix(const Matrix &m) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (Eigen::Index k = 0; k < m.size(); ++k) {
        std::uint64_t bits;
        const double v = m(k);
        std::memcpy(&bits, &v, sizeof bits);
        for (int b = 0; b < 8; ++b) {
            h ^= (bits >> (8 * b)) & 0xff;
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

std::string format_double(double v) {
    if (std::isnan(v))
        return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

struct TrialOutcome {
    double nmse = 0;
    int iterations = 0;
    bool converged = true;
};

/// Measurements draw from `measure_stream`, interpolated cells from `stream`.
TrialOutcome run_method(const ExperimentConfig &cfg, Method method, const RadioMap &truth, int m,
                        int m0, std::uint64_t measure_stream, std::uint64_t stream) {
    const int n = truth.size();
    const double sigma = cfg.field.noise_sigma;
    const Interpolator knn = [k = cfg.k](const SampleSet &s, int size) {
        return knn_fill(s, size, k);
    };

    if (cfg.scheme == Scheme::completion && method != Method::knn) {
        SamplingPlan plan;
        plan.strategy = as_strategy(method);
        plan.budget = m;
        plan.first_round_fraction = cfg.first_round_fraction;
        plan.mode = cfg.mode;
        plan.weights = cfg.weights;
        plan.rank = cfg.rank;
        plan.seed = measure_stream;
        const PlanResult sampled = run_two_round_plan(truth, plan, knn, sigma);
        const CompletionResult done = svt_complete(sampled.samples, n, cfg.svt);
        return {nmse(done.map, truth), done.iterations, done.converged};
    }

    // All measurements in one uniform round; shared across methods.
    const auto cells = uniform_sample(n, m, derive_seed(measure_stream, {1})).cells;
    const SampleSet measured = measure(truth, cells, sigma, derive_seed(measure_stream, {2}));
    const Matrix h_hat = knn_fill(measured, n, cfg.k);
    if (method == Method::knn)
        return {nmse(h_hat, truth.values), 0, true};

    Matrix weights = importance_weights(h_hat, as_strategy(method), cfg.rank);
    for (const auto &s : measured)
        weights(s.cell.row, s.cell.col) = 0.0;
    const int count = std::min(m0, n * n - static_cast<int>(measured.size()));
    const auto interp = draw_cells(weights, count, cfg.mode, cfg.weights, derive_seed(stream, {3}));
    const CompletionResult done = interpolation_assisted_complete(measured, interp, cfg.k, n, cfg.svt);
    return {nmse(done.map, truth), done.iterations, done.converged};
}

} // namespace

NmseReport run_experiment(const ExperimentConfig &config, const ProgressFn &progress) {
    config.validate();
    const std::size_t n_values = config.values.size();
    const std::size_t n_trials = static_cast<std::size_t>(config.trials);
    const std::size_t n_methods = config.strategies.size();

    std::optional<ShadowingGenerator> shadowing;
    if (config.field.shadowing.enabled)
        shadowing.emplace(config.field.side, config.field.shadowing);

    // rows indexed [method][value][trial]
    std::vector<ReportRow> rows(n_methods * n_values * n_trials);
    auto slot = [&](std::size_t mth, std::size_t v, std::size_t t) -> ReportRow & {
        return rows[(mth * n_values + v) * n_trials + t];
    };

    // Truths depend only on the trial index; build each once.
    std::vector<std::optional<RadioMap>> truths(n_trials);
    std::vector<std::string> truth_errors(n_trials);
    std::mutex truth_mutex;
    auto truth_for = [&](std::size_t t) -> const RadioMap * {
        std::lock_guard lock(truth_mutex);
        if (!truths[t] && truth_errors[t].empty()) {
            try {
                FieldSpec spec = config.field;
                spec.seed = derive_seed(config.seed, {0x7417, t});
                spec.sources = place_sources(config.sources.count, spec.side, config.sources.model(),
                                             config.sources.margin,
                                             derive_seed(config.seed, {0x50c, t}));
                truths[t] = shadowing ? build_ground_truth(spec, *shadowing)
                                      : build_ground_truth(spec);
            } catch (const std::exception &e) {
                truth_errors[t] = e.what();
            }
        }
        return truths[t] ? &*truths[t] : nullptr;
    };

    const std::size_t tasks = n_values * n_trials;
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::mutex progress_mutex;

    auto worker = [&]() {
        for (;;) {
            const std::size_t task = next.fetch_add(1);
            if (task >= tasks)
                return;
            const std::size_t t = task % n_trials;
            const std::size_t v = task / n_trials;
            const double value = config.values[v];
            const auto [m, m0] = config.counts(value);
            const std::uint64_t stream = derive_seed(config.seed, {0x5a3, v, t});
            // M is fixed along the interpolation axis, so every sweep value
            // reuses one measurement set per trial.
            const std::uint64_t measure_stream =
                config.axis == SweepAxis::interpolation_ratio
                    ? derive_seed(config.seed, {0x5a3, 0x3ea5, t})
                    : stream;
            const RadioMap *truth = truth_for(t);
            for (std::size_t mth = 0; mth < n_methods; ++mth) {
                ReportRow &row = slot(mth, v, t);
                row.strategy = to_string(config.strategies[mth]);
                row.sweep_value = value;
                row.trial = static_cast<int>(t);
                row.seed = stream;
                const auto start = std::chrono::steady_clock::now();
                if (!truth) {
                    row.ok = false;
                    row.error = truth_errors[t];
                    continue;
                }
                row.truth_hash = hash_matrix(truth->values);
                try {
                    const TrialOutcome out =
                        run_method(config, config.strategies[mth], *truth, m, m0,
                                   measure_stream, stream);
                    row.nmse = out.nmse;
                    row.iterations = out.iterations;
                    row.converged = out.converged;
                    if (!std::isfinite(out.nmse)) {
                        row.ok = false;
                        row.error = "non-finite reconstruction";
                    }
                } catch (const std::exception &e) {
                    row.ok = false;
                    row.error = e.what();
                    row.nmse = std::nan("");
                }
                row.wall_time_seconds =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            }
            const std::size_t finished = ++done;
            if (progress) {
                std::lock_guard lock(progress_mutex);
                progress(finished, tasks);
            }
        }
    };

    const int n_workers = std::max(1, std::min<int>(config.workers, static_cast<int>(tasks)));
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < n_workers; ++w)
            pool.emplace_back(worker);
        for (auto &th : pool)
            th.join();
    }
    return {std::move(rows)};
}

void write_report_csv(std::ostream &os, const NmseReport &report) {
    os << "strategy,sweep_value,trial,seed,truth_hash,nmse,solver_iterations,converged,status\n";
    for (const auto &r : report.rows) {
        os << r.strategy << ',' << format_double(r.sweep_value) << ',' << r.trial << ',' << r.seed
           << ',' << r.truth_hash << ',' << format_double(r.nmse) << ',' << r.iterations << ','
           << (r.converged ? 1 : 0) << ',' << (r.ok ? "ok" : "failed") << '\n';
    }
}

void write_summary_csv(std::ostream &os, const NmseReport &report) {
    os << "strategy,sweep_value,mean_nmse,std_error,trials\n";
    for (const auto &s : report.summary())
        os << s.strategy << ',' << format_double(s.sweep_value) << ',' << format_double(s.mean)
           << ',' << format_double(s.std_error) << ',' << s.count << '\n';
}

void write_timing_csv(std::ostream &os, const NmseReport &report) {
    os << "strategy,sweep_value,trial,wall_time_seconds\n";
    for (const auto &r : report.rows)
        os << r.strategy << ',' << format_double(r.sweep_value) << ',' << r.trial << ','
           << format_double(r.wall_time_seconds) << '\n';
}

} // namespace radiomap
