#include "radiomap/sampling.hpp"
#include "radiomap/field_sim.hpp"
#include "radiomap/rng.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace radiomap {

std::string to_string(Strategy s) {
    switch (s) {
    case Strategy::uniform: return "uniform";
    case Strategy::leverage: return "leverage";
    case Strategy::energy_modified: return "energy_modified";
    }
    return "?";
}

std::string to_string(SampleMode m) {
    return m == SampleMode::bernoulli ? "bernoulli" : "exact_count";
}

std::string to_string(WeightForm w) { return w == WeightForm::raw ? "raw" : "clipped"; }

Strategy strategy_from_string(const std::string &s) {
    if (s == "uniform")
        return Strategy::uniform;
    if (s == "leverage")
        return Strategy::leverage;
    if (s == "energy_modified")
        return Strategy::energy_modified;
    throw ConfigError("unknown sampling strategy '" + s + "'");
}

SampleMode sample_mode_from_string(const std::string &s) {
    if (s == "bernoulli")
        return SampleMode::bernoulli;
    if (s == "exact_count")
        return SampleMode::exact_count;
    throw ConfigError("unknown sampling mode '" + s + "'");
}

WeightForm weight_form_from_string(const std::string &s) {
    if (s == "raw")
        return WeightForm::raw;
    if (s == "clipped")
        return WeightForm::clipped;
    throw ConfigError("unknown weight form '" + s + "'");
}

void SamplingPlan::validate(int n) const {
    if (budget < 1)
        throw ConfigError("measurement budget M must be at least 1");
    if (static_cast<long>(budget) > static_cast<long>(n) * n)
        throw ConfigError("measurement budget exceeds the number of grid cells");
    if (!(first_round_fraction >= 0 && first_round_fraction <= 1))
        throw ConfigError("first-round fraction iota must lie in [0, 1]");
    if (!(rank.energy > 0 && rank.energy <= 1) || rank.max_rank < 1)
        throw ConfigError("invalid rank selection rule");
}

int SamplingPlan::first_round_count() const {
    if (strategy == Strategy::uniform)
        return budget;
    return static_cast<int>(std::floor(first_round_fraction * budget + 1e-9));
}

SampleIndexSet uniform_sample(int n, int m, std::uint64_t seed) {
    if (n < 1)
        throw ConfigError("grid size must be positive");
    const int total = n * n;
    if (m < 0 || m > total)
        throw ConfigError("uniform sample count must lie in [0, N^2]");
    std::vector<int> idx(static_cast<std::size_t>(total));
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(seed);
    SampleIndexSet out;
    for (int q = 0; q < m; ++q) {
        std::uniform_int_distribution<int> pick(q, total - 1);
        std::swap(idx[q], idx[pick(rng)]);
        out.cells.push_back({idx[q] / n, idx[q] % n});
        out.rounds.push_back(Round::first);
    }
    return out;
}

SampleIndexSet bernoulli_sample(const ProbabilityField &field, std::uint64_t seed) {
    const Matrix &p = field.p;
    if (p.rows() != p.cols())
        throw ConfigError("probability field must be square");
    Rng rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    SampleIndexSet out;
    for (int i = 0; i < p.rows(); ++i)
        for (int j = 0; j < p.cols(); ++j) {
            const double pij = p(i, j);
            if (!(pij >= 0 && pij <= 1))
                throw ConfigError("probability field entries must lie in [0, 1]");
            if (unit(rng) < pij) {
                out.cells.push_back({i, j});
                out.rounds.push_back(Round::first);
            }
        }
    return out;
}

SampleIndexSet exact_count_sample(const Matrix &weights, int m, std::uint64_t seed) {
    if (weights.rows() != weights.cols())
        throw ConfigError("weight matrix must be square");
    if (m < 0)
        throw ConfigError("sample count must be nonnegative");
    const int n = static_cast<int>(weights.rows());
    Rng rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // Efraimidis-Spirakis: the m largest keys log(u) / w form a successive
    // weighted sample without replacement.
    struct Keyed {
        double key;
        int index;
    };
    std::vector<Keyed> keyed;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double w = weights(i, j);
            if (!std::isfinite(w) || w < 0)
                throw ConfigError("sampling weights must be finite and nonnegative");
            const double u = 1.0 - unit(rng);
            if (w > 0)
                keyed.push_back({std::log(u) / w, i * n + j});
        }
    if (keyed.size() < static_cast<std::size_t>(m))
        throw ConfigError("fewer positive weights than requested samples");
    auto by_key = [](const Keyed &a, const Keyed &b) {
        return a.key > b.key || (a.key == b.key && a.index < b.index);
    };
    std::partial_sort(keyed.begin(), keyed.begin() + m, keyed.end(), by_key);
    SampleIndexSet out;
    for (int q = 0; q < m; ++q) {
        out.cells.push_back({keyed[q].index / n, keyed[q].index % n});
        out.rounds.push_back(Round::first);
    }
    return out;
}

ProbabilityField water_fill(const Matrix &weights, double target) {
    if (!std::isfinite(target) || target < 0)
        throw ConfigError("target count must be nonnegative");
    if (!weights.allFinite() || weights.minCoeff() < 0)
        throw ConfigError("weights must be finite and nonnegative");
    const auto positive = (weights.array() > 0).count();
    if (target > static_cast<double>(positive) * (1 + 1e-12))
        throw ConfigError("target count exceeds the number of cells with positive weight");
    Matrix p = Matrix::Zero(weights.rows(), weights.cols());
    if (target == 0)
        return {p, 0.0};

    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> clipped =
        Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(weights.rows(),
                                                                     weights.cols(), false);
    Eigen::Index n_clipped = 0;
    double c = 0;
    for (Eigen::Index iter = 0; iter <= weights.size(); ++iter) {
        double free_sum = 0;
        for (Eigen::Index k = 0; k < weights.size(); ++k)
            if (!clipped(k))
                free_sum += weights(k);
        const double remaining = target - static_cast<double>(n_clipped);
        if (free_sum <= 0 || remaining <= 0) {
            c = std::numeric_limits<double>::infinity();
            break;
        }
        c = remaining / free_sum;
        Eigen::Index newly = 0;
        for (Eigen::Index k = 0; k < weights.size(); ++k)
            if (!clipped(k) && weights(k) > 0 && c * weights(k) >= 1.0) {
                clipped(k) = true;
                ++newly;
            }
        n_clipped += newly;
        if (newly == 0)
            break;
    }
    for (Eigen::Index k = 0; k < weights.size(); ++k) {
        if (clipped(k))
            p(k) = 1.0;
        else if (weights(k) > 0 && std::isfinite(c))
            p(k) = std::min(c * weights(k), 1.0);
    }
    return {p, target};
}

ProbabilityField energy_modified_field(const Matrix &h_hat, const Matrix &p_hat,
                                       double target_count) {
    if (h_hat.rows() != p_hat.rows() || h_hat.cols() != p_hat.cols())
        throw ConfigError("estimated map and score field differ in shape");
    if (target_count > static_cast<double>(h_hat.size()))
        throw ConfigError("target count exceeds N^2");
    if (!p_hat.allFinite() || p_hat.minCoeff() < 0)
        throw ConfigError("score field must be finite and nonnegative");
    if (!h_hat.allFinite())
        throw ConfigError("estimated map has non-finite entries");
    const Matrix w = (h_hat.cwiseMax(0.0).cwiseProduct(p_hat)).cwiseSqrt();
    if (target_count > 0 && !(w.maxCoeff() > 0))
        throw ConfigError("energy-modified weights vanish everywhere");
    return water_fill(w, target_count);
}

Matrix importance_weights(const Matrix &h_hat, Strategy strategy, const RankRule &rank) {
    if (h_hat.rows() != h_hat.cols())
        throw ConfigError("estimated map must be square");
    if (strategy == Strategy::uniform)
        return Matrix::Ones(h_hat.rows(), h_hat.cols());
    if (!h_hat.allFinite())
        throw ConfigError("estimated map has non-finite entries");
    Eigen::BDCSVD<Matrix> svd(h_hat, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const int r = select_rank(svd.singularValues(), rank.energy, rank.max_rank);
    const SvdFactors factors{svd.matrixU().leftCols(r), svd.singularValues().head(r),
                             svd.matrixV().leftCols(r)};
    const Matrix p_hat = raw_score_field(leverage_scores(factors));
    if (strategy == Strategy::leverage)
        return p_hat;
    return (h_hat.cwiseMax(0.0).cwiseProduct(p_hat)).cwiseSqrt();
}

std::vector<Cell> draw_cells(const Matrix &weights, int count, SampleMode mode, WeightForm form,
                             std::uint64_t seed) {
    if (count == 0)
        return {};
    if (mode == SampleMode::bernoulli)
        return bernoulli_sample(water_fill(weights, count), seed).cells;
    if (form == WeightForm::clipped)
        return exact_count_sample(water_fill(weights, count).p, count, seed).cells;
    return exact_count_sample(weights, count, seed).cells;
}

PlanResult run_two_round_plan(const RadioMap &truth, const SamplingPlan &plan,
                              const Interpolator &interpolate, double noise_sigma) {
    const int n = truth.size();
    plan.validate(n);

    const int first = plan.first_round_count();
    const int second = plan.budget - first;

    std::vector<Cell> first_cells;
    if (plan.strategy == Strategy::uniform && plan.mode == SampleMode::bernoulli) {
        const double p = static_cast<double>(plan.budget) / (static_cast<double>(n) * n);
        first_cells =
            bernoulli_sample({Matrix::Constant(n, n, p), static_cast<double>(plan.budget)},
                             derive_seed(plan.seed, {1}))
                .cells;
    } else {
        first_cells = uniform_sample(n, first, derive_seed(plan.seed, {1})).cells;
    }

    PlanResult out{measure(truth, first_cells, noise_sigma, derive_seed(plan.seed, {2})), {}};
    out.rounds.assign(out.samples.size(), Round::first);
    if (plan.strategy == Strategy::uniform || second == 0)
        return out;

    const Matrix h_hat = interpolate(out.samples, n);
    Matrix weights = importance_weights(h_hat, plan.strategy, plan.rank);
    for (const auto &s : out.samples)
        weights(s.cell.row, s.cell.col) = 0.0;

    const auto second_cells =
        draw_cells(weights, second, plan.mode, plan.weights, derive_seed(plan.seed, {3}));
    const SampleSet measured = measure(truth, second_cells, noise_sigma, derive_seed(plan.seed, {4}));
    for (const auto &s : measured) {
        out.samples.add(s);
        out.rounds.push_back(Round::second);
    }
    return out;
}

} // namespace radiomap
