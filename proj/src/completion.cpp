#include "radiomap/completion.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <tuple>

namespace radiomap {

void SvtParams::validate() const {
    if (tau && (!std::isfinite(*tau) || *tau < 0))
        throw ConfigError("svt tau must be nonnegative");
    if (step && (!std::isfinite(*step) || *step <= 0))
        throw ConfigError("svt step must be positive");
    if (max_iters < 1)
        throw ConfigError("svt max_iters must be at least 1");
    if (!std::isfinite(rel_tol) || rel_tol <= 0)
        throw ConfigError("svt rel_tol must be positive");
}

namespace {

/// Singular value shrinkage through the eigenpairs of YᵀY. Only singular
/// values above tau survive, and those are resolved to full precision.
Matrix shrink(const Matrix &y, double tau) {
    const Matrix gram = y.transpose() * y;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
    const Vector &lambda = eig.eigenvalues();
    const Eigen::Index n = lambda.size();
    Eigen::Index keep = 0;
    while (keep < n && lambda(n - 1 - keep) > tau * tau)
        ++keep;
    if (keep == 0)
        return Matrix::Zero(y.rows(), y.cols());
    const Matrix v = eig.eigenvectors().rightCols(keep);
    const Vector sigma = lambda.tail(keep).cwiseSqrt();
    const Vector gain = (sigma.array() - tau) / sigma.array();
    return (y * v) * gain.asDiagonal() * v.transpose();
}

} // namespace

CompletionResult svt_complete(const SampleSet &samples, int n, const SvtParams &params,
                              ResidualTrace *trace) {
    params.validate();
    if (samples.empty())
        throw ConfigError("matrix completion needs at least one sample");
    if (samples.grid_size() != n)
        throw ConfigError("sample set grid size does not match N");

    Matrix mask = Matrix::Zero(n, n);
    Matrix observed = Matrix::Zero(n, n);
    for (const auto &s : samples) {
        if (!std::isfinite(s.value))
            throw ConfigError("sample values must be finite");
        mask(s.cell.row, s.cell.col) = 1.0;
        observed(s.cell.row, s.cell.col) = s.value;
    }

    const double m = static_cast<double>(samples.size());
    const double scale = observed.norm() / std::sqrt(m);
    CompletionResult result{{Matrix::Zero(n, n), std::nullopt}, 0, 0.0, true};
    if (scale == 0)
        return result;

    const Matrix b = observed / scale;
    const double b_norm = b.norm();
    const double tau = params.tau.value_or(5.0 * n);

    Eigen::BDCSVD<Matrix> spectral(b);
    const double b_spectral = spectral.singularValues()(0);
    double step = params.step.value_or(1.2 * n * static_cast<double>(n) / m);
    const double k0 = std::ceil(tau / (step * b_spectral));

    // Accepted iterate; a step that raises the observed residual is retried
    // from here with half the step size.
    Matrix y = k0 * step * b;
    Matrix x = shrink(y, tau);
    Matrix residual = mask.cwiseProduct(b - x);
    double rel = residual.norm() / b_norm;
    int it = 1;
    if (trace)
        trace->push_back(rel);
    result.converged = rel < params.rel_tol;
    while (!result.converged && it < params.max_iters) {
        const Matrix y_next = y + step * residual;
        Matrix x_next = shrink(y_next, tau);
        ++it;
        Matrix r_next = mask.cwiseProduct(b - x_next);
        const double rel_next = r_next.norm() / b_norm;
        if (!(rel_next <= rel)) {
            step *= 0.5;
            continue;
        }
        y = y_next;
        x = std::move(x_next);
        residual = std::move(r_next);
        rel = rel_next;
        if (trace)
            trace->push_back(rel);
        result.converged = rel < params.rel_tol;
    }
    result.map.values = scale * x;
    result.iterations = it;
    result.final_residual = rel;
    return result;
}

std::vector<double> knn_interpolate(const SampleSet &samples, std::span<const Cell> targets,
                                    int k) {
    if (samples.empty())
        throw ConfigError("k-NN interpolation needs at least one sample");
    if (k < 1)
        throw ConfigError("k-NN neighbor count must be positive");

    using Candidate = std::tuple<long, int, int, double>;
    std::vector<Candidate> cand;
    cand.reserve(samples.size());
    const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), samples.size());

    std::vector<double> out;
    out.reserve(targets.size());
    for (const Cell &t : targets) {
        cand.clear();
        for (const auto &s : samples) {
            const long dr = s.cell.row - t.row;
            const long dc = s.cell.col - t.col;
            cand.emplace_back(dr * dr + dc * dc, s.cell.row, s.cell.col, s.value);
        }
        std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(kk),
                          cand.end(), [](const Candidate &a, const Candidate &b) {
                              return std::tie(std::get<0>(a), std::get<1>(a), std::get<2>(a)) <
                                     std::tie(std::get<0>(b), std::get<1>(b), std::get<2>(b));
                          });
        double sum = 0;
        for (std::size_t q = 0; q < kk; ++q)
            sum += std::get<3>(cand[q]);
        out.push_back(sum / static_cast<double>(kk));
    }
    return out;
}

Matrix knn_fill(const SampleSet &samples, int n, int k) {
    if (samples.grid_size() != n)
        throw ConfigError("sample set grid size does not match N");
    Matrix out(n, n);
    std::vector<Cell> targets;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (!samples.contains({i, j}))
                targets.push_back({i, j});
    const auto values = knn_interpolate(samples, targets, k);
    for (std::size_t q = 0; q < targets.size(); ++q)
        out(targets[q].row, targets[q].col) = values[q];
    for (const auto &s : samples)
        out(s.cell.row, s.cell.col) = s.value;
    return out;
}

CompletionResult interpolation_assisted_complete(const SampleSet &samples,
                                                 std::span<const Cell> interp_cells, int k,
                                                 int n, const SvtParams &params) {
    if (samples.empty())
        throw ConfigError("matrix completion needs at least one sample");
    if (interp_cells.empty())
        return svt_complete(samples, n, params);

    std::vector<Cell> fresh;
    fresh.reserve(interp_cells.size());
    for (const Cell &c : interp_cells)
        if (!samples.contains(c))
            fresh.push_back(c);

    SampleSet augmented = samples;
    const auto values = knn_interpolate(samples, fresh, k);
    for (std::size_t q = 0; q < fresh.size(); ++q)
        augmented.try_add({fresh[q], values[q], Origin::interpolated});
    return svt_complete(augmented, n, params);
}

double nmse(const Matrix &estimate, const Matrix &truth) {
    if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols())
        throw ConfigError("NMSE operands differ in shape");
    const double denom = truth.squaredNorm();
    if (!(denom > 0))
        throw ConfigError("NMSE undefined for a zero truth matrix");
    return (estimate - truth).squaredNorm() / denom;
}

double nmse(const RadioMap &estimate, const RadioMap &truth) {
    return nmse(estimate.values, truth.values);
}

} // namespace radiomap
