#include "radiomap/leverage.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>

namespace radiomap {

SvdFactors truncated_svd(const Matrix &h, int rank) {
    const auto min_dim = std::min(h.rows(), h.cols());
    if (rank < 1 || rank > min_dim)
        throw ConfigError("SVD rank must lie in [1, min(rows, cols)]");
    if (!h.allFinite())
        throw ConfigError("SVD input has non-finite entries");
    Eigen::BDCSVD<Matrix> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return {svd.matrixU().leftCols(rank), svd.singularValues().head(rank),
            svd.matrixV().leftCols(rank)};
}

LeverageScores leverage_scores(const SvdFactors &factors) {
    const int r = factors.rank();
    if (r < 1 || factors.u.cols() != r || factors.v.cols() != r)
        throw ConfigError("SVD factors have inconsistent rank");
    const double top = factors.singular_values(0);
    const double floor = std::numeric_limits<double>::epsilon() *
                         static_cast<double>(std::max(factors.u.rows(), factors.v.rows())) * top;
    if (!(top > 0) || !(factors.singular_values(r - 1) > floor))
        throw ConfigError("leverage scores need rank-r factors with positive singular values");
    const double rows = static_cast<double>(factors.u.rows());
    const double cols = static_cast<double>(factors.v.rows());
    return {rows * factors.u.rowwise().squaredNorm() / r,
            cols * factors.v.rowwise().squaredNorm() / r, r};
}

Matrix leverage_probability_unclipped(const LeverageScores &scores, double c) {
    if (!std::isfinite(c) || c <= 0)
        throw ConfigError("leverage probability constant C must be positive");
    const auto n = scores.row.size();
    if (scores.col.size() != n)
        throw ConfigError("leverage probability requires a square grid");
    const double log2n = std::log(2.0 * static_cast<double>(n));
    const double scale = c * scores.rank * log2n * log2n / static_cast<double>(n);
    return scale * raw_score_field(scores);
}

ProbabilityField leverage_probability(const LeverageScores &scores, double c) {
    Matrix p = leverage_probability_unclipped(scores, c).cwiseMin(1.0);
    const double total = p.sum();
    return {std::move(p), total};
}

Matrix raw_score_field(const LeverageScores &scores) {
    return scores.row.replicate(1, scores.col.size()) +
           scores.col.transpose().replicate(scores.row.size(), 1);
}

int select_rank(const Vector &singular_values, double energy, int max_rank) {
    if (singular_values.size() == 0)
        throw ConfigError("rank selection needs at least one singular value");
    if (!(energy > 0 && energy <= 1))
        throw ConfigError("rank energy fraction must lie in (0, 1]");
    if (max_rank < 1)
        throw ConfigError("maximum rank must be positive");
    const double total = singular_values.squaredNorm();
    const int cap = std::min<int>(max_rank, static_cast<int>(singular_values.size()));
    double acc = 0;
    for (int r = 1; r <= cap; ++r) {
        acc += singular_values(r - 1) * singular_values(r - 1);
        if (acc >= energy * total)
            return r;
    }
    return cap;
}

} // namespace radiomap
