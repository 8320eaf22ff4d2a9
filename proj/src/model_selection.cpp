#include "gclust/model_selection.hpp"

#include "gclust/error.hpp"
#include "gclust/parallel.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace gclust {

ModelScore aicc(const Matrix& W, const Matrix& H, const Vector& N, double zero_tol) {
    require(W.cols() == H.rows() && W.cols() >= 1, ErrorKind::invalid_argument, "W and H inner dimensions differ");
    require(N.size() == H.cols(), ErrorKind::invalid_argument,
            fmt::format("count vector has {} entries for {} columns", N.size(), H.cols()));
    require((N.array() > 0.0).all(), ErrorKind::invalid_argument, "every column count N_t must be positive");

    ModelScore score;
    score.r = W.cols();
    const Matrix theta = W * H;
    double loss = 0.0;
    for (Index j = 0; j < theta.cols(); ++j)
        for (Index i = 0; i < theta.rows(); ++i) {
            const double v = theta(i, j);
            if (v > 0.0) loss -= v * std::log(v);
        }
    score.loss = loss;

    const Vector Q = H * N;
    double penalty = 0.0;
    for (Index k = 0; k < W.cols(); ++k) {
        if (!(Q[k] > 0.0)) fail(ErrorKind::numerical, fmt::format("empty cluster: Q_{} = 0", k + 1));
        const double cutoff = zero_tol * W.col(k).maxCoeff();
        const auto support = static_cast<double>((W.col(k).array() > cutoff).count());
        penalty += (support - 1.0) / Q[k];
    }
    score.penalty = 0.5 * penalty;
    score.aicc = score.loss + score.penalty;
    return score;
}

Labels extract_labels(const Matrix& H) {
    require(H.rows() >= 1, ErrorKind::invalid_argument, "H has no rows");
    Labels labels;
    labels.values.reserve(static_cast<std::size_t>(H.cols()));
    for (Index t = 0; t < H.cols(); ++t) {
        Index best = 0;
        const double top = H.col(t).maxCoeff(&best);
        if (!(top > 0.0)) fail(ErrorKind::invalid_argument, fmt::format("column {} of H is all zero", t + 1));
        if ((H.col(t).array() == top).count() > 1) ++labels.ties;
        labels.values.push_back(static_cast<int>(best) + 1);
    }
    return labels;
}

Matrix normalize_columns(const Matrix& X, int* degenerate) {
    Matrix out = X;
    int count = 0;
    for (Index t = 0; t < out.cols(); ++t) {
        const double s = out.col(t).sum();
        if (s > 0.0) {
            out.col(t) /= s;
        } else {
            out.col(t).setConstant(1.0 / static_cast<double>(out.rows()));
            ++count;
        }
    }
    if (degenerate) *degenerate = count;
    return out;
}

GclustResult gclust(const DataMatrix& data, Index r, const GclustOptions& options) {
    const Matrix& X = data.X;
    require(X.size() > 0, ErrorKind::invalid_argument, "data matrix is empty");
    require((X.array() >= 0.0).all(), ErrorKind::invalid_argument, "data matrix has negative entries");
    require(X.maxCoeff() > 0.0, ErrorKind::invalid_argument, "data matrix is all zero");
    const Index limit = std::min(X.rows(), X.cols());
    if (r < 1 || r > limit) fail(ErrorKind::invalid_argument, fmt::format("r = {} outside [1, {}]", r, limit));

    GclustResult result;
    const SvtResult denoised = isvt(X, r, options.isvt);
    result.isvt_iterations = denoised.iterations;
    result.isvt_converged = denoised.converged;
    result.normalized = normalize_columns(denoised.estimate, &result.degenerate_columns);

    result.factorization = best_of_restarts(options.solver, result.normalized, r, options.seed, options.restarts, options.nmf);
    result.labels = extract_labels(result.factorization.H);
    result.score = aicc(result.factorization.W, result.factorization.H, data.N);
    result.score.restart_seed = result.factorization.seed;
    return result;
}

ModelDimResult get_gclust_model_dim(const DataMatrix& data, Index r_max, const GclustOptions& options, Index r_min) {
    const Index limit = std::min(data.X.rows(), data.X.cols());
    if (r_min < 1 || r_max < r_min || r_max > limit)
        fail(ErrorKind::invalid_argument, fmt::format("dimension range [{}, {}] outside [1, {}]", r_min, r_max, limit));

    ModelDimResult out;
    const auto count = static_cast<std::size_t>(r_max - r_min + 1);
    out.fits.resize(count);
    out.table.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        const Index r = r_min + static_cast<Index>(i);
        GclustOptions local = options;
        local.seed = derive_seed(options.seed, static_cast<std::uint64_t>(r));
        try {
            out.fits[i] = gclust(data, r, local);
            out.table[i] = out.fits[i].score;
        } catch (const Error& e) {
            // A dimension whose best fit leaves a cluster empty cannot be scored; it never wins.
            if (e.kind() != ErrorKind::numerical) throw;
            const double inf = std::numeric_limits<double>::infinity();
            out.table[i] = ModelScore{r, inf, inf, inf, local.seed};
        }
    }
    const auto best = std::min_element(out.table.begin(), out.table.end(),
                                       [](const ModelScore& a, const ModelScore& b) { return a.aicc < b.aicc; });
    require(std::isfinite(best->aicc), ErrorKind::numerical, "no inner dimension could be scored");
    out.r_hat = best->r;
    return out;
}

Index default_r_max(const DataMatrix& data) {
    return std::min<Index>({data.X.cols(), data.X.rows(), 12});
}

}  // namespace gclust
