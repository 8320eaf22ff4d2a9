#include "gclust/spectral.hpp"

#include "gclust/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace gclust {

namespace {

void check_rank(const Matrix& M, Index k, const char* what) {
    const Index limit = std::min(M.rows(), M.cols());
    if (k < 0 || k > limit)
        fail(ErrorKind::invalid_argument,
             fmt::format("{}: rank {} outside [0, {}] for a {}x{} matrix", what, k, limit, M.rows(), M.cols()));
}

void fix_signs(Matrix& U, Matrix& V) {
    for (Index k = 0; k < U.cols(); ++k) {
        Index pivot = 0;
        U.col(k).cwiseAbs().maxCoeff(&pivot);
        if (U(pivot, k) < 0.0) {
            U.col(k) *= -1.0;
            V.col(k) *= -1.0;
        }
    }
}

}  // namespace

SvdTriple truncated_svd(const Matrix& M, Index k) {
    check_rank(M, k, "truncated_svd");
    SvdTriple out;
    if (k == 0) {
        out.U.resize(M.rows(), 0);
        out.V.resize(M.cols(), 0);
        return out;
    }
    Eigen::BDCSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.U = svd.matrixU().leftCols(k);
    out.S = svd.singularValues().head(k);
    out.V = svd.matrixV().leftCols(k);
    fix_signs(out.U, out.V);
    return out;
}

Vector singular_values(const Matrix& M) {
    if (M.size() == 0) return {};
    return Eigen::BDCSVD<Matrix>(M).singularValues();
}

SvtResult svt(const Matrix& M, Index r) {
    check_rank(M, r, "svt");
    SvtResult result;
    result.rank_used = r;
    result.iterations = 1;
    result.estimate = r == 0 ? Matrix::Zero(M.rows(), M.cols()) : truncated_svd(M, r).reconstruct();
    result.residual_trace.push_back((M - result.estimate).norm());
    return result;
}

Index usvt_rank(const Matrix& M, double c) {
    require(c > 0.0, ErrorKind::invalid_argument, "USVT constant must be positive");
    if (M.size() == 0) return 0;
    const double threshold = std::sqrt(c * static_cast<double>(std::min(M.rows(), M.cols())));
    const Vector s = singular_values(M);
    return static_cast<Index>((s.array() > threshold).count());
}

Matrix clip(const Matrix& M, double C) {
    require(C > 0.0, ErrorKind::invalid_argument, "clip constant must be positive");
    return M.cwiseMin(C);
}

double entry_quantile(const Matrix& M, double q) {
    require(M.size() > 0, ErrorKind::invalid_argument, "quantile of an empty matrix");
    require(q >= 0.0 && q <= 1.0, ErrorKind::invalid_argument, "quantile level must lie in [0, 1]");
    std::vector<double> v(M.data(), M.data() + M.size());
    std::sort(v.begin(), v.end());
    const double h = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

SvtResult usvt(const Matrix& M, const UsvtOptions& options) {
    const double C = entry_quantile(M, options.clip_quantile);
    const Matrix Y = C > 0.0 ? clip(M, C) : M;
    return svt(Y, usvt_rank(Y, options.constant));
}

SvtResult isvt(const Matrix& M, Index r, const IsvtOptions& options) {
    check_rank(M, r, "isvt");
    const double scale = M.norm();
    const double tol = options.tol < 0.0 ? 1e-6 * scale : options.tol;
    require(options.tol != 0.0, ErrorKind::invalid_argument, "isvt tolerance must be positive");
    require(options.max_iter >= 1, ErrorKind::invalid_argument, "isvt needs at least one iteration");

    SvtResult result;
    result.rank_used = r;
    result.converged = false;
    Matrix current = M;
    for (int it = 1; it <= options.max_iter; ++it) {
        Matrix next = svt(current, r).estimate.cwiseMax(0.0);
        const double change = (next - current).norm();
        result.residual_trace.push_back(change);
        result.iterations = it;
        current = std::move(next);
        if (change < tol || change == 0.0) {
            result.converged = true;
            break;
        }
    }
    result.estimate = std::move(current);
    return result;
}

Matrix ase(const Matrix& A, Index d) {
    require(A.rows() == A.cols(), ErrorKind::invalid_argument, "ase needs a square matrix");
    const auto t = truncated_svd(A, d);
    return t.U * t.S.cwiseSqrt().asDiagonal();
}

double stfp_threshold(Index n) {
    const double x = static_cast<double>(n);
    return std::pow(3.0, 0.25) * std::pow(x, 0.75) * std::pow(std::log(x), 0.25);
}

Index stfp_dim(const Matrix& A) {
    require(A.rows() == A.cols() && A.rows() >= 2, ErrorKind::invalid_argument, "stfp_dim needs an n x n matrix, n >= 2");
    const Vector s = singular_values(A);
    return static_cast<Index>((s.array() > stfp_threshold(A.rows())).count());
}

}  // namespace gclust
