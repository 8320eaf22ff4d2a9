#pragma once

// SVD utilities, singular value thresholding (plain, universal, iterated),
// adjacency spectral embedding and the embedding-dimension rule.

#include "gclust/types.hpp"

#include <vector>

namespace gclust {

/// Top-k singular triple. Columns of U and V are orthonormal, S is
/// non-increasing. Each left singular vector is signed so that its
/// largest-magnitude entry (first one on ties) is positive.
struct SvdTriple {
    Matrix U;
    Vector S;
    Matrix V;

    Matrix reconstruct() const { return U * S.asDiagonal() * V.transpose(); }
};

struct SvtResult {
    Matrix estimate;
    Index rank_used = 0;
    int iterations = 0;
    std::vector<double> residual_trace;  // Frobenius change per iteration
    bool converged = true;
};

/// Thin SVD truncated to the leading k triples; requires 0 <= k <= min(rows, cols).
SvdTriple truncated_svd(const Matrix& M, Index k);

/// All min(rows, cols) singular values, non-increasing.
Vector singular_values(const Matrix& M);

/// Rank-r truncation U_r S_r V_r^T (the Frobenius-optimal rank-r approximation).
SvtResult svt(const Matrix& M, Index r);

inline constexpr double kUsvtConstant = 2.02;

/// Number of singular values strictly above sqrt(c * min(rows, cols)).
Index usvt_rank(const Matrix& M, double c = kUsvtConstant);

/// Entrywise min(M, C); C must be positive.
Matrix clip(const Matrix& M, double C);

/// Linearly interpolated q-quantile (q in [0, 1]) of the matrix entries.
double entry_quantile(const Matrix& M, double q);

struct UsvtOptions {
    double constant = kUsvtConstant;
    /// Entries are clipped at this quantile of the entries; a non-positive
    /// quantile value disables clipping.
    double clip_quantile = 0.999;
};

/// Clip, pick the rank with usvt_rank, then truncate.
SvtResult usvt(const Matrix& M, const UsvtOptions& options = {});

struct IsvtOptions {
    /// Absolute Frobenius tolerance; negative means 1e-6 * ||M||_F.
    double tol = -1.0;
    int max_iter = 100;
};

/// Iterates M <- max(svt(M, r), 0) until consecutive iterates differ by less
/// than tol in Frobenius norm. Returns the last (non-negative) iterate; a run
/// that hits max_iter is returned with converged = false.
SvtResult isvt(const Matrix& M, Index r, const IsvtOptions& options = {});

/// Adjacency spectral embedding U_d S_d^{1/2} of a symmetric matrix.
Matrix ase(const Matrix& A, Index d);

/// Threshold 3^{1/4} n^{3/4} log^{1/4}(n) (natural log) used by stfp_dim.
double stfp_threshold(Index n);

/// Number of singular values of the n x n matrix A above stfp_threshold(n).
Index stfp_dim(const Matrix& A);

}  // namespace gclust
