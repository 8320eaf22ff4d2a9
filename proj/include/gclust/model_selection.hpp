#pragma once

// AICc scoring of a normalized factorization and the clustering-of-graphs
// pipeline: denoise, column-normalize, factorize, read labels off H.

#include "gclust/ingest.hpp"
#include "gclust/nmf.hpp"
#include "gclust/spectral.hpp"
#include "gclust/types.hpp"

#include <cstdint>
#include <vector>

namespace gclust {

struct ModelScore {
    Index r = 0;
    double loss = 0.0;
    double penalty = 0.0;
    double aicc = 0.0;  // loss + penalty, stored exactly
    std::uint64_t restart_seed = 0;
};

inline constexpr double kSupportTolerance = 1e-8;

/// loss = -sum theta log theta over theta = W H (0 log 0 = 0);
/// penalty = 1/2 sum_k (C_k - 1) / Q_k with C_k = #{W_lk > zero_tol * max_l W_lk}
/// and Q_k = sum_t N_t H_kt.
ModelScore aicc(const Matrix& W, const Matrix& H, const Vector& N, double zero_tol = kSupportTolerance);

struct Labels {
    std::vector<int> values;  // 1-based cluster per column
    int ties = 0;             // columns whose maximum was shared
};

/// labels[t] = argmax_k H_kt, smallest k on ties.
Labels extract_labels(const Matrix& H);

struct GclustOptions {
    Solver solver = Solver::ls;
    int restarts = 20;
    std::uint64_t seed = 0;
    NmfOptions nmf;
    IsvtOptions isvt;
};

struct GclustResult {
    Factorization factorization;
    Matrix normalized;  // the column-normalized ISVT output that was factorized
    Labels labels;
    ModelScore score;
    int isvt_iterations = 0;
    bool isvt_converged = true;
    int degenerate_columns = 0;  // ISVT columns replaced by the uniform column
};

/// Normalizes columns to sum to one. Columns with a non-positive sum become
/// uniform; their number is returned through `degenerate`.
Matrix normalize_columns(const Matrix& X, int* degenerate = nullptr);

/// One pass of the pipeline at inner dimension r. AICc uses the raw counts N.
GclustResult gclust(const DataMatrix& data, Index r, const GclustOptions& options = {});

struct ModelDimResult {
    Index r_hat = 0;
    std::vector<ModelScore> table;
    std::vector<GclustResult> fits;  // fits[r - r_min]
};

/// Scores r = r_min..r_max (each by its best restart) and returns the smallest
/// r attaining the minimum AICc. Restart seeds for dimension r derive from
/// derive_seed(options.seed, r).
ModelDimResult get_gclust_model_dim(const DataMatrix& data, Index r_max, const GclustOptions& options = {},
                                    Index r_min = 1);

/// min(T, 12), capped by the number of rows.
Index default_r_max(const DataMatrix& data);

}  // namespace gclust
