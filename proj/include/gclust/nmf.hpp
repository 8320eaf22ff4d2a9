#pragma once

// Non-negative matrix factorization X ~ W H by multiplicative updates, and the
// fixed-point error that measures how far (W, H) is from the unique exact
// factorization of a reference matrix.

#include "gclust/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gclust {

enum class Solver {
    ls,  // squared Frobenius loss with squared-Frobenius penalties (Lee-Seung)
    kl,  // generalized Kullback-Leibler divergence (Brunet-style)
};

const char* to_string(Solver solver) noexcept;
Solver parse_solver(const std::string& name);

class FixedPointReference;

/// Division guard added to every multiplicative-update denominator.
inline constexpr double kUpdateGuard = 1e-12;

struct NmfOptions {
    double alpha = 0.0;  // LS only: weight of ||W||_F^2
    double beta = 0.0;   // LS only: weight of ||H||_F^2
    double tol = 1e-9;   // relative objective change; 0 disables early stopping
    int max_iter = 2000;

    /// When set, the run records trace points: at every iteration, or only at
    /// `checkpoints` (iteration 0 is the initialization) when that is non-empty.
    bool record_trace = false;
    std::vector<int> checkpoints;
    /// Optional reference for the fixed-point columns of the trace; without it
    /// those columns are NaN. Must outlive the run.
    const FixedPointReference* reference = nullptr;
};

struct TracePoint {
    int iteration = 0;
    double objective = 0.0;
    double eps_w = 0.0;
    double eps_h = 0.0;
};

/// Result of one solver run. On return W is column-stochastic (1^T W = 1^T)
/// and H carries the column scales, so W H is the fitted matrix.
struct Factorization {
    Matrix W;
    Matrix H;
    double objective = 0.0;  // solver objective at the last iteration
    std::uint64_t seed = 0;
    int iterations = 0;
    bool converged = false;
    std::vector<TracePoint> trace;

    Index rank() const noexcept { return W.cols(); }
};

/// Uniform(0, 1) factors scaled so that mean(W H) equals mean(X).
void initialize_factors(const Matrix& X, Index r, std::uint64_t seed, Matrix& W, Matrix& H);

/// Rescales columns of W to sum to one, moving the scale into the rows of H;
/// W H is unchanged. A zero column of W becomes uniform with a zero H row.
void normalize_factors(Matrix& W, Matrix& H);

double ls_objective(const Matrix& X, const Matrix& W, const Matrix& H, double alpha = 0.0, double beta = 0.0);

/// sum X log(X / WH) - X + WH with 0 log 0 = 0.
double kl_divergence(const Matrix& X, const Matrix& WH);

Factorization nmf_ls(const Matrix& X, Index r, std::uint64_t seed, const NmfOptions& options = {});
Factorization nmf_kl(const Matrix& X, Index r, std::uint64_t seed, const NmfOptions& options = {});
Factorization run_nmf(Solver solver, const Matrix& X, Index r, std::uint64_t seed, const NmfOptions& options = {});

/// Runs `restarts` solves with seeds derive_seed(base_seed, i) (concurrently
/// when hardware allows) and keeps the smallest objective; ties go to the
/// smaller seed.
Factorization best_of_restarts(Solver solver, const Matrix& X, Index r, std::uint64_t base_seed, int restarts,
                               const NmfOptions& options = {});

struct FixedPointError {
    double eps_w = 0.0;
    double eps_h = 0.0;
    Index rank_used = 0;
};

/// Caches the truncated SVD of a reference matrix Xref at its numerical rank
/// (singular values above rank_tol * sigma_1) and evaluates
///   F(W, H) = W - Xref H^T W^T (U S^-2 U^T) W,
///   G(W, H) = H^T - Xref^T W H (V S^-2 V^T) H^T.
class FixedPointReference {
public:
    explicit FixedPointReference(const Matrix& Xref, double rank_tol = 1e-10);

    FixedPointError evaluate(const Matrix& W, const Matrix& H) const;
    Index rank() const noexcept { return S_.size(); }

private:
    Matrix X_;
    Matrix U_;
    Matrix V_;
    Vector S_;
};

FixedPointError fixed_point_residuals(const Matrix& W, const Matrix& H, const Matrix& Xref, double rank_tol = 1e-10);

/// One row of the solver comparison: medians over restarts at one iteration.
struct SolverTraceRow {
    Solver solver = Solver::ls;
    int iteration = 0;
    double objective = 0.0;
    double eps_w = 0.0;
    double eps_h = 0.0;
};

/// Runs both solvers from the same restart seeds without early stopping and
/// reports, per solver and checkpoint in iter_grid, the median objective and
/// median fixed-point errors (measured against X) over restarts. Factors are
/// normalized before the fixed-point errors are taken.
std::vector<SolverTraceRow> compare_solvers(const Matrix& X, Index r, int restarts, std::vector<int> iter_grid,
                                            std::uint64_t base_seed = 0, const NmfOptions& base = {});

}  // namespace gclust
