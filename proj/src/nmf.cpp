#include "gclust/nmf.hpp"

#include "gclust/error.hpp"
#include "gclust/parallel.hpp"
#include "gclust/random.hpp"
#include "gclust/spectral.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace gclust {

const char* to_string(Solver solver) noexcept { return solver == Solver::ls ? "ls" : "kl"; }

Solver parse_solver(const std::string& name) {
    if (name == "ls") return Solver::ls;
    if (name == "kl") return Solver::kl;
    fail(ErrorKind::invalid_argument, fmt::format("unknown solver '{}' (expected ls or kl)", name));
}

namespace {

void check_input(const Matrix& X, Index r) {
    require(X.size() > 0, ErrorKind::invalid_argument, "NMF input is empty");
    require(X.allFinite(), ErrorKind::invalid_argument, "NMF input has non-finite entries");
    require((X.array() >= 0.0).all(), ErrorKind::invalid_argument, "NMF input has negative entries");
    require(X.maxCoeff() > 0.0, ErrorKind::numerical, "NMF input is all zero: no factorization target");
    if (r < 1 || r > std::min(X.rows(), X.cols()))
        fail(ErrorKind::invalid_argument, fmt::format("inner dimension {} outside [1, {}]", r, std::min(X.rows(), X.cols())));
}

bool wants_point(const NmfOptions& options, int iteration) {
    if (!options.record_trace) return false;
    if (options.checkpoints.empty()) return true;
    return std::find(options.checkpoints.begin(), options.checkpoints.end(), iteration) != options.checkpoints.end();
}

void record(Factorization& f, const NmfOptions& options, int iteration, const Matrix& W, const Matrix& H,
            double objective) {
    if (!wants_point(options, iteration)) return;
    TracePoint p{iteration, objective, std::numeric_limits<double>::quiet_NaN(),
                 std::numeric_limits<double>::quiet_NaN()};
    if (options.reference) {
        Matrix Wn = W, Hn = H;
        normalize_factors(Wn, Hn);
        const auto e = options.reference->evaluate(Wn, Hn);
        p.eps_w = e.eps_w;
        p.eps_h = e.eps_h;
    }
    f.trace.push_back(p);
}

bool has_converged(double previous, double current, double tol) {
    return tol > 0.0 && std::abs(previous - current) <= tol * std::abs(previous);
}

// Shared driver: `step` performs one full update of (W, H) and returns the new objective.
template <typename Objective, typename Step>
Factorization solve(const Matrix& X, Index r, std::uint64_t seed, const NmfOptions& options, Objective objective,
                    Step step) {
    check_input(X, r);
    require(options.max_iter >= 0, ErrorKind::invalid_argument, "max_iter must be non-negative");
    require(options.alpha >= 0.0 && options.beta >= 0.0, ErrorKind::invalid_argument,
            "regularization weights must be non-negative");
    Factorization f;
    f.seed = seed;
    Matrix W, H;
    initialize_factors(X, r, seed, W, H);
    double current = objective(W, H);
    record(f, options, 0, W, H, current);
    for (int it = 1; it <= options.max_iter; ++it) {
        const double previous = current;
        current = step(W, H);
        f.iterations = it;
        record(f, options, it, W, H, current);
        if (has_converged(previous, current, options.tol)) {
            f.converged = true;
            break;
        }
    }
    f.objective = current;
    normalize_factors(W, H);
    f.W = std::move(W);
    f.H = std::move(H);
    return f;
}

}  // namespace

void initialize_factors(const Matrix& X, Index r, std::uint64_t seed, Matrix& W, Matrix& H) {
    Rng rng(seed);
    W.resize(X.rows(), r);
    H.resize(r, X.cols());
    for (Index j = 0; j < W.cols(); ++j)
        for (Index i = 0; i < W.rows(); ++i) W(i, j) = uniform01(rng);
    for (Index j = 0; j < H.cols(); ++j)
        for (Index i = 0; i < H.rows(); ++i) H(i, j) = uniform01(rng);
    const double fitted = (W * H).mean();
    if (fitted > 0.0) {
        const double s = std::sqrt(X.mean() / fitted);
        W *= s;
        H *= s;
    }
}

void normalize_factors(Matrix& W, Matrix& H) {
    for (Index k = 0; k < W.cols(); ++k) {
        const double d = W.col(k).sum();
        if (d > 0.0) {
            W.col(k) /= d;
            H.row(k) *= d;
        } else {
            W.col(k).setConstant(1.0 / static_cast<double>(W.rows()));
            H.row(k).setZero();
        }
    }
}

double ls_objective(const Matrix& X, const Matrix& W, const Matrix& H, double alpha, double beta) {
    double value = (X - W * H).squaredNorm();
    if (alpha > 0.0) value += alpha * W.squaredNorm();
    if (beta > 0.0) value += beta * H.squaredNorm();
    return value;
}

double kl_divergence(const Matrix& X, const Matrix& WH) {
    double value = 0.0;
    for (Index j = 0; j < X.cols(); ++j)
        for (Index i = 0; i < X.rows(); ++i) {
            const double x = X(i, j), y = WH(i, j);
            if (x > 0.0) value += y > 0.0 ? x * std::log(x / y) - x + y : std::numeric_limits<double>::infinity();
            else value += y;
        }
    return value;
}

Factorization nmf_ls(const Matrix& X, Index r, std::uint64_t seed, const NmfOptions& options) {
    const double alpha = options.alpha, beta = options.beta;
    return solve(
        X, r, seed, options, [&](const Matrix& W, const Matrix& H) { return ls_objective(X, W, H, alpha, beta); },
        [&](Matrix& W, Matrix& H) {
            const Matrix HHt = H * H.transpose();
            Matrix denom = W * HHt;
            if (alpha > 0.0) denom += alpha * W;
            W.array() *= (X * H.transpose()).array() / (denom.array() + kUpdateGuard);

            const Matrix WtW = W.transpose() * W;
            Matrix hdenom = WtW * H;
            if (beta > 0.0) hdenom += beta * H;
            H.array() *= (W.transpose() * X).array() / (hdenom.array() + kUpdateGuard);
            return ls_objective(X, W, H, alpha, beta);
        });
}

Factorization nmf_kl(const Matrix& X, Index r, std::uint64_t seed, const NmfOptions& options) {
    return solve(
        X, r, seed, options, [&](const Matrix& W, const Matrix& H) { return kl_divergence(X, W * H); },
        [&](Matrix& W, Matrix& H) {
            Matrix ratio = X.array() / ((W * H).array() + kUpdateGuard);
            const Vector wsum = W.colwise().sum().transpose();
            H.array() *= (W.transpose() * ratio).array().colwise() / (wsum.array() + kUpdateGuard);

            ratio = X.array() / ((W * H).array() + kUpdateGuard);
            const Vector hsum = H.rowwise().sum();
            W.array() *= (ratio * H.transpose()).array().rowwise() / (hsum.transpose().array() + kUpdateGuard);
            return kl_divergence(X, W * H);
        });
}

Factorization run_nmf(Solver solver, const Matrix& X, Index r, std::uint64_t seed, const NmfOptions& options) {
    return solver == Solver::ls ? nmf_ls(X, r, seed, options) : nmf_kl(X, r, seed, options);
}

Factorization best_of_restarts(Solver solver, const Matrix& X, Index r, std::uint64_t base_seed, int restarts,
                               const NmfOptions& options) {
    require(restarts >= 1, ErrorKind::invalid_argument, "at least one restart is required");
    check_input(X, r);
    std::vector<Factorization> runs(static_cast<std::size_t>(restarts));
    parallel_for(runs.size(), [&](std::size_t i) { runs[i] = run_nmf(solver, X, r, derive_seed(base_seed, i), options); });
    auto best = std::min_element(runs.begin(), runs.end(), [](const Factorization& a, const Factorization& b) {
        if (a.objective != b.objective) return a.objective < b.objective;
        return a.seed < b.seed;
    });
    return std::move(*best);
}

FixedPointReference::FixedPointReference(const Matrix& Xref, double rank_tol) : X_(Xref) {
    require(Xref.size() > 0 && Xref.cwiseAbs().maxCoeff() > 0.0, ErrorKind::numerical,
            "fixed-point reference matrix is zero");
    Eigen::BDCSVD<Matrix> svd(Xref, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& s = svd.singularValues();
    const Index k = static_cast<Index>((s.array() > s[0] * rank_tol).count());
    U_ = svd.matrixU().leftCols(k);
    V_ = svd.matrixV().leftCols(k);
    S_ = s.head(k);
}

FixedPointError FixedPointReference::evaluate(const Matrix& W, const Matrix& H) const {
    require(W.rows() == X_.rows() && H.cols() == X_.cols() && W.cols() == H.rows(), ErrorKind::invalid_argument,
            "factor shapes do not match the reference matrix");
    const Vector inv_sq = S_.array().square().inverse();
    const Matrix UtW = U_.transpose() * W;
    const Matrix F = W - (X_ * H.transpose()) * (UtW.transpose() * inv_sq.asDiagonal() * UtW);
    const Matrix VtHt = V_.transpose() * H.transpose();
    const Matrix G = H.transpose() - (X_.transpose() * W) * (VtHt.transpose() * inv_sq.asDiagonal() * VtHt);
    return {F.norm(), G.norm(), rank()};
}

FixedPointError fixed_point_residuals(const Matrix& W, const Matrix& H, const Matrix& Xref, double rank_tol) {
    return FixedPointReference(Xref, rank_tol).evaluate(W, H);
}

namespace {

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::vector<SolverTraceRow> compare_solvers(const Matrix& X, Index r, int restarts, std::vector<int> iter_grid,
                                            std::uint64_t base_seed, const NmfOptions& base) {
    require(restarts >= 1, ErrorKind::invalid_argument, "at least one restart is required");
    require(!iter_grid.empty(), ErrorKind::invalid_argument, "iteration grid is empty");
    std::sort(iter_grid.begin(), iter_grid.end());
    iter_grid.erase(std::unique(iter_grid.begin(), iter_grid.end()), iter_grid.end());
    require(iter_grid.front() >= 0, ErrorKind::invalid_argument, "iteration grid has a negative entry");

    const FixedPointReference reference(X);
    NmfOptions options = base;
    options.tol = 0.0;
    options.max_iter = iter_grid.back();
    options.record_trace = true;
    options.checkpoints = iter_grid;
    options.reference = &reference;

    std::vector<SolverTraceRow> rows;
    for (const Solver solver : {Solver::ls, Solver::kl}) {
        std::vector<Factorization> runs(static_cast<std::size_t>(restarts));
        parallel_for(runs.size(),
                     [&](std::size_t i) { runs[i] = run_nmf(solver, X, r, derive_seed(base_seed, i), options); });
        for (std::size_t c = 0; c < iter_grid.size(); ++c) {
            std::vector<double> obj, ew, eh;
            for (const auto& run : runs) {
                const auto& p = run.trace.at(c);
                obj.push_back(p.objective);
                ew.push_back(p.eps_w);
                eh.push_back(p.eps_h);
            }
            rows.push_back({solver, iter_grid[c], median(obj), median(ew), median(eh)});
        }
    }
    return rows;
}

}  // namespace gclust
