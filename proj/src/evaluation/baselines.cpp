#include "gclust/evaluation/baselines.hpp"

#include "gclust/error.hpp"
#include "gclust/random.hpp"
#include "gclust/spectral.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace gclust {

Matrix pairwise_frobenius(const GraphSequence& g) {
    const int T = g.length();
    require(T >= 2, ErrorKind::invalid_argument, "distances need at least two graphs");
    Matrix D = Matrix::Zero(T, T);
    for (int s = 0; s < T; ++s)
        for (int t = s + 1; t < T; ++t) D(s, t) = D(t, s) = (g.slices[s] - g.slices[t]).norm();
    return D;
}

Matrix pairwise_column_distances(const Matrix& X) {
    const Index T = X.cols();
    Matrix D = Matrix::Zero(T, T);
    for (Index s = 0; s < T; ++s)
        for (Index t = s + 1; t < T; ++t) D(s, t) = D(t, s) = (X.col(s) - X.col(t)).norm();
    return D;
}

namespace {

void check_dissimilarity(const Matrix& D) {
    require(D.rows() == D.cols() && D.rows() >= 1, ErrorKind::invalid_argument, "dissimilarity must be square");
    require(D.allFinite() && (D.array() >= 0.0).all(), ErrorKind::invalid_argument,
            "dissimilarity entries must be finite and non-negative");
}

double assignment_cost(const Matrix& D, const std::vector<Index>& medoids) {
    double cost = 0.0;
    for (Index i = 0; i < D.rows(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (const Index m : medoids) best = std::min(best, D(i, m));
        cost += best;
    }
    return cost;
}

}  // namespace

PamResult pam(const Matrix& D, int k) {
    check_dissimilarity(D);
    const Index n = D.rows();
    if (k < 1 || k > n) fail(ErrorKind::invalid_argument, fmt::format("pam: k = {} outside [1, {}]", k, n));

    std::vector<Index> medoids;
    std::vector<bool> chosen(static_cast<std::size_t>(n), false);
    Index first = 0;
    D.rowwise().sum().minCoeff(&first);
    medoids.push_back(first);
    chosen[first] = true;
    Vector nearest = D.col(first);
    while (static_cast<int>(medoids.size()) < k) {
        Index pick = -1;
        double gain = -1.0;
        for (Index c = 0; c < n; ++c) {
            if (chosen[c]) continue;
            const double g = (nearest - D.col(c)).cwiseMax(0.0).sum();
            if (g > gain) {
                gain = g;
                pick = c;
            }
        }
        medoids.push_back(pick);
        chosen[pick] = true;
        nearest = nearest.cwiseMin(D.col(pick));
    }

    double cost = assignment_cost(D, medoids);
    for (;;) {
        double best_cost = cost;
        std::size_t best_slot = 0;
        Index best_swap = -1;
        for (std::size_t slot = 0; slot < medoids.size(); ++slot)
            for (Index h = 0; h < n; ++h) {
                if (chosen[h]) continue;
                auto trial = medoids;
                trial[slot] = h;
                const double c = assignment_cost(D, trial);
                if (c < best_cost - 1e-12 * std::max(1.0, cost)) {
                    best_cost = c;
                    best_slot = slot;
                    best_swap = h;
                }
            }
        if (best_swap < 0) break;
        chosen[medoids[best_slot]] = false;
        chosen[best_swap] = true;
        medoids[best_slot] = best_swap;
        cost = best_cost;
    }

    PamResult out;
    out.medoids = medoids;
    out.cost = cost;
    out.labels.resize(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        std::size_t arg = 0;
        for (std::size_t j = 1; j < medoids.size(); ++j)
            if (D(i, medoids[j]) < D(i, medoids[arg])) arg = j;
        out.labels[i] = static_cast<int>(arg) + 1;
    }
    return out;
}

double average_silhouette(const Matrix& D, const std::vector<int>& labels) {
    check_dissimilarity(D);
    require(static_cast<Index>(labels.size()) == D.rows(), ErrorKind::invalid_argument,
            "one label per item is required");
    std::vector<int> ids(labels);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    if (ids.size() < 2) return 0.0;

    const Index n = D.rows();
    double total = 0.0;
    for (Index i = 0; i < n; ++i) {
        std::vector<double> sum(ids.size(), 0.0), count(ids.size(), 0.0);
        for (Index j = 0; j < n; ++j) {
            if (j == i) continue;
            const auto c = static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), labels[j]) - ids.begin());
            sum[c] += D(i, j);
            count[c] += 1.0;
        }
        const auto own = static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), labels[i]) - ids.begin());
        if (count[own] == 0.0) continue;  // singleton
        const double a = sum[own] / count[own];
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < ids.size(); ++c)
            if (c != own && count[c] > 0.0) b = std::min(b, sum[c] / count[c]);
        const double denom = std::max(a, b);
        if (denom > 0.0) total += (b - a) / denom;
    }
    return total / static_cast<double>(n);
}

PamkResult pamk(const Matrix& D, int k_min, int k_max) {
    check_dissimilarity(D);
    const int T = static_cast<int>(D.rows());
    if (k_min < 2 || k_max < k_min || k_max > T - 1)
        fail(ErrorKind::invalid_argument, fmt::format("pamk: k range [{}, {}] outside [2, {}]", k_min, k_max, T - 1));
    PamkResult best;
    best.silhouette = -std::numeric_limits<double>::infinity();
    for (int k = k_min; k <= k_max; ++k) {
        PamResult fit = pam(D, k);
        const double s = average_silhouette(D, fit.labels);
        if (s > best.silhouette) best = {k, std::move(fit.labels), s};
    }
    if (best.silhouette < kSilhouetteFloor) {
        best.k = 1;
        best.labels.assign(static_cast<std::size_t>(T), 1);
    }
    return best;
}

int zhu_ghodsi_elbow(const std::vector<double>& values) {
    const auto p = values.size();
    require(p >= 2, ErrorKind::invalid_argument, "elbow needs at least two values");
    auto sse = [&](std::size_t lo, std::size_t hi) {
        double mean = 0.0;
        for (std::size_t i = lo; i < hi; ++i) mean += values[i];
        mean /= static_cast<double>(hi - lo);
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += (values[i] - mean) * (values[i] - mean);
        return s;
    };
    int best = 1;
    double best_sse = std::numeric_limits<double>::infinity();
    for (std::size_t q = 1; q < p; ++q) {
        const double s = sse(0, q) + sse(q, p);
        if (s < best_sse) {
            best_sse = s;
            best = static_cast<int>(q);
        }
    }
    return best;
}

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

// k-means++ seeding followed by a few Lloyd steps; returns hard labels.
std::vector<int> kmeans_init(const Matrix& Z, int k, Rng& rng) {
    const Index n = Z.cols();
    std::vector<Index> centers{static_cast<Index>(uniform01(rng) * static_cast<double>(n))};
    Vector d2 = (Z.colwise() - Z.col(centers[0])).colwise().squaredNorm().transpose();
    while (static_cast<int>(centers.size()) < k) {
        const double total = d2.sum();
        Index pick = 0;
        if (total > 0.0) {
            double u = uniform01(rng) * total;
            for (pick = 0; pick < n - 1 && u >= d2[pick]; ++pick) u -= d2[pick];
        } else {
            pick = static_cast<Index>(uniform01(rng) * static_cast<double>(n));
        }
        centers.push_back(pick);
        d2 = d2.cwiseMin((Z.colwise() - Z.col(pick)).colwise().squaredNorm().transpose());
    }
    Matrix C(Z.rows(), k);
    for (int j = 0; j < k; ++j) C.col(j) = Z.col(centers[j]);
    std::vector<int> labels(static_cast<std::size_t>(n), 0);
    for (int step = 0; step < 10; ++step) {
        for (Index i = 0; i < n; ++i) {
            Index arg = 0;
            (C.colwise() - Z.col(i)).colwise().squaredNorm().minCoeff(&arg);
            labels[i] = static_cast<int>(arg);
        }
        for (int j = 0; j < k; ++j) {
            Vector s = Vector::Zero(Z.rows());
            int c = 0;
            for (Index i = 0; i < n; ++i)
                if (labels[i] == j) {
                    s += Z.col(i);
                    ++c;
                }
            if (c > 0) C.col(j) = s / c;
        }
    }
    return labels;
}

}  // namespace

GmmFit fit_spherical_gmm(const Matrix& Z, int k, std::uint64_t seed) {
    const Index d = Z.rows(), n = Z.cols();
    require(d >= 1 && n >= 2, ErrorKind::invalid_argument, "mixture fit needs at least two points");
    if (k < 1 || k > n) fail(ErrorKind::invalid_argument, fmt::format("mixture: k = {} outside [1, {}]", k, n));

    const Vector centre = Z.rowwise().mean();
    const double spread = (Z.colwise() - centre).squaredNorm() / static_cast<double>(n * d);
    const double floor = std::max(1e-6 * spread, 1e-12);

    Rng rng(seed);
    Matrix R = Matrix::Zero(k, n);  // responsibilities
    const auto init = kmeans_init(Z, k, rng);
    for (Index i = 0; i < n; ++i) R(init[i], i) = 1.0;

    Matrix mu(d, k);
    Vector var(k), weight(k);
    double loglik = -std::numeric_limits<double>::infinity();
    for (int it = 0; it < 500; ++it) {
        for (int j = 0; j < k; ++j) {
            const double nk = R.row(j).sum();
            if (nk < 1e-8) fail(ErrorKind::numerical, fmt::format("mixture component {} is empty", j + 1));
            weight[j] = nk / static_cast<double>(n);
            mu.col(j) = Z * R.row(j).transpose() / nk;
            const double ss = (R.row(j).array() * (Z.colwise() - mu.col(j)).colwise().squaredNorm().array()).sum();
            var[j] = std::max(ss / (nk * static_cast<double>(d)), floor);
        }
        Matrix logp(k, n);
        for (int j = 0; j < k; ++j)
            logp.row(j) = (std::log(weight[j]) - 0.5 * static_cast<double>(d) * (kLog2Pi + std::log(var[j])) -
                           0.5 * (Z.colwise() - mu.col(j)).colwise().squaredNorm().array() / var[j])
                              .matrix();
        double next = 0.0;
        for (Index i = 0; i < n; ++i) {
            const double top = logp.col(i).maxCoeff();
            const double lse = top + std::log((logp.col(i).array() - top).exp().sum());
            R.col(i) = (logp.col(i).array() - lse).exp().matrix();
            next += lse;
        }
        const bool done = std::abs(next - loglik) <= 1e-10 * std::abs(next);
        loglik = next;
        if (done) break;
    }

    GmmFit fit;
    fit.k = k;
    fit.loglik = loglik;
    const double params = static_cast<double>(k * d + k + (k - 1));
    fit.bic = 2.0 * loglik - params * std::log(static_cast<double>(n));
    fit.labels.resize(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        Index arg = 0;
        R.col(i).maxCoeff(&arg);
        fit.labels[i] = static_cast<int>(arg) + 1;
    }
    return fit;
}

GmmPcaResult gmm_pca_cluster(const Matrix& X, int k_min, int k_max, std::uint64_t seed) {
    require(X.cols() >= 2, ErrorKind::invalid_argument, "clustering needs at least two columns");
    if (k_min < 1 || k_max < k_min || k_max > X.cols())
        fail(ErrorKind::invalid_argument, fmt::format("mixture k range [{}, {}] outside [1, {}]", k_min, k_max, X.cols()));

    const Index full = std::min(X.rows(), X.cols());
    const Vector s = singular_values(X);
    GmmPcaResult out;
    out.dim = full >= 2 ? zhu_ghodsi_elbow(std::vector<double>(s.data(), s.data() + s.size())) : 1;
    const Matrix Z = truncated_svd(X, out.dim).U.transpose() * X;

    double best_bic = -std::numeric_limits<double>::infinity();
    for (int k = k_min; k <= k_max; ++k) {
        for (int attempt = 0; attempt <= kGmmRetries; ++attempt) {
            try {
                GmmFit fit = fit_spherical_gmm(Z, k, derive_seed(seed, static_cast<std::uint64_t>(k * 16 + attempt)));
                if (fit.bic > best_bic) {
                    best_bic = fit.bic;
                    out.k = k;
                    out.labels = fit.labels;
                }
                out.fits.push_back(std::move(fit));
                break;
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::numerical) throw;
            }
        }
    }
    require(!out.fits.empty(), ErrorKind::numerical, "every mixture fit degenerated");
    return out;
}

}  // namespace gclust
