#pragma once

// The two comparison procedures for clustering graphs over time: medoids on
// pairwise Frobenius distances, and a spherical Gaussian mixture on a
// principal-component projection.

#include "gclust/ingest.hpp"
#include "gclust/types.hpp"

#include <cstdint>
#include <vector>

namespace gclust {

/// D_st = ||G(s) - G(t)||_F.
Matrix pairwise_frobenius(const GraphSequence& g);
/// Euclidean distances between the columns of X.
Matrix pairwise_column_distances(const Matrix& X);

struct PamResult {
    std::vector<int> labels;  // 1-based
    std::vector<Index> medoids;
    double cost = 0.0;  // sum of distances to the assigned medoid
};

/// Partitioning around medoids: greedy BUILD, then best-improvement SWAP.
/// Deterministic; ties go to the lowest index.
PamResult pam(const Matrix& D, int k);

/// Mean silhouette width; singletons score 0. A labeling with one cluster scores 0.
double average_silhouette(const Matrix& D, const std::vector<int>& labels);

inline constexpr double kSilhouetteFloor = 0.25;

struct PamkResult {
    int k = 1;
    std::vector<int> labels;
    double silhouette = 0.0;
};

/// Runs pam for k in [k_min, k_max] (k_min >= 2, k_max <= T - 1) and keeps the
/// widest average silhouette (smallest k on ties). Falls back to a single
/// cluster when that silhouette is below kSilhouetteFloor.
PamkResult pamk(const Matrix& D, int k_min, int k_max);

/// Profile-likelihood elbow: the split q in [1, p-1] that maximizes the
/// likelihood of two Gaussian segments with a common variance, which is the q
/// minimizing the pooled within-segment sum of squares. Smallest q on ties,
/// so a constant sequence gives 1.
int zhu_ghodsi_elbow(const std::vector<double>& values);

struct GmmFit {
    int k = 0;
    std::vector<int> labels;  // 1-based maximum posterior
    double loglik = 0.0;
    double bic = 0.0;  // 2 loglik - parameters * log(points); larger is better
};

/// EM for a spherical mixture with one variance per component on the columns
/// of Z (d x points). Variances are floored at 1e-6 times the mean per-axis
/// data variance. Throws a numerical error if a component empties.
GmmFit fit_spherical_gmm(const Matrix& Z, int k, std::uint64_t seed);

struct GmmPcaResult {
    int k = 1;
    int dim = 1;  // projection dimension from the elbow
    std::vector<int> labels;
    std::vector<GmmFit> fits;  // successful fits, in increasing k
};

inline constexpr int kGmmRetries = 5;

/// Projects the columns of X on the top elbow-many left singular vectors and
/// picks k in [k_min, k_max] by BIC. A k whose fit degenerates is retried
/// with fresh seeds up to kGmmRetries times and then skipped; it is an error
/// only if every k fails.
GmmPcaResult gmm_pca_cluster(const Matrix& X, int k_min, int k_max, std::uint64_t seed);

}  // namespace gclust
