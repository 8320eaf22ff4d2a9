#pragma once

// Quality checks for a vertex contraction: standardized residuals, principal
// sketches, the Gaussian singular-value baseline they are compared against,
// and the normality check behind it.

#include "gclust/types.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace gclust {

enum class MeanSource { true_mean, svt_estimate };

struct ResidualMatrix {
    Matrix delta;
    MeanSource source = MeanSource::true_mean;
};

/// Delta_uv = (A_uv - mean_uv) / sqrt(mean_uv); every mean entry must be positive.
ResidualMatrix residual_matrix(const Matrix& A, const Matrix& mean, MeanSource source = MeanSource::true_mean);

/// S Delta S^T for the row selection S = (e_{rows[0]}, ..., e_{rows[p-1]})^T.
Matrix sketch(const Matrix& delta, const std::vector<Index>& rows);

/// Same, with S given as a p x m matrix whose rows must be distinct standard basis vectors.
Matrix sketch(const Matrix& delta, const Matrix& S);

struct GaussianBaseline {
    Index p = 0;
    Vector sigma_bar;  // non-increasing
    Vector std_error;  // Monte Carlo standard error of each entry
    int reps = 0;
    std::uint64_t seed = 0;
};

inline constexpr int kBaselineReps = 100000;

/// Mean sorted singular values of reps independent p x p standard normal matrices.
GaussianBaseline gaussian_singular_baseline(Index p, int reps = kBaselineReps, std::uint64_t seed = 0);

/// Reads `<dir>/gaussian_p<p>_reps<reps>_seed<seed>.json` if present, otherwise
/// computes the baseline and writes that file atomically.
GaussianBaseline cached_gaussian_baseline(const std::filesystem::path& dir, Index p, int reps = kBaselineReps,
                                          std::uint64_t seed = 0);

std::string baseline_to_json(const GaussianBaseline& baseline);
GaussianBaseline baseline_from_json(const std::string& text);

/// sqrt(mean_l (sigma_hat_l - sigma_bar_l)^2) over the singular values of delta_hat.
double contraction_mse(const Matrix& delta_hat, const GaussianBaseline& baseline);

/// ||estimate - true_mean||_F^2 / number of entries.
double svt_mse(const Matrix& estimate, const Matrix& true_mean);

/// One-sample Kolmogorov-Smirnov statistic of `sample` against N(0, 1).
double ks_statistic_normal(std::vector<double> sample);

/// Large-sample critical value c(alpha) / (sqrt(n) + 0.12 + 0.11 / sqrt(n));
/// alpha must be one of 0.10, 0.05, 0.025, 0.01.
double ks_critical_value(std::size_t n, double alpha);

/// Sample correlation of paired observations; 0 when either side is constant.
double pearson_correlation(const std::vector<double>& x, const std::vector<double>& y);

struct NormalityConfig {
    Index p = 5;           // sketch size
    Index m = 20;          // contracted vertices
    Index n = 2000;        // original vertices; m must divide n
    Index latent_dim = 2;  // RDPG latent dimension
    double scale = 0.5;    // mean of G_ij is scale * <Y_i, Y_j>
    int replicates = 50;
    double alpha = 0.01;
    std::uint64_t seed = 0;
};

struct NormalityReport {
    std::vector<double> ks;  // per replicate
    double critical = 0.0;
    int rejections = 0;
    double adjacent_correlation = 0.0;  // pooled over (delta_uv, delta_u,v+1)
    std::vector<Matrix> sketches;
};

/// Simulates directed Poisson RDPGs G with mean scale * Y Y^T (rows of Y on the
/// simplex), contracts n vertices into m equal groups, standardizes against
/// the true contracted mean and sketches p random groups, per replicate.
NormalityReport normality_check(const NormalityConfig& config);

}  // namespace gclust
