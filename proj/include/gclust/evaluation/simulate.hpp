#pragma once

// Block-structured Poisson graph sequences and the random dot product graphs
// used by the Monte Carlo checks.

#include "gclust/ingest.hpp"
#include "gclust/types.hpp"

#include <cstdint>
#include <vector>

namespace gclust {

/// The 5 x 5 block means of the first pattern.
Matrix block_pattern_one();
/// The first pattern with rows moved by the cycle 4 -> 1 -> 5 -> 2 -> 4
/// (row i lands at position sigma(i)), then columns 3 and 4 swapped.
Matrix block_pattern_two();

struct BlockModelSpec {
    std::vector<Matrix> patterns;  // K x K non-negative block means
    Index m = 1;                   // vertices per block
    std::vector<int> schedule;     // 1-based pattern index per time step
    double rho = 1.0;              // intensity scale in (0, 1]

    Index blocks() const { return patterns.empty() ? 0 : patterns.front().rows(); }
    Index vertices() const { return blocks() * m; }
    void validate() const;
};

/// T steps: the first floor(T/2) follow pattern 1, the rest pattern 2.
std::vector<int> two_phase_schedule(int T);

/// The two-pattern model used by the simulation study.
BlockModelSpec study_model(Index m, int T, double rho);

/// n x n mean of G(t): rho * B_{u v} with u = floor(i / m) (0-based).
Matrix block_mean(const BlockModelSpec& spec, int t);

/// Independent Poisson entries with mean block_mean(spec, t), t = 0..T-1.
GraphSequence simulate_block_poisson(const BlockModelSpec& spec, std::uint64_t seed);

/// Merges the m vertices of each block into one super-vertex.
ContractionMap within_block_contraction(Index blocks, Index m);

/// Entrywise-positive rank-`rank` mean matrix (uniform factors) rescaled to
/// have average entry `level`.
Matrix low_rank_mean(Index rows, Index cols, Index rank, double level, std::uint64_t seed);

struct RdpgSample {
    Matrix Y;  // latent positions, rows on the simplex
    Matrix P;  // Y Y^T
    Matrix A;  // symmetric Bernoulli draw
};

RdpgSample simulate_bernoulli_rdpg(Index n, Index r, std::uint64_t seed);

/// eps_W of W = ASE(A, r) with H = W^T against the true P. The value is
/// unchanged by any orthogonal rotation of W, so it equals the error of the
/// symmetric factorization that rotation produces.
double ase_fixed_point_error(const RdpgSample& sample, Index r);

/// Two 6-vertex weighted graphs M1 = L R and M2 (M1 with vertices relabeled
/// so that pairs {1,6}, {2,3}, {4,5} of M1 become {1,2}, {3,4}, {5,6}), where
/// R = [k 1 1 k 0 0; 1 k 0 0 k 1; 0 0 k 1 1 k] / (1 + k) and L = R^T. The data
/// matrix holds `copies` columns of vec(M1) followed by `copies` of vec(M2).
struct TwoPatternFixture {
    DataMatrix data;
    std::vector<int> truth;  // 1 for M1 columns, 2 for M2 columns
    Matrix W;                // exact factors: X = W H
    Matrix H;
};

TwoPatternFixture two_pattern_fixture(double kappa = 0.1, int copies = 5);

/// X = w h^T with w, h entrywise in [0.5, 1.5); N = column sums.
DataMatrix rank_one_fixture(Index rows, Index cols, std::uint64_t seed);

}  // namespace gclust
