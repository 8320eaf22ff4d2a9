#include "gclust/evaluation/simulate.hpp"

#include "gclust/error.hpp"
#include "gclust/nmf.hpp"
#include "gclust/random.hpp"
#include "gclust/spectral.hpp"

#include <fmt/format.h>

#include <array>

namespace gclust {

Matrix block_pattern_one() {
    Matrix B(5, 5);
    B << 0.1, 0.045, 0.015, 0.19, 0.001,
         0.045, 0.05, 0.035, 0.14, 0.03,
         0.015, 0.035, 0.08, 0.105, 0.04,
         0.19, 0.14, 0.105, 0.29, 0.13,
         0.001, 0.03, 0.04, 0.13, 0.09;
    return B;
}

Matrix block_pattern_two() {
    // sigma(1..5) for the cycle 4 -> 1 -> 5 -> 2 -> 4; 3 is fixed.
    constexpr std::array<int, 5> sigma{5, 4, 3, 1, 2};
    const Matrix B1 = block_pattern_one();
    Matrix B2(5, 5);
    for (int i = 0; i < 5; ++i) B2.row(sigma[i] - 1) = B1.row(i);
    B2.col(2).swap(B2.col(3));
    return B2;
}

void BlockModelSpec::validate() const {
    require(!patterns.empty(), ErrorKind::invalid_argument, "block model needs at least one pattern");
    const Index K = patterns.front().rows();
    for (const auto& B : patterns)
        require(B.rows() == K && B.cols() == K && (B.array() >= 0.0).all() && B.allFinite(),
                ErrorKind::invalid_argument, "block patterns must be K x K, finite and non-negative");
    require(m >= 1, ErrorKind::invalid_argument, "block size m must be positive");
    require(!schedule.empty(), ErrorKind::invalid_argument, "schedule is empty");
    for (const int k : schedule)
        if (k < 1 || k > static_cast<int>(patterns.size()))
            fail(ErrorKind::invalid_argument, fmt::format("schedule entry {} outside [1, {}]", k, patterns.size()));
    require(rho > 0.0 && rho <= 1.0, ErrorKind::invalid_argument, "rho must lie in (0, 1]");
}

std::vector<int> two_phase_schedule(int T) {
    require(T >= 2, ErrorKind::invalid_argument, "schedule needs T >= 2");
    std::vector<int> s(static_cast<std::size_t>(T), 2);
    std::fill(s.begin(), s.begin() + T / 2, 1);
    return s;
}

BlockModelSpec study_model(Index m, int T, double rho) {
    BlockModelSpec spec{{block_pattern_one(), block_pattern_two()}, m, two_phase_schedule(T), rho};
    spec.validate();
    return spec;
}

Matrix block_mean(const BlockModelSpec& spec, int t) {
    require(t >= 0 && t < static_cast<int>(spec.schedule.size()), ErrorKind::out_of_range, "time step out of range");
    const Matrix& B = spec.patterns[static_cast<std::size_t>(spec.schedule[t] - 1)];
    const Index n = spec.vertices();
    Matrix mean(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i) mean(i, j) = spec.rho * B(i / spec.m, j / spec.m);
    return mean;
}

GraphSequence simulate_block_poisson(const BlockModelSpec& spec, std::uint64_t seed) {
    spec.validate();
    Rng rng(seed);
    std::vector<Matrix> slices;
    for (int t = 0; t < static_cast<int>(spec.schedule.size()); ++t)
        slices.push_back(poisson_matrix(block_mean(spec, t), rng));
    return GraphSequence::from_slices(std::move(slices));
}

ContractionMap within_block_contraction(Index blocks, Index m) {
    require(blocks >= 1 && m >= 1, ErrorKind::invalid_argument, "contraction needs positive sizes");
    std::vector<int> assignment(static_cast<std::size_t>(blocks * m));
    for (std::size_t i = 0; i < assignment.size(); ++i) assignment[i] = static_cast<int>(i / static_cast<std::size_t>(m));
    return ContractionMap(std::move(assignment));
}

Matrix low_rank_mean(Index rows, Index cols, Index rank, double level, std::uint64_t seed) {
    require(rank >= 1 && rank <= std::min(rows, cols) && level > 0.0, ErrorKind::invalid_argument,
            "invalid low-rank mean request");
    Rng rng(seed);
    Matrix W(rows, rank), H(rank, cols);
    for (Index j = 0; j < rank; ++j)
        for (Index i = 0; i < rows; ++i) W(i, j) = 0.1 + uniform01(rng);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rank; ++i) H(i, j) = 0.1 + uniform01(rng);
    Matrix M = W * H;
    return M * (level / M.mean());
}

RdpgSample simulate_bernoulli_rdpg(Index n, Index r, std::uint64_t seed) {
    Rng rng(seed);
    RdpgSample s;
    s.Y = simplex_positions(n, r, rng);
    s.P = s.Y * s.Y.transpose();
    s.A = bernoulli_symmetric(s.P, rng);
    return s;
}

double ase_fixed_point_error(const RdpgSample& sample, Index r) {
    const Matrix W = ase(sample.A, r);
    return fixed_point_residuals(W, W.transpose(), sample.P).eps_w;
}

TwoPatternFixture two_pattern_fixture(double kappa, int copies) {
    require(kappa >= 0.0 && copies >= 1, ErrorKind::invalid_argument, "invalid two-pattern fixture");
    Matrix R(3, 6);
    R << kappa, 1, 1, kappa, 0, 0,
         1, kappa, 0, 0, kappa, 1,
         0, 0, kappa, 1, 1, kappa;
    R /= 1.0 + kappa;
    const Matrix M1 = R.transpose() * R;
    // M2(a, b) = M1(pi(a), pi(b)) with pi = (2 6 4).
    constexpr std::array<int, 6> pi{0, 5, 2, 1, 4, 3};
    Matrix M2(6, 6);
    for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) M2(a, b) = M1(pi[a], pi[b]);

    TwoPatternFixture f;
    f.W.resize(36, 2);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
            f.W(i * 6 + j, 0) = M1(i, j);
            f.W(i * 6 + j, 1) = M2(i, j);
        }
    f.H = Matrix::Zero(2, 2 * copies);
    for (int t = 0; t < 2 * copies; ++t) {
        const int k = t < copies ? 0 : 1;
        f.H(k, t) = 1.0;
        f.truth.push_back(k + 1);
    }
    f.data = DataMatrix::from_matrix(f.W * f.H);
    return f;
}

DataMatrix rank_one_fixture(Index rows, Index cols, std::uint64_t seed) {
    require(rows >= 1 && cols >= 1, ErrorKind::invalid_argument, "rank-one fixture needs positive sizes");
    Rng rng(seed);
    Vector w(rows), h(cols);
    for (Index i = 0; i < rows; ++i) w[i] = 0.5 + uniform01(rng);
    for (Index j = 0; j < cols; ++j) h[j] = 0.5 + uniform01(rng);
    return DataMatrix::from_matrix(w * h.transpose());
}

}  // namespace gclust
