#include "gclust/diagnostics.hpp"
#include "gclust/error.hpp"
#include "gclust/evaluation/simulate.hpp"
#include "gclust/random.hpp"
#include "gclust/spectral.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace gclust;
using gclust::testing::gaussian_matrix;
using gclust::testing::uniform_matrix;

TEST(Residual, ExactMeanGivesZero) {
    const Matrix mean = uniform_matrix(4, 4, 1, 1, 5);
    EXPECT_EQ(residual_matrix(mean, mean).delta, Matrix::Zero(4, 4));
}

TEST(Residual, DirectFormula) {
    const auto r = residual_matrix(Matrix::Constant(1, 1, 110.0), Matrix::Constant(1, 1, 100.0));
    EXPECT_DOUBLE_EQ(r.delta(0, 0), 1.0);
    EXPECT_EQ(r.source, MeanSource::true_mean);
}

TEST(Residual, StandardizesPoissonToUnitVariance) {
    Rng rng(2);
    const Matrix mean = Matrix::Constant(100, 100, 400.0);
    const Matrix d = residual_matrix(poisson_matrix(mean, rng), mean).delta;
    const double var = (d.array() - d.mean()).square().sum() / static_cast<double>(d.size() - 1);
    EXPECT_GE(var, 0.9);
    EXPECT_LE(var, 1.1);
}

TEST(Residual, RejectsNonPositiveMean) {
    EXPECT_THROW(residual_matrix(Matrix::Ones(2, 2), Matrix::Zero(2, 2)), Error);
    EXPECT_THROW(residual_matrix(Matrix::Ones(2, 2), Matrix::Ones(3, 3)), Error);
}

TEST(Sketch, IdentityAndSingleRow) {
    const Matrix D = gaussian_matrix(4, 4, 3);
    EXPECT_EQ(sketch(D, Matrix::Identity(4, 4)), D);
    EXPECT_EQ(sketch(D, std::vector<Index>{2})(0, 0), D(2, 2));
}

TEST(Sketch, MatchesHandIndexing) {
    const Matrix D = gaussian_matrix(5, 5, 4);
    const std::vector<Index> rows{4, 1, 3};
    const Matrix s = sketch(D, rows);
    EXPECT_EQ(s(0, 0), D(4, 4));
    EXPECT_EQ(s(0, 1), D(4, 1));
    EXPECT_EQ(s(1, 2), D(1, 3));
    EXPECT_EQ(s(2, 0), D(3, 4));
    Matrix S = Matrix::Zero(3, 5);
    S(0, 4) = S(1, 1) = S(2, 3) = 1.0;
    EXPECT_EQ(sketch(D, S), S * D * S.transpose());
}

TEST(Sketch, RejectsDuplicatesAndNonBasisRows) {
    const Matrix D = gaussian_matrix(3, 3, 5);
    EXPECT_THROW(sketch(D, std::vector<Index>{1, 1}), Error);
    EXPECT_THROW(sketch(D, std::vector<Index>{3}), Error);
    EXPECT_THROW(sketch(D, Matrix::Constant(1, 3, 0.5)), Error);
}

TEST(Sketch, CommutesWithResidual) {
    Rng rng(6);
    const Matrix mean = uniform_matrix(6, 6, 7, 1, 9);
    const Matrix A = poisson_matrix(mean, rng);
    const std::vector<Index> rows{0, 5, 2};
    EXPECT_EQ(sketch(residual_matrix(A, mean).delta, rows), residual_matrix(sketch(A, rows), sketch(mean, rows)).delta);
}

TEST(GaussianBaseline, ScalarCaseIsMeanAbsoluteNormal) {
    const auto b = gaussian_singular_baseline(1, 100000, 8);
    EXPECT_NEAR(b.sigma_bar[0], std::sqrt(2.0 / std::numbers::pi), 3.0 * b.std_error[0]);
}

TEST(GaussianBaseline, StandardErrorsShrinkWithReplicates) {
    const auto a = gaussian_singular_baseline(3, 20000, 9), b = gaussian_singular_baseline(3, 40000, 9);
    for (Index k = 0; k < 3; ++k) {
        const double ratio = a.std_error[k] / b.std_error[k];
        EXPECT_GT(ratio, 1.3);
        EXPECT_LT(ratio, 1.55);
    }
}

TEST(GaussianBaseline, IndependentRunsAgree) {
    const auto a = gaussian_singular_baseline(2, 100000, 10), b = gaussian_singular_baseline(2, 100000, 11);
    for (Index k = 0; k < 2; ++k) {
        const double joint = std::hypot(a.std_error[k], b.std_error[k]);
        EXPECT_LT(std::abs(a.sigma_bar[k] - b.sigma_bar[k]), 4.0 * joint);
        EXPECT_GE(a.std_error[k], 0.0);
    }
    EXPECT_GE(a.sigma_bar[0], a.sigma_bar[1]);
}

TEST(GaussianBaseline, Validation) {
    EXPECT_THROW(gaussian_singular_baseline(2, 99, 0), Error);
    EXPECT_THROW(gaussian_singular_baseline(0, 100, 0), Error);
}

TEST(GaussianBaseline, DiskCacheRoundTrip) {
    const auto dir = gclust::testing::scratch_dir();
    const auto a = cached_gaussian_baseline(dir, 3, 500, 12);
    const auto file = dir / "gaussian_p3_reps500_seed12.json";
    ASSERT_TRUE(std::filesystem::exists(file));
    const auto stamp = std::filesystem::last_write_time(file);
    const auto b = cached_gaussian_baseline(dir, 3, 500, 12);
    EXPECT_EQ(std::filesystem::last_write_time(file), stamp);
    EXPECT_EQ(a.sigma_bar, b.sigma_bar);
    EXPECT_EQ(a.std_error, b.std_error);
    EXPECT_THROW(baseline_from_json("{\"p\": 2}"), Error);
}

TEST(ContractionMse, ExactBaselineGivesZero) {
    const auto b = gaussian_singular_baseline(3, 200, 13);
    EXPECT_NEAR(contraction_mse(Matrix(b.sigma_bar.asDiagonal()), b), 0.0, 1e-14);
}

TEST(ContractionMse, ScalarArithmetic) {
    GaussianBaseline b;
    b.p = 1;
    b.sigma_bar = Vector::Constant(1, 0.7979);
    b.std_error = Vector::Zero(1);
    EXPECT_NEAR(contraction_mse(Matrix::Constant(1, 1, 2.0), b), 1.2021, 1e-12);
    EXPECT_THROW(contraction_mse(Matrix::Ones(2, 2), b), Error);
}

TEST(ContractionMse, OrthogonallyInvariant) {
    const auto b = gaussian_singular_baseline(4, 200, 14);
    const Matrix D = gaussian_matrix(4, 4, 15);
    const Matrix Q = Eigen::HouseholderQR<Matrix>(gaussian_matrix(4, 4, 16)).householderQ();
    EXPECT_NEAR(contraction_mse(Q * D, b), contraction_mse(D, b), 1e-12);
    EXPECT_NEAR(contraction_mse(D * Q.transpose(), b), contraction_mse(D, b), 1e-12);
}

TEST(ContractionMse, InRegimeBeatsOutOfRegime) {
    const auto baseline = gaussian_singular_baseline(5, 20000, 17);
    auto mean_mse = [&](const NormalityConfig& c) {
        const auto report = normality_check(c);
        double sum = 0.0;
        for (const auto& d : report.sketches) sum += contraction_mse(d, baseline);
        return sum / static_cast<double>(report.sketches.size());
    };
    NormalityConfig in;
    in.n = 1000;
    in.replicates = 20;
    in.seed = 18;
    NormalityConfig out = in;
    out.n = 40;
    out.scale = 0.05;
    EXPECT_LT(mean_mse(in), mean_mse(out));
}

TEST(SvtMse, Arithmetic) {
    const Matrix M = uniform_matrix(3, 2, 19);
    EXPECT_EQ(svt_mse(M, M), 0.0);
    EXPECT_DOUBLE_EQ(svt_mse(Matrix::Ones(2, 1), Matrix::Zero(2, 1)), 1.0);
    EXPECT_THROW(svt_mse(Matrix::Ones(2, 1), Matrix::Ones(1, 2)), Error);
}

TEST(SvtMse, UsvtBeatsRawData) {
    const Matrix mean = low_rank_mean(400, 40, 2, 2.0, 20);
    Rng rng(21);
    const Matrix X = poisson_matrix(mean, rng);
    EXPECT_LT(svt_mse(usvt(X).estimate, mean), svt_mse(X, mean));
}

TEST(Ks, StatisticAndCriticalValue) {
    // A single observation at 0: F = 0.5 on both sides of the step.
    EXPECT_DOUBLE_EQ(ks_statistic_normal({0.0}), 0.5);
    EXPECT_NEAR(ks_critical_value(25, 0.01), 1.628 / (5.0 + 0.12 + 0.022), 1e-15);
    EXPECT_THROW(ks_critical_value(25, 0.02), Error);
}

TEST(Ks, NormalSamplesRarelyReject) {
    int rejections = 0;
    for (std::uint64_t i = 0; i < 200; ++i) {
        const Matrix z = gaussian_matrix(25, 1, 1000 + i);
        if (ks_statistic_normal({z.data(), z.data() + 25}) > ks_critical_value(25, 0.05)) ++rejections;
    }
    EXPECT_LT(rejections, 22);  // about 10 expected at the 5% level
}

TEST(Pearson, KnownValues) {
    EXPECT_NEAR(pearson_correlation({1, 2, 3}, {2, 4, 6}), 1.0, 1e-15);
    EXPECT_NEAR(pearson_correlation({1, 2, 3}, {3, 2, 1}), -1.0, 1e-15);
    EXPECT_EQ(pearson_correlation({1, 1, 1}, {1, 2, 3}), 0.0);
}

TEST(NormalityCheck, SmallConfigurationIsDeterministicAndMostlyNormal) {
    NormalityConfig c;
    c.p = 4;
    c.m = 8;
    c.n = 800;
    c.replicates = 10;
    c.seed = 22;
    const auto a = normality_check(c), b = normality_check(c);
    EXPECT_EQ(a.ks, b.ks);
    EXPECT_LE(a.rejections, 2);
    EXPECT_LT(std::abs(a.adjacent_correlation), 0.2);
    NormalityConfig bad = c;
    bad.n = 801;
    EXPECT_THROW(normality_check(bad), Error);
}
