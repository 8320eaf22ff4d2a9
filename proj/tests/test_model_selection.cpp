#include "gclust/error.hpp"
#include "gclust/evaluation/ari.hpp"
#include "gclust/evaluation/simulate.hpp"
#include "gclust/model_selection.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace gclust;
using gclust::testing::uniform_matrix;

TEST(Aicc, SingleEntryModelScoresZero) {
    Matrix W = Matrix::Zero(4, 1);
    W(2, 0) = 1.0;
    const auto s = aicc(W, Matrix::Ones(1, 1), Vector::Constant(1, 5.0));
    EXPECT_EQ(s.loss, 0.0);
    EXPECT_EQ(s.penalty, 0.0);
    EXPECT_EQ(s.aicc, 0.0);
}

TEST(Aicc, HalfAndHalfByHand) {
    const auto s = aicc(Matrix::Constant(2, 1, 0.5), Matrix::Ones(1, 1), Vector::Constant(1, 2.0));
    EXPECT_NEAR(s.loss, std::log(2.0), 1e-15);
    EXPECT_NEAR(s.penalty, 0.25, 1e-15);
    EXPECT_NEAR(s.aicc, 0.9431, 1e-4);
}

TEST(Aicc, SupportCountUsesRelativeTolerance) {
    Matrix W(3, 1);
    W << 1.0, 1e-9, 0.5;
    // Entry 1e-9 is below 1e-8 * max and does not count: C = 2.
    const auto s = aicc(W, Matrix::Ones(1, 1), Vector::Constant(1, 4.0));
    EXPECT_NEAR(s.penalty, 0.5 * (2.0 - 1.0) / 4.0, 1e-15);
}

TEST(Aicc, Errors) {
    EXPECT_THROW(aicc(Matrix::Ones(2, 1), Matrix::Ones(1, 2), Vector::Zero(2)), Error);
    EXPECT_THROW(aicc(Matrix::Ones(2, 1), Matrix::Ones(1, 2), Vector::Ones(3)), Error);
    Matrix H(2, 2);
    H << 1, 1, 0, 0;
    try {
        aicc(Matrix::Ones(2, 2), H, Vector::Ones(2));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::numerical);
        EXPECT_NE(std::string(e.what()).find("empty cluster"), std::string::npos);
    }
}

TEST(Aicc, StoredSumIsExact) {
    for (std::uint64_t i = 0; i < 20; ++i) {
        const auto s = aicc(uniform_matrix(6, 3, i) / 6.0, uniform_matrix(3, 4, 100 + i), uniform_matrix(4, 1, 200 + i, 1, 9).col(0));
        EXPECT_EQ(s.aicc, s.loss + s.penalty);
        EXPECT_GE(s.penalty, 0.0);
    }
}

TEST(Aicc, InvariantUnderClusterRelabeling) {
    const Matrix W = uniform_matrix(8, 3, 1), H = uniform_matrix(3, 5, 2);
    const Vector N = uniform_matrix(5, 1, 3, 1, 10).col(0);
    Eigen::PermutationMatrix<Eigen::Dynamic> P(3);
    P.indices() << 2, 0, 1;
    const auto a = aicc(W, H, N), b = aicc(W * P.transpose(), P * H, N);
    EXPECT_NEAR(a.aicc, b.aicc, 1e-10);
    const auto la = extract_labels(H).values, lb = extract_labels(P * H).values;
    for (std::size_t t = 0; t < la.size(); ++t) EXPECT_EQ(lb[t] - 1, P.indices()[la[t] - 1]);
}

TEST(Aicc, SplittingAClusterNeverLowersThePenalty) {
    for (std::uint64_t i = 0; i < 30; ++i) {
        const Matrix W = uniform_matrix(6, 2, 300 + i), H = uniform_matrix(2, 5, 400 + i);
        const Vector N = Vector::Constant(5, 7.0);
        const double a = 0.05 + 0.9 * uniform_matrix(1, 1, 500 + i)(0, 0);
        Matrix W2(6, 3), H2(3, 5);
        W2 << W, W.col(0);
        H2 << a * H.row(0), H.row(1), (1.0 - a) * H.row(0);
        EXPECT_GE(aicc(W2, H2, N).penalty, aicc(W, H, N).penalty);
    }
}

TEST(ExtractLabels, Rules) {
    EXPECT_EQ(extract_labels(Matrix::Identity(3, 3)).values, (std::vector<int>{1, 2, 3}));
    EXPECT_EQ(extract_labels((Matrix(2, 1) << 0.2, 0.8).finished()).values, std::vector<int>{2});
    const auto tie = extract_labels((Matrix(2, 1) << 0.5, 0.5).finished());
    EXPECT_EQ(tie.values, std::vector<int>{1});
    EXPECT_EQ(tie.ties, 1);
    EXPECT_THROW(extract_labels(Matrix::Zero(2, 1)), Error);
}

TEST(NormalizeColumns, DegenerateColumnsBecomeUniform) {
    Matrix X(2, 2);
    X << 1, 0, 3, 0;
    int degenerate = 0;
    const Matrix Y = normalize_columns(X, &degenerate);
    EXPECT_EQ(degenerate, 1);
    EXPECT_DOUBLE_EQ(Y(1, 0), 0.75);
    EXPECT_DOUBLE_EQ(Y(0, 1), 0.5);
}

TEST(Gclust, RankOneGivesUnitLoadings) {
    const auto data = rank_one_fixture(16, 8, 4);
    GclustOptions o;
    o.restarts = 3;
    const auto fit = gclust::gclust(data, 1, o);
    EXPECT_LT((fit.factorization.H.array() - 1.0).abs().maxCoeff(), 1e-6);
    EXPECT_EQ(fit.labels.values, std::vector<int>(8, 1));
}

TEST(Gclust, TwoPatternFixtureSplitsPerfectly) {
    const auto fx = two_pattern_fixture(0.1);
    const auto fit = gclust::gclust(fx.data, 2);
    EXPECT_EQ(adjusted_rand_index(fit.labels.values, fx.truth), 1.0);
    EXPECT_EQ(fit.score.restart_seed, fit.factorization.seed);
}

TEST(Gclust, DisjointSupportsAreSeparated) {
    Matrix X = Matrix::Zero(8, 8);
    const Vector a = (Vector(4) << 3, 1, 2, 5).finished(), b = (Vector(4) << 1, 4, 4, 1).finished();
    for (int t = 0; t < 4; ++t) X.block(0, t, 4, 1) = a * (1 + t);
    for (int t = 4; t < 8; ++t) X.block(4, t, 4, 1) = b * (9 - t);
    const auto fit = gclust::gclust(DataMatrix::from_matrix(X), 2);
    EXPECT_EQ(adjusted_rand_index(fit.labels.values, {1, 1, 1, 1, 2, 2, 2, 2}), 1.0);
}

TEST(Gclust, RejectsInvalidRank) {
    const auto data = rank_one_fixture(4, 3, 5);
    EXPECT_THROW(gclust::gclust(data, 0), Error);
    EXPECT_THROW(gclust::gclust(data, 4), Error);
}

TEST(ModelDim, RankOneSelectsOne) {
    GclustOptions o;
    o.restarts = 5;
    EXPECT_EQ(get_gclust_model_dim(rank_one_fixture(16, 8, 6), 4, o).r_hat, 1);
}

TEST(ModelDim, TwoPatternTableShape) {
    const auto fx = two_pattern_fixture(0.1);
    const auto dim = get_gclust_model_dim(fx.data, 5);
    ASSERT_EQ(dim.table.size(), 5u);
    EXPECT_EQ(dim.r_hat, 2);
    const auto& t = dim.table;
    EXPECT_GT(t[0].loss, t[1].loss);
    EXPECT_LT(std::abs(t[1].loss - t[2].loss), 0.01 * t[1].loss);
    for (std::size_t r = 1; r < t.size(); ++r) EXPECT_GT(t[r].penalty, t[r - 1].penalty);
}

TEST(ModelDim, DeterministicTables) {
    const auto fx = two_pattern_fixture(0.1);
    GclustOptions o;
    o.restarts = 4;
    o.seed = 99;
    const auto a = get_gclust_model_dim(fx.data, 3, o), b = get_gclust_model_dim(fx.data, 3, o);
    for (std::size_t r = 0; r < 3; ++r) {
        EXPECT_EQ(a.table[r].aicc, b.table[r].aicc);
        EXPECT_EQ(a.table[r].restart_seed, b.table[r].restart_seed);
    }
}

TEST(ModelDim, RangeValidation) {
    const auto data = rank_one_fixture(4, 3, 7);
    EXPECT_THROW(get_gclust_model_dim(data, 4), Error);
    EXPECT_THROW(get_gclust_model_dim(data, 2, {}, 3), Error);
    EXPECT_EQ(default_r_max(data), 3);
}
