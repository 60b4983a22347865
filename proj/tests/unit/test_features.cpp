#include <gtest/gtest.h>

#include <random>

#include <docroute/features.hpp>
#include <docroute/segmentation.hpp>

#include "oracles/jacobi_svd.hpp"
#include "oracles/tfidf_fixture.hpp"
#include "support.hpp"

using namespace docroute;

namespace {

CountMatrix sparse(const std::vector<std::vector<double>>& rows) {
    DenseMatrix d(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c) d(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    return to_sparse(d);
}

DenseMatrix random_dense(std::mt19937_64& rng, int rows, int cols, double density = 1.0) {
    std::normal_distribution<double> n;
    std::uniform_real_distribution<double> u;
    DenseMatrix m = DenseMatrix::Zero(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            if (u(rng) < density) m(r, c) = n(rng);
    return m;
}

std::vector<double> row_major(const DenseMatrix& m) {
    std::vector<double> v;
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) v.push_back(m(r, c));
    return v;
}

void expect_matrix_near(const CountMatrix& m, const std::vector<std::vector<double>>& expected, double tol) {
    const DenseMatrix d(m);
    ASSERT_EQ(d.rows(), static_cast<Eigen::Index>(expected.size()));
    for (std::size_t r = 0; r < expected.size(); ++r)
        for (std::size_t c = 0; c < expected[r].size(); ++c)
            EXPECT_NEAR(d(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)), expected[r][c], tol) << r << "," << c;
}

}  // namespace

TEST(Vocabulary, SortedDistinct) {
    EXPECT_EQ(fit_vocabulary({"b a", "a c"}).terms(), (std::vector<std::string>{"a", "b", "c"}));
    EXPECT_EQ(fit_vocabulary({"x x x"}).terms(), std::vector<std::string>{"x"});
    EXPECT_THROW(fit_vocabulary({"", ""}), InvalidArgument);
    EXPECT_THROW(Vocabulary({"b", "a"}), InvalidArgument);
}

TEST(Vocabulary, SegmentAndDocumentBasesAgree) {
    std::mt19937_64 rng(2);
    std::vector<Document> docs;
    for (int i = 0; i < 30; ++i)
        docs.push_back({"d" + std::to_string(i), "c", testing_support::random_term_string(rng, 300 + 40 * i)});
    const auto sc = segment_corpus(make_corpus(docs), 64);
    std::vector<std::string> seg_texts, doc_texts;
    for (const auto& s : sc.segments) seg_texts.push_back(s.text);
    for (const auto& d : concatenate(sc).documents) doc_texts.push_back(d.text);
    EXPECT_EQ(fit_vocabulary(seg_texts), fit_vocabulary(doc_texts));
}

TEST(CountVectorize, Counting) {
    const Vocabulary v({"a", "b", "c"});
    const DenseMatrix m(count_vectorize({"a a b", "", "zz c"}, v));
    EXPECT_EQ(m.row(0), Eigen::RowVector3d(2, 1, 0));
    EXPECT_EQ(m.row(1), Eigen::RowVector3d(0, 0, 0));
    EXPECT_EQ(m.row(2), Eigen::RowVector3d(0, 0, 1));
}

TEST(CountVectorize, RowSumEqualsInVocabularyTermCount) {
    std::mt19937_64 rng(3);
    std::vector<std::string> texts;
    for (int i = 0; i < 50; ++i) texts.push_back(testing_support::random_term_string(rng, 200));
    const auto v = fit_vocabulary({texts.begin(), texts.begin() + 25});
    const auto m = count_vectorize(texts, v);
    for (std::size_t i = 0; i < texts.size(); ++i) {
        double in_vocab = 0;
        for (const auto& t : utf8::split_blanks(texts[i])) in_vocab += v.find(t) >= 0;
        EXPECT_EQ(m.row(static_cast<std::ptrdiff_t>(i)).sum(), in_vocab);
    }
}

TEST(Normalize, L1AndL2) {
    expect_matrix_near(l1_normalize(sparse({{2, 3, 5}, {0, 0, 0}})), {{0.2, 0.3, 0.5}, {0, 0, 0}}, 1e-15);
    expect_matrix_near(l2_normalize(sparse({{3, 4}, {0, 0}})), {{0.6, 0.8}, {0, 0}}, 1e-15);
    DenseMatrix d(2, 2);
    d << 3, 4, 0, 0;
    const DenseMatrix n = l2_normalize(d);
    EXPECT_DOUBLE_EQ(n(0, 0), 0.6);
    EXPECT_EQ(n(1, 1), 0.0);
}

TEST(Normalize, L1ScaleInvarianceAndL2UnitNorm) {
    std::mt19937_64 rng(4);
    for (int rep = 0; rep < 50; ++rep) {
        DenseMatrix d = random_dense(rng, 10, 30, 0.3).cwiseAbs();
        const auto a = l1_normalize(to_sparse(d));
        const auto b = l1_normalize(to_sparse(d * 7.25));
        EXPECT_LE(DenseMatrix(a - b).cwiseAbs().maxCoeff(), 1e-12);
        const DenseMatrix u(l2_normalize(to_sparse(d)));
        for (Eigen::Index r = 0; r < u.rows(); ++r) {
            if (d.row(r).norm() > 0) {
                EXPECT_NEAR(u.row(r).norm(), 1.0, 1e-12);
            }
        }
    }
}

TEST(Idf, FormulaInstances) {
    const auto m = fit_idf(sparse({{1, 1}, {1, 0}, {1, 1}, {1, 0}}));
    EXPECT_NEAR(m.idf[1], 0.693147, 1e-6);
    EXPECT_EQ(m.idf[0], 0.0);
    const auto z = fit_idf(sparse({{1, 0}, {1, 0}}));
    EXPECT_EQ(z.idf[1], 0.0);
    EXPECT_THROW(fit_idf(CountMatrix(0, 3)), InvalidArgument);
}

TEST(Idf, HandFixture) {
    const oracle::TfidfFixture fx;
    const auto v = fit_vocabulary(fx.texts);
    ASSERT_EQ(v.terms(), fx.vocabulary);
    const auto counts = count_vectorize(fx.texts, v);
    expect_matrix_near(counts, fx.counts, 0.0);
    const auto l1 = l1_normalize(counts);
    expect_matrix_near(l1, fx.l1, 1e-12);
    const auto idf = fit_idf(l1);
    for (std::size_t t = 0; t < fx.idf.size(); ++t) {
        EXPECT_NEAR(idf.idf[t], fx.idf[t], 1e-12);
        EXPECT_NEAR(std::exp(idf.idf[t]) * static_cast<double>(idf.df[t]), 5.0, 1e-9);
    }
    expect_matrix_near(apply_idf(l1, idf), fx.tfidf(), 1e-12);
}

TEST(Idf, ApplyIdentityLinearityAndMismatch) {
    std::mt19937_64 rng(5);
    const auto m = to_sparse(random_dense(rng, 6, 5, 0.5));
    IdfModel ones;
    ones.idf.assign(5, 1.0);
    EXPECT_LE(DenseMatrix(apply_idf(m, ones) - m).cwiseAbs().maxCoeff(), 0.0);
    IdfModel w;
    w.idf = {0.5, 2.0, 0.0, 1.0, 3.0};
    const DenseMatrix applied(apply_idf(m, w));
    const DenseMatrix dm(m);
    for (int c = 0; c < 5; ++c) EXPECT_LE((applied.col(c) - w.idf[static_cast<std::size_t>(c)] * dm.col(c)).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_TRUE(applied.col(2).isZero(0.0));
    IdfModel bad;
    bad.idf.assign(4, 1.0);
    EXPECT_THROW(apply_idf(m, bad), DimensionMismatch);
}

TEST(Svd, SingularValuesMatchDenseOracle) {
    std::mt19937_64 rng(6);
    for (int rep = 0; rep < 5; ++rep) {
        const DenseMatrix d = random_dense(rng, 50, 80);
        const auto model = fit_truncated_svd(to_sparse(d), 40, 100 + static_cast<std::uint64_t>(rep));
        const auto oracle_sv = oracle::jacobi_singular_values(row_major(d), 50, 80).singular_values;
        ASSERT_EQ(model.k, 40u);
        for (std::size_t i = 0; i < model.k; ++i)
            EXPECT_LE(std::abs(model.singular_values[static_cast<Eigen::Index>(i)] - oracle_sv[i]) / oracle_sv[i], 1e-6) << i;
    }
}

TEST(Svd, RankTwoReconstruction) {
    std::mt19937_64 rng(7);
    const DenseMatrix d = random_dense(rng, 30, 2) * random_dense(rng, 2, 45);
    const auto model = fit_truncated_svd(to_sparse(d), 2, 1);
    const DenseMatrix proj = svd_transform(to_sparse(d), model);
    EXPECT_LE((proj * model.components - d).norm(), 1e-8);
}

TEST(Svd, ComponentsOrthonormalAndSortedAndClamped) {
    std::mt19937_64 rng(8);
    const auto m = to_sparse(random_dense(rng, 12, 40, 0.4));
    const auto model = fit_truncated_svd(m, 800, 3);
    EXPECT_EQ(model.k, 12u);
    const DenseMatrix gram = model.components * model.components.transpose();
    EXPECT_LE((gram - DenseMatrix::Identity(12, 12)).cwiseAbs().maxCoeff(), 1e-8);
    for (Eigen::Index i = 1; i < model.singular_values.size(); ++i)
        EXPECT_GE(model.singular_values[i - 1], model.singular_values[i]);
    EXPECT_GE(model.singular_values.minCoeff(), 0.0);
    EXPECT_THROW(fit_truncated_svd(m, 0, 1), InvalidArgument);
}

TEST(Svd, DeterministicAndConsistentTransform) {
    std::mt19937_64 rng(9);
    const auto m = to_sparse(random_dense(rng, 25, 60, 0.3));
    const auto a = fit_truncated_svd(m, 5, 42);
    const auto b = fit_truncated_svd(m, 5, 42);
    EXPECT_EQ(a.components, b.components);
    EXPECT_EQ(svd_transform(m, a), svd_transform(m, b));
    CountMatrix zero(1, 60);
    EXPECT_EQ(svd_transform(zero, a).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_THROW(svd_transform(CountMatrix(1, 59), a), DimensionMismatch);
}

TEST(Svd, ProjectionMatchesDenseOracleOnTopSubspace) {
    // Projection norms onto the full top-k subspace equal those through the
    // oracle's singular values: sum of squares of projections = sum sigma_i^2.
    std::mt19937_64 rng(10);
    const DenseMatrix d = random_dense(rng, 20, 30);
    const auto model = fit_truncated_svd(to_sparse(d), 20, 5);
    const auto sv = oracle::jacobi_singular_values(row_major(d), 20, 30).singular_values;
    double energy = 0;
    for (double s : sv) energy += s * s;
    EXPECT_NEAR(svd_transform(to_sparse(d), model).squaredNorm(), energy, 1e-8 * energy);
}

TEST(Dump, WritesTriplets) {
    testing_support::TempDir dir("dump");
    const Vocabulary v({"a", "b"});
    dump_triplets(dir.file("m.txt"), count_vectorize({"a b b"}, v), &v, dir.file("v.txt"));
    EXPECT_EQ(testing_support::read_file(dir.file("m.txt")), "# 1 2 2\n0 0 1\n0 1 2\n");
    EXPECT_EQ(testing_support::read_file(dir.file("v.txt")), "a\nb\n");
}
