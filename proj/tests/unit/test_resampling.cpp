#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include <docroute/resampling.hpp>
#include <docroute/segmentation.hpp>

using namespace docroute;

namespace {

struct Fixture {
    CountMatrix x;
    std::vector<int> y;
};

// L1-normalized random count rows, `sizes[c]` rows of class c.
Fixture random_fixture(std::uint64_t seed, const std::vector<std::size_t>& sizes, int cols = 30) {
    std::mt19937_64 rng(seed);
    std::poisson_distribution<int> pois(0.6);
    std::vector<Eigen::Triplet<double, std::ptrdiff_t>> t;
    Fixture f;
    std::ptrdiff_t r = 0;
    for (std::size_t c = 0; c < sizes.size(); ++c) {
        for (std::size_t i = 0; i < sizes[c]; ++i, ++r) {
            bool any = false;
            for (int j = 0; j < cols; ++j) {
                int v = pois(rng);
                if (j == static_cast<int>(c) % cols) v += 2;
                if (v > 0) {
                    t.emplace_back(r, j, v);
                    any = true;
                }
            }
            if (!any) t.emplace_back(r, 0, 1.0);
            f.y.push_back(static_cast<int>(c));
        }
    }
    f.x.resize(r, cols);
    f.x.setFromTriplets(t.begin(), t.end());
    f.x = l1_normalize(f.x);
    return f;
}

double dense_distance(const DenseMatrix& d, std::size_t a, std::size_t b) {
    return (d.row(static_cast<Eigen::Index>(a)) - d.row(static_cast<Eigen::Index>(b))).squaredNorm();
}

// k nearest same-class rows by exhaustive dense distance, ties to the lower index.
std::vector<std::size_t> brute_knn(const DenseMatrix& d, const std::vector<int>& y, std::size_t row, std::size_t k) {
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t j = 0; j < y.size(); ++j)
        if (j != row && y[j] == y[row]) all.emplace_back(dense_distance(d, row, j), j);
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < std::min(k, all.size()); ++i) out.push_back(all[i].second);
    return out;
}

std::map<int, std::size_t> label_counts(const std::vector<int>& y) {
    std::map<int, std::size_t> m;
    for (int v : y) ++m[v];
    return m;
}

}  // namespace

TEST(Smote, PolicyDefaults) {
    const auto s = OversamplePolicy::segments(3);
    EXPECT_EQ(s.mode, OversampleMode::to_majority);
    EXPECT_EQ(s.k_neighbors, 5u);
    EXPECT_EQ(s.seed, 3u);
    const auto d = OversamplePolicy::documents();
    EXPECT_EQ(d.mode, OversampleMode::capped);
    EXPECT_EQ(d.cap, 55u);
    EXPECT_EQ(d.k_neighbors, 4u);
}

TEST(Smote, TargetSizes) {
    const auto maj = OversamplePolicy::segments();
    EXPECT_EQ(smote_target(maj, 3, 5), 5u);
    EXPECT_EQ(smote_target(maj, 5, 5), 5u);
    const auto cap = OversamplePolicy::documents();
    EXPECT_EQ(smote_target(cap, 8, 60), 55u);
    EXPECT_EQ(smote_target(cap, 60, 60), 60u);
    EXPECT_EQ(smote_target(cap, 55, 60), 55u);
}

TEST(Smote, ToMajorityFillsEveryClass) {
    const auto f = random_fixture(1, {3, 5});
    const auto r = smote(f.x, f.y, OversamplePolicy::segments(7));
    EXPECT_EQ(label_counts(r.labels), (std::map<int, std::size_t>{{0, 5}, {1, 5}}));
    EXPECT_EQ(r.matrix.rows(), 10);
    EXPECT_EQ(r.provenance.size(), 2u);
    EXPECT_DOUBLE_EQ(synthetic_share(r), 0.2);
}

TEST(Smote, CappedLeavesLargeClassesAlone) {
    const auto f = random_fixture(2, {8, 60});
    const auto r = smote(f.x, f.y, OversamplePolicy::documents(1));
    EXPECT_EQ(label_counts(r.labels), (std::map<int, std::size_t>{{0, 55}, {1, 60}}));
    for (const auto& p : r.provenance) {
        EXPECT_EQ(f.y[p.base], 0);
        EXPECT_EQ(f.y[p.neighbor], 0);
    }
    EXPECT_EQ(r.effective_k.count(1), 0u);
}

TEST(Smote, OriginalRowsComeFirstUnchanged) {
    const auto f = random_fixture(3, {4, 9, 6});
    const auto r = smote(f.x, f.y, OversamplePolicy::segments(5));
    const DenseMatrix a(f.x), b(r.matrix);
    ASSERT_GE(b.rows(), a.rows());
    EXPECT_EQ(b.topRows(a.rows()), a);
    for (Eigen::Index i = 0; i < b.rows(); ++i) EXPECT_EQ(r.synthetic[static_cast<std::size_t>(i)], i >= a.rows());
    EXPECT_TRUE(std::equal(f.y.begin(), f.y.end(), r.labels.begin()));
}

TEST(Smote, SyntheticRowsLieOnNeighborSegments) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto f = random_fixture(10 + seed, {3, 5, 12, 7});
        const auto r = smote(f.x, f.y, OversamplePolicy::segments(seed));
        const DenseMatrix x(f.x), s(r.matrix);
        const auto n0 = static_cast<std::size_t>(x.rows());
        for (std::size_t i = 0; i < r.provenance.size(); ++i) {
            const auto& p = r.provenance[i];
            ASSERT_GE(p.u, 0.0);
            ASSERT_LT(p.u, 1.0);
            const Eigen::RowVectorXd expect = x.row(static_cast<Eigen::Index>(p.base)) +
                                              p.u * (x.row(static_cast<Eigen::Index>(p.neighbor)) -
                                                     x.row(static_cast<Eigen::Index>(p.base)));
            EXPECT_LE((s.row(static_cast<Eigen::Index>(n0 + i)) - expect).cwiseAbs().maxCoeff(), 1e-12);
            EXPECT_EQ(r.labels[n0 + i], f.y[p.base]);
            const auto nb = brute_knn(x, f.y, p.base, r.effective_k.at(f.y[p.base]));
            EXPECT_NE(std::find(nb.begin(), nb.end(), p.neighbor), nb.end())
                << "neighbor " << p.neighbor << " of " << p.base << " not among its nearest";
        }
    }
}

TEST(Smote, NearestNeighborsMatchExhaustiveSearch) {
    const auto f = random_fixture(21, {15, 11});
    const DenseMatrix d(f.x);
    std::vector<double> sq;
    for (Eigen::Index r = 0; r < d.rows(); ++r) sq.push_back(d.row(r).squaredNorm());
    for (int cls = 0; cls < 2; ++cls) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < f.y.size(); ++i)
            if (f.y[i] == cls) members.push_back(i);
        for (auto row : members) {
            const auto got = nearest_neighbors(f.x, sq, members, row, 5);
            const auto want = brute_knn(d, f.y, row, 5);
            ASSERT_EQ(got.size(), want.size());
            for (std::size_t j = 0; j < got.size(); ++j)
                EXPECT_NEAR(dense_distance(d, row, got[j]), dense_distance(d, row, want[j]), 1e-12);
        }
    }
}

TEST(Smote, NeighborCountIsClampedToClassSize) {
    const auto f = random_fixture(4, {3, 20, 2});
    const auto r = smote(f.x, f.y, OversamplePolicy::segments(1));
    EXPECT_EQ(r.effective_k.at(0), 2u);
    EXPECT_EQ(r.effective_k.at(2), 1u);
    EXPECT_EQ(r.effective_k.count(1), 0u);

    const auto g = random_fixture(5, {30, 40});
    EXPECT_EQ(smote(g.x, g.y, OversamplePolicy::segments()).effective_k.at(0), 5u);
    const auto h = random_fixture(6, {30, 60});
    EXPECT_EQ(smote(h.x, h.y, OversamplePolicy::documents()).effective_k.at(0), 4u);
}

TEST(Smote, SyntheticL1NormStaysOne) {
    const auto f = random_fixture(8, {6, 25});
    const auto r = smote(f.x, f.y, OversamplePolicy::segments(2));
    const DenseMatrix s(r.matrix);
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
        EXPECT_NEAR(s.row(i).lpNorm<1>(), 1.0, 1e-12);
        EXPECT_GE(s.row(i).minCoeff(), 0.0);
    }
}

TEST(Smote, Deterministic) {
    const auto f = random_fixture(9, {5, 17, 8});
    const auto a = smote(f.x, f.y, OversamplePolicy::segments(11));
    const auto b = smote(f.x, f.y, OversamplePolicy::segments(11));
    EXPECT_EQ(DenseMatrix(a.matrix), DenseMatrix(b.matrix));
    EXPECT_EQ(a.labels, b.labels);
    const auto c = smote(f.x, f.y, OversamplePolicy::segments(12));
    EXPECT_NE(DenseMatrix(a.matrix), DenseMatrix(c.matrix));
}

TEST(Smote, Errors) {
    const auto f = random_fixture(10, {1, 4});
    EXPECT_THROW(smote(f.x, f.y, OversamplePolicy::segments()), InvalidArgument);
    auto y = f.y;
    y.pop_back();
    EXPECT_THROW(smote(f.x, y, OversamplePolicy::segments()), DimensionMismatch);
    auto p = OversamplePolicy::segments();
    p.k_neighbors = 0;
    const auto g = random_fixture(11, {3, 4});
    EXPECT_THROW(smote(g.x, g.y, p), InvalidArgument);
}

TEST(Smote, BalancedInputIsUntouched) {
    const auto f = random_fixture(12, {10, 10});
    const auto r = smote(f.x, f.y, OversamplePolicy::segments());
    EXPECT_EQ(r.matrix.rows(), 20);
    EXPECT_EQ(synthetic_share(r), 0.0);
    EXPECT_TRUE(r.provenance.empty());
}

TEST(SyntheticShare, ProjectionMatchesMaterializedRun) {
    const std::vector<std::size_t> sizes = {4, 9, 13, 2};
    const auto f = random_fixture(13, sizes);
    for (const auto& p : {OversamplePolicy::segments(), OversamplePolicy{OversampleMode::capped, 10, 3, 0}}) {
        const auto r = smote(f.x, f.y, p);
        EXPECT_DOUBLE_EQ(projected_synthetic_share(p, sizes), synthetic_share(r));
    }
    EXPECT_DOUBLE_EQ(projected_synthetic_share(OversamplePolicy::segments(), {10, 20}), 0.25);
    EXPECT_EQ(projected_synthetic_share(OversamplePolicy::segments(), {}), 0.0);
}

TEST(SyntheticShare, StudySegmentProfile) {
    const auto& sizes = study_segment_profile();
    const std::size_t total = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
    const std::size_t majority = *std::max_element(sizes.begin(), sizes.end());
    const double expected = 1.0 - static_cast<double>(total) / static_cast<double>(majority * sizes.size());
    EXPECT_NEAR(projected_synthetic_share(OversamplePolicy::segments(), sizes), expected, 1e-12);
    EXPECT_NEAR(projected_synthetic_share(OversamplePolicy::segments(), sizes), 0.388, 5e-4);
}
