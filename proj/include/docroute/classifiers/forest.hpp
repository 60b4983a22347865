#ifndef DOCROUTE_CLASSIFIERS_FOREST_HPP_
#define DOCROUTE_CLASSIFIERS_FOREST_HPP_

#include <algorithm>
#include <cmath>
#include <vector>

#include "../features.hpp"
#include "../parallel.hpp"
#include "../random.hpp"
#include "spec.hpp"

namespace docroute {

/// Flat binary tree. Internal nodes route x[feature] <= threshold to left.
struct DecisionTree {
    struct Node {
        int feature = -1;  // -1 marks a leaf
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        int depth = 0;
        std::vector<double> distribution;  // leaf class frequencies, sums to 1
    };
    std::vector<Node> nodes;

    int depth() const {
        int d = 0;
        for (const auto& n : nodes) d = std::max(d, n.depth);
        return d;
    }
};

struct ForestModel {
    std::vector<DecisionTree> trees;
    int n_classes = 0;
};

namespace detail {

using ColumnMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, std::ptrdiff_t>;

class TreeBuilder {
public:
    TreeBuilder(const ColumnMatrix& xc, const std::vector<int>& y, int n_classes, int max_depth, Rng& rng)
        : xc_(xc), y_(y), k_(n_classes), max_depth_(max_depth), rng_(rng),
          features_(static_cast<std::size_t>(xc.cols())), value_(y.size(), 0.0), mark_(y.size(), 0) {
        for (std::size_t j = 0; j < features_.size(); ++j) features_[j] = j;
        mtry_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(features_.size()))));
    }

    DecisionTree build(std::vector<std::size_t> rows) {
        DecisionTree t;
        grow(t, std::move(rows), 0);
        return t;
    }

private:
    struct Split {
        double gain = 0.0;
        std::size_t feature = 0;
        double threshold = 0.0;
        bool constant = true;
    };

    std::vector<double> class_counts(const std::vector<std::size_t>& rows) const {
        std::vector<double> c(static_cast<std::size_t>(k_), 0.0);
        for (auto r : rows) c[static_cast<std::size_t>(y_[r])] += 1.0;
        return c;
    }

    static double gini_times_n(const std::vector<double>& counts, double n) {
        if (n <= 0) return 0.0;
        double s = 0.0;
        for (double c : counts) s += c * c;
        return n - s / n;
    }

    // Best Gini split of `rows` on feature j; gain is the reduction in n * impurity.
    Split best_split_on(std::size_t j, const std::vector<std::size_t>& rows, const std::vector<double>& parent,
                        double parent_impurity) {
        const auto col = static_cast<std::ptrdiff_t>(j);
        std::size_t nonzero = 0;
        for (ColumnMatrix::InnerIterator it(xc_, col); it; ++it) {
            const auto r = static_cast<std::size_t>(it.row());
            if (mark_[r]) {
                value_[r] = it.value();
                ++nonzero;
            }
        }
        Split best;
        best.feature = j;
        if (nonzero == 0) return best;
        std::vector<std::pair<double, int>> vals;
        vals.reserve(rows.size());
        for (auto r : rows) vals.emplace_back(value_[r], y_[r]);
        for (ColumnMatrix::InnerIterator it(xc_, col); it; ++it) value_[static_cast<std::size_t>(it.row())] = 0.0;
        std::sort(vals.begin(), vals.end());
        if (vals.front().first == vals.back().first) return best;
        best.constant = false;

        std::vector<double> left(static_cast<std::size_t>(k_), 0.0);
        std::vector<double> right = parent;
        const double n = static_cast<double>(vals.size());
        for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
            left[static_cast<std::size_t>(vals[i].second)] += 1.0;
            right[static_cast<std::size_t>(vals[i].second)] -= 1.0;
            if (vals[i].first == vals[i + 1].first) continue;
            const double nl = static_cast<double>(i + 1);
            const double gain = parent_impurity - gini_times_n(left, nl) - gini_times_n(right, n - nl);
            if (gain > best.gain + 1e-12) {
                best.gain = gain;
                best.threshold = 0.5 * (vals[i].first + vals[i + 1].first);
            }
        }
        return best;
    }

    int grow(DecisionTree& t, std::vector<std::size_t> rows, int depth) {
        const int id = static_cast<int>(t.nodes.size());
        t.nodes.emplace_back();
        t.nodes[static_cast<std::size_t>(id)].depth = depth;
        const auto counts = class_counts(rows);
        const double n = static_cast<double>(rows.size());
        const bool pure = std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0; }) <= 1;

        Split best;
        if (!pure && depth < max_depth_ && rows.size() >= 2) {
            const double parent_impurity = gini_times_n(counts, n);
            for (auto r : rows) mark_[r] = 1;
            // Features are drawn without replacement until mtry of them were
            // non-constant in this node or all were tried.
            std::size_t informative = 0;
            for (std::size_t i = 0; i < features_.size() && informative < mtry_; ++i) {
                std::swap(features_[i], features_[i + rng_.index(features_.size() - i)]);
                const auto s = best_split_on(features_[i], rows, counts, parent_impurity);
                if (!s.constant) ++informative;
                if (s.gain > best.gain) best = s;
            }
            for (auto r : rows) mark_[r] = 0;
        }

        if (best.gain <= 0.0) {
            auto& node = t.nodes[static_cast<std::size_t>(id)];
            node.distribution.resize(counts.size());
            for (std::size_t c = 0; c < counts.size(); ++c) node.distribution[c] = counts[c] / n;
            return id;
        }

        std::vector<std::size_t> lrows, rrows;
        {
            const auto col = static_cast<std::ptrdiff_t>(best.feature);
            for (auto r : rows) mark_[r] = 1;
            for (ColumnMatrix::InnerIterator it(xc_, col); it; ++it) {
                const auto r = static_cast<std::size_t>(it.row());
                if (mark_[r]) value_[r] = it.value();
            }
            for (auto r : rows) (value_[r] <= best.threshold ? lrows : rrows).push_back(r);
            for (ColumnMatrix::InnerIterator it(xc_, col); it; ++it) value_[static_cast<std::size_t>(it.row())] = 0.0;
            for (auto r : rows) mark_[r] = 0;
        }
        rows.clear();
        rows.shrink_to_fit();
        const int l = grow(t, std::move(lrows), depth + 1);
        const int r = grow(t, std::move(rrows), depth + 1);
        auto& node = t.nodes[static_cast<std::size_t>(id)];
        node.feature = static_cast<int>(best.feature);
        node.threshold = best.threshold;
        node.left = l;
        node.right = r;
        return id;
    }

    const ColumnMatrix& xc_;
    const std::vector<int>& y_;
    int k_;
    int max_depth_;
    Rng& rng_;
    std::vector<std::size_t> features_;
    std::size_t mtry_;
    std::vector<double> value_;
    std::vector<char> mark_;
};

}  // namespace detail

/// Random forest: bootstrap-sampled Gini trees with sqrt(d) candidate features
/// per split, each tree capped at max_depth. Tree t uses seed derive_seed(seed, t),
/// so trees are built in parallel without affecting the result.
inline ForestModel train_forest(const CountMatrix& x, const std::vector<int>& y, int n_classes, const RfParams& p,
                                std::uint64_t seed, std::size_t workers = 1) {
    const detail::ColumnMatrix xc(x);
    ForestModel f;
    f.n_classes = n_classes;
    f.trees.resize(static_cast<std::size_t>(p.n_trees));
    parallel_for(f.trees.size(), workers, [&](std::size_t t) {
        Rng rng(derive_seed(seed, t));
        std::vector<std::size_t> rows(y.size());
        for (auto& r : rows) r = rng.index(y.size());
        detail::TreeBuilder builder(xc, y, n_classes, p.max_depth, rng);
        f.trees[t] = builder.build(std::move(rows));
    });
    return f;
}

inline const std::vector<double>& tree_leaf(const DecisionTree& t, const CountMatrix& x, std::ptrdiff_t row) {
    const DecisionTree::Node* node = &t.nodes[0];
    while (node->feature >= 0) {
        const double v = x.coeff(row, node->feature);
        node = &t.nodes[static_cast<std::size_t>(v <= node->threshold ? node->left : node->right)];
    }
    return node->distribution;
}

/// Average of per-tree leaf class frequencies.
inline DenseMatrix predict_forest(const ForestModel& f, const CountMatrix& x) {
    DenseMatrix p = DenseMatrix::Zero(x.rows(), f.n_classes);
    for (std::ptrdiff_t r = 0; r < x.rows(); ++r) {
        for (const auto& t : f.trees) {
            const auto& d = tree_leaf(t, x, r);
            for (std::size_t c = 0; c < d.size(); ++c) p(r, static_cast<Eigen::Index>(c)) += d[c];
        }
    }
    p /= static_cast<double>(f.trees.size());
    return p;
}

}  // namespace docroute

#endif  // DOCROUTE_CLASSIFIERS_FOREST_HPP_
