#ifndef DOCROUTE_RESAMPLING_HPP_
#define DOCROUTE_RESAMPLING_HPP_

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "error.hpp"
#include "features.hpp"
#include "random.hpp"

namespace docroute {

enum class OversampleMode { to_majority, capped };

/// SMOTE target policy. to_majority lifts every class to the majority count;
/// capped lifts classes below `cap` to `cap` and leaves larger ones alone.
struct OversamplePolicy {
    OversampleMode mode = OversampleMode::to_majority;
    std::size_t cap = 55;
    std::size_t k_neighbors = 5;
    std::uint64_t seed = 0;

    void validate() const {
        if (cap < 1) throw InvalidArgument("oversampling cap must be >= 1");
        if (k_neighbors < 1) throw InvalidArgument("k_neighbors must be >= 1");
    }

    /// Default policy of the segment analysis: to majority, 5 neighbors.
    static OversamplePolicy segments(std::uint64_t seed = 0) { return {OversampleMode::to_majority, 55, 5, seed}; }
    /// Default policy of the document analysis: capped at 55, 4 neighbors.
    static OversamplePolicy documents(std::uint64_t seed = 0) { return {OversampleMode::capped, 55, 4, seed}; }
};

/// How a synthetic row was made: base + u * (neighbor - base), row indices
/// into the original matrix.
struct SmoteProvenance {
    std::size_t base = 0;
    std::size_t neighbor = 0;
    double u = 0.0;
};

struct OversampleResult {
    CountMatrix matrix;              // originals first, unchanged, then synthetic rows
    std::vector<int> labels;
    std::vector<bool> synthetic;     // one flag per row
    std::vector<SmoteProvenance> provenance;  // one entry per synthetic row, in row order
    std::map<int, std::size_t> effective_k;   // neighbors actually used per oversampled class
};

/// Target size of a class of `count` rows when the largest class has `majority` rows.
inline std::size_t smote_target(const OversamplePolicy& p, std::size_t count, std::size_t majority) {
    return p.mode == OversampleMode::to_majority ? majority : std::max(count, p.cap);
}

namespace detail {

inline double sparse_dot(const CountMatrix& m, std::ptrdiff_t a, std::ptrdiff_t b) {
    CountMatrix::InnerIterator ia(m, a), ib(m, b);
    double s = 0.0;
    while (ia && ib) {
        if (ia.col() == ib.col()) {
            s += ia.value() * ib.value();
            ++ia;
            ++ib;
        } else if (ia.col() < ib.col()) {
            ++ia;
        } else {
            ++ib;
        }
    }
    return s;
}

}  // namespace detail

/// The k nearest same-class rows of `row` by Euclidean distance, ties broken by
/// lower row index. `members` lists the class's row indices in ascending order.
inline std::vector<std::size_t> nearest_neighbors(const CountMatrix& m, const std::vector<double>& sq_norms,
                                                  const std::vector<std::size_t>& members, std::size_t row,
                                                  std::size_t k) {
    std::vector<std::pair<double, std::size_t>> d;
    d.reserve(members.size());
    for (auto other : members) {
        if (other == row) continue;
        const double dist = sq_norms[row] + sq_norms[other] -
                            2.0 * detail::sparse_dot(m, static_cast<std::ptrdiff_t>(row), static_cast<std::ptrdiff_t>(other));
        d.emplace_back(std::max(0.0, dist), other);
    }
    k = std::min(k, d.size());
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
    std::vector<std::size_t> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) out.push_back(d[i].second);
    return out;
}

/// Synthetic minority oversampling. For each missing row of a class: draw a
/// member uniformly, draw one of its k nearest same-class neighbors, draw
/// u ~ U[0,1) and emit base + u * (neighbor - base). k is clamped to
/// class size - 1. Classes are processed in ascending label order, each with
/// its own derived random stream.
inline OversampleResult smote(const CountMatrix& m, const std::vector<int>& labels, const OversamplePolicy& policy) {
    policy.validate();
    if (static_cast<std::size_t>(m.rows()) != labels.size())
        throw DimensionMismatch("smote: " + std::to_string(labels.size()) + " labels for " + std::to_string(m.rows()) +
                                " rows");
    std::map<int, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);
    std::size_t majority = 0;
    for (const auto& [c, rows] : members) majority = std::max(majority, rows.size());

    std::vector<double> sq(labels.size(), 0.0);
    for (std::ptrdiff_t r = 0; r < m.outerSize(); ++r)
        for (CountMatrix::InnerIterator it(m, r); it; ++it) sq[static_cast<std::size_t>(r)] += it.value() * it.value();

    using Triplet = Eigen::Triplet<double, std::ptrdiff_t>;
    std::vector<Triplet> triplets;
    triplets.reserve(static_cast<std::size_t>(m.nonZeros()));
    for (std::ptrdiff_t r = 0; r < m.outerSize(); ++r)
        for (CountMatrix::InnerIterator it(m, r); it; ++it) triplets.emplace_back(r, it.col(), it.value());

    OversampleResult res;
    res.labels = labels;
    res.synthetic.assign(labels.size(), false);
    std::ptrdiff_t next_row = m.rows();

    for (const auto& [cls, rows] : members) {
        const std::size_t target = smote_target(policy, rows.size(), majority);
        if (target <= rows.size()) continue;
        if (rows.size() < 2)
            throw InvalidArgument("class " + std::to_string(cls) + " has a single member and cannot be oversampled");
        const std::size_t k = std::min(policy.k_neighbors, rows.size() - 1);
        res.effective_k[cls] = k;

        Rng rng(derive_seed(policy.seed, static_cast<std::uint64_t>(cls)));
        std::map<std::size_t, std::vector<std::size_t>> knn_cache;
        for (std::size_t s = rows.size(); s < target; ++s) {
            const std::size_t base = rows[rng.index(rows.size())];
            auto it = knn_cache.find(base);
            if (it == knn_cache.end()) it = knn_cache.emplace(base, nearest_neighbors(m, sq, rows, base, k)).first;
            const std::size_t nb = it->second[rng.index(it->second.size())];
            const double u = rng.uniform();

            // Merge the two sparse rows column by column.
            CountMatrix::InnerIterator a(m, static_cast<std::ptrdiff_t>(base));
            CountMatrix::InnerIterator b(m, static_cast<std::ptrdiff_t>(nb));
            while (a || b) {
                std::ptrdiff_t col;
                double xa = 0.0, xb = 0.0;
                if (a && (!b || a.col() < b.col())) {
                    col = a.col();
                    xa = a.value();
                    ++a;
                } else if (b && (!a || b.col() < a.col())) {
                    col = b.col();
                    xb = b.value();
                    ++b;
                } else {
                    col = a.col();
                    xa = a.value();
                    xb = b.value();
                    ++a;
                    ++b;
                }
                const double v = xa + u * (xb - xa);
                if (v != 0.0) triplets.emplace_back(next_row, col, v);
            }
            ++next_row;
            res.labels.push_back(cls);
            res.synthetic.push_back(true);
            res.provenance.push_back({base, nb, u});
        }
    }
    res.matrix.resize(next_row, m.cols());
    res.matrix.setFromTriplets(triplets.begin(), triplets.end());
    res.matrix.makeCompressed();
    return res;
}

/// Fraction of generated rows.
inline double synthetic_share(const OversampleResult& r) {
    if (r.synthetic.empty()) return 0.0;
    const auto n = static_cast<double>(std::count(r.synthetic.begin(), r.synthetic.end(), true));
    return n / static_cast<double>(r.synthetic.size());
}

/// Share of generated rows the policy would produce for the given class sizes,
/// without building any matrix.
inline double projected_synthetic_share(const OversamplePolicy& p, const std::vector<std::size_t>& class_sizes) {
    std::size_t majority = 0, total = 0, generated = 0;
    for (auto c : class_sizes) majority = std::max(majority, c);
    for (auto c : class_sizes) {
        const auto t = smote_target(p, c, majority);
        total += std::max(t, c);
        generated += t > c ? t - c : 0;
    }
    return total == 0 ? 0.0 : static_cast<double>(generated) / static_cast<double>(total);
}

}  // namespace docroute

#endif  // DOCROUTE_RESAMPLING_HPP_
