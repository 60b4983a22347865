#ifndef DOCROUTE_FEATURES_HPP_
#define DOCROUTE_FEATURES_HPP_

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "error.hpp"
#include "random.hpp"
#include "utf8.hpp"

namespace docroute {

/// Sparse samples x terms matrix (rows = documents or segments).
using CountMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, std::ptrdiff_t>;
using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Sorted distinct terms with their column indices.
class Vocabulary {
public:
    Vocabulary() = default;

    explicit Vocabulary(std::vector<std::string> sorted_terms) : terms_(std::move(sorted_terms)) {
        index_.reserve(terms_.size());
        for (std::size_t i = 0; i < terms_.size(); ++i) {
            if (i > 0 && !(terms_[i - 1] < terms_[i]))
                throw InvalidArgument("vocabulary terms must be sorted and distinct");
            index_.emplace(terms_[i], static_cast<std::ptrdiff_t>(i));
        }
    }

    std::size_t size() const { return terms_.size(); }
    const std::vector<std::string>& terms() const { return terms_; }
    const std::string& term(std::size_t i) const { return terms_[i]; }

    /// Column of `term`, or -1 when out of vocabulary.
    std::ptrdiff_t find(const std::string& term) const {
        auto it = index_.find(term);
        return it == index_.end() ? -1 : it->second;
    }

    bool operator==(const Vocabulary& o) const { return terms_ == o.terms_; }

private:
    std::vector<std::string> terms_;
    std::unordered_map<std::string, std::ptrdiff_t> index_;
};

inline Vocabulary fit_vocabulary(const std::vector<std::string>& texts) {
    std::set<std::string> terms;
    for (const auto& t : texts) {
        for (auto& term : utf8::split_blanks(t)) terms.insert(std::move(term));
    }
    if (terms.empty()) throw InvalidArgument("cannot fit a vocabulary on empty texts");
    return Vocabulary(std::vector<std::string>(terms.begin(), terms.end()));
}

/// Entry (i, t) counts the occurrences of term t in text i. Out-of-vocabulary terms are ignored.
inline CountMatrix count_vectorize(const std::vector<std::string>& texts, const Vocabulary& vocab) {
    using Triplet = Eigen::Triplet<double, std::ptrdiff_t>;
    std::vector<Triplet> triplets;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        for (const auto& term : utf8::split_blanks(texts[i])) {
            const auto col = vocab.find(term);
            if (col >= 0) triplets.emplace_back(static_cast<std::ptrdiff_t>(i), col, 1.0);
        }
    }
    CountMatrix m(static_cast<std::ptrdiff_t>(texts.size()), static_cast<std::ptrdiff_t>(vocab.size()));
    m.setFromTriplets(triplets.begin(), triplets.end());
    m.makeCompressed();
    return m;
}

namespace detail {

template <class NormFn>
CountMatrix scale_rows(CountMatrix m, NormFn norm) {
    for (std::ptrdiff_t r = 0; r < m.outerSize(); ++r) {
        const double n = norm(m, r);
        if (n == 0.0) continue;
        for (CountMatrix::InnerIterator it(m, r); it; ++it) it.valueRef() /= n;
    }
    return m;
}

}  // namespace detail

/// Divides every nonzero row by its L1 norm; zero rows stay zero.
inline CountMatrix l1_normalize(CountMatrix m) {
    return detail::scale_rows(std::move(m), [](const CountMatrix& a, std::ptrdiff_t r) {
        double s = 0.0;
        for (CountMatrix::InnerIterator it(a, r); it; ++it) s += std::abs(it.value());
        return s;
    });
}

/// Divides every nonzero row by its Euclidean norm; zero rows stay zero.
inline CountMatrix l2_normalize(CountMatrix m) {
    return detail::scale_rows(std::move(m), [](const CountMatrix& a, std::ptrdiff_t r) {
        double s = 0.0;
        for (CountMatrix::InnerIterator it(a, r); it; ++it) s += it.value() * it.value();
        return std::sqrt(s);
    });
}

inline DenseMatrix l2_normalize(DenseMatrix m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        const double n = m.row(r).norm();
        if (n > 0.0) m.row(r) /= n;
    }
    return m;
}

/// idf_t = ln(N / df_t); terms that never occur get 0.
struct IdfModel {
    std::vector<double> idf;
    std::vector<std::size_t> df;
    std::size_t n_rows = 0;
};

inline IdfModel fit_idf(const CountMatrix& m) {
    if (m.rows() == 0) throw InvalidArgument("cannot fit idf on an empty matrix");
    IdfModel model;
    model.n_rows = static_cast<std::size_t>(m.rows());
    model.df.assign(static_cast<std::size_t>(m.cols()), 0);
    for (std::ptrdiff_t r = 0; r < m.outerSize(); ++r) {
        for (CountMatrix::InnerIterator it(m, r); it; ++it) {
            if (it.value() != 0.0) ++model.df[static_cast<std::size_t>(it.col())];
        }
    }
    model.idf.resize(model.df.size());
    const double n = static_cast<double>(model.n_rows);
    for (std::size_t t = 0; t < model.df.size(); ++t)
        model.idf[t] = model.df[t] == 0 ? 0.0 : std::log(n / static_cast<double>(model.df[t]));
    return model;
}

/// Scales column t by idf_t. Columns with idf 0 vanish from the sparsity pattern.
inline CountMatrix apply_idf(CountMatrix m, const IdfModel& model) {
    if (static_cast<std::size_t>(m.cols()) != model.idf.size())
        throw DimensionMismatch("idf model has " + std::to_string(model.idf.size()) + " terms, matrix has " +
                                std::to_string(m.cols()) + " columns");
    for (std::ptrdiff_t r = 0; r < m.outerSize(); ++r) {
        for (CountMatrix::InnerIterator it(m, r); it; ++it) it.valueRef() *= model.idf[static_cast<std::size_t>(it.col())];
    }
    m.prune(0.0, 0.0);
    return m;
}

/// Rank-k projection basis: rows of `components` are right singular vectors.
struct SvdModel {
    DenseMatrix components;  // k x terms
    Vector singular_values;  // nonincreasing
    std::size_t k = 0;
};

inline constexpr int kSvdPowerIterations = 4;
inline constexpr int kSvdOversampling = 10;

namespace detail {

inline DenseMatrix orthonormal_basis(const DenseMatrix& y) {
    Eigen::HouseholderQR<DenseMatrix> qr(y);
    return qr.householderQ() * DenseMatrix::Identity(y.rows(), y.cols());
}

}  // namespace detail

/// Randomized truncated SVD (Halko, Martinsson & Tropp): Gaussian range
/// finder with 10 oversampling columns and 4 power iterations, then an exact
/// SVD of the small projected matrix. The effective rank is min(k, rows, cols).
inline SvdModel fit_truncated_svd(const CountMatrix& m, std::size_t k, std::uint64_t seed) {
    if (k < 1) throw InvalidArgument("truncated SVD needs k >= 1");
    const auto rows = static_cast<std::size_t>(m.rows());
    const auto cols = static_cast<std::size_t>(m.cols());
    if (rows == 0 || cols == 0) throw InvalidArgument("truncated SVD of an empty matrix");
    const std::size_t min_dim = std::min(rows, cols);
    const std::size_t eff_k = std::min(k, min_dim);
    const auto l = static_cast<Eigen::Index>(std::min(eff_k + kSvdOversampling, min_dim));

    Rng rng(seed);
    DenseMatrix omega(static_cast<Eigen::Index>(cols), l);
    for (Eigen::Index j = 0; j < omega.cols(); ++j)
        for (Eigen::Index i = 0; i < omega.rows(); ++i) omega(i, j) = rng.normal();

    DenseMatrix q = detail::orthonormal_basis(m * omega);
    for (int it = 0; it < kSvdPowerIterations; ++it) {
        DenseMatrix z = detail::orthonormal_basis(m.transpose() * q);
        q = detail::orthonormal_basis(m * z);
    }
    // B^T = A^T Q is cols x l; its thin SVD gives B = Ub S V^T with V = U(B^T).
    DenseMatrix bt = m.transpose() * q;
    Eigen::BDCSVD<DenseMatrix> svd(bt, Eigen::ComputeThinU);

    SvdModel model;
    model.k = eff_k;
    const auto ek = static_cast<Eigen::Index>(eff_k);
    model.singular_values = svd.singularValues().head(ek);
    model.components = svd.matrixU().leftCols(ek).transpose();
    // Sign convention: largest-magnitude loading of each component is positive.
    for (Eigen::Index c = 0; c < model.components.rows(); ++c) {
        Eigen::Index arg;
        model.components.row(c).cwiseAbs().maxCoeff(&arg);
        if (model.components(c, arg) < 0) model.components.row(c) *= -1.0;
    }
    return model;
}

/// Projects rows onto the fitted components: samples x k, dense.
inline DenseMatrix svd_transform(const CountMatrix& m, const SvdModel& model) {
    if (m.cols() != model.components.cols())
        throw DimensionMismatch("SVD model expects " + std::to_string(model.components.cols()) + " columns, got " +
                                std::to_string(m.cols()));
    return m * model.components.transpose();
}

inline CountMatrix to_sparse(const DenseMatrix& d) {
    CountMatrix m = d.sparseView(0.0, 0.0);
    m.makeCompressed();
    return m;
}

/// Debug dump: "row col value" lines (0-based) with full precision, and
/// optionally the vocabulary, one term per line.
inline void dump_triplets(const std::string& path, const CountMatrix& m, const Vocabulary* vocab = nullptr,
                          const std::string& vocab_path = {}) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write matrix dump " + path);
    out.precision(17);
    out << "# " << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
    for (std::ptrdiff_t r = 0; r < m.outerSize(); ++r) {
        for (CountMatrix::InnerIterator it(m, r); it; ++it) out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
    }
    if (vocab && !vocab_path.empty()) {
        std::ofstream v(vocab_path);
        if (!v) throw Error("cannot write vocabulary dump " + vocab_path);
        for (const auto& t : vocab->terms()) v << t << '\n';
    }
}

}  // namespace docroute

#endif  // DOCROUTE_FEATURES_HPP_
