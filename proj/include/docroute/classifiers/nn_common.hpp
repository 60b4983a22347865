#ifndef DOCROUTE_CLASSIFIERS_NN_COMMON_HPP_
#define DOCROUTE_CLASSIFIERS_NN_COMMON_HPP_

#include <algorithm>
#include <cmath>
#include <vector>

#include <json.hpp>

#include <Eigen/Dense>

#include "../features.hpp"
#include "../random.hpp"
#include "spec.hpp"

namespace docroute::nn {

/// Affine map x -> x W + b. W is fan_in x fan_out.
struct DenseLayer {
    DenseMatrix W;
    Eigen::RowVectorXd b;

    Eigen::Index fan_in() const { return W.rows(); }
    Eigen::Index fan_out() const { return W.cols(); }
};

/// Symmetric uniform weights in [-1/sqrt(fan_in), 1/sqrt(fan_in)], zero bias.
inline DenseLayer init_layer(Eigen::Index fan_in, Eigen::Index fan_out, Rng& rng) {
    DenseLayer l;
    const double a = 1.0 / std::sqrt(static_cast<double>(fan_in));
    l.W.resize(fan_in, fan_out);
    for (Eigen::Index j = 0; j < fan_out; ++j)
        for (Eigen::Index i = 0; i < fan_in; ++i) l.W(i, j) = rng.uniform(-a, a);
    l.b = Eigen::RowVectorXd::Zero(fan_out);
    return l;
}

inline DenseMatrix activate(Activation a, const DenseMatrix& z) {
    switch (a) {
        case Activation::logistic:
        case Activation::sigmoid: return z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
        case Activation::tanh: return z.array().tanh().matrix();
        case Activation::relu: return z.cwiseMax(0.0);
    }
    return z;
}

/// Elementwise derivative of the activation, expressed through its output
/// (and pre-activation for relu).
inline DenseMatrix activation_derivative(Activation a, const DenseMatrix& z, const DenseMatrix& out) {
    switch (a) {
        case Activation::logistic:
        case Activation::sigmoid: return out.array() * (1.0 - out.array());
        case Activation::tanh: return (1.0 - out.array().square()).matrix();
        case Activation::relu: return z.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; });
    }
    return DenseMatrix::Ones(z.rows(), z.cols());
}

/// Row-wise softmax with max subtraction.
inline DenseMatrix softmax_rows(const DenseMatrix& logits) {
    DenseMatrix p(logits.rows(), logits.cols());
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
        const double m = logits.row(r).maxCoeff();
        p.row(r) = (logits.row(r).array() - m).exp().matrix();
        p.row(r) /= p.row(r).sum();
    }
    return p;
}

/// Mean cross-entropy of labels under row probabilities.
inline double cross_entropy(const DenseMatrix& probs, const std::vector<int>& y) {
    double loss = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i)
        loss -= std::log(std::max(probs(static_cast<Eigen::Index>(i), y[i]), 1e-300));
    return loss / static_cast<double>(y.size());
}

inline DenseMatrix one_hot(const std::vector<int>& y, Eigen::Index classes) {
    DenseMatrix out = DenseMatrix::Zero(static_cast<Eigen::Index>(y.size()), classes);
    for (std::size_t i = 0; i < y.size(); ++i) out(static_cast<Eigen::Index>(i), y[i]) = 1.0;
    return out;
}

inline CountMatrix take_rows(const CountMatrix& m, const std::vector<std::size_t>& rows) {
    CountMatrix out(static_cast<std::ptrdiff_t>(rows.size()), m.cols());
    std::vector<std::ptrdiff_t> nnz(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) nnz[i] = m.outerIndexPtr()[rows[i] + 1] - m.outerIndexPtr()[rows[i]];
    out.reserve(nnz);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (CountMatrix::InnerIterator it(m, static_cast<std::ptrdiff_t>(rows[i])); it; ++it)
            out.insert(static_cast<std::ptrdiff_t>(i), it.col()) = it.value();
    out.makeCompressed();
    return out;
}

/// Gradient of a fan_in x fan_out weight matrix restricted to the rows that
/// received any signal: the input-layer gradient of a sparse batch.
struct RowSparseGradient {
    std::vector<Eigen::Index> rows;
    DenseMatrix values;  // rows.size() x fan_out

    DenseMatrix to_dense(Eigen::Index fan_in) const {
        DenseMatrix d = DenseMatrix::Zero(fan_in, values.cols());
        for (std::size_t k = 0; k < rows.size(); ++k) d.row(rows[k]) = values.row(static_cast<Eigen::Index>(k));
        return d;
    }
};

/// X^T delta for sparse X without materializing the full fan_in x fan_out matrix.
inline RowSparseGradient sparse_weight_gradient(const CountMatrix& x, const DenseMatrix& delta) {
    RowSparseGradient g;
    std::vector<Eigen::Index> cols;
    for (std::ptrdiff_t r = 0; r < x.outerSize(); ++r)
        for (CountMatrix::InnerIterator it(x, r); it; ++it) cols.push_back(it.col());
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    g.rows = cols;
    g.values = DenseMatrix::Zero(static_cast<Eigen::Index>(cols.size()), delta.cols());
    for (std::ptrdiff_t r = 0; r < x.outerSize(); ++r) {
        for (CountMatrix::InnerIterator it(x, r); it; ++it) {
            const auto slot = std::lower_bound(cols.begin(), cols.end(), it.col()) - cols.begin();
            g.values.row(slot) += it.value() * delta.row(r);
        }
    }
    return g;
}

inline void apply_sparse_update(DenseMatrix& w, const RowSparseGradient& g, double lr) {
    for (std::size_t k = 0; k < g.rows.size(); ++k) w.row(g.rows[k]) -= lr * g.values.row(static_cast<Eigen::Index>(k));
}

inline DenseMatrix affine(const DenseMatrix& x, const DenseLayer& l) { return (x * l.W).rowwise() + l.b; }

inline DenseMatrix affine(const CountMatrix& x, const DenseLayer& l) {
    DenseMatrix z = x * l.W;
    return z.rowwise() + l.b;
}

inline std::vector<std::size_t> iota_rows(std::size_t n) {
    std::vector<std::size_t> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = i;
    return v;
}

// Layers serialize as {"rows", "cols", "W": [...row-major...], "b": [...]}.
inline nlohmann::json matrix_to_json(const DenseMatrix& m) {
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

inline DenseMatrix matrix_from_json(const nlohmann::json& j) {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto data = j.at("data").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(data.size()) != rows * cols) throw ParseError("matrix payload size mismatch");
    DenseMatrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[static_cast<std::size_t>(r * cols + c)];
    return m;
}

inline nlohmann::json layer_to_json(const DenseLayer& l) {
    return {{"W", matrix_to_json(l.W)}, {"b", std::vector<double>(l.b.data(), l.b.data() + l.b.size())}};
}

inline DenseLayer layer_from_json(const nlohmann::json& j) {
    DenseLayer l;
    l.W = matrix_from_json(j.at("W"));
    const auto b = j.at("b").get<std::vector<double>>();
    l.b = Eigen::Map<const Eigen::RowVectorXd>(b.data(), static_cast<Eigen::Index>(b.size()));
    return l;
}

}  // namespace docroute::nn

#endif  // DOCROUTE_CLASSIFIERS_NN_COMMON_HPP_
