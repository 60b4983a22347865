#ifndef DOCROUTE_CLASSIFIERS_SVM_HPP_
#define DOCROUTE_CLASSIFIERS_SVM_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "nn_common.hpp"
#include "spec.hpp"

namespace docroute {

/// One-vs-rest hinge-loss machines. Linear: f_c(x) = x w_c + b_c. RBF:
/// f_c(x) = sum_s coef(s, c) K(sv_s, x) over the stored support vectors.
struct SvmModel {
    Kernel kernel = Kernel::linear;
    double gamma = 0.0;
    DenseMatrix W;          // linear: features x classes
    Eigen::RowVectorXd b;   // linear: per-class bias
    CountMatrix support;    // rbf: support vectors, rows of the training matrix
    DenseMatrix coef;       // rbf: support x classes, alpha_i * y_i
    int iterations = 0;     // outer passes, summed over classes
};

namespace detail {

inline std::vector<double> row_sq_norms(const CountMatrix& x) {
    std::vector<double> n(static_cast<std::size_t>(x.rows()), 0.0);
    for (std::ptrdiff_t r = 0; r < x.outerSize(); ++r)
        for (CountMatrix::InnerIterator it(x, r); it; ++it) n[static_cast<std::size_t>(r)] += it.value() * it.value();
    return n;
}

inline double sparse_row_dot(const CountMatrix& a, std::ptrdiff_t i, const CountMatrix& b, std::ptrdiff_t j) {
    CountMatrix::InnerIterator p(a, i), q(b, j);
    double s = 0.0;
    while (p && q) {
        if (p.col() == q.col()) {
            s += p.value() * q.value();
            ++p;
            ++q;
        } else if (p.col() < q.col()) {
            ++p;
        } else {
            ++q;
        }
    }
    return s;
}

// Kernel rows are served from a full cache when it fits, else recomputed.
class RbfKernel {
public:
    static constexpr std::size_t kMaxCachedRows = 3000;

    RbfKernel(const CountMatrix& x, double gamma) : x_(x), gamma_(gamma), norms_(row_sq_norms(x)) {
        const auto n = static_cast<std::size_t>(x.rows());
        if (n <= kMaxCachedRows) {
            cache_.resize(n * n);
            for (std::size_t i = 0; i < n; ++i) {
                cache_[i * n + i] = 1.0;
                for (std::size_t j = 0; j < i; ++j) cache_[i * n + j] = cache_[j * n + i] = compute(i, j);
            }
        }
    }

    void row(std::size_t i, std::vector<double>& out) const {
        const auto n = static_cast<std::size_t>(x_.rows());
        out.resize(n);
        if (!cache_.empty()) {
            std::copy_n(cache_.begin() + static_cast<std::ptrdiff_t>(i * n), n, out.begin());
            return;
        }
        for (std::size_t j = 0; j < n; ++j) out[j] = i == j ? 1.0 : compute(i, j);
    }

private:
    double compute(std::size_t i, std::size_t j) const {
        const double d = norms_[i] + norms_[j] -
                         2.0 * sparse_row_dot(x_, static_cast<std::ptrdiff_t>(i), x_, static_cast<std::ptrdiff_t>(j));
        return std::exp(-gamma_ * std::max(d, 0.0));
    }

    const CountMatrix& x_;
    double gamma_;
    std::vector<double> norms_;
    std::vector<double> cache_;
};

// Projected gradient of the box-constrained dual at alpha in [0, C].
inline double projected_gradient(double g, double alpha, double C) {
    if (alpha <= 0.0) return std::min(g, 0.0);
    if (alpha >= C) return std::max(g, 0.0);
    return g;
}

}  // namespace detail

/// Dual coordinate descent on min 0.5 a^T Q a - 1^T a, 0 <= a <= C, with
/// Q_ij = y_i y_j (x_i x_j + 1). The bias is the weight of a constant feature.
/// A pass visits all coordinates in a seeded random order; training stops
/// when the projected-gradient spread of a pass drops below tol.
inline SvmModel train_linear_svm(const CountMatrix& x, const std::vector<int>& y, int n_classes, const SvmParams& p,
                                 std::uint64_t seed) {
    const auto n = y.size();
    const auto qii = detail::row_sq_norms(x);
    SvmModel m;
    m.kernel = Kernel::linear;
    m.W = DenseMatrix::Zero(x.cols(), n_classes);
    m.b = Eigen::RowVectorXd::Zero(n_classes);
    Rng rng(seed);
    auto order = nn::iota_rows(n);
    std::vector<double> alpha(n);
    for (int c = 0; c < n_classes; ++c) {
        std::fill(alpha.begin(), alpha.end(), 0.0);
        Eigen::VectorXd w = Eigen::VectorXd::Zero(x.cols());
        double bias = 0.0;
        for (int pass = 0; pass < p.max_iter; ++pass) {
            ++m.iterations;
            rng.shuffle(order);
            double pg_max = -std::numeric_limits<double>::infinity();
            double pg_min = std::numeric_limits<double>::infinity();
            for (auto i : order) {
                const double yi = y[i] == c ? 1.0 : -1.0;
                const auto row = static_cast<std::ptrdiff_t>(i);
                double wx = bias;
                for (CountMatrix::InnerIterator it(x, row); it; ++it) wx += w[it.col()] * it.value();
                const double g = yi * wx - 1.0;
                const double pg = detail::projected_gradient(g, alpha[i], p.C);
                pg_max = std::max(pg_max, pg);
                pg_min = std::min(pg_min, pg);
                if (pg == 0.0) continue;
                const double old = alpha[i];
                alpha[i] = std::clamp(old - g / (qii[i] + 1.0), 0.0, p.C);
                const double d = (alpha[i] - old) * yi;
                for (CountMatrix::InnerIterator it(x, row); it; ++it) w[it.col()] += d * it.value();
                bias += d;
            }
            if (pg_max - pg_min < p.tol) break;
        }
        m.W.col(c) = w;
        m.b[c] = bias;
    }
    return m;
}

/// Dual coordinate descent for the RBF kernel without a bias term. The
/// gradient G = Q a - 1 is kept up to date with one kernel row per step.
inline SvmModel train_rbf_svm(const CountMatrix& x, const std::vector<int>& y, int n_classes, const SvmParams& p,
                              std::uint64_t seed) {
    const auto n = y.size();
    const detail::RbfKernel kernel(x, p.gamma);
    Rng rng(seed);
    auto order = nn::iota_rows(n);
    DenseMatrix coef = DenseMatrix::Zero(static_cast<Eigen::Index>(n), n_classes);
    std::vector<double> alpha(n), grad(n), krow;
    SvmModel m;
    m.kernel = Kernel::rbf;
    m.gamma = p.gamma;
    for (int c = 0; c < n_classes; ++c) {
        std::fill(alpha.begin(), alpha.end(), 0.0);
        std::fill(grad.begin(), grad.end(), -1.0);
        for (int pass = 0; pass < p.max_iter; ++pass) {
            ++m.iterations;
            rng.shuffle(order);
            double pg_max = -std::numeric_limits<double>::infinity();
            double pg_min = std::numeric_limits<double>::infinity();
            for (auto i : order) {
                const double pg = detail::projected_gradient(grad[i], alpha[i], p.C);
                pg_max = std::max(pg_max, pg);
                pg_min = std::min(pg_min, pg);
                if (pg == 0.0) continue;
                const double old = alpha[i];
                alpha[i] = std::clamp(old - grad[i], 0.0, p.C);  // Q_ii = K(x, x) = 1
                const double d = alpha[i] - old;
                if (d == 0.0) continue;
                kernel.row(i, krow);
                const double yi = y[i] == c ? 1.0 : -1.0;
                for (std::size_t j = 0; j < n; ++j) grad[j] += d * yi * (y[j] == c ? 1.0 : -1.0) * krow[j];
            }
            if (pg_max - pg_min < p.tol) break;
        }
        for (std::size_t i = 0; i < n; ++i)
            coef(static_cast<Eigen::Index>(i), c) = alpha[i] * (y[i] == c ? 1.0 : -1.0);
    }
    std::vector<std::size_t> sv;
    for (std::size_t i = 0; i < n; ++i)
        if (coef.row(static_cast<Eigen::Index>(i)).cwiseAbs().maxCoeff() > 0.0) sv.push_back(i);
    m.support = nn::take_rows(x, sv);
    m.coef.resize(static_cast<Eigen::Index>(sv.size()), n_classes);
    for (std::size_t k = 0; k < sv.size(); ++k) m.coef.row(static_cast<Eigen::Index>(k)) = coef.row(static_cast<Eigen::Index>(sv[k]));
    return m;
}

inline SvmModel train_svm(const CountMatrix& x, const std::vector<int>& y, int n_classes, const SvmParams& p,
                          std::uint64_t seed) {
    return p.kernel == Kernel::linear ? train_linear_svm(x, y, n_classes, p, seed)
                                      : train_rbf_svm(x, y, n_classes, p, seed);
}

/// Samples x classes matrix of one-vs-rest decision values.
inline DenseMatrix svm_decision(const SvmModel& m, const CountMatrix& x) {
    if (m.kernel == Kernel::linear) {
        DenseMatrix f = x * m.W;
        return f.rowwise() + m.b;
    }
    const auto xn = detail::row_sq_norms(x);
    const auto sn = detail::row_sq_norms(m.support);
    DenseMatrix k(x.rows(), m.support.rows());
    for (std::ptrdiff_t i = 0; i < x.rows(); ++i)
        for (std::ptrdiff_t s = 0; s < m.support.rows(); ++s) {
            const double d = xn[static_cast<std::size_t>(i)] + sn[static_cast<std::size_t>(s)] -
                             2.0 * detail::sparse_row_dot(x, i, m.support, s);
            k(i, s) = std::exp(-m.gamma * std::max(d, 0.0));
        }
    return k * m.coef;
}

/// Softmax over decision values.
inline DenseMatrix predict_svm(const SvmModel& m, const CountMatrix& x) { return nn::softmax_rows(svm_decision(m, x)); }

}  // namespace docroute

#endif  // DOCROUTE_CLASSIFIERS_SVM_HPP_
