#ifndef DOCROUTE_CLASSIFIERS_LOGISTIC_HPP_
#define DOCROUTE_CLASSIFIERS_LOGISTIC_HPP_

#include <cmath>
#include <vector>

#include "nn_common.hpp"
#include "spec.hpp"

namespace docroute {

/// Multinomial logistic regression: P(c | x) = softmax(x W + b).
struct LogisticModel {
    DenseMatrix W;  // features x classes
    Eigen::RowVectorXd b;
    int iterations = 0;
};

namespace detail {

struct LrPenaltyWeights {
    double l1 = 0.0;  // coefficient of ||W||_1
    double l2 = 0.0;  // coefficient of 0.5 ||W||_2^2
};

// Objective: mean cross-entropy + (1 / (C n)) * R(W). The bias is not penalized.
inline LrPenaltyWeights lr_penalty_weights(const LrParams& p, std::size_t n) {
    const double scale = 1.0 / (p.C * static_cast<double>(n));
    switch (p.penalty) {
        case Penalty::l1: return {scale, 0.0};
        case Penalty::l2: return {0.0, scale};
        case Penalty::elasticnet: return {scale * p.l1_ratio, scale * (1.0 - p.l1_ratio)};
        case Penalty::none: return {};
    }
    return {};
}

template <class Matrix>
double lr_smooth_loss(const Matrix& x, const DenseMatrix& y1h, const DenseMatrix& w, const Eigen::RowVectorXd& b,
                      double l2, DenseMatrix* probs_out) {
    DenseMatrix logits = x * w;
    logits.rowwise() += b;
    DenseMatrix probs = nn::softmax_rows(logits);
    double ce = 0.0;
    for (Eigen::Index i = 0; i < y1h.rows(); ++i) {
        Eigen::Index c;
        y1h.row(i).maxCoeff(&c);
        ce -= std::log(std::max(probs(i, c), 1e-300));
    }
    ce /= static_cast<double>(y1h.rows());
    if (probs_out) *probs_out = std::move(probs);
    return ce + 0.5 * l2 * w.squaredNorm();
}

inline DenseMatrix soft_threshold(const DenseMatrix& w, double t) {
    return w.unaryExpr([t](double v) { return v > t ? v - t : (v < -t ? v + t : 0.0); });
}

}  // namespace detail

/// Proximal gradient descent with backtracking: the step halves until the
/// quadratic upper bound holds, and grows again after every accepted step.
/// Stops when the relative objective decrease falls below tol.
template <class Matrix>
LogisticModel train_logistic(const Matrix& x, const std::vector<int>& y, int n_classes, const LrParams& p) {
    const std::size_t n = y.size();
    const auto pw = detail::lr_penalty_weights(p, n);
    const DenseMatrix y1h = nn::one_hot(y, n_classes);

    LogisticModel m;
    m.W = DenseMatrix::Zero(x.cols(), n_classes);
    m.b = Eigen::RowVectorXd::Zero(n_classes);

    auto objective = [&](double smooth, const DenseMatrix& w) { return smooth + pw.l1 * w.cwiseAbs().sum(); };

    DenseMatrix probs;
    double smooth = detail::lr_smooth_loss(x, y1h, m.W, m.b, pw.l2, &probs);
    double f = objective(smooth, m.W);
    // 1/L for the softmax curvature bound 0.5 * (mean ||x||^2 + 1), bias included.
    const double lipschitz = 0.5 * (x.squaredNorm() / static_cast<double>(n) + 1.0) + pw.l2;
    double step = 1.0 / lipschitz;
    for (int iter = 0; iter < p.max_iter; ++iter) {
        const DenseMatrix resid = (probs - y1h) / static_cast<double>(n);
        const DenseMatrix gw = DenseMatrix(x.transpose() * resid) + pw.l2 * m.W;
        const Eigen::RowVectorXd gb = resid.colwise().sum();

        bool accepted = false;
        DenseMatrix w_new, probs_new;
        Eigen::RowVectorXd b_new;
        double smooth_new = 0.0;
        for (int ls = 0; ls < 60; ++ls) {
            w_new = detail::soft_threshold(m.W - step * gw, step * pw.l1);
            b_new = m.b - step * gb;
            smooth_new = detail::lr_smooth_loss(x, y1h, w_new, b_new, pw.l2, &probs_new);
            const DenseMatrix dw = w_new - m.W;
            const Eigen::RowVectorXd db = b_new - m.b;
            const double bound = smooth + (gw.cwiseProduct(dw)).sum() + gb.dot(db) +
                                 (dw.squaredNorm() + db.squaredNorm()) / (2.0 * step);
            if (smooth_new <= bound + 1e-15 * std::abs(bound)) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        m.iterations = iter + 1;
        if (!accepted) break;
        const double f_new = objective(smooth_new, w_new);
        m.W = std::move(w_new);
        m.b = std::move(b_new);
        probs = std::move(probs_new);
        smooth = smooth_new;
        const double decrease = f - f_new;
        f = f_new;
        if (decrease >= 0 && decrease <= p.tol * std::max(1.0, std::abs(f))) break;
        step *= 2.0;
    }
    return m;
}

template <class Matrix>
DenseMatrix predict_logistic(const LogisticModel& m, const Matrix& x) {
    DenseMatrix logits = x * m.W;
    logits.rowwise() += m.b;
    return nn::softmax_rows(logits);
}

}  // namespace docroute

#endif  // DOCROUTE_CLASSIFIERS_LOGISTIC_HPP_
