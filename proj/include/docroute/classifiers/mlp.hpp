#ifndef DOCROUTE_CLASSIFIERS_MLP_HPP_
#define DOCROUTE_CLASSIFIERS_MLP_HPP_

#include <limits>
#include <vector>

#include "nn_common.hpp"
#include "spec.hpp"

namespace docroute {

/// Feed-forward network: hidden layers with a shared activation, softmax output.
struct MlpModel {
    std::vector<nn::DenseLayer> layers;  // hidden..., output
    Activation activation = Activation::relu;
    int epochs = 0;
};

/// Gradient in the shape of MlpModel::layers. The first layer's weight
/// gradient is row-sparse (only columns present in the batch).
struct MlpGradient {
    nn::RowSparseGradient first_W;
    Eigen::RowVectorXd first_b;
    std::vector<nn::DenseLayer> rest;  // layers 1..L
};

inline MlpModel init_mlp(Eigen::Index n_features, int n_classes, const NnParams& p, Rng& rng) {
    MlpModel m;
    m.activation = p.activation;
    Eigen::Index fan_in = n_features;
    for (int h : p.hidden) {
        m.layers.push_back(nn::init_layer(fan_in, h, rng));
        fan_in = h;
    }
    m.layers.push_back(nn::init_layer(fan_in, n_classes, rng));
    return m;
}

/// Mean cross-entropy of a batch and, when `grad` is non-null, its gradient.
inline double mlp_loss_and_gradient(const MlpModel& m, const CountMatrix& xb, const std::vector<int>& yb,
                                    MlpGradient* grad) {
    const std::size_t n_layers = m.layers.size();
    std::vector<DenseMatrix> z(n_layers), a(n_layers);
    z[0] = nn::affine(xb, m.layers[0]);
    for (std::size_t l = 0; l + 1 < n_layers; ++l) {
        a[l] = nn::activate(m.activation, z[l]);
        z[l + 1] = nn::affine(a[l], m.layers[l + 1]);
    }
    const DenseMatrix probs = nn::softmax_rows(z.back());
    const double loss = nn::cross_entropy(probs, yb);
    if (!grad) return loss;

    const double inv_n = 1.0 / static_cast<double>(yb.size());
    DenseMatrix delta = (probs - nn::one_hot(yb, probs.cols())) * inv_n;
    grad->rest.assign(n_layers - 1, {});
    for (std::size_t l = n_layers - 1; l >= 1; --l) {
        auto& g = grad->rest[l - 1];
        g.W = a[l - 1].transpose() * delta;
        g.b = delta.colwise().sum();
        delta = (delta * m.layers[l].W.transpose()).cwiseProduct(nn::activation_derivative(m.activation, z[l - 1], a[l - 1]));
    }
    grad->first_W = nn::sparse_weight_gradient(xb, delta);
    grad->first_b = delta.colwise().sum();
    return loss;
}

inline DenseMatrix predict_mlp(const MlpModel& m, const CountMatrix& x) {
    DenseMatrix h = nn::affine(x, m.layers[0]);
    for (std::size_t l = 1; l < m.layers.size(); ++l) h = nn::affine(nn::activate(m.activation, h), m.layers[l]);
    return nn::softmax_rows(h);
}

/// Mini-batch gradient descent with a constant learning rate. Training stops
/// once the epoch loss has failed to improve on the best loss by `tol` for
/// `patience` consecutive epochs; the best-epoch parameters are returned.
inline MlpModel train_mlp(const CountMatrix& x, const std::vector<int>& y, int n_classes, const NnParams& p,
                          std::uint64_t seed) {
    Rng rng(seed);
    MlpModel m = init_mlp(x.cols(), n_classes, p, rng);
    MlpModel best = m;
    double best_loss = std::numeric_limits<double>::infinity();
    int stale = 0;
    auto order = nn::iota_rows(y.size());
    const auto batch = static_cast<std::size_t>(p.batch_size);
    MlpGradient g;
    for (int epoch = 0; epoch < p.max_epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t stop = std::min(order.size(), start + batch);
            std::vector<std::size_t> rows(order.begin() + static_cast<std::ptrdiff_t>(start),
                                          order.begin() + static_cast<std::ptrdiff_t>(stop));
            std::vector<int> yb;
            yb.reserve(rows.size());
            for (auto r : rows) yb.push_back(y[r]);
            const double loss = mlp_loss_and_gradient(m, nn::take_rows(x, rows), yb, &g);
            epoch_loss += loss * static_cast<double>(rows.size());
            nn::apply_sparse_update(m.layers[0].W, g.first_W, p.learning_rate);
            m.layers[0].b -= p.learning_rate * g.first_b;
            for (std::size_t l = 1; l < m.layers.size(); ++l) {
                m.layers[l].W -= p.learning_rate * g.rest[l - 1].W;
                m.layers[l].b -= p.learning_rate * g.rest[l - 1].b;
            }
        }
        epoch_loss /= static_cast<double>(order.size());
        m.epochs = epoch + 1;
        if (!std::isfinite(epoch_loss)) break;
        if (epoch_loss > best_loss - p.tol) {
            ++stale;
        } else {
            stale = 0;
        }
        if (epoch_loss < best_loss) {
            best_loss = epoch_loss;
            best = m;
        }
        if (stale >= p.patience) break;
    }
    best.epochs = m.epochs;
    return best;
}

}  // namespace docroute

#endif  // DOCROUTE_CLASSIFIERS_MLP_HPP_
