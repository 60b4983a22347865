#ifndef DOCROUTE_CLASSIFIERS_SVAE_HPP_
#define DOCROUTE_CLASSIFIERS_SVAE_HPP_

#include <cmath>
#include <limits>
#include <vector>

#include "nn_common.hpp"
#include "spec.hpp"

namespace docroute {

/// Supervised variational autoencoder.
///   encoder:    h = act(... act(x W1 + b1) ...)
///   latent:     mu = h Wmu + bmu, logvar = h Wlv + blv, z = mu + exp(logvar / 2) * eps
///   decoder:    mirrored hidden stack on z, linear output of input width
///   classifier: softmax(mu Wc + bc)
struct SvaeModel {
    std::vector<nn::DenseLayer> encoder;
    nn::DenseLayer mu;
    nn::DenseLayer logvar;
    std::vector<nn::DenseLayer> decoder;  // hidden..., output
    nn::DenseLayer classifier;
    Activation activation = Activation::relu;
    int epochs = 0;
    std::vector<double> kl_trace;  // KL term of every training batch

    /// All layers in a fixed order: encoder, mu, logvar, decoder, classifier.
    std::vector<nn::DenseLayer*> layers() {
        std::vector<nn::DenseLayer*> out;
        for (auto& l : encoder) out.push_back(&l);
        out.push_back(&mu);
        out.push_back(&logvar);
        for (auto& l : decoder) out.push_back(&l);
        out.push_back(&classifier);
        return out;
    }
};

/// Batch loss components, each a batch mean.
struct SvaeLoss {
    double reconstruction = 0.0;  // squared error summed over features
    double kl = 0.0;              // KL(q(z|x) || N(0, I))
    double cross_entropy = 0.0;
    double total = 0.0;           // w_vae (reconstruction + kl) + w_clf cross_entropy
};

/// Gradient in the order of SvaeModel::layers(). The first encoder layer's
/// weight gradient is row-sparse; rest[0] is the gradient of layers()[1].
struct SvaeGradient {
    nn::RowSparseGradient first_W;
    Eigen::RowVectorXd first_b;
    std::vector<nn::DenseLayer> rest;
};

inline SvaeModel init_svae(Eigen::Index n_features, int n_classes, const SvaeParams& p, Rng& rng) {
    SvaeModel m;
    m.activation = p.activation;
    const auto sizes = p.encoder_sizes();
    const int latent = p.latent_dim();
    Eigen::Index fan_in = n_features;
    for (int s : sizes) {
        m.encoder.push_back(nn::init_layer(fan_in, s, rng));
        fan_in = s;
    }
    m.mu = nn::init_layer(fan_in, latent, rng);
    m.logvar = nn::init_layer(fan_in, latent, rng);
    fan_in = latent;
    for (auto it = sizes.rbegin(); it != sizes.rend(); ++it) {
        m.decoder.push_back(nn::init_layer(fan_in, *it, rng));
        fan_in = *it;
    }
    m.decoder.push_back(nn::init_layer(fan_in, n_features, rng));
    m.classifier = nn::init_layer(latent, n_classes, rng);
    return m;
}

/// Loss of a batch for a given noise matrix eps (batch x latent) and, when
/// `grad` is non-null, its gradient with respect to every parameter.
inline SvaeLoss svae_loss_and_gradient(const SvaeModel& m, const CountMatrix& xb, const std::vector<int>& yb,
                                       const DenseMatrix& eps, double weight_vae, double weight_clf,
                                       SvaeGradient* grad) {
    const double n = static_cast<double>(yb.size());
    const std::size_t n_enc = m.encoder.size();
    std::vector<DenseMatrix> ez(n_enc), ea(n_enc);
    ez[0] = nn::affine(xb, m.encoder[0]);
    ea[0] = nn::activate(m.activation, ez[0]);
    for (std::size_t l = 1; l < n_enc; ++l) {
        ez[l] = nn::affine(ea[l - 1], m.encoder[l]);
        ea[l] = nn::activate(m.activation, ez[l]);
    }
    const DenseMatrix& h = ea.back();
    const DenseMatrix mu = nn::affine(h, m.mu);
    const DenseMatrix lv = nn::affine(h, m.logvar);
    const DenseMatrix sd = (0.5 * lv.array()).exp().matrix();
    const DenseMatrix z = mu + sd.cwiseProduct(eps);

    const std::size_t n_dec = m.decoder.size();  // hidden layers + output
    std::vector<DenseMatrix> dz(n_dec - 1), da(n_dec - 1);
    const DenseMatrix* input = &z;
    for (std::size_t l = 0; l + 1 < n_dec; ++l) {
        dz[l] = nn::affine(*input, m.decoder[l]);
        da[l] = nn::activate(m.activation, dz[l]);
        input = &da[l];
    }
    const DenseMatrix out = nn::affine(*input, m.decoder.back());
    const DenseMatrix diff = out - DenseMatrix(xb);
    const DenseMatrix probs = nn::softmax_rows(nn::affine(mu, m.classifier));

    SvaeLoss loss;
    loss.reconstruction = diff.squaredNorm() / n;
    loss.kl = -0.5 * (1.0 + lv.array() - mu.array().square() - lv.array().exp()).sum() / n;
    loss.cross_entropy = nn::cross_entropy(probs, yb);
    loss.total = weight_vae * (loss.reconstruction + loss.kl) + weight_clf * loss.cross_entropy;
    if (!grad) return loss;

    grad->rest.assign(n_enc - 1 + 2 + n_dec + 1, {});
    auto slot = [&](std::size_t layer_index) -> nn::DenseLayer& { return grad->rest[layer_index - 1]; };
    const std::size_t mu_index = n_enc, lv_index = n_enc + 1, dec_index = n_enc + 2, clf_index = n_enc + 2 + n_dec;

    // Decoder.
    DenseMatrix delta = diff * (2.0 * weight_vae / n);
    for (std::size_t l = n_dec; l-- > 0;) {
        const DenseMatrix& in = l == 0 ? z : da[l - 1];
        auto& g = slot(dec_index + l);
        g.W = in.transpose() * delta;
        g.b = delta.colwise().sum();
        delta = delta * m.decoder[l].W.transpose();
        if (l > 0) delta = delta.cwiseProduct(nn::activation_derivative(m.activation, dz[l - 1], da[l - 1]));
    }
    // delta is now dL/dz.

    const DenseMatrix dlogits = (probs - nn::one_hot(yb, probs.cols())) * (weight_clf / n);
    auto& gc = slot(clf_index);
    gc.W = mu.transpose() * dlogits;
    gc.b = dlogits.colwise().sum();

    const DenseMatrix dmu = delta + mu * (weight_vae / n) + dlogits * m.classifier.W.transpose();
    const DenseMatrix dlv = (delta.cwiseProduct(eps).cwiseProduct(sd) * 0.5).array() +
                            (lv.array().exp() - 1.0) * (0.5 * weight_vae / n);
    auto& gmu = slot(mu_index);
    gmu.W = h.transpose() * dmu;
    gmu.b = dmu.colwise().sum();
    auto& glv = slot(lv_index);
    glv.W = h.transpose() * dlv;
    glv.b = dlv.colwise().sum();

    // Encoder.
    delta = (dmu * m.mu.W.transpose() + dlv * m.logvar.W.transpose())
                .cwiseProduct(nn::activation_derivative(m.activation, ez[n_enc - 1], ea[n_enc - 1]));
    for (std::size_t l = n_enc - 1; l >= 1; --l) {
        auto& g = slot(l);
        g.W = ea[l - 1].transpose() * delta;
        g.b = delta.colwise().sum();
        delta = (delta * m.encoder[l].W.transpose())
                    .cwiseProduct(nn::activation_derivative(m.activation, ez[l - 1], ea[l - 1]));
    }
    grad->first_W = nn::sparse_weight_gradient(xb, delta);
    grad->first_b = delta.colwise().sum();
    return loss;
}

/// Class probabilities from the latent mean; no sampling.
inline DenseMatrix predict_svae(const SvaeModel& m, const CountMatrix& x) {
    DenseMatrix h = nn::activate(m.activation, nn::affine(x, m.encoder[0]));
    for (std::size_t l = 1; l < m.encoder.size(); ++l) h = nn::activate(m.activation, nn::affine(h, m.encoder[l]));
    return nn::softmax_rows(nn::affine(nn::affine(h, m.mu), m.classifier));
}

/// Mini-batch gradient descent at a constant learning rate with the same
/// early-stopping rule as the MLP. Every batch's KL term is appended to
/// kl_trace.
inline SvaeModel train_svae(const CountMatrix& x, const std::vector<int>& y, int n_classes, const SvaeParams& p,
                            std::uint64_t seed) {
    Rng rng(seed);
    SvaeModel m = init_svae(x.cols(), n_classes, p, rng);
    SvaeModel best = m;
    double best_loss = std::numeric_limits<double>::infinity();
    int stale = 0;
    auto order = nn::iota_rows(y.size());
    const auto batch = static_cast<std::size_t>(p.batch_size);
    const Eigen::Index latent = m.mu.fan_out();
    SvaeGradient g;
    std::vector<double> kl_trace;
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
            DenseMatrix eps(static_cast<Eigen::Index>(rows.size()), latent);
            for (Eigen::Index j = 0; j < eps.cols(); ++j)
                for (Eigen::Index i = 0; i < eps.rows(); ++i) eps(i, j) = rng.normal();
            const auto loss = svae_loss_and_gradient(m, nn::take_rows(x, rows), yb, eps, p.weight_vae, p.weight_clf, &g);
            kl_trace.push_back(loss.kl);
            epoch_loss += loss.total * static_cast<double>(rows.size());
            nn::apply_sparse_update(m.encoder[0].W, g.first_W, p.learning_rate);
            m.encoder[0].b -= p.learning_rate * g.first_b;
            auto layers = m.layers();
            for (std::size_t l = 1; l < layers.size(); ++l) {
                layers[l]->W -= p.learning_rate * g.rest[l - 1].W;
                layers[l]->b -= p.learning_rate * g.rest[l - 1].b;
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
    best.kl_trace = std::move(kl_trace);
    return best;
}

}  // namespace docroute

#endif  // DOCROUTE_CLASSIFIERS_SVAE_HPP_
