#ifndef DOCROUTE_CLASSIFIERS_CLASSIFIER_HPP_
#define DOCROUTE_CLASSIFIERS_CLASSIFIER_HPP_

#include <cmath>
#include <fstream>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "../error.hpp"
#include "forest.hpp"
#include "logistic.hpp"
#include "mlp.hpp"
#include "spec.hpp"
#include "svae.hpp"
#include "svm.hpp"

namespace docroute {

inline constexpr int kModelFormatVersion = 1;

/// A fitted classifier. Internally classes are renumbered 0..k-1 over the
/// labels seen in training; `classes` maps them back to the caller's indices.
struct TrainedModel {
    ClassifierSpec spec;
    std::uint64_t seed = 0;
    std::vector<int> classes;
    int n_classes = 0;
    Eigen::Index n_features = 0;
    std::variant<LogisticModel, MlpModel, ForestModel, SvmModel, SvaeModel> model;

    ClassifierKind kind() const { return spec.kind(); }
};

namespace detail {

inline void check_finite(const CountMatrix& x) {
    for (std::ptrdiff_t i = 0; i < x.nonZeros(); ++i)
        if (!std::isfinite(x.valuePtr()[i])) throw InvalidArgument("feature matrix contains non-finite values");
}

}  // namespace detail

/// Fits `spec` to rows of x with labels y in [0, n_classes). Deterministic in
/// (spec, x, y, seed); `workers` only parallelizes random-forest trees.
inline TrainedModel train(const ClassifierSpec& spec, const CountMatrix& x, const std::vector<int>& y, int n_classes,
                          std::uint64_t seed, std::size_t workers = 1) {
    spec.validate();
    if (x.rows() == 0) throw InvalidArgument("training matrix is empty");
    if (static_cast<std::size_t>(x.rows()) != y.size())
        throw DimensionMismatch("training matrix has " + std::to_string(x.rows()) + " rows but " +
                                std::to_string(y.size()) + " labels");
    detail::check_finite(x);

    TrainedModel tm;
    tm.spec = spec;
    tm.seed = seed;
    tm.n_classes = n_classes;
    tm.n_features = x.cols();
    std::map<int, int> compact;
    for (int label : y) {
        if (label < 0 || label >= n_classes) throw InvalidArgument("label " + std::to_string(label) + " out of range");
        compact.emplace(label, 0);
    }
    if (compact.size() < 2) throw InvalidArgument("training labels contain a single class");
    for (auto& [label, idx] : compact) {
        idx = static_cast<int>(tm.classes.size());
        tm.classes.push_back(label);
    }
    std::vector<int> yc(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) yc[i] = compact[y[i]];
    const int k = static_cast<int>(tm.classes.size());

    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, LrParams>) {
                tm.model = train_logistic(x, yc, k, p);
            } else if constexpr (std::is_same_v<P, NnParams>) {
                tm.model = train_mlp(x, yc, k, p, seed);
            } else if constexpr (std::is_same_v<P, RfParams>) {
                tm.model = train_forest(x, yc, k, p, seed, workers);
            } else if constexpr (std::is_same_v<P, SvmParams>) {
                tm.model = train_svm(x, yc, k, p, seed);
            } else {
                tm.model = train_svae(x, yc, k, p, seed);
            }
        },
        spec.params);
    return tm;
}

/// Samples x n_classes probabilities; classes unseen in training get 0.
inline DenseMatrix predict_proba(const TrainedModel& tm, const CountMatrix& x) {
    if (x.cols() != tm.n_features)
        throw DimensionMismatch("model expects " + std::to_string(tm.n_features) + " features, got " +
                                std::to_string(x.cols()));
    const DenseMatrix p = std::visit(
        [&](const auto& m) -> DenseMatrix {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, LogisticModel>) return predict_logistic(m, x);
            else if constexpr (std::is_same_v<M, MlpModel>) return predict_mlp(m, x);
            else if constexpr (std::is_same_v<M, ForestModel>) return predict_forest(m, x);
            else if constexpr (std::is_same_v<M, SvmModel>) return predict_svm(m, x);
            else return predict_svae(m, x);
        },
        tm.model);
    DenseMatrix out = DenseMatrix::Zero(x.rows(), tm.n_classes);
    for (std::size_t c = 0; c < tm.classes.size(); ++c) out.col(tm.classes[c]) = p.col(static_cast<Eigen::Index>(c));
    return out;
}

/// Row-wise argmax, lowest index on ties.
inline std::vector<int> argmax_rows(const DenseMatrix& p) {
    std::vector<int> out(static_cast<std::size_t>(p.rows()));
    for (Eigen::Index r = 0; r < p.rows(); ++r) {
        Eigen::Index c = 0;
        for (Eigen::Index j = 1; j < p.cols(); ++j)
            if (p(r, j) > p(r, c)) c = j;
        out[static_cast<std::size_t>(r)] = static_cast<int>(c);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Model files: JSON documents
//   {"format": "docroute-model", "version": 1, "kind", "spec", "seed",
//    "classes", "n_classes", "n_features", "params": {...kind-specific...}}
// Matrices are {"rows", "cols", "data"} with row-major data.

namespace detail {

inline nlohmann::json sparse_to_json(const CountMatrix& m) {
    std::vector<std::ptrdiff_t> outer(m.outerIndexPtr(), m.outerIndexPtr() + m.outerSize() + 1);
    std::vector<std::ptrdiff_t> inner(m.innerIndexPtr(), m.innerIndexPtr() + m.nonZeros());
    std::vector<double> values(m.valuePtr(), m.valuePtr() + m.nonZeros());
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"outer", outer}, {"inner", inner}, {"values", values}};
}

inline CountMatrix sparse_from_json(const nlohmann::json& j) {
    const auto rows = j.at("rows").get<std::ptrdiff_t>();
    const auto cols = j.at("cols").get<std::ptrdiff_t>();
    const auto outer = j.at("outer").get<std::vector<std::ptrdiff_t>>();
    const auto inner = j.at("inner").get<std::vector<std::ptrdiff_t>>();
    const auto values = j.at("values").get<std::vector<double>>();
    if (static_cast<std::ptrdiff_t>(outer.size()) != rows + 1 || inner.size() != values.size())
        throw ParseError("malformed sparse matrix");
    std::vector<Eigen::Triplet<double, std::ptrdiff_t>> t;
    for (std::ptrdiff_t r = 0; r < rows; ++r)
        for (auto k = outer[static_cast<std::size_t>(r)]; k < outer[static_cast<std::size_t>(r + 1)]; ++k)
            t.emplace_back(r, inner[static_cast<std::size_t>(k)], values[static_cast<std::size_t>(k)]);
    CountMatrix m(rows, cols);
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

inline std::vector<double> row_vector(const Eigen::RowVectorXd& v) { return {v.data(), v.data() + v.size()}; }

inline Eigen::RowVectorXd row_vector(const nlohmann::json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::RowVectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline nlohmann::json layers_to_json(const std::vector<nn::DenseLayer>& layers) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& l : layers) a.push_back(nn::layer_to_json(l));
    return a;
}

inline std::vector<nn::DenseLayer> layers_from_json(const nlohmann::json& j) {
    std::vector<nn::DenseLayer> out;
    for (const auto& l : j) out.push_back(nn::layer_from_json(l));
    return out;
}

inline nlohmann::json params_to_json(const LogisticModel& m) {
    return {{"W", nn::matrix_to_json(m.W)}, {"b", row_vector(m.b)}, {"iterations", m.iterations}};
}

inline nlohmann::json params_to_json(const MlpModel& m) {
    return {{"activation", to_string(m.activation)}, {"layers", layers_to_json(m.layers)}, {"epochs", m.epochs}};
}

inline nlohmann::json params_to_json(const ForestModel& f) {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : f.trees) {
        nlohmann::json nodes = nlohmann::json::array();
        for (const auto& n : t.nodes) {
            if (n.feature < 0) {
                nodes.push_back({{"depth", n.depth}, {"distribution", n.distribution}});
            } else {
                nodes.push_back({{"depth", n.depth},
                                 {"feature", n.feature},
                                 {"threshold", n.threshold},
                                 {"left", n.left},
                                 {"right", n.right}});
            }
        }
        trees.push_back(std::move(nodes));
    }
    return {{"n_classes", f.n_classes}, {"trees", std::move(trees)}};
}

inline nlohmann::json params_to_json(const SvmModel& m) {
    nlohmann::json j = {{"kernel", to_string(m.kernel)}, {"iterations", m.iterations}};
    if (m.kernel == Kernel::linear) {
        j["W"] = nn::matrix_to_json(m.W);
        j["b"] = row_vector(m.b);
    } else {
        j["gamma"] = m.gamma;
        j["support"] = sparse_to_json(m.support);
        j["coef"] = nn::matrix_to_json(m.coef);
    }
    return j;
}

inline nlohmann::json params_to_json(const SvaeModel& m) {
    return {{"activation", to_string(m.activation)},
            {"encoder", layers_to_json(m.encoder)},
            {"mu", nn::layer_to_json(m.mu)},
            {"logvar", nn::layer_to_json(m.logvar)},
            {"decoder", layers_to_json(m.decoder)},
            {"classifier", nn::layer_to_json(m.classifier)},
            {"epochs", m.epochs}};
}

inline LogisticModel logistic_from_json(const nlohmann::json& j) {
    LogisticModel m;
    m.W = nn::matrix_from_json(j.at("W"));
    m.b = row_vector(j.at("b"));
    m.iterations = j.at("iterations").get<int>();
    return m;
}

inline MlpModel mlp_from_json(const nlohmann::json& j) {
    MlpModel m;
    m.activation = activation_from_string(j.at("activation").get<std::string>());
    m.layers = layers_from_json(j.at("layers"));
    m.epochs = j.at("epochs").get<int>();
    return m;
}

inline ForestModel forest_from_json(const nlohmann::json& j) {
    ForestModel f;
    f.n_classes = j.at("n_classes").get<int>();
    for (const auto& jt : j.at("trees")) {
        DecisionTree t;
        for (const auto& jn : jt) {
            DecisionTree::Node n;
            n.depth = jn.at("depth").get<int>();
            if (jn.contains("distribution")) {
                n.distribution = jn["distribution"].get<std::vector<double>>();
            } else {
                n.feature = jn.at("feature").get<int>();
                n.threshold = jn.at("threshold").get<double>();
                n.left = jn.at("left").get<int>();
                n.right = jn.at("right").get<int>();
            }
            t.nodes.push_back(std::move(n));
        }
        f.trees.push_back(std::move(t));
    }
    return f;
}

inline SvmModel svm_from_json(const nlohmann::json& j) {
    SvmModel m;
    m.kernel = kernel_from_string(j.at("kernel").get<std::string>());
    m.iterations = j.at("iterations").get<int>();
    if (m.kernel == Kernel::linear) {
        m.W = nn::matrix_from_json(j.at("W"));
        m.b = row_vector(j.at("b"));
    } else {
        m.gamma = j.at("gamma").get<double>();
        m.support = sparse_from_json(j.at("support"));
        m.coef = nn::matrix_from_json(j.at("coef"));
    }
    return m;
}

inline SvaeModel svae_from_json(const nlohmann::json& j) {
    SvaeModel m;
    m.activation = activation_from_string(j.at("activation").get<std::string>());
    m.encoder = layers_from_json(j.at("encoder"));
    m.mu = nn::layer_from_json(j.at("mu"));
    m.logvar = nn::layer_from_json(j.at("logvar"));
    m.decoder = layers_from_json(j.at("decoder"));
    m.classifier = nn::layer_from_json(j.at("classifier"));
    m.epochs = j.at("epochs").get<int>();
    return m;
}

}  // namespace detail

inline nlohmann::json to_json(const TrainedModel& tm) {
    nlohmann::json j;
    j["format"] = "docroute-model";
    j["version"] = kModelFormatVersion;
    j["kind"] = to_string(tm.kind());
    j["spec"] = to_json(tm.spec);
    j["seed"] = tm.seed;
    j["classes"] = tm.classes;
    j["n_classes"] = tm.n_classes;
    j["n_features"] = tm.n_features;
    j["params"] = std::visit([](const auto& m) { return detail::params_to_json(m); }, tm.model);
    return j;
}

inline TrainedModel trained_model_from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "docroute-model") throw ParseError("not a docroute model file");
    if (j.value("version", 0) != kModelFormatVersion)
        throw ParseError("unsupported model format version " + std::to_string(j.value("version", 0)));
    TrainedModel tm;
    tm.spec = classifier_spec_from_json(j.at("spec"));
    tm.seed = j.at("seed").get<std::uint64_t>();
    tm.classes = j.at("classes").get<std::vector<int>>();
    tm.n_classes = j.at("n_classes").get<int>();
    tm.n_features = j.at("n_features").get<Eigen::Index>();
    const auto& p = j.at("params");
    switch (tm.spec.kind()) {
        case ClassifierKind::LR: tm.model = detail::logistic_from_json(p); break;
        case ClassifierKind::NN: tm.model = detail::mlp_from_json(p); break;
        case ClassifierKind::RF: tm.model = detail::forest_from_json(p); break;
        case ClassifierKind::SVM: tm.model = detail::svm_from_json(p); break;
        case ClassifierKind::SVAE: tm.model = detail::svae_from_json(p); break;
    }
    return tm;
}

inline void save_model(const std::string& path, const TrainedModel& tm) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write model file " + path);
    out << to_json(tm).dump() << '\n';
}

inline TrainedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open model file " + path);
    try {
        return trained_model_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("invalid model file " + path + ": " + e.what());
    }
}

}  // namespace docroute

#endif  // DOCROUTE_CLASSIFIERS_CLASSIFIER_HPP_
