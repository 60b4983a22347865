#ifndef DOCROUTE_CLASSIFIERS_SPEC_HPP_
#define DOCROUTE_CLASSIFIERS_SPEC_HPP_

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <json.hpp>

#include "../error.hpp"

namespace docroute {

enum class ClassifierKind { LR, NN, RF, SVM, SVAE };
enum class Penalty { l1, l2, elasticnet, none };
enum class Activation { logistic, tanh, relu, sigmoid };
enum class Kernel { rbf, linear };

inline const char* to_string(ClassifierKind k) {
    switch (k) {
        case ClassifierKind::LR: return "LR";
        case ClassifierKind::NN: return "NN";
        case ClassifierKind::RF: return "RF";
        case ClassifierKind::SVM: return "SVM";
        case ClassifierKind::SVAE: return "SVAE";
    }
    return "?";
}

inline ClassifierKind classifier_kind_from_string(const std::string& s) {
    std::string u;
    for (char c : s) u.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    if (u == "LR") return ClassifierKind::LR;
    if (u == "NN") return ClassifierKind::NN;
    if (u == "RF") return ClassifierKind::RF;
    if (u == "SVM") return ClassifierKind::SVM;
    if (u == "SVAE") return ClassifierKind::SVAE;
    throw InvalidArgument("unknown classifier kind \"" + s + "\"");
}

inline const char* to_string(Penalty p) {
    switch (p) {
        case Penalty::l1: return "l1";
        case Penalty::l2: return "l2";
        case Penalty::elasticnet: return "elasticnet";
        case Penalty::none: return "none";
    }
    return "?";
}

inline Penalty penalty_from_string(const std::string& s) {
    if (s == "l1") return Penalty::l1;
    if (s == "l2") return Penalty::l2;
    if (s == "elasticnet") return Penalty::elasticnet;
    if (s == "none" || s == "no") return Penalty::none;
    throw InvalidArgument("unknown penalty \"" + s + "\"");
}

inline const char* to_string(Activation a) {
    switch (a) {
        case Activation::logistic: return "logistic";
        case Activation::tanh: return "tanh";
        case Activation::relu: return "relu";
        case Activation::sigmoid: return "sigmoid";
    }
    return "?";
}

inline Activation activation_from_string(const std::string& s) {
    if (s == "logistic") return Activation::logistic;
    if (s == "tanh") return Activation::tanh;
    if (s == "relu") return Activation::relu;
    if (s == "sigmoid") return Activation::sigmoid;
    throw InvalidArgument("unknown activation \"" + s + "\"");
}

inline const char* to_string(Kernel k) { return k == Kernel::rbf ? "rbf" : "linear"; }

inline Kernel kernel_from_string(const std::string& s) {
    if (s == "rbf") return Kernel::rbf;
    if (s == "linear") return Kernel::linear;
    throw InvalidArgument("unknown kernel \"" + s + "\"");
}

// Hyperparameters per classifier. Ranges are those of the search space; the
// optimizer settings without a searched range (batch size, epoch caps of NN,
// SVAE learning rate) are fixed defaults.

struct LrParams {
    double C = 1.0;             // [1e-6, 100], inverse regularization strength
    Penalty penalty = Penalty::l2;
    double l1_ratio = 0.5;      // [0, 1], elastic-net mix
    double tol = 1e-4;          // [1e-6, 1e-2]
    int max_iter = 1000;
    bool operator==(const LrParams&) const = default;
};

struct NnParams {
    std::vector<int> hidden = {100};  // 1-3 layers, each [1, 500]
    Activation activation = Activation::relu;
    double learning_rate = 1e-3;      // [1e-6, 1e-2]
    double tol = 1e-4;                // [1e-6, 1e-2]
    int patience = 10;                // [1, 100]
    int max_epochs = 200;
    int batch_size = 32;
    bool operator==(const NnParams&) const = default;
};

struct RfParams {
    int n_trees = 100;    // [1, 1000]
    int max_depth = 1000;  // [1, 1000]
    bool operator==(const RfParams&) const = default;
};

struct SvmParams {
    double C = 1.0;       // [1e-6, 100]
    Kernel kernel = Kernel::rbf;
    double gamma = 1e-3;  // [1e-6, 1e-2]
    double tol = 1e-3;    // [1e-6, 1e-2]
    int max_iter = 1000;
    bool operator==(const SvmParams&) const = default;
};

struct SvaeParams {
    int layers = 1;                     // {1, 2, 3}
    int first_size = 100;               // [10, 500]
    std::vector<double> ratios = {0.5, 0.5};  // follow-up layer size / previous, [0.001, 0.9]
    double latent_ratio = 0.1;          // latent dim / first size, [0.001, 0.9]
    double weight_vae = 1.0;            // [1, 10]
    double weight_clf = 1.0;            // [1, 10]
    Activation activation = Activation::relu;
    double tol = 1e-4;                  // [1e-6, 1e-2]
    int patience = 10;                  // [1, 100]
    int max_epochs = 100;               // [1, 100]
    double learning_rate = 1e-3;
    int batch_size = 32;

    /// Encoder layer sizes derived from first size and ratios (each >= 1).
    std::vector<int> encoder_sizes() const {
        std::vector<int> s = {first_size};
        for (int i = 1; i < layers; ++i) {
            const double r = i - 1 < static_cast<int>(ratios.size()) ? ratios[static_cast<std::size_t>(i - 1)] : 0.5;
            s.push_back(std::max(1, static_cast<int>(std::lround(s.back() * r))));
        }
        return s;
    }

    int latent_dim() const { return std::max(1, static_cast<int>(std::lround(latent_ratio * first_size))); }

    bool operator==(const SvaeParams&) const = default;
};

/// A classifier choice with its hyperparameters; the variant index is the kind.
struct ClassifierSpec {
    std::variant<LrParams, NnParams, RfParams, SvmParams, SvaeParams> params;

    ClassifierKind kind() const { return static_cast<ClassifierKind>(params.index()); }
    bool operator==(const ClassifierSpec&) const = default;

    static ClassifierSpec defaults(ClassifierKind k) {
        switch (k) {
            case ClassifierKind::LR: return {LrParams{}};
            case ClassifierKind::NN: return {NnParams{}};
            case ClassifierKind::RF: return {RfParams{}};
            case ClassifierKind::SVM: return {SvmParams{}};
            case ClassifierKind::SVAE: return {SvaeParams{}};
        }
        throw InvalidArgument("unknown classifier kind");
    }

    void validate() const;
};

namespace detail {

inline void check_range(const char* name, double v, double lo, double hi) {
    if (!(v >= lo && v <= hi))
        throw InvalidArgument(std::string(name) + " = " + std::to_string(v) + " outside [" + std::to_string(lo) +
                              ", " + std::to_string(hi) + "]");
}

}  // namespace detail

/// Rejects values outside the search-space ranges.
inline void ClassifierSpec::validate() const {
    using detail::check_range;
    std::visit(
        [](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, LrParams>) {
                check_range("C", p.C, 1e-6, 100);
                check_range("l1_ratio", p.l1_ratio, 0, 1);
                check_range("tol", p.tol, 1e-6, 1e-2);
                if (p.max_iter < 1) throw InvalidArgument("max_iter must be >= 1");
            } else if constexpr (std::is_same_v<P, NnParams>) {
                if (p.hidden.empty() || p.hidden.size() > 3) throw InvalidArgument("NN needs 1 to 3 hidden layers");
                for (int h : p.hidden) check_range("hidden layer size", h, 1, 500);
                if (p.activation == Activation::sigmoid) throw InvalidArgument("NN activation must be logistic, tanh or relu");
                check_range("learning_rate", p.learning_rate, 1e-6, 1e-2);
                check_range("tol", p.tol, 1e-6, 1e-2);
                check_range("patience", p.patience, 1, 100);
                if (p.max_epochs < 1 || p.batch_size < 1) throw InvalidArgument("max_epochs and batch_size must be >= 1");
            } else if constexpr (std::is_same_v<P, RfParams>) {
                check_range("n_trees", p.n_trees, 1, 1000);
                check_range("max_depth", p.max_depth, 1, 1000);
            } else if constexpr (std::is_same_v<P, SvmParams>) {
                check_range("C", p.C, 1e-6, 100);
                check_range("gamma", p.gamma, 1e-6, 1e-2);
                check_range("tol", p.tol, 1e-6, 1e-2);
                if (p.max_iter < 1) throw InvalidArgument("max_iter must be >= 1");
            } else {
                check_range("layers", p.layers, 1, 3);
                check_range("first_size", p.first_size, 10, 500);
                for (std::size_t i = 0; i + 1 < static_cast<std::size_t>(p.layers); ++i) {
                    if (i >= p.ratios.size()) throw InvalidArgument("SVAE needs one ratio per follow-up layer");
                    check_range("layer ratio", p.ratios[i], 0.001, 0.9);
                }
                check_range("latent_ratio", p.latent_ratio, 0.001, 0.9);
                check_range("weight_vae", p.weight_vae, 1, 10);
                check_range("weight_clf", p.weight_clf, 1, 10);
                check_range("tol", p.tol, 1e-6, 1e-2);
                check_range("patience", p.patience, 1, 100);
                check_range("max_epochs", p.max_epochs, 1, 100);
                if (!(p.learning_rate > 0) || p.batch_size < 1) throw InvalidArgument("invalid SVAE optimizer settings");
            }
        },
        params);
}

// ---------------------------------------------------------------------------
// JSON form: {"kind": "LR", "C": ..., ...}

inline nlohmann::ordered_json to_json(const ClassifierSpec& spec) {
    nlohmann::ordered_json j;
    j["kind"] = to_string(spec.kind());
    std::visit(
        [&j](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, LrParams>) {
                j["C"] = p.C;
                j["penalty"] = to_string(p.penalty);
                j["l1_ratio"] = p.l1_ratio;
                j["tol"] = p.tol;
                j["max_iter"] = p.max_iter;
            } else if constexpr (std::is_same_v<P, NnParams>) {
                j["hidden"] = p.hidden;
                j["activation"] = to_string(p.activation);
                j["learning_rate"] = p.learning_rate;
                j["tol"] = p.tol;
                j["patience"] = p.patience;
                j["max_epochs"] = p.max_epochs;
                j["batch_size"] = p.batch_size;
            } else if constexpr (std::is_same_v<P, RfParams>) {
                j["n_trees"] = p.n_trees;
                j["max_depth"] = p.max_depth;
            } else if constexpr (std::is_same_v<P, SvmParams>) {
                j["C"] = p.C;
                j["kernel"] = to_string(p.kernel);
                j["gamma"] = p.gamma;
                j["tol"] = p.tol;
                j["max_iter"] = p.max_iter;
            } else {
                j["layers"] = p.layers;
                j["first_size"] = p.first_size;
                j["ratios"] = p.ratios;
                j["latent_ratio"] = p.latent_ratio;
                j["weight_vae"] = p.weight_vae;
                j["weight_clf"] = p.weight_clf;
                j["activation"] = to_string(p.activation);
                j["tol"] = p.tol;
                j["patience"] = p.patience;
                j["max_epochs"] = p.max_epochs;
                j["learning_rate"] = p.learning_rate;
                j["batch_size"] = p.batch_size;
            }
        },
        spec.params);
    return j;
}

inline ClassifierSpec classifier_spec_from_json(const nlohmann::json& j) {
    auto spec = ClassifierSpec::defaults(classifier_kind_from_string(j.at("kind").get<std::string>()));
    std::visit(
        [&j](auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, LrParams>) {
                p.C = j.value("C", p.C);
                if (j.contains("penalty")) p.penalty = penalty_from_string(j["penalty"].get<std::string>());
                p.l1_ratio = j.value("l1_ratio", p.l1_ratio);
                p.tol = j.value("tol", p.tol);
                p.max_iter = j.value("max_iter", p.max_iter);
            } else if constexpr (std::is_same_v<P, NnParams>) {
                if (j.contains("hidden")) p.hidden = j["hidden"].get<std::vector<int>>();
                if (j.contains("activation")) p.activation = activation_from_string(j["activation"].get<std::string>());
                p.learning_rate = j.value("learning_rate", p.learning_rate);
                p.tol = j.value("tol", p.tol);
                p.patience = j.value("patience", p.patience);
                p.max_epochs = j.value("max_epochs", p.max_epochs);
                p.batch_size = j.value("batch_size", p.batch_size);
            } else if constexpr (std::is_same_v<P, RfParams>) {
                p.n_trees = j.value("n_trees", p.n_trees);
                p.max_depth = j.value("max_depth", p.max_depth);
            } else if constexpr (std::is_same_v<P, SvmParams>) {
                p.C = j.value("C", p.C);
                if (j.contains("kernel")) p.kernel = kernel_from_string(j["kernel"].get<std::string>());
                p.gamma = j.value("gamma", p.gamma);
                p.tol = j.value("tol", p.tol);
                p.max_iter = j.value("max_iter", p.max_iter);
            } else {
                p.layers = j.value("layers", p.layers);
                p.first_size = j.value("first_size", p.first_size);
                if (j.contains("ratios")) p.ratios = j["ratios"].get<std::vector<double>>();
                p.latent_ratio = j.value("latent_ratio", p.latent_ratio);
                p.weight_vae = j.value("weight_vae", p.weight_vae);
                p.weight_clf = j.value("weight_clf", p.weight_clf);
                if (j.contains("activation")) p.activation = activation_from_string(j["activation"].get<std::string>());
                p.tol = j.value("tol", p.tol);
                p.patience = j.value("patience", p.patience);
                p.max_epochs = j.value("max_epochs", p.max_epochs);
                p.learning_rate = j.value("learning_rate", p.learning_rate);
                p.batch_size = j.value("batch_size", p.batch_size);
            }
        },
        spec.params);
    return spec;
}

}  // namespace docroute

#endif  // DOCROUTE_CLASSIFIERS_SPEC_HPP_
