#ifndef DOCROUTE_PRESETS_HPP_
#define DOCROUTE_PRESETS_HPP_

#include <string>
#include <vector>

#include <json.hpp>

#include "classifiers/spec.hpp"
#include "error.hpp"

namespace docroute {

// Best hyperparameters per (base, pipeline, classifier) found by the original
// search. Unlisted settings keep their defaults; an SVAE with a second-layer
// ratio has two encoder layers, otherwise one.
inline const nlohmann::json& preset_table() {
    static const nlohmann::json table = nlohmann::json::parse(R"({
  "seg-p1-svae": {"kind": "SVAE", "activation": "tanh", "first_size": 500, "latent_ratio": 8.33e-2, "patience": 1, "layers": 1, "weight_clf": 10, "weight_vae": 1, "tol": 1e-2},
  "seg-p2-svae": {"kind": "SVAE", "activation": "tanh", "first_size": 286, "latent_ratio": 73.6e-2, "patience": 1, "layers": 2, "ratios": [78.1e-2], "weight_clf": 10, "weight_vae": 2.78, "tol": 8.8e-5},
  "seg-p3-svae": {"kind": "SVAE", "activation": "tanh", "first_size": 469, "latent_ratio": 5.86e-2, "patience": 63, "layers": 1, "weight_clf": 10, "weight_vae": 1, "tol": 1.15e-4},
  "seg-p4-svae": {"kind": "SVAE", "activation": "sigmoid", "first_size": 500, "latent_ratio": 27.9e-2, "patience": 1, "layers": 1, "weight_clf": 10, "weight_vae": 1, "tol": 1e-2},
  "doc-p1-svae": {"kind": "SVAE", "activation": "tanh", "first_size": 241, "latent_ratio": 25.0e-2, "patience": 70, "layers": 2, "ratios": [59.6e-2], "weight_clf": 4.45, "weight_vae": 5.24, "tol": 1.5e-5},
  "doc-p2-svae": {"kind": "SVAE", "activation": "tanh", "first_size": 155, "latent_ratio": 44.5e-2, "patience": 55, "layers": 1, "weight_clf": 9.70, "weight_vae": 1, "tol": 6.61e-4},
  "doc-p3-svae": {"kind": "SVAE", "activation": "sigmoid", "first_size": 468, "latent_ratio": 21.2e-2, "patience": 84, "layers": 2, "ratios": [35.5e-2], "weight_clf": 7.90, "weight_vae": 1, "tol": 2.79e-3},
  "doc-p4-svae": {"kind": "SVAE", "activation": "relu", "first_size": 500, "latent_ratio": 6.75e-2, "patience": 36, "layers": 2, "ratios": [0.9], "weight_clf": 9.30, "weight_vae": 1, "tol": 2e-6},

  "seg-p1-lr": {"kind": "LR", "C": 14.2, "penalty": "none", "tol": 9.07e-3},
  "seg-p2-lr": {"kind": "LR", "C": 8.75e-3, "penalty": "l1", "tol": 5.7e-4},
  "seg-p3-lr": {"kind": "LR", "C": 9.16e-4, "penalty": "none", "tol": 9.5e-4},
  "seg-p4-lr": {"kind": "LR", "C": 6.89, "penalty": "none", "tol": 2.9e-4},
  "doc-p1-lr": {"kind": "LR", "C": 8.86e-3, "penalty": "none", "tol": 1.9e-5},
  "doc-p2-lr": {"kind": "LR", "C": 66.60, "penalty": "l1", "tol": 1e-6},
  "doc-p3-lr": {"kind": "LR", "C": 100, "penalty": "none", "tol": 1e-6},
  "doc-p4-lr": {"kind": "LR", "C": 100, "penalty": "l2", "tol": 1.40e-4},

  "seg-p1-nn": {"kind": "NN", "activation": "logistic", "hidden": [383], "learning_rate": 6.6e-5, "patience": 43, "tol": 9.07e-4},
  "seg-p2-nn": {"kind": "NN", "activation": "logistic", "hidden": [286], "learning_rate": 1e-6, "patience": 100, "tol": 1.2e-5},
  "seg-p3-nn": {"kind": "NN", "activation": "tanh", "hidden": [236, 139, 347], "learning_rate": 4.44e-4, "patience": 39, "tol": 7.6e-5},
  "seg-p4-nn": {"kind": "NN", "activation": "logistic", "hidden": [336, 470], "learning_rate": 4.4e-5, "patience": 11, "tol": 1e-2},
  "doc-p1-nn": {"kind": "NN", "activation": "tanh", "hidden": [255], "learning_rate": 2.06e-4, "patience": 76, "tol": 2.74e-3},
  "doc-p2-nn": {"kind": "NN", "activation": "relu", "hidden": [487], "learning_rate": 5.52e-3, "patience": 74, "tol": 1.81e-3},
  "doc-p3-nn": {"kind": "NN", "activation": "tanh", "hidden": [320], "learning_rate": 1e-2, "patience": 100, "tol": 1e-6},
  "doc-p4-nn": {"kind": "NN", "activation": "tanh", "hidden": [307], "learning_rate": 1e-2, "patience": 100, "tol": 7.88e-3},

  "seg-p1-rf": {"kind": "RF", "max_depth": 308, "n_trees": 916},
  "seg-p2-rf": {"kind": "RF", "max_depth": 984, "n_trees": 932},
  "seg-p3-rf": {"kind": "RF", "max_depth": 814, "n_trees": 830},
  "seg-p4-rf": {"kind": "RF", "max_depth": 706, "n_trees": 878},
  "doc-p1-rf": {"kind": "RF", "max_depth": 61, "n_trees": 878},
  "doc-p2-rf": {"kind": "RF", "max_depth": 258, "n_trees": 974},
  "doc-p3-rf": {"kind": "RF", "max_depth": 1000, "n_trees": 1000},
  "doc-p4-rf": {"kind": "RF", "max_depth": 1000, "n_trees": 602},

  "seg-p1-svm": {"kind": "SVM", "C": 0.695, "gamma": 1e-2, "kernel": "linear", "tol": 1e-2},
  "seg-p2-svm": {"kind": "SVM", "C": 1.67e-3, "gamma": 1e-2, "kernel": "linear", "tol": 2.08e-3},
  "seg-p3-svm": {"kind": "SVM", "C": 3.89, "gamma": 6.38e-3, "kernel": "linear", "tol": 5.94e-3},
  "seg-p4-svm": {"kind": "SVM", "C": 4.15e-4, "gamma": 1e-6, "kernel": "linear", "tol": 1e-2},
  "doc-p1-svm": {"kind": "SVM", "C": 1.58, "gamma": 1e-2, "kernel": "linear", "tol": 1e-2},
  "doc-p2-svm": {"kind": "SVM", "C": 32.4, "gamma": 1e-6, "kernel": "linear", "tol": 1e-6},
  "doc-p3-svm": {"kind": "SVM", "C": 63.5, "gamma": 1e-6, "kernel": "linear", "tol": 1e-2},
  "doc-p4-svm": {"kind": "SVM", "C": 100, "gamma": 1e-6, "kernel": "linear", "tol": 1e-2}
})");
    return table;
}

inline std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& [k, v] : preset_table().items()) names.push_back(k);
    return names;
}

/// Spec for a preset name such as "doc-p1-lr" (base-pipeline-classifier).
inline ClassifierSpec load_preset(const std::string& name) {
    const auto& t = preset_table();
    const auto it = t.find(name);
    if (it == t.end()) throw InvalidArgument("unknown preset \"" + name + "\"");
    auto spec = classifier_spec_from_json(*it);
    spec.validate();
    return spec;
}

}  // namespace docroute

#endif  // DOCROUTE_PRESETS_HPP_
