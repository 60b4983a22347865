#ifndef DOCROUTE_RUNNER_HPP_
#define DOCROUTE_RUNNER_HPP_

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "aggregation.hpp"
#include "classifiers/classifier.hpp"
#include "corpus.hpp"
#include "evaluation.hpp"
#include "features.hpp"
#include "hyperopt.hpp"
#include "parallel.hpp"
#include "presets.hpp"
#include "resampling.hpp"
#include "segmentation.hpp"
#include "textprep.hpp"

namespace docroute {

/// P1: count, L1, SMOTE, tf-idf, SVD, L2.  P2: P1 without L2.
/// P3: count, L1, SMOTE, tf-idf, L2.        P4: count, L1, SMOTE, tf-idf.
enum class PipelineId { P1 = 1, P2 = 2, P3 = 3, P4 = 4 };

inline int pipeline_number(PipelineId p) { return static_cast<int>(p); }

inline PipelineId pipeline_from_number(int n) {
    if (n < 1 || n > 4) throw InvalidArgument("pipeline must be 1 to 4, got " + std::to_string(n));
    return static_cast<PipelineId>(n);
}

inline PipelineId pipeline_from_string(const std::string& s) {
    std::string t = s;
    if (!t.empty() && (t[0] == 'P' || t[0] == 'p')) t.erase(0, 1);
    try {
        std::size_t used = 0;
        const int n = std::stoi(t, &used);
        if (used == t.size()) return pipeline_from_number(n);
    } catch (const std::logic_error&) {
    }
    throw InvalidArgument("unknown pipeline \"" + s + "\"");
}

inline bool uses_svd(PipelineId p) { return p == PipelineId::P1 || p == PipelineId::P2; }

inline constexpr std::size_t kDefaultSvdDim = 800;
inline constexpr std::size_t kDefaultMinClassSegments = 100;

/// One experiment cell plus the corpus preparation it depends on.
struct ExperimentConfig {
    std::string corpus;     // raw corpus file (jsonl or csv)
    std::string resources;  // text resource directory; empty = corpus text is already preprocessed
    std::string output;     // record directory; empty = do not write
    Base base = Base::document;
    PipelineId pipeline = PipelineId::P4;
    ClassifierSpec classifier = ClassifierSpec::defaults(ClassifierKind::LR);
    std::string preset;  // when set, the classifier came from this preset
    std::vector<AggregationMethod> aggregation = {AggregationMethod::MS, AggregationMethod::MWA, AggregationMethod::RMS};
    int folds = kDefaultFolds;
    std::uint64_t seed = 42;
    std::optional<std::size_t> svd_dim;  // P1/P2 only; defaults to 800
    std::size_t segment_width = kDefaultSegmentWidth;
    std::size_t min_class_segments = kDefaultMinClassSegments;
    std::string elimination = "none";  // "none", "study" or a policy file
    OversamplePolicy oversample = OversamplePolicy::documents();
    std::size_t workers = 1;

    /// Oversampling defaults tied to the base.
    static OversamplePolicy default_oversample(Base b) {
        return b == Base::segment ? OversamplePolicy::segments() : OversamplePolicy::documents();
    }

    std::size_t effective_svd_dim() const { return svd_dim.value_or(kDefaultSvdDim); }

    /// Name of the cell, e.g. "doc-p4-lr".
    std::string cell_name() const {
        std::string kind = to_string(classifier.kind());
        for (auto& c : kind) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        return std::string(base == Base::segment ? "seg" : "doc") + "-p" + std::to_string(pipeline_number(pipeline)) +
               "-" + kind;
    }

    void validate() const {
        classifier.validate();
        oversample.validate();
        if (folds < 2) throw InvalidArgument("at least two folds are needed");
        if (svd_dim && !uses_svd(pipeline))
            throw InvalidArgument("svd_dim is only valid for pipelines 1 and 2");
        if (effective_svd_dim() < 1) throw InvalidArgument("svd_dim must be >= 1");
        if (segment_width < 1) throw InvalidArgument("segment_width must be >= 1");
        if (base == Base::segment && aggregation.empty())
            throw InvalidArgument("the segment base needs at least one aggregation method");
        if (base == Base::document && !aggregation.empty())
            throw InvalidArgument("aggregation methods apply to the segment base only");
    }
};

inline nlohmann::ordered_json to_json(const OversamplePolicy& p) {
    nlohmann::ordered_json j;
    j["mode"] = p.mode == OversampleMode::to_majority ? "to_majority" : "capped";
    j["cap"] = p.cap;
    j["k"] = p.k_neighbors;
    return j;
}

inline OversamplePolicy oversample_policy_from_json(const nlohmann::json& j, OversamplePolicy p) {
    if (j.contains("mode")) {
        const auto m = j["mode"].get<std::string>();
        if (m == "to_majority") p.mode = OversampleMode::to_majority;
        else if (m == "capped") p.mode = OversampleMode::capped;
        else throw InvalidArgument("unknown oversampling mode \"" + m + "\"");
    }
    p.cap = j.value("cap", p.cap);
    p.k_neighbors = j.value("k", p.k_neighbors);
    return p;
}

/// Snapshot of the settings that determine the results (paths excluded).
inline nlohmann::ordered_json to_json(const ExperimentConfig& c) {
    nlohmann::ordered_json j;
    j["cell"] = c.cell_name();
    j["base"] = to_string(c.base);
    j["pipeline"] = pipeline_number(c.pipeline);
    if (!c.preset.empty()) j["preset"] = c.preset;
    j["classifier"] = to_json(c.classifier);
    std::vector<std::string> agg;
    for (auto m : c.aggregation) agg.emplace_back(to_string(m));
    j["aggregation"] = agg;
    j["folds"] = c.folds;
    j["seed"] = c.seed;
    if (uses_svd(c.pipeline)) j["svd_dim"] = c.effective_svd_dim();
    j["segment_width"] = c.segment_width;
    j["min_class_segments"] = c.min_class_segments;
    j["elimination"] = c.elimination;
    j["oversample"] = to_json(c.oversample);
    return j;
}

/// Reads a config object. Relative paths resolve against `base_dir`.
/// Keys: corpus, resources, output, base, pipeline, classifier | preset,
/// aggregation, folds, seed, svd_dim, segment_width, min_class_segments,
/// elimination, oversample {mode, cap, k}, workers.
inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {}) {
    ExperimentConfig c;
    auto path = [&](const char* key) -> std::string {
        if (!j.contains(key)) return {};
        std::filesystem::path p = j[key].get<std::string>();
        if (p.empty()) return {};
        return (p.is_relative() && !base_dir.empty() ? base_dir / p : p).string();
    };
    c.corpus = path("corpus");
    c.resources = path("resources");
    c.output = path("output");
    c.base = base_from_string(j.value("base", std::string("document")));
    if (j.contains("pipeline")) {
        const auto& p = j["pipeline"];
        c.pipeline = p.is_number() ? pipeline_from_number(p.get<int>()) : pipeline_from_string(p.get<std::string>());
    }
    if (j.contains("preset")) {
        c.preset = j["preset"].get<std::string>();
        c.classifier = load_preset(c.preset);
    }
    if (j.contains("classifier")) {
        const auto& k = j["classifier"];
        if (k.is_string()) {
            c.classifier = ClassifierSpec::defaults(classifier_kind_from_string(k.get<std::string>()));
        } else {
            c.classifier = classifier_spec_from_json(k);
        }
    }
    if (c.base == Base::document) c.aggregation.clear();
    if (j.contains("aggregation")) {
        c.aggregation.clear();
        for (const auto& m : j["aggregation"]) c.aggregation.push_back(aggregation_method_from_string(m.get<std::string>()));
    }
    c.folds = j.value("folds", c.folds);
    c.seed = j.value("seed", c.seed);
    if (j.contains("svd_dim")) c.svd_dim = j["svd_dim"].get<std::size_t>();
    c.segment_width = j.value("segment_width", c.segment_width);
    c.min_class_segments = j.value("min_class_segments", c.min_class_segments);
    c.elimination = j.value("elimination", c.elimination);
    if (c.elimination != "none" && c.elimination != "study") c.elimination = path("elimination");
    c.oversample = ExperimentConfig::default_oversample(c.base);
    if (j.contains("oversample")) c.oversample = oversample_policy_from_json(j["oversample"], c.oversample);
    c.workers = j.value("workers", default_workers());
    return c;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file " + path);
    try {
        return experiment_config_from_json(nlohmann::json::parse(in, nullptr, true, true),
                                           std::filesystem::path(path).parent_path());
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("invalid config file " + path + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Corpus preparation

/// Raw corpus to the segments both bases consume: preprocess (when
/// resources are given), segment, drop small classes, eliminate.
inline SegmentedCorpus prepare_segments(const LabeledCorpus& corpus, const TextResources* resources,
                                        std::size_t width, std::size_t min_class_segments,
                                        const std::string& elimination, std::uint64_t seed) {
    LabeledCorpus prepped = corpus;
    if (resources)
        for (auto& d : prepped.documents) d.text = preprocess(d.text, *resources);
    auto sc = filter_classes(segment_corpus(prepped, width), min_class_segments);
    BalancePolicy policy = elimination == "none" || elimination == "study"
                               ? elimination_preset(elimination, sc, derive_seed(seed, fnv1a("elimination")))
                               : load_balance_policy(elimination);
    policy.min_segments_per_class = min_class_segments;
    return eliminate_segments(sc, policy);
}

inline SegmentedCorpus prepare_segments(const ExperimentConfig& cfg) {
    const auto corpus = load_corpus(cfg.corpus);
    std::optional<TextResources> res;
    if (!cfg.resources.empty()) res = TextResources::load(cfg.resources);
    return prepare_segments(corpus, res ? &*res : nullptr, cfg.segment_width, cfg.min_class_segments,
                            cfg.elimination, cfg.seed);
}

// ---------------------------------------------------------------------------
// Feature pipeline

/// Fitted transforms of one training fold.
struct FoldFeatures {
    CountMatrix train;        // oversampled training rows, final representation
    std::vector<int> train_labels;
    CountMatrix test;
    Vocabulary vocabulary;
    double synthetic_share = 0.0;
    std::size_t svd_dim = 0;  // effective, 0 when unused
};

/// Fits vocabulary, SMOTE, idf and SVD on the training texts only and
/// applies them to both sides.
inline FoldFeatures build_fold_features(const std::vector<std::string>& train_texts, const std::vector<int>& train_labels,
                                        const std::vector<std::string>& test_texts, PipelineId pipeline,
                                        const OversamplePolicy& oversample, std::size_t svd_dim, std::uint64_t seed) {
    FoldFeatures f;
    f.vocabulary = fit_vocabulary(train_texts);
    const CountMatrix train_counts = l1_normalize(count_vectorize(train_texts, f.vocabulary));
    CountMatrix test = l1_normalize(count_vectorize(test_texts, f.vocabulary));

    OversamplePolicy policy = oversample;
    policy.seed = derive_seed(seed, fnv1a("smote"));
    auto over = smote(train_counts, train_labels, policy);
    f.synthetic_share = synthetic_share(over);
    f.train_labels = std::move(over.labels);

    const auto idf = fit_idf(over.matrix);
    CountMatrix train = apply_idf(std::move(over.matrix), idf);
    test = apply_idf(std::move(test), idf);

    if (uses_svd(pipeline)) {
        const auto svd = fit_truncated_svd(train, svd_dim, derive_seed(seed, fnv1a("svd")));
        f.svd_dim = svd.k;
        DenseMatrix tr = svd_transform(train, svd);
        DenseMatrix te = svd_transform(test, svd);
        if (pipeline == PipelineId::P1) {
            tr = l2_normalize(std::move(tr));
            te = l2_normalize(std::move(te));
        }
        train = to_sparse(tr);
        test = to_sparse(te);
    } else if (pipeline == PipelineId::P3) {
        train = l2_normalize(std::move(train));
        test = l2_normalize(std::move(test));
    }
    f.train = std::move(train);
    f.test = std::move(test);
    return f;
}

// ---------------------------------------------------------------------------
// Run records

/// Metrics of one decision rule ("none" on the document base).
struct MethodResult {
    std::string method;
    std::vector<MetricsReport> folds;
    MetricsReport pooled;
};

struct FoldInfo {
    std::size_t train_rows = 0;  // genuine
    std::size_t test_rows = 0;
    std::size_t test_documents = 0;
    std::size_t vocabulary = 0;
    std::size_t svd_dim = 0;
    double synthetic_share = 0.0;
};

struct RunRecord {
    nlohmann::ordered_json config;
    std::vector<std::string> classes;
    std::vector<FoldInfo> folds;
    std::vector<MethodResult> results;
    std::string error;                   // non-empty when the cell failed
    std::vector<double> fold_seconds;    // wall clock, kept out of the record file
    double total_seconds = 0.0;

    const MethodResult* result(const std::string& method) const {
        for (const auto& r : results)
            if (r.method == method) return &r;
        return nullptr;
    }
};

inline nlohmann::ordered_json to_json(const RunRecord& r) {
    nlohmann::ordered_json j;
    j["config"] = r.config;
    j["classes"] = r.classes;
    nlohmann::ordered_json folds = nlohmann::ordered_json::array();
    for (const auto& f : r.folds)
        folds.push_back({{"train_rows", f.train_rows},
                         {"test_rows", f.test_rows},
                         {"test_documents", f.test_documents},
                         {"vocabulary", f.vocabulary},
                         {"svd_dim", f.svd_dim},
                         {"synthetic_share", f.synthetic_share}});
    j["folds"] = std::move(folds);
    nlohmann::ordered_json results = nlohmann::ordered_json::array();
    for (const auto& m : r.results) {
        nlohmann::ordered_json jm;
        jm["method"] = m.method;
        jm["pooled"] = to_json(m.pooled);
        nlohmann::ordered_json jf = nlohmann::ordered_json::array();
        for (const auto& f : m.folds) jf.push_back(to_json(f));
        jm["folds"] = std::move(jf);
        results.push_back(std::move(jm));
    }
    j["results"] = std::move(results);
    if (!r.error.empty()) j["error"] = r.error;
    return j;
}

inline RunRecord run_record_from_json(const nlohmann::ordered_json& j) {
    RunRecord r;
    r.config = j.at("config");
    r.classes = j.value("classes", std::vector<std::string>{});
    if (j.contains("folds"))
        for (const auto& f : j["folds"])
            r.folds.push_back({f.at("train_rows").get<std::size_t>(), f.at("test_rows").get<std::size_t>(),
                               f.at("test_documents").get<std::size_t>(), f.at("vocabulary").get<std::size_t>(),
                               f.at("svd_dim").get<std::size_t>(), f.at("synthetic_share").get<double>()});
    for (const auto& m : j.at("results")) {
        MethodResult mr;
        mr.method = m.at("method").get<std::string>();
        mr.pooled = metrics_from_json(nlohmann::json(m.at("pooled")));
        if (m.contains("folds"))
            for (const auto& f : m["folds"]) mr.folds.push_back(metrics_from_json(nlohmann::json(f)));
        r.results.push_back(std::move(mr));
    }
    r.error = j.value("error", std::string());
    return r;
}

/// Writes <dir>/<cell>.jsonl (one line, deterministic) and
/// <dir>/<cell>.timing.json (wall-clock durations).
inline std::filesystem::path save_run_record(const std::filesystem::path& dir, const RunRecord& r) {
    std::filesystem::create_directories(dir);
    const std::string cell = r.config.value("cell", std::string("run"));
    const auto path = dir / (cell + ".jsonl");
    {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error("cannot write record " + path.string());
        out << to_json(r).dump() << '\n';
    }
    std::ofstream timing(dir / (cell + ".timing.json"), std::ios::binary);
    nlohmann::ordered_json t;
    t["cell"] = cell;
    t["fold_seconds"] = r.fold_seconds;
    t["total_seconds"] = r.total_seconds;
    timing << t.dump(2) << '\n';
    return path;
}

inline std::vector<RunRecord> load_run_records(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<RunRecord> out;
    for (const auto& f : files) {
        std::ifstream in(f, std::ios::binary);
        std::string line;
        std::size_t no = 0;
        while (std::getline(in, line)) {
            ++no;
            if (line.empty()) continue;
            try {
                out.push_back(run_record_from_json(nlohmann::ordered_json::parse(line)));
            } catch (const nlohmann::json::exception& e) {
                throw ParseError(f.string() + ": invalid run record: " + e.what(), no);
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Experiments

namespace detail {

struct ExperimentRow {
    std::string doc_id;
    int label = 0;
    std::string text;
    double weight = 1.0;  // characters, segment base only
};

struct FoldOutput {
    FoldInfo info;
    std::vector<std::string> doc_ids;                 // test documents, sorted
    std::vector<int> truth;                           // per test document
    std::map<std::string, std::vector<int>> predictions;  // method -> per test document
    double seconds = 0.0;
};

}  // namespace detail

/// Cross-validated run of one cell on prepared segments. Every fitted
/// transform sees only the training rows of its fold; test predictions of
/// all folds are pooled for the summary metrics. Deterministic in (cfg, sc).
inline RunRecord run_experiment(const ExperimentConfig& cfg, const SegmentedCorpus& sc) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    RunRecord rec;
    rec.config = to_json(cfg);
    if (sc.segments.empty()) throw InvalidArgument("no segments to run on");

    std::map<std::string, int> class_index;
    for (const auto& s : sc.segments) class_index.emplace(s.department, 0);
    for (auto& [name, idx] : class_index) {
        idx = static_cast<int>(rec.classes.size());
        rec.classes.push_back(name);
    }
    const int n_classes = static_cast<int>(rec.classes.size());

    const auto seg_counts = segments_per_document(sc);
    const auto folds = build_folds(seg_counts, cfg.folds, derive_seed(cfg.seed, fnv1a("folds")));

    std::vector<detail::ExperimentRow> rows;
    std::map<std::string, int> doc_label;
    if (cfg.base == Base::segment) {
        for (const auto& s : sc.segments) {
            rows.push_back({s.doc_id, class_index[s.department], s.text,
                            static_cast<double>(std::max<std::size_t>(1, utf8::length(s.text)))});
            doc_label[s.doc_id] = class_index[s.department];
        }
    } else {
        for (const auto& d : concatenate(sc).documents) {
            rows.push_back({d.id, class_index[d.department], d.text, 1.0});
            doc_label[d.id] = class_index[d.department];
        }
    }

    std::vector<std::string> methods;
    if (cfg.base == Base::segment)
        for (auto m : cfg.aggregation) methods.emplace_back(to_string(m));
    else
        methods.emplace_back("none");

    std::vector<detail::FoldOutput> outputs(static_cast<std::size_t>(cfg.folds));
    parallel_for(outputs.size(), cfg.workers, [&](std::size_t f) {
        const auto fs = std::chrono::steady_clock::now();
        const std::uint64_t fold_seed = derive_seed(cfg.seed, 1000 + f);
        std::vector<std::string> train_texts, test_texts;
        std::vector<int> train_labels;
        std::vector<std::size_t> test_rows;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (folds.fold_of.at(rows[i].doc_id) == static_cast<int>(f)) {
                test_texts.push_back(rows[i].text);
                test_rows.push_back(i);
            } else {
                train_texts.push_back(rows[i].text);
                train_labels.push_back(rows[i].label);
            }
        }
        auto features = build_fold_features(train_texts, train_labels, test_texts, cfg.pipeline, cfg.oversample,
                                            cfg.effective_svd_dim(), fold_seed);
        const auto model = train(cfg.classifier, features.train, features.train_labels, n_classes,
                                 derive_seed(fold_seed, fnv1a("model")));
        const DenseMatrix probs = predict_proba(model, features.test);

        auto& out = outputs[f];
        out.info = {train_texts.size(), test_texts.size(), 0, features.vocabulary.size(), features.svd_dim,
                    features.synthetic_share};
        if (cfg.base == Base::document) {
            const auto pred = argmax_rows(probs);
            for (std::size_t k = 0; k < test_rows.size(); ++k) {
                out.doc_ids.push_back(rows[test_rows[k]].doc_id);
                out.truth.push_back(rows[test_rows[k]].label);
                out.predictions["none"].push_back(pred[k]);
            }
        } else {
            std::map<std::string, std::vector<std::size_t>> by_doc;  // doc -> positions in test_rows
            for (std::size_t k = 0; k < test_rows.size(); ++k) by_doc[rows[test_rows[k]].doc_id].push_back(k);
            for (const auto& [doc, ks] : by_doc) {
                SegmentGroup g;
                g.doc_id = doc;
                g.probs.resize(static_cast<Eigen::Index>(ks.size()), n_classes);
                for (std::size_t r = 0; r < ks.size(); ++r) {
                    g.probs.row(static_cast<Eigen::Index>(r)) = probs.row(static_cast<Eigen::Index>(ks[r]));
                    g.weights.push_back(rows[test_rows[ks[r]]].weight);
                }
                out.doc_ids.push_back(doc);
                out.truth.push_back(doc_label.at(doc));
                for (auto m : cfg.aggregation) out.predictions[to_string(m)].push_back(aggregate(g, m));
            }
        }
        out.info.test_documents = out.doc_ids.size();
        out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - fs).count();
    });

    for (const auto& o : outputs) {
        rec.folds.push_back(o.info);
        rec.fold_seconds.push_back(o.seconds);
    }
    for (const auto& m : methods) {
        MethodResult mr;
        mr.method = m;
        std::vector<int> all_truth, all_pred;
        for (const auto& o : outputs) {
            const auto& pred = o.predictions.at(m);
            mr.folds.push_back(compute_metrics(o.truth, pred, n_classes, &rec.classes));
            all_truth.insert(all_truth.end(), o.truth.begin(), o.truth.end());
            all_pred.insert(all_pred.end(), pred.begin(), pred.end());
        }
        mr.pooled = compute_metrics(all_truth, all_pred, n_classes, &rec.classes);
        rec.results.push_back(std::move(mr));
    }
    rec.total_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

/// Pooled accuracy of the first decision rule: the search objective.
inline double objective_value(const RunRecord& r) {
    if (!r.error.empty() || r.results.empty()) return 0.0;
    return r.results.front().pooled.accuracy;
}

/// Search objective over one cell: each trial runs the full cross-validation
/// of `cfg` with the trial's classifier and seed.
inline Objective make_objective(const ExperimentConfig& cfg, const SegmentedCorpus& sc) {
    const auto kind = cfg.classifier.kind();
    return [cfg, &sc, kind](const Assignment& a, std::uint64_t seed) {
        ExperimentConfig c = cfg;
        c.classifier = spec_from_assignment(kind, a);
        c.preset.clear();
        c.seed = seed;
        return objective_value(run_experiment(c, sc));
    };
}

/// A grid cell: base, pipeline and classifier (spec or preset name).
struct GridCell {
    Base base = Base::document;
    PipelineId pipeline = PipelineId::P4;
    ClassifierSpec classifier = ClassifierSpec::defaults(ClassifierKind::LR);
    std::string preset;
};

/// Every combination of the given bases, pipelines and classifier kinds.
/// With use_presets, each cell takes its preset; otherwise kind defaults.
inline std::vector<GridCell> make_grid(const std::vector<Base>& bases, const std::vector<PipelineId>& pipelines,
                                       const std::vector<ClassifierKind>& kinds, bool use_presets) {
    std::vector<GridCell> grid;
    for (auto b : bases)
        for (auto p : pipelines)
            for (auto k : kinds) {
                GridCell c{b, p, ClassifierSpec::defaults(k), {}};
                if (use_presets) {
                    ExperimentConfig tmp;
                    tmp.base = b;
                    tmp.pipeline = p;
                    tmp.classifier = c.classifier;
                    c.preset = tmp.cell_name();
                    c.classifier = load_preset(c.preset);
                }
                grid.push_back(std::move(c));
            }
    return grid;
}

/// Config of one grid cell: `common` with the cell's base, pipeline,
/// classifier, base-tied defaults and a seed derived from the master seed
/// and the cell name.
inline ExperimentConfig cell_config(const ExperimentConfig& common, const GridCell& cell) {
    ExperimentConfig c = common;
    c.base = cell.base;
    c.pipeline = cell.pipeline;
    c.classifier = cell.classifier;
    c.preset = cell.preset;
    c.oversample = ExperimentConfig::default_oversample(cell.base);
    c.aggregation.clear();
    if (cell.base == Base::segment)
        c.aggregation.assign(std::begin(kAllAggregationMethods), std::end(kAllAggregationMethods));
    if (!uses_svd(cell.pipeline)) c.svd_dim.reset();
    c.seed = derive_seed(common.seed, fnv1a(c.cell_name()));
    c.workers = 1;
    return c;
}

/// One record per cell, in grid order. A failing cell yields a record with
/// `error` set; the other cells still run. Cells run on `common.workers` threads.
inline std::vector<RunRecord> run_grid(const SegmentedCorpus& sc, const std::vector<GridCell>& grid,
                                       const ExperimentConfig& common) {
    if (grid.empty()) throw InvalidArgument("empty experiment grid");
    std::vector<RunRecord> records(grid.size());
    parallel_for(grid.size(), common.workers, [&](std::size_t i) {
        const auto cfg = cell_config(common, grid[i]);
        try {
            records[i] = run_experiment(cfg, sc);
        } catch (const std::exception& e) {
            records[i] = RunRecord{};
            records[i].config = to_json(cfg);
            records[i].error = e.what();
        }
    });
    return records;
}

// ---------------------------------------------------------------------------
// Reports

/// One result line: percentages of the pooled metrics.
struct ReportRow {
    std::string base;        // "Seg" or "Doc"
    std::string classifier;  // LR, NN, RF, SVM, SVAE
    std::string aggregation; // MS, MWA, RMS or none
    int pipeline = 0;
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool operator==(const ReportRow&) const = default;
};

enum class ReportFormat { csv, markdown, latex };

inline ReportFormat report_format_from_string(const std::string& s) {
    if (s == "csv") return ReportFormat::csv;
    if (s == "markdown" || s == "md") return ReportFormat::markdown;
    if (s == "latex" || s == "tex") return ReportFormat::latex;
    throw InvalidArgument("unknown report format \"" + s + "\"");
}

inline std::string format_percent(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", fraction * 100.0);
    return buf;
}

/// Rounded to the two decimals the report shows.
inline double round_percent(double fraction) { return std::stod(format_percent(fraction)); }

/// Report rows of successful records, values as rounded percentages.
inline std::vector<ReportRow> report_rows(const std::vector<RunRecord>& records) {
    std::vector<ReportRow> rows;
    for (const auto& r : records) {
        if (!r.error.empty()) continue;
        const std::string base = r.config.at("base").get<std::string>() == "segment" ? "Seg" : "Doc";
        const std::string kind = r.config.at("classifier").at("kind").get<std::string>();
        const int pipeline = r.config.at("pipeline").get<int>();
        for (const auto& m : r.results)
            rows.push_back({base, kind, m.method, pipeline, round_percent(m.pooled.accuracy),
                            round_percent(m.pooled.precision), round_percent(m.pooled.recall),
                            round_percent(m.pooled.f1)});
    }
    return rows;
}

namespace detail {

inline int classifier_rank(const std::string& k) {
    static const char* order[] = {"SVAE", "LR", "NN", "RF", "SVM"};
    for (int i = 0; i < 5; ++i)
        if (k == order[i]) return i;
    return 5;
}

inline int method_rank(const std::string& base, const std::string& m) {
    if (base == "Doc") return 3;
    if (m == "MS") return 0;
    if (m == "MWA") return 1;
    if (m == "RMS") return 2;
    return 4;
}

// Table line key: classifier, then segment methods, then the document row.
inline std::tuple<int, int, std::string, std::string, std::string> line_key(const ReportRow& r) {
    return {classifier_rank(r.classifier), method_rank(r.base, r.aggregation), r.classifier, r.base, r.aggregation};
}

inline std::string metric_cells(const ReportRow& r, const char* sep) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.2f%s%.2f%s%.2f%s%.2f", r.accuracy, sep, r.precision, sep, r.recall, sep, r.f1);
    return buf;
}

}  // namespace detail

/// "Doc & LR & none & 89.73 & 89.83 & 89.73 & 89.54" for a single pipeline.
inline std::string format_row(const ReportRow& r) {
    return r.base + " & " + r.classifier + " & " + r.aggregation + " & " + detail::metric_cells(r, " & ");
}

/// Renders rows as csv (one line per row), or as markdown / LaTeX tables with
/// pipelines 1-2 and 3-4 side by side, lines ordered by classifier and
/// aggregation rule. Only pipelines present in `rows` get columns. An empty
/// input yields the header only.
inline std::string emit_report(const std::vector<ReportRow>& rows, ReportFormat format) {
    std::string out;
    if (format == ReportFormat::csv) {
        out = "base,classifier,aggregation,pipeline,accuracy,precision,recall,f1\n";
        auto sorted = rows;
        std::stable_sort(sorted.begin(), sorted.end(), [](const ReportRow& a, const ReportRow& b) {
            return std::make_pair(a.pipeline, detail::line_key(a)) < std::make_pair(b.pipeline, detail::line_key(b));
        });
        for (const auto& r : sorted)
            out += r.base + "," + r.classifier + "," + r.aggregation + "," + std::to_string(r.pipeline) + "," +
                   detail::metric_cells(r, ",") + "\n";
        return out;
    }

    const bool md = format == ReportFormat::markdown;
    if (rows.empty()) return md ? "| Base | Classif. | Aggr. method |\n|---|---|---|\n"
                                : "Base & Classif. & Aggr. method \\\\\n";
    for (const auto& pair : {std::pair{1, 2}, std::pair{3, 4}}) {
        std::vector<int> present;
        for (int p : {pair.first, pair.second})
            if (std::any_of(rows.begin(), rows.end(), [p](const ReportRow& r) { return r.pipeline == p; }))
                present.push_back(p);
        if (present.empty()) continue;
        std::map<std::tuple<int, int, std::string, std::string, std::string>, std::map<int, const ReportRow*>> lines;
        for (const auto& r : rows)
            if (r.pipeline == pair.first || r.pipeline == pair.second) lines[detail::line_key(r)][r.pipeline] = &r;

        if (!out.empty()) out += "\n";
        if (md) {
            out += "| Base | Classif. | Aggr. method |";
            for (int p : present) out += " P" + std::to_string(p) + " Acc. | Prec. | Rec. | F1 |";
            out += "\n|---|---|---|";
            for (std::size_t i = 0; i < present.size(); ++i) out += "---:|---:|---:|---:|";
            out += "\n";
        } else {
            out += "Base & Classif. & Aggr. method";
            for (int p : present) out += " & \\multicolumn{4}{l}{Pipeline " + std::to_string(p) + "}";
            out += " \\\\\n";
        }
        for (const auto& [key, by_pipeline] : lines) {
            const ReportRow& first = *by_pipeline.begin()->second;
            std::string line = md ? "| " + first.base + " | " + first.classifier + " | " + first.aggregation + " |"
                                  : first.base + " & " + first.classifier + " & " + first.aggregation;
            for (int p : present) {
                const auto it = by_pipeline.find(p);
                if (md) line += it == by_pipeline.end() ? " - | - | - | - |" : " " + detail::metric_cells(*it->second, " | ") + " |";
                else line += it == by_pipeline.end() ? " & - & - & - & -" : " & " + detail::metric_cells(*it->second, " & ");
            }
            out += line + (md ? "\n" : " \\\\\n");
        }
    }
    return out;
}

inline std::string emit_report(const std::vector<RunRecord>& records, ReportFormat format) {
    return emit_report(report_rows(records), format);
}

namespace detail {

inline std::vector<std::string> split_cells(const std::string& line, const std::string& sep) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(sep, start);
        std::string cell = line.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
        const auto b = cell.find_first_not_of(' ');
        const auto e = cell.find_last_not_of(' ');
        cells.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
        if (pos == std::string::npos) break;
        start = pos + sep.size();
    }
    return cells;
}

}  // namespace detail

/// Reads rows back from emit_report output.
inline std::vector<ReportRow> parse_report(const std::string& text, ReportFormat format) {
    std::vector<ReportRow> rows;
    std::istringstream in(text);
    std::string line;
    std::vector<int> present;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (format == ReportFormat::csv) {
            if (line.rfind("base,", 0) == 0) continue;
            const auto c = detail::split_cells(line, ",");
            if (c.size() != 8) throw ParseError("csv report line needs 8 cells");
            rows.push_back({c[0], c[1], c[2], std::stoi(c[3]), std::stod(c[4]), std::stod(c[5]), std::stod(c[6]),
                            std::stod(c[7])});
            continue;
        }
        const bool md = format == ReportFormat::markdown;
        if (md && line.rfind("|---", 0) == 0) continue;
        std::string body = line;
        if (md) {
            body = body.substr(1, body.size() - 2);
        } else if (body.size() >= 3 && body.compare(body.size() - 3, 3, " \\\\") == 0) {
            body.resize(body.size() - 3);
        }
        const auto cells = detail::split_cells(body, md ? "|" : "&");
        if (!cells.empty() && cells[0] == "Base") {
            present.clear();
            for (const auto& c : cells) {
                if (md && c.size() > 1 && c[0] == 'P' && c.find("Acc.") != std::string::npos)
                    present.push_back(std::stoi(c.substr(1)));
                const auto at = c.find("Pipeline ");
                if (!md && at != std::string::npos) present.push_back(std::stoi(c.substr(at + 9)));
            }
            continue;
        }
        if (cells.size() != 3 + 4 * present.size()) throw ParseError("report line has an unexpected cell count");
        for (std::size_t k = 0; k < present.size(); ++k) {
            const auto& v = cells[3 + 4 * k];
            if (v == "-") continue;
            rows.push_back({cells[0], cells[1], cells[2], present[k], std::stod(v), std::stod(cells[4 + 4 * k]),
                            std::stod(cells[5 + 4 * k]), std::stod(cells[6 + 4 * k])});
        }
    }
    return rows;
}

}  // namespace docroute

#endif  // DOCROUTE_RUNNER_HPP_
