#include <gtest/gtest.h>

#include <set>

#include <docroute/runner.hpp>

#include "desk_corpus.hpp"
#include "oracles/report_parser.hpp"
#include "support.hpp"

using namespace docroute;
using namespace testing_support;

namespace {

const SegmentedCorpus& small_segments() {
    static const auto sc = desk_segments(small_spec(), 256, 1);
    return sc;
}

ExperimentConfig config(Base base, PipelineId p, ClassifierKind k = ClassifierKind::LR) {
    ExperimentConfig c;
    c.base = base;
    c.pipeline = p;
    c.classifier = ClassifierSpec::defaults(k);
    c.oversample = ExperimentConfig::default_oversample(base);
    if (base == Base::document) c.aggregation.clear();
    c.folds = 3;
    c.seed = 5;
    c.min_class_segments = 1;
    c.segment_width = 256;
    return c;
}

RunRecord fixture_record() {
    ExperimentConfig c;
    c.base = Base::document;
    c.pipeline = PipelineId::P1;
    c.aggregation.clear();
    RunRecord r;
    r.config = to_json(c);
    MethodResult m;
    m.method = "none";
    m.pooled.accuracy = 0.8973;
    m.pooled.precision = 0.8983;
    m.pooled.recall = 0.8973;
    m.pooled.f1 = 0.8954;
    r.results.push_back(m);
    return r;
}

std::vector<std::string> split_words(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

}  // namespace

TEST(Pipelines, Identifiers) {
    EXPECT_EQ(pipeline_from_string("P3"), PipelineId::P3);
    EXPECT_EQ(pipeline_from_string("2"), PipelineId::P2);
    EXPECT_EQ(pipeline_from_number(4), PipelineId::P4);
    EXPECT_THROW(pipeline_from_number(5), InvalidArgument);
    EXPECT_THROW(pipeline_from_string("P0"), InvalidArgument);
    EXPECT_TRUE(uses_svd(PipelineId::P1));
    EXPECT_TRUE(uses_svd(PipelineId::P2));
    EXPECT_FALSE(uses_svd(PipelineId::P3));
    EXPECT_FALSE(uses_svd(PipelineId::P4));
}

TEST(ExperimentConfig, DefaultsAndValidation) {
    ExperimentConfig c;
    EXPECT_EQ(c.folds, 5);
    EXPECT_EQ(c.effective_svd_dim(), 800u);
    EXPECT_EQ(c.segment_width, 2048u);
    const auto seg = ExperimentConfig::default_oversample(Base::segment);
    EXPECT_EQ(seg.mode, OversampleMode::to_majority);
    EXPECT_EQ(seg.k_neighbors, 5u);
    const auto doc = ExperimentConfig::default_oversample(Base::document);
    EXPECT_EQ(doc.mode, OversampleMode::capped);
    EXPECT_EQ(doc.cap, 55u);
    EXPECT_EQ(doc.k_neighbors, 4u);

    auto p3 = config(Base::document, PipelineId::P3);
    p3.svd_dim = 100;
    EXPECT_THROW(p3.validate(), InvalidArgument);
    EXPECT_THROW(run_experiment(p3, small_segments()), InvalidArgument);
    auto p4 = config(Base::document, PipelineId::P4);
    p4.svd_dim = 100;
    EXPECT_THROW(p4.validate(), InvalidArgument);
    auto p1 = config(Base::document, PipelineId::P1);
    p1.svd_dim = 100;
    EXPECT_NO_THROW(p1.validate());

    auto agg = config(Base::document, PipelineId::P4);
    agg.aggregation = {AggregationMethod::MS};
    EXPECT_THROW(agg.validate(), InvalidArgument);
    auto none = config(Base::segment, PipelineId::P4);
    none.aggregation.clear();
    EXPECT_THROW(none.validate(), InvalidArgument);
    auto one_fold = config(Base::document, PipelineId::P4);
    one_fold.folds = 1;
    EXPECT_THROW(one_fold.validate(), InvalidArgument);
    EXPECT_EQ(config(Base::segment, PipelineId::P2, ClassifierKind::SVAE).cell_name(), "seg-p2-svae");
}

TEST(ExperimentConfig, JsonFile) {
    TempDir dir("config");
    write_file(dir.file("cfg.json"), R"({
      "corpus": "data/corpus.jsonl", "resources": "/abs/res", "output": "out",
      "base": "segment", "pipeline": "P1", "preset": "seg-p1-lr",
      "folds": 4, "seed": 9, "svd_dim": 50, "segment_width": 512,
      "oversample": {"k": 3}, "workers": 2})");
    const auto c = load_experiment_config(dir.file("cfg.json"));
    EXPECT_EQ(c.corpus, (dir.path() / "data/corpus.jsonl").string());
    EXPECT_EQ(c.resources, "/abs/res");
    EXPECT_EQ(c.output, (dir.path() / "out").string());
    EXPECT_EQ(c.base, Base::segment);
    EXPECT_EQ(c.pipeline, PipelineId::P1);
    EXPECT_EQ(c.classifier, load_preset("seg-p1-lr"));
    EXPECT_EQ(c.aggregation.size(), 3u);
    EXPECT_EQ(c.folds, 4);
    EXPECT_EQ(c.seed, 9u);
    EXPECT_EQ(c.svd_dim, std::optional<std::size_t>(50));
    EXPECT_EQ(c.segment_width, 512u);
    EXPECT_EQ(c.oversample.mode, OversampleMode::to_majority);
    EXPECT_EQ(c.oversample.k_neighbors, 3u);
    EXPECT_EQ(c.workers, 2u);

    const auto d = experiment_config_from_json(nlohmann::json::parse(R"({"classifier": "RF", "pipeline": 3})"));
    EXPECT_EQ(d.base, Base::document);
    EXPECT_TRUE(d.aggregation.empty());
    EXPECT_EQ(d.classifier.kind(), ClassifierKind::RF);
    EXPECT_EQ(d.oversample.cap, 55u);
    EXPECT_NO_THROW(d.validate());

    const auto e = experiment_config_from_json(
        nlohmann::json::parse(R"({"classifier": {"kind": "SVM", "kernel": "linear", "C": 2.5}, "aggregation": ["MWA"], "base": "seg"})"));
    EXPECT_EQ(std::get<SvmParams>(e.classifier.params).C, 2.5);
    EXPECT_EQ(e.aggregation, std::vector<AggregationMethod>{AggregationMethod::MWA});
}

TEST(Presets, KnownRows) {
    const auto lr = std::get<LrParams>(load_preset("doc-p1-lr").params);
    EXPECT_EQ(lr.C, 8.86e-3);
    EXPECT_EQ(lr.penalty, Penalty::none);
    EXPECT_EQ(lr.tol, 1.9e-5);
    EXPECT_EQ(std::get<SvmParams>(load_preset("seg-p4-svm").params).kernel, Kernel::linear);
    EXPECT_EQ(std::get<NnParams>(load_preset("seg-p3-nn").params).hidden, (std::vector<int>{236, 139, 347}));
    EXPECT_EQ(std::get<SvaeParams>(load_preset("doc-p4-svae").params).encoder_sizes().size(), 2u);
    EXPECT_THROW(load_preset("doc-p5-lr"), InvalidArgument);
    EXPECT_EQ(preset_names().size(), 40u);
    for (const auto& n : preset_names()) EXPECT_NO_THROW(load_preset(n)) << n;
}

TEST(FoldFeatures, SvdDimensionIsClamped) {
    std::mt19937_64 rng(1);
    std::vector<std::string> train, test;
    std::vector<int> labels;
    for (int i = 0; i < 50; ++i) {
        train.push_back(random_term_string(rng, 200));
        labels.push_back(i % 2);
    }
    test.push_back(random_term_string(rng, 200));
    const auto vocab = fit_vocabulary(train).size();
    ASSERT_GT(vocab, 50u);
    for (auto p : {PipelineId::P1, PipelineId::P2}) {
        const auto f = build_fold_features(train, labels, test, p, OversamplePolicy::segments(), 800, 3);
        EXPECT_EQ(f.svd_dim, std::min<std::size_t>({800, 50, vocab}));
        EXPECT_EQ(f.train.cols(), static_cast<Eigen::Index>(f.svd_dim));
        EXPECT_EQ(f.test.cols(), f.train.cols());
    }
    const auto p1 = build_fold_features(train, labels, test, PipelineId::P1, OversamplePolicy::segments(), 800, 3);
    const DenseMatrix d(p1.train);
    for (Eigen::Index r = 0; r < d.rows(); ++r) EXPECT_NEAR(d.row(r).norm(), 1.0, 1e-12);
    const auto p4 = build_fold_features(train, labels, test, PipelineId::P4, OversamplePolicy::segments(), 800, 3);
    EXPECT_EQ(p4.svd_dim, 0u);
    EXPECT_EQ(p4.train.cols(), static_cast<Eigen::Index>(vocab));
}

TEST(FoldFeatures, TestOnlyTermsNeverEnterTheVocabulary) {
    const std::vector<std::string> train = {"amt haus steuer", "amt weg", "haus weg weg", "steuer amt"};
    const std::vector<int> labels = {0, 1, 0, 1};
    const std::vector<std::string> test = {"kanarienvogel amt", "kanarienvogel"};
    for (auto p : {PipelineId::P1, PipelineId::P2, PipelineId::P3, PipelineId::P4}) {
        const auto f = build_fold_features(train, labels, test, p, OversamplePolicy::segments(), 800, 1);
        EXPECT_EQ(f.vocabulary.terms(), (std::vector<std::string>{"amt", "haus", "steuer", "weg"}));
        EXPECT_EQ(f.vocabulary.find("kanarienvogel"), -1);
        EXPECT_EQ(DenseMatrix(f.test).row(1).norm(), 0.0);
    }
}

TEST(FoldFeatures, IdfFitOnOversampledTrainingRows) {
    const std::vector<std::string> train = {"a b", "a c", "a b c", "b d", "d e"};
    const std::vector<int> labels = {0, 0, 0, 1, 1};
    const auto f = build_fold_features(train, labels, {"a"}, PipelineId::P4, OversamplePolicy::segments(), 800, 2);
    EXPECT_EQ(f.train.rows(), 6);
    EXPECT_NEAR(f.synthetic_share, 1.0 / 6.0, 1e-12);
    // Column "a" appears in 3 of the 6 rows: test row value = 1 * ln(6 / 3).
    EXPECT_NEAR(DenseMatrix(f.test)(0, 0), std::log(2.0), 1e-12);
}

TEST(RunExperiment, DocumentAndSegmentBases) {
    const auto& sc = small_segments();
    const auto doc = run_experiment(config(Base::document, PipelineId::P4), sc);
    ASSERT_EQ(doc.results.size(), 1u);
    EXPECT_EQ(doc.results[0].method, "none");
    EXPECT_EQ(doc.folds.size(), 3u);
    EXPECT_EQ(doc.classes.size(), 4u);
    EXPECT_GE(doc.results[0].pooled.accuracy, 0.9);

    const auto seg = run_experiment(config(Base::segment, PipelineId::P4), sc);
    ASSERT_EQ(seg.results.size(), 3u);
    for (const auto& m : seg.results) {
        EXPECT_GE(m.pooled.accuracy, 0.9) << m.method;
        EXPECT_NEAR(m.pooled.recall, m.pooled.accuracy, 1e-12);
    }

    std::size_t docs = 0, seg_docs = 0, seg_rows = 0;
    for (const auto& f : doc.folds) docs += f.test_documents;
    for (const auto& f : seg.folds) {
        seg_docs += f.test_documents;
        seg_rows += f.test_rows;
    }
    const auto n_docs = segments_per_document(sc).size();
    EXPECT_EQ(docs, n_docs);
    EXPECT_EQ(seg_docs, n_docs);
    EXPECT_EQ(seg_rows, sc.segments.size());

    // Same folds and the same training terms on both bases.
    for (std::size_t f = 0; f < doc.folds.size(); ++f) EXPECT_EQ(doc.folds[f].vocabulary, seg.folds[f].vocabulary);
}

TEST(RunExperiment, FoldVocabularyComesFromTrainingDocumentsOnly) {
    const auto& sc = small_segments();
    const auto cfg = config(Base::segment, PipelineId::P3);
    const auto rec = run_experiment(cfg, sc);
    const auto folds = build_folds(segments_per_document(sc), cfg.folds, derive_seed(cfg.seed, fnv1a("folds")));
    for (int f = 0; f < cfg.folds; ++f) {
        std::set<std::string> train_terms, test_terms;
        for (const auto& s : sc.segments) {
            auto& dst = folds.fold_of.at(s.doc_id) == f ? test_terms : train_terms;
            for (const auto& w : split_words(s.text)) dst.insert(w);
        }
        EXPECT_EQ(rec.folds[static_cast<std::size_t>(f)].vocabulary, train_terms.size());
        std::size_t unseen = 0;
        for (const auto& t : test_terms) unseen += !train_terms.count(t);
        EXPECT_GT(unseen, 0u) << "fold " << f << " has no test-only term to act as canary";
    }
}

TEST(RunExperiment, SvdPipelinesComplete) {
    const auto& sc = small_segments();
    auto c = config(Base::document, PipelineId::P1);
    const auto rec = run_experiment(c, sc);
    for (const auto& f : rec.folds) {
        // The SVD is fit on the oversampled training rows.
        const auto rows = static_cast<std::size_t>(std::llround(static_cast<double>(f.train_rows) / (1.0 - f.synthetic_share)));
        EXPECT_GT(rows, f.train_rows);
        EXPECT_EQ(f.svd_dim, std::min<std::size_t>({800, rows, f.vocabulary}));
    }
    c.svd_dim = 10;
    const auto small = run_experiment(c, sc);
    for (const auto& f : small.folds) EXPECT_EQ(f.svd_dim, 10u);
    EXPECT_NO_THROW(run_experiment(config(Base::segment, PipelineId::P2), sc));
}

TEST(RunExperiment, ByteIdenticalRecords) {
    TempDir a("rec-a"), b("rec-b");
    for (auto base : {Base::document, Base::segment}) {
        auto cfg = config(base, PipelineId::P1);
        cfg.workers = 3;
        const auto pa = save_run_record(a.path(), run_experiment(cfg, small_segments()));
        cfg.workers = 1;
        const auto pb = save_run_record(b.path(), run_experiment(cfg, small_segments()));
        EXPECT_EQ(read_file(pa.string()), read_file(pb.string()));
        EXPECT_TRUE(std::filesystem::exists(a.path() / (cfg.cell_name() + ".timing.json")));
    }
    const auto loaded = load_run_records(a.path());
    ASSERT_EQ(loaded.size(), 2u);
    EXPECT_EQ(to_json(loaded[0]).dump() + "\n", read_file((a.path() / "doc-p1-lr.jsonl").string()));
}

TEST(RunExperiment, SingleMemberClassFailsCleanly) {
    SegmentedCorpus sc = small_segments();
    // One document of its own class: oversampling its single training row is impossible.
    Segment lone = sc.segments.front();
    lone.doc_id = "zz-lone";
    lone.department = "zz";
    sc.segments.push_back(lone);
    auto cfg = config(Base::document, PipelineId::P4);
    EXPECT_THROW(run_experiment(cfg, sc), InvalidArgument);
}

TEST(Grid, FullGridCardinality) {
    const std::vector<Base> bases = {Base::segment, Base::document};
    const std::vector<PipelineId> pipes = {PipelineId::P1, PipelineId::P2, PipelineId::P3, PipelineId::P4};
    const std::vector<ClassifierKind> kinds = {ClassifierKind::LR, ClassifierKind::NN, ClassifierKind::RF,
                                               ClassifierKind::SVM, ClassifierKind::SVAE};
    const auto grid = make_grid(bases, pipes, kinds, true);
    ASSERT_EQ(grid.size(), 40u);
    std::set<std::string> names;
    std::set<std::uint64_t> seeds;
    ExperimentConfig common;
    for (const auto& cell : grid) {
        EXPECT_EQ(cell.classifier, load_preset(cell.preset));
        const auto c = cell_config(common, cell);
        EXPECT_NO_THROW(c.validate());
        EXPECT_EQ(c.cell_name(), cell.preset);
        names.insert(c.cell_name());
        seeds.insert(c.seed);
    }
    EXPECT_EQ(names.size(), 40u);
    EXPECT_EQ(seeds.size(), 40u);
}

TEST(Grid, SubsetMatchesIndividualRuns) {
    auto common = config(Base::document, PipelineId::P4);
    common.workers = 2;
    auto grid = make_grid({Base::document, Base::segment}, {PipelineId::P3, PipelineId::P4}, {ClassifierKind::LR}, false);
    LrParams bad;
    bad.C = 1e6;
    grid.push_back({Base::document, PipelineId::P4, ClassifierSpec{bad}, {}});
    const auto records = run_grid(small_segments(), grid, common);
    ASSERT_EQ(records.size(), 5u);
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_TRUE(records[i].error.empty()) << records[i].error;
        const auto solo = run_experiment(cell_config(common, grid[i]), small_segments());
        EXPECT_EQ(to_json(records[i]).dump(), to_json(solo).dump());
    }
    EXPECT_FALSE(records[4].error.empty());
    EXPECT_EQ(report_rows(records).size(), 2u + 2u * 3u);
    EXPECT_THROW(run_grid(small_segments(), {}, common), InvalidArgument);
}

TEST(Objective, SearchRunsCrossValidation) {
    auto cfg = config(Base::document, PipelineId::P4);
    const auto obj = make_objective(cfg, small_segments());
    Assignment a = {{"C", 10.0}, {"penalty", std::string("l2")}, {"l1_ratio", 0.5}, {"tol", 1e-4}};
    const double v = obj(a, 3);
    cfg.classifier = spec_from_assignment(ClassifierKind::LR, a);
    cfg.seed = 3;
    EXPECT_EQ(v, objective_value(run_experiment(cfg, small_segments())));
    EXPECT_GT(v, 0.5);
}

TEST(Report, FixtureRowFormatting) {
    const auto rows = report_rows({fixture_record()});
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(format_row(rows[0]), "Doc & LR & none & 89.73 & 89.83 & 89.73 & 89.54");
    const auto tex = emit_report({fixture_record()}, ReportFormat::latex);
    EXPECT_NE(tex.find("Doc & LR & none & 89.73 & 89.83 & 89.73 & 89.54 \\\\"), std::string::npos) << tex;
}

TEST(Report, EmptyInputGivesHeaderOnly) {
    EXPECT_EQ(emit_report(std::vector<ReportRow>{}, ReportFormat::csv),
              "base,classifier,aggregation,pipeline,accuracy,precision,recall,f1\n");
    for (auto f : {ReportFormat::markdown, ReportFormat::latex}) {
        const auto text = emit_report(std::vector<ReportRow>{}, f);
        EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), f == ReportFormat::markdown ? 2 : 1);
        EXPECT_TRUE(parse_report(text, f).empty());
    }
}

TEST(Report, RoundTripThroughIndependentParser) {
    Rng rng(3);
    const char* kinds[] = {"LR", "NN", "RF", "SVM", "SVAE"};
    std::vector<ReportRow> rows;
    for (const char* k : kinds)
        for (int p = 1; p <= 4; ++p) {
            if (rng.uniform() < 0.2) continue;
            rows.push_back({"Doc", k, "none", p, 0, 0, 0, 0});
            for (const char* m : {"MS", "MWA", "RMS"}) rows.push_back({"Seg", k, m, p, 0, 0, 0, 0});
        }
    for (auto& r : rows) {
        r.accuracy = round_percent(rng.uniform());
        r.precision = round_percent(rng.uniform());
        r.recall = round_percent(rng.uniform());
        r.f1 = round_percent(rng.uniform());
    }
    auto key = [](const ReportRow& r) { return std::make_tuple(r.base, r.classifier, r.aggregation, r.pipeline); };
    auto sorted = [&](std::vector<ReportRow> v) {
        std::sort(v.begin(), v.end(), [&](const ReportRow& a, const ReportRow& b) { return key(a) < key(b); });
        return v;
    };
    for (auto f : {ReportFormat::csv, ReportFormat::markdown, ReportFormat::latex}) {
        const auto text = emit_report(rows, f);
        EXPECT_EQ(sorted(parse_report(text, f)), sorted(rows));
    }
    for (auto f : {ReportFormat::markdown, ReportFormat::latex}) {
        std::vector<ReportRow> back;
        for (const auto& cells : oracle::parse_result_lines(emit_report(rows, f))) {
            ASSERT_TRUE(cells.metrics.size() == 4 || cells.metrics.size() == 8);
            for (std::size_t blk = 0; blk * 4 < cells.metrics.size(); ++blk) {
                if (cells.metrics[blk * 4] == "-") continue;
                back.push_back({cells.base, cells.classifier, cells.aggregation, 0, std::stod(cells.metrics[blk * 4]),
                                std::stod(cells.metrics[blk * 4 + 1]), std::stod(cells.metrics[blk * 4 + 2]),
                                std::stod(cells.metrics[blk * 4 + 3])});
            }
        }
        EXPECT_EQ(back.size(), rows.size());
        std::multiset<std::tuple<std::string, std::string, std::string, double, double, double, double>> a, b;
        for (const auto& r : rows) a.insert({r.base, r.classifier, r.aggregation, r.accuracy, r.precision, r.recall, r.f1});
        for (const auto& r : back) b.insert({r.base, r.classifier, r.aggregation, r.accuracy, r.precision, r.recall, r.f1});
        EXPECT_EQ(a, b);
    }
}

TEST(Report, PipelinePairsAndOrdering) {
    const std::vector<ReportRow> rows = {{"Seg", "LR", "MS", 3, 1, 2, 3, 4},
                                         {"Doc", "LR", "none", 1, 5, 6, 7, 8},
                                         {"Seg", "SVAE", "RMS", 1, 9, 9, 9, 9}};
    const auto tex = emit_report(rows, ReportFormat::latex);
    EXPECT_NE(tex.find("\\multicolumn{4}{l}{Pipeline 1}"), std::string::npos);
    EXPECT_NE(tex.find("\\multicolumn{4}{l}{Pipeline 3}"), std::string::npos);
    EXPECT_EQ(tex.find("Pipeline 2"), std::string::npos);
    EXPECT_LT(tex.find("Seg & SVAE"), tex.find("Doc & LR"));
    EXPECT_THROW(report_format_from_string("html"), InvalidArgument);
    EXPECT_EQ(format_percent(0.8973), "89.73");
}
