#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <docroute.hpp>

namespace fs = std::filesystem;
using namespace docroute;

namespace {

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    try {
        return nlohmann::json::parse(in, nullptr, true, true);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::vector<std::string> strings_or(const nlohmann::json& j, const char* key, std::vector<std::string> fallback) {
    if (!j.contains(key)) return fallback;
    std::vector<std::string> out;
    for (const auto& v : j[key]) out.push_back(v.is_string() ? v.get<std::string>() : v.dump());
    return out;
}

// Segments for a config: a prepared segments file when "segments" is given,
// otherwise the raw corpus run through preparation.
SegmentedCorpus segments_for(const nlohmann::json& j, const ExperimentConfig& cfg, const fs::path& dir) {
    if (j.contains("segments")) {
        fs::path p = j["segments"].get<std::string>();
        if (p.is_relative()) p = dir / p;
        return load_segments(p.string(), cfg.segment_width);
    }
    if (cfg.corpus.empty()) throw InvalidArgument("config needs \"corpus\" or \"segments\"");
    return prepare_segments(cfg);
}

void print_record_summary(const RunRecord& r) {
    const auto cell = r.config.value("cell", std::string("run"));
    if (!r.error.empty()) {
        std::printf("%-14s FAILED: %s\n", cell.c_str(), r.error.c_str());
        return;
    }
    for (const auto& m : r.results)
        std::printf("%-14s %-5s acc %s  prec %s  rec %s  f1 %s  (%.1fs)\n", cell.c_str(), m.method.c_str(),
                    format_percent(m.pooled.accuracy).c_str(), format_percent(m.pooled.precision).c_str(),
                    format_percent(m.pooled.recall).c_str(), format_percent(m.pooled.f1).c_str(), r.total_seconds);
}

int cmd_run(const std::string& config_path) {
    const auto j = read_json_file(config_path);
    const fs::path dir = fs::path(config_path).parent_path();
    const auto cfg = experiment_config_from_json(j, dir);
    const auto sc = segments_for(j, cfg, dir);

    std::vector<RunRecord> records;
    if (j.contains("grid")) {
        const auto& g = j["grid"];
        std::vector<Base> bases;
        for (const auto& s : strings_or(g, "bases", {"segment", "document"})) bases.push_back(base_from_string(s));
        std::vector<PipelineId> pipelines;
        for (const auto& s : strings_or(g, "pipelines", {"1", "2", "3", "4"})) pipelines.push_back(pipeline_from_string(s));
        std::vector<ClassifierKind> kinds;
        for (const auto& s : strings_or(g, "classifiers", {"SVAE", "LR", "NN", "RF", "SVM"}))
            kinds.push_back(classifier_kind_from_string(s));
        records = run_grid(sc, make_grid(bases, pipelines, kinds, g.value("presets", false)), cfg);
    } else {
        cfg.validate();
        try {
            records.push_back(run_experiment(cfg, sc));
        } catch (const Error& e) {
            RunRecord r;
            r.config = to_json(cfg);
            r.error = e.what();
            records.push_back(std::move(r));
        }
    }
    int failed = 0;
    for (const auto& r : records) {
        if (!cfg.output.empty()) save_run_record(cfg.output, r);
        print_record_summary(r);
        failed += !r.error.empty();
    }
    return failed ? 1 : 0;
}

int cmd_search(const std::string& config_path, int pipeline, const std::string& kind, const std::string& base,
               int budget, std::uint64_t seed, int batch, const std::string& log_path) {
    const auto j = read_json_file(config_path);
    const fs::path dir = fs::path(config_path).parent_path();
    auto cfg = experiment_config_from_json(j, dir);
    const auto sc = segments_for(j, cfg, dir);

    GridCell cell{base_from_string(base), pipeline_from_number(pipeline),
                  ClassifierSpec::defaults(classifier_kind_from_string(kind)), {}};
    ExperimentConfig common = cfg;
    common.seed = seed;
    auto cell_cfg = cell_config(common, cell);
    cell_cfg.workers = 1;
    cell_cfg.validate();

    SearchOptions opt;
    opt.budget = budget;
    opt.seed = seed;
    opt.batch = batch;
    opt.workers = cfg.workers;
    std::optional<TrialLog> log;
    if (!log_path.empty()) log.emplace(log_path);
    opt.on_trial = [&](const Trial& t) {
        if (log) log->append(t);
        std::printf("trial %3d  %s  %s\n", t.index, t.failed ? "failed" : format_percent(t.value).c_str(),
                    to_json(t.assignment).dump().c_str());
        std::fflush(stdout);
    };
    const auto result = bayes_search(make_objective(cell_cfg, sc), space_for(cell.classifier.kind(), cell.base), opt);
    std::printf("best trial %d: %s %s\n", result.best.index, format_percent(result.best.value).c_str(),
                to_json(result.best.assignment).dump().c_str());
    std::printf("%s\n", to_json(spec_from_assignment(cell.classifier.kind(), result.best.assignment)).dump().c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Department routing experiments on segmented and whole documents"};
    app.require_subcommand(1);

    // corpus gen / stats
    auto* corpus = app.add_subcommand("corpus", "Generate or summarize corpora");
    corpus->require_subcommand(1);
    std::string gen_spec, gen_out;
    auto* gen = corpus->add_subcommand("gen", "Generate a synthetic corpus");
    gen->add_option("--spec", gen_spec, "Synthetic spec (json); defaults when omitted")->check(CLI::ExistingFile);
    gen->add_option("--out", gen_out, "Output corpus (.jsonl or .csv)")->required();
    std::string stats_in, stats_segments;
    auto* stats = corpus->add_subcommand("stats", "Per-class document and segment counts");
    stats->add_option("--in", stats_in, "Corpus file")->required()->check(CLI::ExistingFile);
    stats->add_option("--segments", stats_segments, "Segments file of the same corpus")->check(CLI::ExistingFile);

    // prep
    std::string prep_in, prep_res = DOCROUTE_RESOURCE_DIR, prep_out;
    auto* prep = app.add_subcommand("prep", "Preprocess corpus texts into term strings");
    prep->add_option("--in", prep_in, "Raw corpus")->required()->check(CLI::ExistingFile);
    prep->add_option("--resources", prep_res, "Resource directory")->capture_default_str();
    prep->add_option("--out", prep_out, "Preprocessed corpus")->required();

    // segment
    std::string seg_in, seg_out, seg_elim = "none";
    std::size_t seg_width = kDefaultSegmentWidth, seg_min = kDefaultMinClassSegments;
    std::uint64_t seg_seed = 42;
    auto* segment = app.add_subcommand("segment", "Cut preprocessed documents into segments");
    segment->add_option("--in", seg_in, "Preprocessed corpus")->required()->check(CLI::ExistingFile);
    segment->add_option("--width", seg_width, "Segment width in characters")->capture_default_str();
    segment->add_option("--min-class-segments", seg_min, "Drop classes with fewer segments")->capture_default_str();
    segment->add_option("--eliminate", seg_elim, "none, study or a policy file")->capture_default_str();
    segment->add_option("--seed", seg_seed, "Elimination seed")->capture_default_str();
    segment->add_option("--out", seg_out, "Segments file")->required();

    // folds
    std::string folds_in, folds_out;
    int n_folds = kDefaultFolds;
    std::uint64_t folds_seed = 42;
    auto* folds = app.add_subcommand("folds", "Assign documents to balanced folds");
    folds->add_option("--in", folds_in, "Segments file")->required()->check(CLI::ExistingFile);
    folds->add_option("--folds", n_folds, "Fold count")->capture_default_str();
    folds->add_option("--seed", folds_seed, "Seed")->capture_default_str();
    folds->add_option("--out", folds_out, "Fold file (stdout when omitted)");

    // run
    std::string run_config;
    auto* run = app.add_subcommand("run", "Run an experiment cell or grid from a config file");
    run->add_option("--config", run_config, "Config file (json)")->required()->check(CLI::ExistingFile);

    // search
    std::string search_config, search_kind = "LR", search_base = "document", search_log;
    int search_pipeline = 4, search_budget = 50, search_batch = 1;
    std::uint64_t search_seed = 0;
    auto* search = app.add_subcommand("search", "Bayesian hyperparameter search for one cell");
    search->add_option("--config", search_config, "Config file with corpus settings")->required()->check(CLI::ExistingFile);
    search->add_option("--pipeline", search_pipeline, "Pipeline 1-4")->capture_default_str()->check(CLI::Range(1, 4));
    search->add_option("--classifier", search_kind, "LR, NN, RF, SVM or SVAE")->capture_default_str();
    search->add_option("--base", search_base, "segment or document")->capture_default_str();
    search->add_option("--budget", search_budget, "Trial count")->capture_default_str()->check(CLI::PositiveNumber);
    search->add_option("--seed", search_seed, "Seed")->capture_default_str();
    search->add_option("--batch", search_batch, "Proposals per round")->capture_default_str()->check(CLI::PositiveNumber);
    search->add_option("--log", search_log, "Append trials to this jsonl file");

    // report
    std::string report_in, report_format = "markdown", report_out;
    auto* report = app.add_subcommand("report", "Tabulate run records");
    report->add_option("--in", report_in, "Records directory")->required()->check(CLI::ExistingDirectory);
    report->add_option("--format", report_format, "csv, markdown or latex")->capture_default_str();
    report->add_option("--out", report_out, "Output file (stdout when omitted)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            SyntheticSpec spec;
            if (!gen_spec.empty()) spec = read_json_file(gen_spec).get<SyntheticSpec>();
            const auto c = generate_synthetic(spec);
            save_corpus(gen_out, c);
            std::printf("%zu documents, %zu classes -> %s\n", c.size(), c.classes.size(), gen_out.c_str());
        } else if (stats->parsed()) {
            const auto c = load_corpus(stats_in);
            std::optional<SegmentedCorpus> sc;
            if (!stats_segments.empty()) sc = load_segments(stats_segments);
            std::printf("%s\n", to_json(class_distribution(c, sc ? &*sc : nullptr)).dump(2).c_str());
        } else if (prep->parsed()) {
            auto c = load_corpus(prep_in);
            const auto res = TextResources::load(prep_res);
            std::vector<Document> kept;
            for (auto& d : c.documents) {
                d.text = preprocess(d.text, res);
                if (!d.text.empty()) kept.push_back(std::move(d));
            }
            const auto dropped = c.size() - kept.size();
            const auto out = make_corpus(std::move(kept));
            save_corpus(prep_out, out);
            std::printf("%zu documents preprocessed, %zu empty dropped -> %s\n", out.size(), dropped, prep_out.c_str());
        } else if (segment->parsed()) {
            const auto c = load_corpus(seg_in);
            const auto sc = prepare_segments(c, nullptr, seg_width, seg_min, seg_elim, seg_seed);
            save_segments(seg_out, sc);
            std::printf("%zu segments in %zu classes -> %s\n", sc.size(), segments_per_class(sc).size(),
                        seg_out.c_str());
        } else if (folds->parsed()) {
            const auto sc = load_segments(folds_in);
            const auto fa = build_folds(segments_per_document(sc), n_folds, derive_seed(folds_seed, fnv1a("folds")));
            if (folds_out.empty()) {
                write_folds(std::cout, fa);
            } else {
                save_folds(folds_out, fa);
            }
            std::fprintf(stderr, "fold sizes:");
            for (auto t : fa.totals) std::fprintf(stderr, " %zu", t);
            std::fprintf(stderr, " (spread %zu)\n", fa.spread());
        } else if (run->parsed()) {
            return cmd_run(run_config);
        } else if (search->parsed()) {
            return cmd_search(search_config, search_pipeline, search_kind, search_base, search_budget, search_seed,
                              search_batch, search_log);
        } else if (report->parsed()) {
            const auto text = emit_report(load_run_records(report_in), report_format_from_string(report_format));
            if (report_out.empty()) {
                std::cout << text;
            } else {
                std::ofstream out(report_out, std::ios::binary);
                if (!out) throw Error("cannot write " + report_out);
                out << text;
            }
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "docroute: %s\n", e.what());
        return 1;
    }
    return 0;
}
