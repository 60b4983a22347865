#ifndef DOCROUTE_CORPUS_HPP_
#define DOCROUTE_CORPUS_HPP_

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "random.hpp"
#include "types.hpp"

namespace docroute {

enum class CorpusFormat { jsonl, csv };

inline CorpusFormat corpus_format_from_path(const std::string& path) {
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0) return CorpusFormat::csv;
    return CorpusFormat::jsonl;
}

/// Sorts documents by id, rejects duplicates/empty fields and derives the class set.
inline LabeledCorpus make_corpus(std::vector<Document> docs) {
    std::sort(docs.begin(), docs.end(),
              [](const Document& a, const Document& b) { return a.id < b.id; });
    std::set<std::string> classes;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        const auto& d = docs[i];
        if (d.id.empty()) throw InvalidArgument("document with empty id");
        if (i > 0 && docs[i - 1].id == d.id) throw InvalidArgument("duplicate document id \"" + d.id + "\"");
        if (d.department.empty()) throw InvalidArgument("document \"" + d.id + "\" has an empty department");
        if (d.text.empty()) throw InvalidArgument("document \"" + d.id + "\" has an empty text");
        classes.insert(d.department);
    }
    return LabeledCorpus{std::move(docs), {classes.begin(), classes.end()}};
}

namespace detail {

inline std::vector<Document> read_jsonl_documents(std::istream& in) {
    std::vector<Document> docs;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("malformed json record: ") + e.what(), lineno);
        }
        if (!j.is_object()) throw ParseError("record is not an object", lineno);
        Document d;
        for (const char* key : {"id", "department", "text"}) {
            if (!j.contains(key) || !j[key].is_string())
                throw ParseError(std::string("record lacks string field \"") + key + "\"", lineno);
        }
        d.id = j["id"].get<std::string>();
        d.department = j["department"].get<std::string>();
        d.text = j["text"].get<std::string>();
        if (!seen.insert(d.id).second) throw ParseError("duplicate document id \"" + d.id + "\"", lineno);
        if (d.text.empty()) throw ParseError("document \"" + d.id + "\" has an empty text", lineno);
        if (d.department.empty()) throw ParseError("document \"" + d.id + "\" has an empty department", lineno);
        docs.push_back(std::move(d));
    }
    return docs;
}

// RFC 4180 reader; quoted fields may contain separators, quotes ("") and newlines.
inline std::vector<std::pair<std::size_t, std::vector<std::string>>> read_csv_rows(std::istream& in) {
    std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    std::size_t line = 1;
    std::size_t row_line = 1;
    char c;
    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_row = [&] {
        end_field();
        if (!(row.size() == 1 && row[0].empty())) rows.emplace_back(row_line, std::move(row));
        row.clear();
        row_line = line;
    };
    while (in.get(c)) {
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field.push_back('"');
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        if (c == '"' && !field_started) {
            quoted = true;
            field_started = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\r') {
            // tolerated before \n
        } else if (c == '\n') {
            ++line;
            end_row();
        } else {
            field.push_back(c);
            field_started = true;
        }
    }
    if (quoted) throw ParseError("unterminated quoted field", row_line);
    if (!field.empty() || !row.empty()) end_row();
    return rows;
}

inline std::vector<Document> read_csv_documents(std::istream& in) {
    auto rows = read_csv_rows(in);
    if (rows.empty()) return {};
    const auto& header = rows.front().second;
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
    for (const char* key : {"id", "department", "text"}) {
        if (!col.count(key)) throw ParseError(std::string("csv header lacks column \"") + key + "\"", 1);
    }
    std::vector<Document> docs;
    std::unordered_set<std::string> seen;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& [lineno, fields] = rows[r];
        if (fields.size() != header.size())
            throw ParseError("expected " + std::to_string(header.size()) + " fields, got " +
                                 std::to_string(fields.size()),
                             lineno);
        Document d{fields[col["id"]], fields[col["department"]], fields[col["text"]]};
        if (d.id.empty()) throw ParseError("empty id", lineno);
        if (!seen.insert(d.id).second) throw ParseError("duplicate document id \"" + d.id + "\"", lineno);
        if (d.text.empty()) throw ParseError("document \"" + d.id + "\" has an empty text", lineno);
        if (d.department.empty()) throw ParseError("document \"" + d.id + "\" has an empty department", lineno);
        docs.push_back(std::move(d));
    }
    return docs;
}

inline std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace detail

inline LabeledCorpus read_corpus(std::istream& in, CorpusFormat format) {
    auto docs = format == CorpusFormat::jsonl ? detail::read_jsonl_documents(in)
                                              : detail::read_csv_documents(in);
    return make_corpus(std::move(docs));
}

/// Reads and validates a corpus file. Errors carry the offending line number.
inline LabeledCorpus load_corpus(const std::string& path, CorpusFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open corpus file " + path);
    return read_corpus(in, format);
}

inline LabeledCorpus load_corpus(const std::string& path) {
    return load_corpus(path, corpus_format_from_path(path));
}

inline void write_corpus(std::ostream& out, const LabeledCorpus& corpus, CorpusFormat format) {
    if (format == CorpusFormat::jsonl) {
        for (const auto& d : corpus.documents) {
            nlohmann::ordered_json j;
            j["id"] = d.id;
            j["department"] = d.department;
            j["text"] = d.text;
            out << j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
        }
    } else {
        out << "id,department,text\n";
        for (const auto& d : corpus.documents) {
            out << detail::csv_quote(d.id) << ',' << detail::csv_quote(d.department) << ','
                << detail::csv_quote(d.text) << '\n';
        }
    }
}

inline void save_corpus(const std::string& path, const LabeledCorpus& corpus, CorpusFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write corpus file " + path);
    write_corpus(out, corpus, format);
}

inline void save_corpus(const std::string& path, const LabeledCorpus& corpus) {
    save_corpus(path, corpus, corpus_format_from_path(path));
}

// ---------------------------------------------------------------------------
// Synthetic corpora

/// Parameters of the synthetic stand-in corpus. Document lengths are
/// lognormal in tokens; each token is a class keyword with probability
/// keyword_rate, a shared filler word otherwise.
struct SyntheticSpec {
    std::size_t class_count = 8;
    std::size_t keyword_vocab = 40;
    std::size_t filler_vocab = 2000;
    double length_mu = 5.5;
    double length_sigma = 1.0;
    std::size_t docs_per_class = 40;
    double keyword_rate = 0.3;
    std::uint64_t seed = 7;

    void validate() const {
        if (class_count < 1 || keyword_vocab < 1 || filler_vocab < 1 || docs_per_class < 1)
            throw InvalidArgument("synthetic spec counts must be >= 1");
        if (!(keyword_rate >= 0.0 && keyword_rate <= 1.0))
            throw InvalidArgument("keyword rate must lie in [0, 1]");
        if (!(length_sigma >= 0.0) || !std::isfinite(length_mu))
            throw InvalidArgument("invalid length distribution");
    }
};

inline void to_json(nlohmann::json& j, const SyntheticSpec& s) {
    j = nlohmann::json{{"class_count", s.class_count},     {"keyword_vocab", s.keyword_vocab},
                       {"filler_vocab", s.filler_vocab},   {"length_mu", s.length_mu},
                       {"length_sigma", s.length_sigma},   {"docs_per_class", s.docs_per_class},
                       {"keyword_rate", s.keyword_rate},   {"seed", s.seed}};
}

inline void from_json(const nlohmann::json& j, SyntheticSpec& s) {
    s.class_count = j.value("class_count", s.class_count);
    s.keyword_vocab = j.value("keyword_vocab", s.keyword_vocab);
    s.filler_vocab = j.value("filler_vocab", s.filler_vocab);
    s.length_mu = j.value("length_mu", s.length_mu);
    s.length_sigma = j.value("length_sigma", s.length_sigma);
    s.docs_per_class = j.value("docs_per_class", s.docs_per_class);
    s.keyword_rate = j.value("keyword_rate", s.keyword_rate);
    s.seed = j.value("seed", s.seed);
}

/// Word pools of a synthetic corpus: keywords[c] for class c, then filler.
struct SyntheticVocabulary {
    std::vector<std::vector<std::string>> keywords;
    std::vector<std::string> filler;
};

namespace detail {

// Words are consonant-vowel syllables ending in a consonant that the German
// suffix stripper leaves alone, so every generated word survives
// preprocessing as a distinct term.
inline std::string synth_word(Rng& rng) {
    static constexpr std::string_view onsets[] = {"b", "d", "f", "g", "h", "k", "l", "m", "n",
                                                  "p", "r", "s", "t", "w", "z", "br", "kl", "st",
                                                  "tr", "pf", "sch", "fr", "gr", "pl"};
    static constexpr std::string_view vowels[] = {"a", "e", "i", "o", "u", "au", "ei", "ie"};
    static constexpr std::string_view codas[] = {"b", "f", "g", "k", "l", "p", "z", "lk", "rb"};
    std::string w;
    do {
        w.clear();
        const std::size_t syllables = 2 + rng.index(2);
        for (std::size_t i = 0; i < syllables; ++i) {
            w += onsets[rng.index(std::size(onsets))];
            w += vowels[rng.index(std::size(vowels))];
        }
        w += codas[rng.index(std::size(codas))];
    } while (w.rfind("ge", 0) == 0 || std::set<char>(w.begin(), w.end()).size() < 3);
    return w;
}

}  // namespace detail

inline SyntheticVocabulary synthetic_vocabulary(const SyntheticSpec& spec) {
    spec.validate();
    Rng rng(derive_seed(spec.seed, 0));
    std::set<std::string> used;
    auto fresh = [&] {
        for (;;) {
            auto w = detail::synth_word(rng);
            // Doubled letters are fine; identical words across pools are not.
            if (used.insert(w).second) return w;
        }
    };
    SyntheticVocabulary v;
    v.keywords.resize(spec.class_count);
    for (auto& pool : v.keywords) {
        for (std::size_t i = 0; i < spec.keyword_vocab; ++i) pool.push_back(fresh());
    }
    for (std::size_t i = 0; i < spec.filler_vocab; ++i) v.filler.push_back(fresh());
    return v;
}

inline std::string synthetic_class_name(std::size_t c) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "dept%02zu", c);
    return buf;
}

/// Generates a deterministic labeled corpus from spec (pure in spec, including seed).
inline LabeledCorpus generate_synthetic(const SyntheticSpec& spec) {
    const auto vocab = synthetic_vocabulary(spec);
    Rng rng(derive_seed(spec.seed, 1));
    std::vector<Document> docs;
    for (std::size_t c = 0; c < spec.class_count; ++c) {
        for (std::size_t k = 0; k < spec.docs_per_class; ++k) {
            const double raw = rng.lognormal(spec.length_mu, spec.length_sigma);
            const auto n_tokens = static_cast<std::size_t>(std::max(1.0, std::round(raw)));
            std::string text;
            for (std::size_t t = 0; t < n_tokens; ++t) {
                const bool keyword = rng.uniform() < spec.keyword_rate;
                std::string word = keyword ? vocab.keywords[c][rng.index(spec.keyword_vocab)]
                                           : vocab.filler[rng.index(spec.filler_vocab)];
                if (rng.uniform() < 0.15) word[0] = static_cast<char>(word[0] - 'a' + 'A');
                if (t) text += ' ';
                text += word;
                const double p = rng.uniform();
                if (p < 0.06) {
                    text += ',';
                } else if (p < 0.10) {
                    text += '.';
                } else if (p < 0.11) {
                    text += " Nr. " + std::to_string(rng.integer(1, 2024));
                }
            }
            char id[48];
            std::snprintf(id, sizeof id, "syn-%02zu-%04zu", c, k);
            docs.push_back({id, synthetic_class_name(c), std::move(text)});
        }
    }
    return make_corpus(std::move(docs));
}

// ---------------------------------------------------------------------------
// Class distribution summaries

struct CountStats {
    std::size_t min = 0;
    std::size_t max = 0;
    double mean = 0.0;
    double stddev = 0.0;  // corrected sample deviation (n - 1)
    std::size_t total = 0;
};

inline CountStats count_stats(const std::vector<std::size_t>& counts) {
    CountStats s;
    if (counts.empty()) return s;
    s.min = *std::min_element(counts.begin(), counts.end());
    s.max = *std::max_element(counts.begin(), counts.end());
    for (auto c : counts) s.total += c;
    s.mean = static_cast<double>(s.total) / static_cast<double>(counts.size());
    if (counts.size() > 1) {
        double ss = 0.0;
        for (auto c : counts) ss += (static_cast<double>(c) - s.mean) * (static_cast<double>(c) - s.mean);
        s.stddev = std::sqrt(ss / static_cast<double>(counts.size() - 1));
    }
    return s;
}

struct ClassSummary {
    std::vector<std::string> classes;
    std::vector<std::size_t> documents;
    CountStats document_stats;
    std::optional<std::vector<std::size_t>> segments;
    std::optional<CountStats> segment_stats;
};

/// Per-class document counts and, when segments are given, per-class segment
/// counts. Segments must reference documents of the corpus with matching labels.
inline ClassSummary class_distribution(const LabeledCorpus& corpus,
                                       const SegmentedCorpus* segments = nullptr) {
    ClassSummary s;
    s.classes = corpus.classes;
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < s.classes.size(); ++i) index[s.classes[i]] = i;
    s.documents.assign(s.classes.size(), 0);
    std::map<std::string, const Document*> by_id;
    for (const auto& d : corpus.documents) {
        ++s.documents[index.at(d.department)];
        by_id[d.id] = &d;
    }
    s.document_stats = count_stats(s.documents);
    if (segments) {
        std::vector<std::size_t> seg(s.classes.size(), 0);
        for (const auto& sg : segments->segments) {
            auto it = by_id.find(sg.doc_id);
            if (it == by_id.end())
                throw InvalidArgument("segment references unknown document \"" + sg.doc_id + "\"");
            if (it->second->department != sg.department)
                throw InvalidArgument("segment of \"" + sg.doc_id + "\" carries a different department");
            ++seg[index.at(sg.department)];
        }
        s.segment_stats = count_stats(seg);
        s.segments = std::move(seg);
    }
    return s;
}

inline nlohmann::ordered_json to_json(const ClassSummary& s) {
    auto stats = [](const CountStats& c) {
        return nlohmann::ordered_json{{"total", c.total}, {"min", c.min},       {"max", c.max},
                                      {"mean", c.mean},   {"stddev", c.stddev}};
    };
    nlohmann::ordered_json j;
    j["classes"] = s.classes;
    j["documents"] = s.documents;
    j["document_stats"] = stats(s.document_stats);
    if (s.segments) {
        j["segments"] = *s.segments;
        j["segment_stats"] = stats(*s.segment_stats);
    }
    return j;
}

}  // namespace docroute

#endif  // DOCROUTE_CORPUS_HPP_
