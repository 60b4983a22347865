#ifndef DOCROUTE_SEGMENTATION_HPP_
#define DOCROUTE_SEGMENTATION_HPP_

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "corpus.hpp"
#include "error.hpp"
#include "random.hpp"
#include "types.hpp"
#include "utf8.hpp"

namespace docroute {

inline constexpr std::size_t kDefaultSegmentWidth = 2048;

/// Cuts a term string every `width` characters, ignoring word boundaries.
/// Only the last slice may be shorter.
inline std::vector<std::string> segment_text(std::string_view ts, std::size_t width) {
    if (width < 1) throw InvalidArgument("segment width must be >= 1");
    if (ts.empty()) throw InvalidArgument("cannot segment an empty term string");
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos < ts.size()) {
        const std::size_t start = pos;
        for (std::size_t n = 0; n < width && pos < ts.size(); ++n) utf8::next(ts, pos);
        out.emplace_back(ts.substr(start, pos - start));
    }
    return out;
}

/// Segments every document of an already preprocessed corpus. Documents whose
/// term string is empty yield no segment and are dropped.
inline SegmentedCorpus segment_corpus(const LabeledCorpus& corpus, std::size_t width = kDefaultSegmentWidth) {
    SegmentedCorpus sc;
    sc.width = width;
    for (const auto& d : corpus.documents) {
        if (d.text.empty()) continue;
        auto pieces = segment_text(d.text, width);
        for (std::size_t i = 0; i < pieces.size(); ++i)
            sc.segments.push_back({d.id, i, d.department, std::move(pieces[i])});
    }
    return sc;
}

inline std::map<std::string, std::size_t> segments_per_class(const SegmentedCorpus& sc) {
    std::map<std::string, std::size_t> counts;
    for (const auto& s : sc.segments) ++counts[s.department];
    return counts;
}

/// Number of segments per document, in corpus order.
inline std::vector<std::pair<std::string, std::size_t>> segments_per_document(const SegmentedCorpus& sc) {
    std::vector<std::pair<std::string, std::size_t>> out;
    for (const auto& s : sc.segments) {
        if (out.empty() || out.back().first != s.doc_id) out.emplace_back(s.doc_id, 0);
        ++out.back().second;
    }
    return out;
}

/// Removes every class with fewer than min_segments segments.
inline SegmentedCorpus filter_classes(const SegmentedCorpus& sc, std::size_t min_segments) {
    const auto counts = segments_per_class(sc);
    SegmentedCorpus out;
    out.width = sc.width;
    for (const auto& s : sc.segments) {
        if (counts.at(s.department) >= min_segments) out.segments.push_back(s);
    }
    if (out.segments.empty())
        throw InvalidArgument("no class has at least " + std::to_string(min_segments) + " segments");
    return out;
}

/// Per-class segment budgets for eliminate_segments(). Classes without a
/// target are left untouched.
struct BalancePolicy {
    std::size_t min_segments_per_class = 100;
    std::map<std::string, std::size_t> targets;
    std::uint64_t seed = 0;
};

/// Reduces each targeted class to its target by dropping uniformly chosen
/// segments. One randomly chosen segment per document is protected first, so
/// no document disappears.
inline SegmentedCorpus eliminate_segments(const SegmentedCorpus& sc, const BalancePolicy& policy) {
    std::map<std::string, std::vector<std::size_t>> class_rows;
    for (std::size_t i = 0; i < sc.segments.size(); ++i) class_rows[sc.segments[i].department].push_back(i);

    std::vector<char> keep(sc.segments.size(), 1);
    for (const auto& [dept, target] : policy.targets) {
        if (target < 1) throw InvalidArgument("elimination target for \"" + dept + "\" must be >= 1");
        auto it = class_rows.find(dept);
        if (it == class_rows.end()) continue;
        const auto& rows = it->second;

        std::vector<std::vector<std::size_t>> by_doc;
        for (auto r : rows) {
            if (by_doc.empty() || sc.segments[by_doc.back().front()].doc_id != sc.segments[r].doc_id)
                by_doc.emplace_back();
            by_doc.back().push_back(r);
        }
        if (target < by_doc.size())
            throw InvalidArgument("elimination target " + std::to_string(target) + " for \"" + dept +
                                  "\" is below its document count " + std::to_string(by_doc.size()));
        if (target >= rows.size()) continue;

        // Stream per class so results do not depend on which other classes are targeted.
        Rng rng(derive_seed(policy.seed, fnv1a(dept)));
        std::vector<std::size_t> open;
        for (const auto& doc_rows : by_doc) {
            const std::size_t protect = rng.index(doc_rows.size());
            for (std::size_t k = 0; k < doc_rows.size(); ++k)
                if (k != protect) open.push_back(doc_rows[k]);
        }
        rng.shuffle(open);
        const std::size_t drop = rows.size() - target;
        for (std::size_t k = 0; k < drop; ++k) keep[open[k]] = 0;
    }

    SegmentedCorpus out;
    out.width = sc.width;
    for (std::size_t i = 0; i < sc.segments.size(); ++i)
        if (keep[i]) out.segments.push_back(sc.segments[i]);
    return out;
}

/// Per-class segment counts of the filtered study corpus (31 classes, 11,386
/// segments, minimum 107, mean 367.3, corrected deviation 187.5).
inline const std::vector<std::size_t>& study_segment_profile() {
    static const std::vector<std::size_t> counts = {
        107, 107, 107, 107, 108, 111, 129, 136, 229, 261, 276, 285, 315, 345, 368, 401,
        404, 434, 439, 447, 483, 498, 518, 584, 589, 598, 600, 600, 600, 600, 600};
    return counts;
}

/// Named elimination presets. "none" yields no targets; "study" assigns the
/// study profile to the classes ranked by size (largest class gets the
/// largest budget), clamped to [document count, current count].
inline BalancePolicy elimination_preset(const std::string& name, const SegmentedCorpus& sc,
                                        std::uint64_t seed) {
    BalancePolicy p;
    p.seed = seed;
    if (name == "none") return p;
    if (name != "study") throw InvalidArgument("unknown elimination preset \"" + name + "\"");
    const auto counts = segments_per_class(sc);
    const auto& profile = study_segment_profile();
    if (counts.size() != profile.size())
        throw InvalidArgument("the study preset needs exactly " + std::to_string(profile.size()) + " classes, got " +
                              std::to_string(counts.size()));
    std::map<std::string, std::size_t> docs;
    std::string last_doc;
    for (const auto& s : sc.segments) {
        if (s.doc_id != last_doc) ++docs[s.department];
        last_doc = s.doc_id;
    }
    std::vector<std::pair<std::size_t, std::string>> ranked;
    for (const auto& [dept, n] : counts) ranked.emplace_back(n, dept);
    std::sort(ranked.begin(), ranked.end());
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        const auto& [n, dept] = ranked[i];
        p.targets[dept] = std::clamp(profile[i], docs[dept], n);
    }
    return p;
}

/// Reads an elimination file: {"seed": s, "targets": {"dept": n, ...}}.
inline BalancePolicy load_balance_policy(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open elimination file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed elimination file: ") + e.what());
    }
    BalancePolicy p;
    p.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("targets")) {
        for (auto& [k, v] : j["targets"].items()) p.targets[k] = v.get<std::size_t>();
    }
    return p;
}

namespace detail {

inline void append_joined(std::string& out, const std::string& piece) {
    if (!out.empty() && !piece.empty() && out.back() != ' ' && piece.front() != ' ') out.push_back(' ');
    out += piece;
}

}  // namespace detail

/// Joins each document's surviving segments in index order with a blank at
/// every joint, so the term multiset of the document equals the union of the
/// segments' term multisets.
inline LabeledCorpus concatenate(const SegmentedCorpus& sc) {
    std::vector<Document> docs;
    for (const auto& s : sc.segments) {
        if (docs.empty() || docs.back().id != s.doc_id) docs.push_back({s.doc_id, s.department, {}});
        detail::append_joined(docs.back().text, s.text);
    }
    // A joint that met an existing blank may leave one at either end.
    for (auto& d : docs) {
        const auto b = d.text.find_first_not_of(' ');
        const auto e = d.text.find_last_not_of(' ');
        d.text = b == std::string::npos ? std::string{} : d.text.substr(b, e - b + 1);
    }
    std::sort(docs.begin(), docs.end(), [](const Document& a, const Document& b) { return a.id < b.id; });
    std::set<std::string> classes;
    for (const auto& d : docs) classes.insert(d.department);
    return LabeledCorpus{std::move(docs), {classes.begin(), classes.end()}};
}

// jsonl segment files: one {doc_id, index, department, text} object per line.

inline void write_segments(std::ostream& out, const SegmentedCorpus& sc) {
    for (const auto& s : sc.segments) {
        nlohmann::ordered_json j;
        j["doc_id"] = s.doc_id;
        j["index"] = s.index;
        j["department"] = s.department;
        j["text"] = s.text;
        out << j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
    }
}

inline void save_segments(const std::string& path, const SegmentedCorpus& sc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write segments file " + path);
    write_segments(out, sc);
}

inline SegmentedCorpus read_segments(std::istream& in, std::size_t width = kDefaultSegmentWidth) {
    SegmentedCorpus sc;
    sc.width = width;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            Segment s{j.at("doc_id").get<std::string>(), j.at("index").get<std::size_t>(),
                      j.at("department").get<std::string>(), j.at("text").get<std::string>()};
            if (!sc.segments.empty() && sc.segments.back().doc_id == s.doc_id) {
                if (s.index <= sc.segments.back().index)
                    throw ParseError("segment indices of \"" + s.doc_id + "\" are not increasing", lineno);
            }
            sc.segments.push_back(std::move(s));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("malformed segment record: ") + e.what(), lineno);
        }
    }
    return sc;
}

inline SegmentedCorpus load_segments(const std::string& path, std::size_t width = kDefaultSegmentWidth) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open segments file " + path);
    return read_segments(in, width);
}

}  // namespace docroute

#endif  // DOCROUTE_SEGMENTATION_HPP_
