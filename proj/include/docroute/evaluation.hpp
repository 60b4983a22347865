#ifndef DOCROUTE_EVALUATION_HPP_
#define DOCROUTE_EVALUATION_HPP_

#include <algorithm>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "random.hpp"

namespace docroute {

inline constexpr int kDefaultFolds = 5;
inline constexpr std::size_t kTightFoldBudget = 1u << 21;

/// Document-to-fold map. All segments of a document share its fold.
struct FoldAssignment {
    int n_folds = 0;
    std::map<std::string, int> fold_of;
    std::vector<std::size_t> totals;  // segments per fold

    std::size_t spread() const {
        const auto [lo, hi] = std::minmax_element(totals.begin(), totals.end());
        return *hi - *lo;
    }

    bool operator==(const FoldAssignment&) const = default;
};

namespace detail {

struct FoldScore {
    std::size_t spread;
    unsigned long long sum_sq;
    bool operator<(const FoldScore& o) const { return spread != o.spread ? spread < o.spread : sum_sq < o.sum_sq; }
};

inline FoldScore fold_score(const std::vector<std::size_t>& t) {
    const auto [lo, hi] = std::minmax_element(t.begin(), t.end());
    unsigned long long sq = 0;
    for (auto v : t) sq += static_cast<unsigned long long>(v) * v;
    return {*hi - *lo, sq};
}

// Depth-first search for an assignment whose fold totals are all q or q + 1
// (total = n q + r, exactly r folds at q + 1) with no fold left empty.
// Documents go in the given order; folds in the same state are tried once.
// Gives up after `budget` nodes.
class TightFoldSearch {
public:
    TightFoldSearch(const std::vector<std::size_t>& sizes, std::size_t n_folds, std::size_t budget)
        : sizes_(sizes), totals_(n_folds, 0), members_(n_folds, 0), fold_(sizes.size(), 0), budget_(budget) {
        std::size_t total = 0;
        for (auto c : sizes) total += c;
        q_ = total / n_folds;
        r_ = total % n_folds;
    }

    bool run() { return place(0); }
    const std::vector<int>& folds() const { return fold_; }

private:
    bool place(std::size_t i) {
        if (i == sizes_.size()) return true;
        if (budget_ == 0) return false;
        --budget_;
        const std::size_t empty = static_cast<std::size_t>(std::count(members_.begin(), members_.end(), 0));
        if (sizes_.size() - i < empty) return false;
        const std::size_t c = sizes_[i];
        for (std::size_t f = 0; f < totals_.size(); ++f) {
            bool seen = false;
            for (std::size_t g = 0; g < f && !seen; ++g) seen = totals_[g] == totals_[f] && members_[g] == members_[f];
            if (seen) continue;
            const std::size_t t = totals_[f] + c;
            if (t > q_ + (r_ > 0 ? 1 : 0)) continue;
            if (t > q_ && totals_[f] <= q_ && over_ == r_) continue;
            const bool crosses = t > q_ && totals_[f] <= q_;
            totals_[f] = t;
            ++members_[f];
            over_ += crosses;
            fold_[i] = static_cast<int>(f);
            if (place(i + 1)) return true;
            over_ -= crosses;
            --members_[f];
            totals_[f] -= c;
        }
        return false;
    }

    const std::vector<std::size_t>& sizes_;
    std::vector<std::size_t> totals_, members_;
    std::vector<int> fold_;
    std::size_t budget_, q_ = 0, r_ = 0, over_ = 0;
};

}  // namespace detail

/// Balanced document-integral folds. Documents are placed largest first into
/// the currently lightest fold (documents of equal size in seeded random
/// order, lightest-fold ties to the lowest index). A repair phase then applies
/// single-document moves and pairwise swaps while they lower (spread, sum of
/// squared fold totals); on exit no move or swap lowers the spread. When the
/// spread is still above one, a bounded exhaustive search looks for fold
/// totals that differ by at most one.
inline FoldAssignment build_folds(const std::vector<std::pair<std::string, std::size_t>>& doc_counts, int n_folds,
                                  std::uint64_t seed) {
    if (n_folds < 1) throw InvalidArgument("fold count must be >= 1");
    if (static_cast<std::size_t>(n_folds) > doc_counts.size())
        throw InvalidArgument("cannot build " + std::to_string(n_folds) + " folds from " +
                              std::to_string(doc_counts.size()) + " documents");
    for (const auto& [id, c] : doc_counts)
        if (c == 0) throw InvalidArgument("document " + id + " has no segments");

    std::vector<std::size_t> order(doc_counts.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return doc_counts[a].second > doc_counts[b].second; });

    const auto nf = static_cast<std::size_t>(n_folds);
    std::vector<std::size_t> totals(nf, 0), members(nf, 0);
    std::vector<int> fold(doc_counts.size());
    for (auto d : order) {
        const auto f = static_cast<std::size_t>(std::min_element(totals.begin(), totals.end()) - totals.begin());
        fold[d] = static_cast<int>(f);
        totals[f] += doc_counts[d].second;
        ++members[f];
    }

    auto score = detail::fold_score(totals);
    // Moves `amount` segments from fold `from` to fold `to` if that lowers the score.
    auto try_transfer = [&](std::size_t from, std::size_t to, std::size_t amount) {
        totals[from] -= amount;
        totals[to] += amount;
        const auto s = detail::fold_score(totals);
        if (s < score) {
            score = s;
            return true;
        }
        totals[from] += amount;
        totals[to] -= amount;
        return false;
    };
    for (bool improved = true; improved;) {
        improved = false;
        for (std::size_t i = 0; i < order.size() && !improved; ++i) {
            const auto d = order[i];
            const auto a = static_cast<std::size_t>(fold[d]);
            const auto cd = doc_counts[d].second;
            for (std::size_t b = 0; b < nf && !improved; ++b) {
                if (b == a) continue;
                if (members[a] > 1 && try_transfer(a, b, cd)) {
                    fold[d] = static_cast<int>(b);
                    --members[a];
                    ++members[b];
                    improved = true;
                    break;
                }
                for (std::size_t j = 0; j < order.size(); ++j) {
                    const auto e = order[j];
                    if (static_cast<std::size_t>(fold[e]) != b) continue;
                    const auto ce = doc_counts[e].second;
                    if (ce == cd) continue;
                    if (ce < cd ? try_transfer(a, b, cd - ce) : try_transfer(b, a, ce - cd)) {
                        fold[d] = static_cast<int>(b);
                        fold[e] = static_cast<int>(a);
                        improved = true;
                        break;
                    }
                }
            }
        }
    }

    if (score.spread > 1) {
        std::vector<std::size_t> sizes;
        for (auto d : order) sizes.push_back(doc_counts[d].second);
        detail::TightFoldSearch search(sizes, nf, kTightFoldBudget);
        if (search.run()) {
            std::fill(totals.begin(), totals.end(), 0);
            for (std::size_t i = 0; i < order.size(); ++i) {
                const auto f = search.folds()[i];
                fold[order[i]] = f;
                totals[static_cast<std::size_t>(f)] += sizes[i];
            }
        }
    }

    FoldAssignment fa;
    fa.n_folds = n_folds;
    fa.totals = totals;
    for (std::size_t d = 0; d < doc_counts.size(); ++d) fa.fold_of[doc_counts[d].first] = fold[d];
    return fa;
}

inline void write_folds(std::ostream& out, const FoldAssignment& fa) {
    for (const auto& [id, f] : fa.fold_of) {
        nlohmann::ordered_json j;
        j["doc_id"] = id;
        j["fold"] = f;
        out << j.dump() << '\n';
    }
}

inline void save_folds(const std::string& path, const FoldAssignment& fa) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write fold file " + path);
    write_folds(out, fa);
}

/// Reads a fold file; totals are recomputed from `doc_counts` when given.
inline FoldAssignment read_folds(std::istream& in, const std::map<std::string, std::size_t>* doc_counts = nullptr) {
    FoldAssignment fa;
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
        ++no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            const int f = j.at("fold").get<int>();
            if (f < 0) throw ParseError("negative fold index", no);
            if (!fa.fold_of.emplace(j.at("doc_id").get<std::string>(), f).second)
                throw ParseError("duplicate doc_id in fold file", no);
            fa.n_folds = std::max(fa.n_folds, f + 1);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("invalid fold record: ") + e.what(), no);
        }
    }
    fa.totals.assign(static_cast<std::size_t>(fa.n_folds), 0);
    for (const auto& [id, f] : fa.fold_of) {
        std::size_t c = 1;
        if (doc_counts) {
            const auto it = doc_counts->find(id);
            if (it == doc_counts->end()) throw ParseError("fold file names unknown document " + id);
            c = it->second;
        }
        fa.totals[static_cast<std::size_t>(f)] += c;
    }
    return fa;
}

// ---------------------------------------------------------------------------
// Metrics

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
    bool operator==(const ClassMetrics&) const = default;
};

/// Accuracy and support-weighted precision, recall and F1.
struct MetricsReport {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::vector<ClassMetrics> per_class;
    std::vector<std::string> warnings;  // zero denominators, set to 0
    bool operator==(const MetricsReport&) const = default;
};

/// Labels are indices into a class order of length n_classes. `class_names`,
/// when given, only labels the warnings.
inline MetricsReport compute_metrics(const std::vector<int>& y_true, const std::vector<int>& y_pred, int n_classes,
                                     const std::vector<std::string>* class_names = nullptr) {
    if (y_true.size() != y_pred.size())
        throw DimensionMismatch("y_true has " + std::to_string(y_true.size()) + " labels, y_pred " +
                                std::to_string(y_pred.size()));
    if (y_true.empty()) throw InvalidArgument("metrics need at least one label");
    const auto k = static_cast<std::size_t>(n_classes);
    std::vector<std::size_t> tp(k, 0), predicted(k, 0), support(k, 0);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i] < 0 || y_true[i] >= n_classes || y_pred[i] < 0 || y_pred[i] >= n_classes)
            throw InvalidArgument("label out of range");
        const auto t = static_cast<std::size_t>(y_true[i]);
        const auto p = static_cast<std::size_t>(y_pred[i]);
        ++support[t];
        ++predicted[p];
        if (t == p) {
            ++tp[t];
            ++correct;
        }
    }
    MetricsReport r;
    const double n = static_cast<double>(y_true.size());
    r.accuracy = static_cast<double>(correct) / n;
    r.per_class.resize(k);
    auto name = [&](std::size_t c) { return class_names ? (*class_names)[c] : std::to_string(c); };
    for (std::size_t c = 0; c < k; ++c) {
        auto& m = r.per_class[c];
        m.support = support[c];
        if (predicted[c] > 0) {
            m.precision = static_cast<double>(tp[c]) / static_cast<double>(predicted[c]);
        } else if (support[c] > 0) {
            r.warnings.push_back("precision of class " + name(c) + " undefined (no predictions), set to 0");
        }
        if (support[c] > 0) m.recall = static_cast<double>(tp[c]) / static_cast<double>(support[c]);
        if (m.precision + m.recall > 0.0) m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
        const double w = static_cast<double>(support[c]) / n;
        r.precision += w * m.precision;
        r.recall += w * m.recall;
        r.f1 += w * m.f1;
    }
    return r;
}

inline nlohmann::ordered_json to_json(const MetricsReport& r) {
    nlohmann::ordered_json j;
    j["accuracy"] = r.accuracy;
    j["precision"] = r.precision;
    j["recall"] = r.recall;
    j["f1"] = r.f1;
    nlohmann::ordered_json pc = nlohmann::ordered_json::array();
    for (const auto& c : r.per_class)
        pc.push_back({{"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}, {"support", c.support}});
    j["per_class"] = std::move(pc);
    j["warnings"] = r.warnings;
    return j;
}

inline MetricsReport metrics_from_json(const nlohmann::json& j) {
    MetricsReport r;
    r.accuracy = j.at("accuracy").get<double>();
    r.precision = j.at("precision").get<double>();
    r.recall = j.at("recall").get<double>();
    r.f1 = j.at("f1").get<double>();
    if (j.contains("per_class"))
        for (const auto& c : j["per_class"])
            r.per_class.push_back({c.at("precision").get<double>(), c.at("recall").get<double>(),
                                   c.at("f1").get<double>(), c.at("support").get<std::size_t>()});
    if (j.contains("warnings")) r.warnings = j["warnings"].get<std::vector<std::string>>();
    return r;
}

}  // namespace docroute

#endif  // DOCROUTE_EVALUATION_HPP_
