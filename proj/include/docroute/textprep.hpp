#ifndef DOCROUTE_TEXTPREP_HPP_
#define DOCROUTE_TEXTPREP_HPP_

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "error.hpp"
#include "utf8.hpp"

namespace docroute {

/// Inflected surface form -> root form. Lookup is exact and case-sensitive.
class LemmaDictionary {
public:
    LemmaDictionary() = default;

    void add(std::string surface, std::string root) {
        if (surface.empty()) throw InvalidArgument("lemma dictionary key must be non-empty");
        map_.insert_or_assign(std::move(surface), std::move(root));
    }

    const std::string* find(const std::string& token) const {
        auto it = map_.find(token);
        return it == map_.end() ? nullptr : &it->second;
    }

    std::size_t size() const { return map_.size(); }
    bool empty() const { return map_.empty(); }

    /// Reads "surface<TAB>root" lines. Blank lines and lines starting with '#' are skipped.
    static LemmaDictionary load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw Error("cannot open lemma dictionary " + path);
        LemmaDictionary dict;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            const auto tab = line.find('\t');
            if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size())
                throw ParseError("expected \"surface<TAB>root\" in " + path, lineno);
            dict.add(line.substr(0, tab), line.substr(tab + 1));
        }
        return dict;
    }

private:
    std::unordered_map<std::string, std::string> map_;
};

/// Token lists removed by the filter stage. Membership is exact on the token
/// as it stands at filter time (after lemmatization, before lowercasing).
struct StopResources {
    std::unordered_set<std::string> stop_words;
    std::unordered_set<std::string> place_names;
    std::unordered_set<std::string> first_names;

    bool contains(const std::string& token) const {
        return stop_words.count(token) || place_names.count(token) || first_names.count(token);
    }
};

inline std::unordered_set<std::string> load_token_list(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open token list " + path);
    std::unordered_set<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        out.insert(line);
    }
    return out;
}

/// Everything preprocess() needs, loaded from a resource directory holding
/// lemma.tsv, stopwords.txt, places.txt and firstnames.txt.
struct TextResources {
    LemmaDictionary lemmas;
    StopResources stop;

    static TextResources load(const std::filesystem::path& dir) {
        TextResources r;
        r.lemmas = LemmaDictionary::load((dir / "lemma.tsv").string());
        r.stop.stop_words = load_token_list((dir / "stopwords.txt").string());
        r.stop.place_names = load_token_list((dir / "places.txt").string());
        r.stop.first_names = load_token_list((dir / "firstnames.txt").string());
        return r;
    }
};

/// Replaces every maximal run of characters that are neither German letters
/// nor digits by one blank.
inline std::string clean_text(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool in_gap = false;
    std::size_t pos = 0;
    while (pos < raw.size()) {
        const char32_t c = utf8::next(raw, pos);
        if (utf8::is_german_letter(c) || utf8::is_digit(c)) {
            utf8::append(out, c);
            in_gap = false;
        } else if (!in_gap) {
            out.push_back(' ');
            in_gap = true;
        }
    }
    return out;
}

/// Single pass: a replacement is never looked up again.
inline std::vector<std::string> lemmatize(std::vector<std::string> tokens, const LemmaDictionary& dict) {
    for (auto& t : tokens) {
        if (const auto* root = dict.find(t)) t = *root;
    }
    return tokens;
}

inline bool has_fewer_than_three_distinct(std::string_view token) {
    char32_t seen[2];
    std::size_t n = 0;
    std::size_t pos = 0;
    while (pos < token.size()) {
        const char32_t c = utf8::next(token, pos);
        bool known = false;
        for (std::size_t i = 0; i < n; ++i) known = known || seen[i] == c;
        if (known) continue;
        if (n == 2) return false;
        seen[n++] = c;
    }
    return true;
}

inline bool is_digits_only(std::string_view token) {
    if (token.empty()) return false;
    for (char c : token) {
        if (c < '0' || c > '9') return false;
    }
    return true;
}

/// Drops tokens with fewer than three distinct characters, digit-only tokens
/// and tokens listed in any resource set. Order is preserved.
inline std::vector<std::string> filter_tokens(const std::vector<std::string>& tokens, const StopResources& res) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) {
        if (has_fewer_than_three_distinct(t) || is_digits_only(t) || res.contains(t)) continue;
        out.push_back(t);
    }
    return out;
}

namespace detail {

// Placeholders for the CISTEM digraph and doubling encodings. Private-use code
// points cannot collide with letters in the input.
inline constexpr char32_t kSch = 0xE000;
inline constexpr char32_t kEi = 0xE001;
inline constexpr char32_t kIe = 0xE002;
inline constexpr char32_t kDouble = 0xE003;

inline std::u32string replace_all(const std::u32string& s, std::u32string_view from, char32_t to) {
    std::u32string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s.compare(i, from.size(), from) == 0) {
            out.push_back(to);
            i += from.size();
        } else {
            out.push_back(s[i++]);
        }
    }
    return out;
}

inline bool ends_with(const std::u32string& s, std::u32string_view suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace detail

/// CISTEM stemmer (Weissweiler & Fraser, 2017) in case-insensitive mode.
///
/// Steps: lowercase; fold ä/ö/ü to a/o/u and ß to ss; strip a leading "ge"
/// when at least four characters follow; encode sch/ei/ie and doubled
/// letters; strip suffixes (em/er/nd when longer than five, then t, then
/// e/s/n) until no rule fires or three characters remain; decode.
inline std::string stem(std::string_view token) {
    using namespace detail;
    if (token.empty()) return {};
    std::u32string w;
    w.reserve(token.size());
    std::size_t pos = 0;
    while (pos < token.size()) {
        const char32_t c = utf8::to_lower(utf8::next(token, pos));
        switch (c) {
            case U'ü': w.push_back(U'u'); break;
            case U'ö': w.push_back(U'o'); break;
            case U'ä': w.push_back(U'a'); break;
            case U'ß': w.append(U"ss"); break;
            default: w.push_back(c);
        }
    }

    if (w.size() >= 6 && w[0] == U'g' && w[1] == U'e') w.erase(0, 2);

    w = replace_all(w, U"sch", kSch);
    w = replace_all(w, U"ei", kEi);
    w = replace_all(w, U"ie", kIe);

    {
        std::u32string enc;
        enc.reserve(w.size());
        for (std::size_t i = 0; i < w.size();) {
            enc.push_back(w[i]);
            if (i + 1 < w.size() && w[i + 1] == w[i]) {
                enc.push_back(kDouble);
                i += 2;
            } else {
                ++i;
            }
        }
        w = std::move(enc);
    }

    while (w.size() > 3) {
        if (w.size() > 5 && (ends_with(w, U"em") || ends_with(w, U"er") || ends_with(w, U"nd"))) {
            w.resize(w.size() - 2);
            continue;
        }
        const char32_t last = w.back();
        if (last == U't' || last == U'e' || last == U's' || last == U'n') {
            w.pop_back();
            continue;
        }
        break;
    }

    std::string out;
    out.reserve(w.size() + 4);
    const auto expand = [&out](char32_t c) {
        switch (c) {
            case kSch: out += "sch"; break;
            case kEi: out += "ei"; break;
            case kIe: out += "ie"; break;
            default: utf8::append(out, c);
        }
    };
    for (std::size_t i = 0; i < w.size(); ++i) expand(w[i] == kDouble ? w[i - 1] : w[i]);
    return out;
}

inline bool is_letters_only(std::string_view token) {
    if (token.empty()) return false;
    std::size_t pos = 0;
    while (pos < token.size()) {
        if (!utf8::is_german_letter(utf8::next(token, pos))) return false;
    }
    return true;
}

/// Raw text -> blank-separated lowercase terms:
/// clean, split, lemmatize, filter, stem, lowercase, keep letters-only tokens.
inline std::string preprocess(std::string_view raw, const LemmaDictionary& dict, const StopResources& res) {
    auto tokens = filter_tokens(lemmatize(utf8::split_blanks(clean_text(raw)), dict), res);
    std::vector<std::string> terms;
    terms.reserve(tokens.size());
    for (const auto& t : tokens) {
        auto term = utf8::to_lower(stem(t));
        if (is_letters_only(term)) terms.push_back(std::move(term));
    }
    return utf8::join_blanks(terms);
}

inline std::string preprocess(std::string_view raw, const TextResources& res) {
    return preprocess(raw, res.lemmas, res.stop);
}

/// Checks the term-string contract: single blanks between non-empty
/// letters-only terms, no leading or trailing blank.
inline bool is_term_string(std::string_view s) {
    if (s.empty()) return true;
    if (s.front() == ' ' || s.back() == ' ') return false;
    if (s.find("  ") != std::string_view::npos) return false;
    for (const auto& t : utf8::split_blanks(s)) {
        if (!is_letters_only(t)) return false;
    }
    return true;
}

}  // namespace docroute

#endif  // DOCROUTE_TEXTPREP_HPP_
