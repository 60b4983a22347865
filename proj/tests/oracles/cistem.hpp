#pragma once
// Regex transcription of the published CISTEM reference (case-insensitive
// mode), written against byte strings. Inputs are lowercase-foldable German
// words; the placeholders $ % & * never occur in letters-only tokens.

#include <regex>
#include <string>

namespace oracle {

inline std::string replace_literal(std::string s, const std::string& from, const std::string& to) {
    for (std::size_t p = s.find(from); p != std::string::npos; p = s.find(from, p + to.size())) s.replace(p, from.size(), to);
    return s;
}

inline std::string cistem(std::string word) {
    static const std::regex strip_ge("^ge(.{4,})");
    static const std::regex repl_xx("(.)\\1");
    static const std::regex strip_emr("e[mr]$");
    static const std::regex strip_nd("nd$");
    static const std::regex strip_t("t$");
    static const std::regex strip_esn("[esn]$");
    static const std::regex repl_xx_back("(.)\\*");

    if (word.empty()) return word;
    for (auto& c : word)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    for (const auto& [from, to] : {std::pair<std::string, std::string>{"Ä", "ä"}, {"Ö", "ö"}, {"Ü", "ü"},
                                   {"ü", "u"}, {"ö", "o"}, {"ä", "a"}, {"ß", "ss"}})
        word = replace_literal(word, from, to);
    word = std::regex_replace(word, strip_ge, "$1");
    word = replace_literal(word, "sch", "$");
    word = replace_literal(word, "ei", "%");
    word = replace_literal(word, "ie", "&");
    word = std::regex_replace(word, repl_xx, "$1*");

    auto sub = [&word](const std::regex& re) {
        if (!std::regex_search(word, re)) return false;
        word = std::regex_replace(word, re, "");
        return true;
    };
    while (word.size() > 3) {
        if (word.size() > 5 && (sub(strip_emr) || sub(strip_nd))) continue;
        if (sub(strip_t)) continue;
        if (sub(strip_esn)) continue;
        break;
    }
    word = std::regex_replace(word, repl_xx_back, "$1$1");
    word = replace_literal(word, "%", "ei");
    word = replace_literal(word, "&", "ie");
    word = replace_literal(word, "$", "sch");
    return word;
}

}  // namespace oracle
