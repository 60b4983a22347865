#pragma once
// Regex reader for report rows of any emitted format. Yields one entry per
// (line, pipeline block) with the four metric cells as printed.

#include <regex>
#include <string>
#include <vector>

namespace oracle {

struct ParsedCells {
    std::string base, classifier, aggregation;
    std::vector<std::string> metrics;  // groups of four, '-' for absent pipelines
};

inline std::vector<ParsedCells> parse_result_lines(const std::string& text) {
    static const std::regex row(R"(^\|?\s*(Seg|Doc)\s*[&|,]\s*(\w+)\s*[&|,]\s*(\w+)\s*(.*)$)");
    static const std::regex cell(R"(-?\d+\.\d\d|(?:^|[&|,]\s*)-(?=\s*(?:[&|]|\\\\|$)))");
    std::vector<ParsedCells> out;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        const std::string line = text.substr(start, end - start);
        start = end + 1;
        std::smatch m;
        if (!std::regex_match(line, m, row)) continue;
        ParsedCells p{m[1], m[2], m[3], {}};
        const std::string rest = m[4];
        for (std::sregex_iterator it(rest.begin(), rest.end(), cell), stop; it != stop; ++it) {
            std::string v = it->str();
            p.metrics.push_back(v.find('.') == std::string::npos ? "-" : v);
        }
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace oracle
