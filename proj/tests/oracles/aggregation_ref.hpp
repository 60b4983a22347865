#pragma once
// Reference decision rules written from the formulas with plain loops.
// Candidates are ranked by (score descending, class ascending).

#include <algorithm>
#include <set>
#include <vector>

namespace oracle {

using Rows = std::vector<std::vector<double>>;

inline int best_of(const std::vector<double>& score, const std::set<int>& candidates) {
    std::vector<int> c(candidates.begin(), candidates.end());
    std::stable_sort(c.begin(), c.end(), [&](int a, int b) { return score[a] > score[b]; });
    return c.front();
}

inline std::set<int> all_classes(std::size_t k) {
    std::set<int> s;
    for (std::size_t c = 0; c < k; ++c) s.insert(static_cast<int>(c));
    return s;
}

inline int max_sum(const Rows& p) {
    std::vector<double> s(p[0].size(), 0.0);
    for (const auto& row : p)
        for (std::size_t c = 0; c < row.size(); ++c) s[c] += row[c];
    return best_of(s, all_classes(s.size()));
}

inline int max_weighted_average(const Rows& p, const std::vector<double>& w) {
    std::vector<double> s(p[0].size(), 0.0);
    double total = 0.0;
    for (double x : w) total += x;
    for (std::size_t c = 0; c < s.size(); ++c) {
        for (std::size_t r = 0; r < p.size(); ++r) s[c] += w[r] * p[r][c];
        s[c] /= total;
    }
    return best_of(s, all_classes(s.size()));
}

inline std::set<int> row_winners(const Rows& p) {
    std::set<int> winners;
    for (const auto& row : p) winners.insert(best_of(row, all_classes(row.size())));
    return winners;
}

inline int restricted_max_sum(const Rows& p) {
    std::vector<double> s(p[0].size(), 0.0);
    for (const auto& row : p)
        for (std::size_t c = 0; c < row.size(); ++c) s[c] += row[c];
    return best_of(s, row_winners(p));
}

}  // namespace oracle
