#pragma once
// Small search benchmarks with exhaustively known optima.

#include <algorithm>
#include <map>

#include <docroute/hyperopt.hpp>

namespace testing_support {

inline docroute::SearchSpace quadratic_space() {
    docroute::SearchSpace s;
    s.params = {{"x", docroute::ContinuousParam{0.0, 1.0, docroute::Scale::linear}}};
    return s;
}

inline double quadratic(double x) { return -(x - 0.5) * (x - 0.5); }

inline docroute::Objective quadratic_objective() {
    return [](const docroute::Assignment& a, std::uint64_t) { return quadratic(docroute::as_double(a.at("x"))); };
}

/// Maximizer of the quadratic over a 10,001-point grid on [0, 1].
inline double quadratic_grid_argmax() {
    double best_x = 0.0, best = quadratic(0.0);
    for (int i = 1; i <= 10000; ++i) {
        const double x = i / 10000.0;
        if (quadratic(x) > best) {
            best = quadratic(x);
            best_x = x;
        }
    }
    return best_x;
}

inline const std::map<std::string, double>& categorical_values() {
    static const std::map<std::string, double> v = {{"a", 0.1}, {"b", 0.7}, {"c", 0.3}, {"d", 0.5}};
    return v;
}

inline docroute::SearchSpace categorical_space() {
    docroute::SearchSpace s;
    s.params = {{"opt", docroute::CategoricalParam{{"a", "b", "c", "d"}}}};
    return s;
}

inline docroute::Objective categorical_objective() {
    return [](const docroute::Assignment& a, std::uint64_t) {
        return categorical_values().at(docroute::as_string(a.at("opt")));
    };
}

inline std::string categorical_argmax() {
    const auto& v = categorical_values();
    return std::max_element(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.second < b.second; })->first;
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace testing_support
