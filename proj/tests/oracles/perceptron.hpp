#pragma once
// Rosenblatt perceptron: converges iff the two classes are linearly separable
// (within the epoch budget), which certifies a fixture as separable.

#include <vector>

namespace oracle {

/// Labels are 0/1. Returns true when an epoch passes without mistakes.
inline bool perceptron_separates(const std::vector<std::vector<double>>& x, const std::vector<int>& y, int epochs = 1000) {
    std::vector<double> w(x[0].size() + 1, 0.0);
    for (int e = 0; e < epochs; ++e) {
        int mistakes = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double s = w.back();
            for (std::size_t j = 0; j < x[i].size(); ++j) s += w[j] * x[i][j];
            const int t = y[i] ? 1 : -1;
            if (t * s <= 0) {
                for (std::size_t j = 0; j < x[i].size(); ++j) w[j] += t * x[i][j];
                w.back() += t;
                ++mistakes;
            }
        }
        if (mistakes == 0) return true;
    }
    return false;
}

}  // namespace oracle
