#pragma once
// Random SegmentGroups for aggregation property tests. Every other group uses
// probabilities in multiples of 1/8 so exact score ties occur.

#include <docroute/aggregation.hpp>

#include "oracles/aggregation_ref.hpp"

namespace testing_support {

inline docroute::SegmentGroup random_group(docroute::Rng& rng, bool quantized) {
    const auto rows = static_cast<Eigen::Index>(1 + rng.index(6));
    const auto cols = static_cast<Eigen::Index>(2 + rng.index(5));
    docroute::SegmentGroup g;
    g.doc_id = "d";
    g.probs = docroute::DenseMatrix::Zero(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        if (quantized) {
            for (int k = 0; k < 8; ++k) g.probs(r, static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(cols)))) += 0.125;
        } else {
            for (Eigen::Index c = 0; c < cols; ++c) g.probs(r, c) = -std::log(1.0 - rng.uniform());
            g.probs.row(r) /= g.probs.row(r).sum();
        }
        g.weights.push_back(static_cast<double>(1 + rng.index(2048)));
    }
    return g;
}

inline oracle::Rows to_rows(const docroute::DenseMatrix& m) {
    oracle::Rows rows(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) rows[static_cast<std::size_t>(r)].push_back(m(r, c));
    return rows;
}

}  // namespace testing_support
