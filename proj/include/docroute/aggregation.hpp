#ifndef DOCROUTE_AGGREGATION_HPP_
#define DOCROUTE_AGGREGATION_HPP_

#include <cmath>
#include <string>
#include <vector>

#include "error.hpp"
#include "features.hpp"

namespace docroute {

enum class AggregationMethod { MS, MWA, RMS };

inline const char* to_string(AggregationMethod m) {
    switch (m) {
        case AggregationMethod::MS: return "MS";
        case AggregationMethod::MWA: return "MWA";
        case AggregationMethod::RMS: return "RMS";
    }
    return "?";
}

inline AggregationMethod aggregation_method_from_string(const std::string& s) {
    if (s == "MS") return AggregationMethod::MS;
    if (s == "MWA") return AggregationMethod::MWA;
    if (s == "RMS") return AggregationMethod::RMS;
    throw InvalidArgument("unknown aggregation method \"" + s + "\"");
}

inline constexpr AggregationMethod kAllAggregationMethods[] = {AggregationMethod::MS, AggregationMethod::MWA,
                                                               AggregationMethod::RMS};

/// Probability rows of one document's segments with one positive weight per row.
struct SegmentGroup {
    std::string doc_id;
    DenseMatrix probs;            // segments x classes
    std::vector<double> weights;  // segment character lengths
};

inline void validate(const SegmentGroup& g) {
    if (g.probs.rows() == 0 || g.probs.cols() == 0) throw InvalidArgument("segment group of " + g.doc_id + " is empty");
    if (static_cast<std::size_t>(g.probs.rows()) != g.weights.size())
        throw DimensionMismatch("segment group of " + g.doc_id + " has " + std::to_string(g.probs.rows()) +
                                " rows but " + std::to_string(g.weights.size()) + " weights");
    for (double w : g.weights)
        if (!(w > 0.0)) throw InvalidArgument("segment weights must be positive");
}

namespace detail {

// Lowest index wins ties; only columns with allowed[c] compete.
inline int argmax(const Eigen::RowVectorXd& v, const std::vector<char>* allowed = nullptr) {
    int best = -1;
    for (Eigen::Index c = 0; c < v.size(); ++c) {
        if (allowed && !(*allowed)[static_cast<std::size_t>(c)]) continue;
        if (best < 0 || v[c] > v[best]) best = static_cast<int>(c);
    }
    return best;
}

}  // namespace detail

/// Document class from its segment rows.
///   MS:  argmax_c sum_s p_s(c)
///   MWA: argmax_c sum_s w_s p_s(c) / sum_s w_s
///   RMS: MS restricted to classes that are the argmax of at least one row
inline int aggregate(const SegmentGroup& g, AggregationMethod method) {
    validate(g);
    switch (method) {
        case AggregationMethod::MS: return detail::argmax(g.probs.colwise().sum());
        case AggregationMethod::MWA: {
            Eigen::RowVectorXd s = Eigen::RowVectorXd::Zero(g.probs.cols());
            double total = 0.0;
            for (Eigen::Index r = 0; r < g.probs.rows(); ++r) {
                s += g.weights[static_cast<std::size_t>(r)] * g.probs.row(r);
                total += g.weights[static_cast<std::size_t>(r)];
            }
            return detail::argmax(s / total);
        }
        case AggregationMethod::RMS: {
            std::vector<char> winners(static_cast<std::size_t>(g.probs.cols()), 0);
            for (Eigen::Index r = 0; r < g.probs.rows(); ++r)
                winners.at(static_cast<std::size_t>(detail::argmax(g.probs.row(r)))) = 1;
            return detail::argmax(g.probs.colwise().sum(), &winners);
        }
    }
    throw InvalidArgument("unknown aggregation method");
}

inline std::vector<int> aggregate_corpus(const std::vector<SegmentGroup>& groups, AggregationMethod method) {
    std::vector<int> out;
    out.reserve(groups.size());
    for (const auto& g : groups) out.push_back(aggregate(g, method));
    return out;
}

}  // namespace docroute

#endif  // DOCROUTE_AGGREGATION_HPP_
