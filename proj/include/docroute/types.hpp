#ifndef DOCROUTE_TYPES_HPP_
#define DOCROUTE_TYPES_HPP_

#include <cstddef>
#include <string>
#include <vector>

namespace docroute {

/// One labeled text. The department is the routing target.
struct Document {
    std::string id;
    std::string department;
    std::string text;

    bool operator==(const Document&) const = default;
};

/// Documents sorted by id; classes is the sorted set of their departments.
struct LabeledCorpus {
    std::vector<Document> documents;
    std::vector<std::string> classes;

    std::size_t size() const { return documents.size(); }
    bool operator==(const LabeledCorpus&) const = default;
};

/// A fixed-width character slice of a preprocessed document.
struct Segment {
    std::string doc_id;
    std::size_t index = 0;
    std::string department;
    std::string text;

    bool operator==(const Segment&) const = default;
};

/// Segments grouped by document (contiguous, index-ordered).
struct SegmentedCorpus {
    std::vector<Segment> segments;
    std::size_t width = 2048;

    std::size_t size() const { return segments.size(); }
    bool operator==(const SegmentedCorpus&) const = default;
};

}  // namespace docroute

#endif  // DOCROUTE_TYPES_HPP_
