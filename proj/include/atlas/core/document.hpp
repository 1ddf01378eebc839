#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace atlas {

struct ArtifactCounts {
    int figures = 0;
    int tables = 0;

    friend bool operator==(const ArtifactCounts&, const ArtifactCounts&) = default;
};

/// One corpus document. `row` indexes the embedding and coordinate matrices and
/// equals the record's line position in documents.jsonl.
struct DocumentRecord {
    std::string doi;
    std::string title;
    std::vector<std::string> authors;
    std::string publisher;
    int year = 0;
    std::string abstract_text;
    std::vector<std::string> entities;
    ArtifactCounts artifacts;
    std::size_t row = 0;

    friend bool operator==(const DocumentRecord&, const DocumentRecord&) = default;
};

}  // namespace atlas
