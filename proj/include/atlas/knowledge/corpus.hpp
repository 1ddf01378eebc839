#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "atlas/core/document.hpp"
#include "atlas/core/model.hpp"
#include "atlas/knowledge/hdbscan.hpp"

namespace atlas::knowledge {

struct Neighbor {
    std::size_t row = 0;
    double similarity = 0.0;
};

struct SearchFacets {
    std::optional<std::string> text;
    std::optional<std::string> author;
    std::optional<std::string> publisher;
    std::optional<int> year_min;
    std::optional<int> year_max;
    std::optional<bool> has_figures;
    std::optional<bool> has_tables;
    std::optional<std::string> entity;
};

inline constexpr std::size_t kMaxPageSize = 500;

struct DocumentPage {
    std::size_t total = 0;
    std::size_t page = 0;
    std::size_t page_size = 0;
    std::vector<std::size_t> rows;
};

/// Documents with their embeddings and 2D coordinates, immutable after
/// construction. Row i of each matrix belongs to documents[i].
class Corpus {
public:
    Corpus() = default;

    /// Throws PreconditionError when matrix row counts differ from the document
    /// count, coords is not n x 2, or a doi repeats.
    Corpus(std::vector<DocumentRecord> documents, Eigen::MatrixXd embeddings, Eigen::MatrixXd coords);

    const std::vector<DocumentRecord>& documents() const noexcept { return documents_; }
    const Eigen::MatrixXd& embeddings() const noexcept { return embeddings_; }
    const Eigen::MatrixXd& coords() const noexcept { return coords_; }
    std::size_t size() const noexcept { return documents_.size(); }

    /// Rows whose embedding has zero norm; they never appear as neighbours.
    const std::vector<std::size_t>& zero_norm_rows() const noexcept { return zero_norm_; }

    std::size_t row_of(std::string_view doi) const;  // npos when unknown
    const DocumentRecord& document(std::string_view doi) const;  // throws UnknownEntityError

    /// Exact top-k cosine similarity, excluding the query row and zero-norm
    /// rows, ties by doi ascending. Throws UnknownEntityError for an unknown doi,
    /// PreconditionError unless 1 <= k < size(), DegenerateInputError when the
    /// query embedding is zero.
    std::vector<Neighbor> semantic_neighbors(std::string_view doi, std::size_t k) const;

    /// Conjunctive filters; substring tests are case-insensitive. Ordered by
    /// (year desc, doi asc); `page` is zero-based. Throws PreconditionError
    /// unless 1 <= page_size <= 500.
    DocumentPage search(const SearchFacets& facets, std::size_t page, std::size_t page_size) const;

    /// Whether one document passes every filter.
    static bool matches(const DocumentRecord& doc, const SearchFacets& facets);

private:
    std::vector<DocumentRecord> documents_;
    Eigen::MatrixXd embeddings_;
    Eigen::MatrixXd coords_;
    Eigen::VectorXd norms_;
    std::vector<std::size_t> zero_norm_;
    std::unordered_map<std::string, std::size_t> rows_;
    std::vector<std::size_t> by_year_;  // all rows in result order
};

bool contains_ignore_case(std::string_view haystack, std::string_view needle);

nlohmann::json document_json(const DocumentRecord& doc);

/// {points:[{doi,x,y,cluster|null}], clusters:[{id,parent,level,hue,stability,polygon|null}], noise:[dois]}
/// restricted to one level when `level` is set.
nlohmann::json cluster_json(const Corpus& corpus, const ClusterTree& tree, std::optional<ClusterLevel> level);

struct GraphLink {
    std::string graph;
    std::vector<std::string> edges;  // ascending

    friend bool operator==(const GraphLink&, const GraphLink&) = default;
};

/// Inverse index doi -> graphs and edges whose evidence cites it.
class DoiIndex {
public:
    DoiIndex() = default;
    explicit DoiIndex(const std::vector<const AssembledGraph*>& graphs);

    /// Sorted by graph id; empty for an unknown doi.
    std::vector<GraphLink> graphs_for_document(std::string_view doi) const;

private:
    std::unordered_map<std::string, std::vector<GraphLink>> links_;
};

}  // namespace atlas::knowledge
