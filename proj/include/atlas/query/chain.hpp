#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "atlas/core/errors.hpp"

namespace atlas::query {

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge, Contains };

std::string_view to_string(CompareOp op) noexcept;

using FacetValue = std::variant<double, std::string, bool>;

enum class NodeField { Id, Name, Category, Degree, InDegree, OutDegree };
enum class EdgeField { Type, Polarity, Curated, EvidenceCount, Belief };

std::string_view to_string(NodeField field) noexcept;
std::string_view to_string(EdgeField field) noexcept;

struct NodeFacet {
    NodeField field = NodeField::Id;
    CompareOp op = CompareOp::Eq;
    FacetValue value;

    friend bool operator==(const NodeFacet&, const NodeFacet&) = default;
};

struct EdgeFacet {
    EdgeField field = EdgeField::Type;
    CompareOp op = CompareOp::Eq;
    FacetValue value;

    friend bool operator==(const EdgeFacet&, const EdgeFacet&) = default;
};

struct DocFacet {
    std::vector<std::string> dois;

    friend bool operator==(const DocFacet&, const DocFacet&) = default;
};

inline constexpr std::size_t kDefaultMaxPathLength = 4;
inline constexpr std::size_t kMaxPathLength = 8;
inline constexpr std::size_t kDefaultPathCap = 1000;

struct PathFacet {
    std::vector<std::string> sources;
    std::vector<std::string> targets;
    std::size_t max_len = kDefaultMaxPathLength;
    std::size_t cap = kDefaultPathCap;

    friend bool operator==(const PathFacet&, const PathFacet&) = default;
};

using Facet = std::variant<NodeFacet, EdgeFacet, DocFacet, PathFacet>;

std::string_view facet_kind(const Facet& facet) noexcept;

struct QueryChain {
    std::vector<Facet> facets;

    friend bool operator==(const QueryChain&, const QueryChain&) = default;
};

/// Invalid chain document or a failure while evaluating one facet. `facet_index`
/// is npos when the error is not tied to a facet (e.g. malformed JSON).
class QueryError : public Error {
public:
    QueryError(std::size_t facet_index, std::string code, const std::string& detail);

    std::size_t facet_index() const noexcept { return facet_index_; }
    const std::string& code() const noexcept { return code_; }

private:
    std::size_t facet_index_;
    std::string code_;
};

/// Parses {"chain": [facet...]}. Each facet is one of
///   {"facet":"node","field":F,"op":OP,"value":V}
///   {"facet":"edge","field":F,"op":OP,"value":V}
///   {"facet":"doc","dois":[...]}
///   {"facet":"path","sources":[...],"targets":[...],"max_len":N,"cap":N}
/// Numeric ops apply to numeric fields only, `contains` to string fields only,
/// boolean fields accept = and !=.
QueryChain parse_query(std::string_view text);
QueryChain parse_query(const nlohmann::json& document);
inline QueryChain parse_query(const std::string& text) { return parse_query(std::string_view(text)); }
inline QueryChain parse_query(const char* text) { return parse_query(std::string_view(text)); }

nlohmann::json to_json(const QueryChain& chain);
std::string serialize_query(const QueryChain& chain);

}  // namespace atlas::query
