#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "atlas/core/model.hpp"
#include "atlas/query/chain.hpp"

namespace atlas::query {

/// Node and edge index sets, both ascending. Once an edge-level facet has
/// applied, the subgraph is edge scoped: its nodes are exactly the endpoints of
/// its edges.
struct Subgraph {
    std::vector<std::size_t> nodes;
    std::vector<std::size_t> edges;
    bool edge_scoped = false;

    static Subgraph full(const AssembledGraph& graph);
    bool empty() const noexcept { return nodes.empty() && edges.empty(); }

    friend bool operator==(const Subgraph&, const Subgraph&) = default;
};

struct Path {
    std::vector<std::size_t> nodes;
    std::vector<std::size_t> edges;
    double score = 0.0;  // sum of ln(1 + evidence_count)
    std::string id;      // edge ids joined by ','

    std::size_t length() const noexcept { return edges.size(); }
};

struct PathSet {
    std::vector<Path> paths;  // ranked
    bool truncated = false;
};

/// All simple paths of 1..max_len edges from any source to any target inside
/// `context`. Directed edges run subj -> obj, undirected edges both ways.
/// Ranked by (length asc, score desc, id asc) and cut to `cap`; `truncated`
/// reports that more paths exist. Throws PreconditionError for max_len outside
/// [1, 8] or cap == 0.
PathSet find_paths(const AssembledGraph& graph, const Subgraph& context, const std::vector<std::size_t>& sources,
                   const std::vector<std::size_t>& targets, std::size_t max_len, std::size_t cap);

/// Product semantics: unknown absorbs, otherwise negative iff an odd number of
/// negative steps. Throws PreconditionError on an empty path.
Polarity path_polarity(const std::vector<Polarity>& steps);
Polarity path_polarity(const AssembledGraph& graph, const Path& path);

struct FacetOutcome {
    Subgraph subgraph;
    std::optional<PathSet> paths;  // set by path facets
};

/// Refines `context` by one facet. Node facets keep matching nodes and the
/// edges between them; edge, doc and path facets keep matching edges and their
/// endpoints. Attribute facets therefore commute. Degree fields read the full
/// graph. Throws
/// UnknownEntityError for path endpoints that are not agents of the graph.
FacetOutcome apply_facet(const AssembledGraph& graph, const Subgraph& context, const Facet& facet);

struct TraceEntry {
    std::string facet;
    std::size_t nodes = 0;
    std::size_t edges = 0;
};

struct QueryResult {
    Subgraph subgraph;
    Subgraph highlight;
    std::vector<Path> paths;
    bool truncated = false;
    std::vector<TraceEntry> facet_trace;
};

/// Folds apply_facet over the chain starting from the full graph. Paths come
/// from the last path facet, restricted to those still inside the final
/// subgraph. Facet failures are rethrown as QueryError carrying the index.
QueryResult run_chain(const AssembledGraph& graph, const QueryChain& chain);

/// {nodes:[ids], edges:[ids], highlight:{nodes,edges}, paths:[{nodes,edges,polarity,score}], trace:[{facet,nodes,edges}], truncated}
nlohmann::json result_json(const AssembledGraph& graph, const QueryResult& result);

enum class Direction { Incoming, Outgoing };

struct Suggestion {
    std::size_t edge = 0;
    std::size_t neighbor = 0;
    Polarity polarity = Polarity::Unknown;
    std::size_t evidence_count = 0;
};

/// Full-graph edges incident to `node` in `direction` (undirected edges count
/// both ways) that are not in `current_edges`, sorted by evidence_count desc
/// then edge id. Throws UnknownEntityError for an unknown node.
std::vector<Suggestion> suggest_neighbors(const AssembledGraph& graph, const std::vector<std::size_t>& current_edges,
                                          const std::string& node_id, Direction direction);

nlohmann::json suggestions_json(const AssembledGraph& graph, const std::vector<Suggestion>& suggestions);

}  // namespace atlas::query
