#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "atlas/core/model.hpp"
#include "atlas/layout/circle_pack.hpp"

namespace atlas::layout {

/// A directed multigraph to be drawn left to right. Node ids must be unique;
/// `from`/`to` index into `nodes`.
struct FlowGraph {
    struct Arc {
        std::string id;
        std::size_t from = 0;
        std::size_t to = 0;
    };
    std::vector<std::string> nodes;
    std::vector<Arc> edges;
};

/// Subgraph of `graph` with the given agents and edges; edge endpoints are
/// added automatically and undirected edges are oriented subj -> obj. Nodes and
/// edges come out sorted by id. Throws UnknownEntityError for unknown ids.
FlowGraph flow_subgraph(const AssembledGraph& graph, const std::vector<std::string>& node_ids,
                        const std::vector<std::string>& edge_ids);

/// Greedy feedback arc set: peel sinks and sources, otherwise take the node
/// maximizing out - in degree (ties by id). Backward edges of the resulting
/// order are reversed, then any edge whose reversal is unnecessary is restored,
/// so no single returned edge can be un-reversed without creating a cycle.
/// Returns ascending edge indices.
std::vector<std::size_t> remove_cycles(const FlowGraph& graph);

/// Longest-path layering of an acyclic edge list: sources get 0, every other
/// node 1 + the max layer of its predecessors. Throws PreconditionError on a cycle.
std::vector<std::size_t> assign_layers(std::size_t node_count,
                                       const std::vector<std::pair<std::size_t, std::size_t>>& edges);

/// A proper layered graph: every edge joins consecutive layers.
struct LayeredGraph {
    std::vector<std::string> names;                           // node names (real and dummy)
    std::vector<std::size_t> layer_of;                        // per node
    std::vector<std::pair<std::size_t, std::size_t>> edges;   // (upper layer node, lower layer node)
    std::size_t layer_count = 0;
};

using LayerOrder = std::vector<std::vector<std::size_t>>;

/// Nodes of each layer sorted by name.
LayerOrder initial_order(const LayeredGraph& graph);

/// Number of edge crossings between consecutive layers under `order`.
std::size_t count_crossings(const LayeredGraph& graph, const LayerOrder& order);

/// Layer-by-layer sweeps, each followed by at most eight passes of
/// adjacent-swap (transpose) refinement. A layer of at most 10 nodes is reordered optimally against its
/// fixed neighbour layer; wider layers use barycenters. Four runs start from
/// the name order and its mirror, sweeping downward or upward first, each for
/// at most `max_iterations` sweep pairs and stopping after three without
/// progress. Returns the best ordering seen, never worse than the initial one.
LayerOrder order_layers(const LayeredGraph& graph, std::size_t max_iterations = 8);

struct FlowLayout {
    std::map<std::string, Point> positions;
    std::map<std::string, std::size_t> layer_of;
    std::vector<std::string> reversed_edges;                 // sorted
    std::map<std::string, std::vector<Point>> dummy_chains;  // per edge, subj -> obj order
    std::map<std::string, std::vector<Point>> edge_points;   // endpoints plus dummies, subj -> obj order
    std::size_t crossings = 0;
    std::size_t initial_crossings = 0;
};

/// remove_cycles -> layering -> dummy insertion -> ordering -> coordinates
/// (x = layer * layer_gap, y = slot * node_gap, then one order-preserving
/// median-alignment pass). Throws PreconditionError on an empty graph.
FlowLayout flow_layout(const FlowGraph& graph, double layer_gap = 200.0, double node_gap = 60.0);

/// {nodes:[{id,layer,x,y}], edges:[{id, points:[[x,y]...], reversed}], crossings}
nlohmann::json flow_layout_json(const FlowLayout& layout);

}  // namespace atlas::layout
