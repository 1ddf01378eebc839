#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "atlas/core/model.hpp"

namespace atlas::ingest {

struct AssemblyOptions {
    /// Statements below this belief are dropped before merging.
    double min_belief = 0.0;
    /// Permit subj == obj for non-Complex types.
    bool allow_self_loops = false;
    /// Categories added to the ontology even when no agent is grounded there.
    std::vector<std::string> extra_categories;
};

/// Merges statements sharing (subj, type, obj) into one edge: evidence lists are
/// concatenated with exact duplicates dropped, belief is the max, curated is the OR,
/// dois the union. Edge ids are "subj|type|obj".
///
/// Throws AssemblyError for duplicate agents, dangling endpoints and self-loops.
AssembledGraph assemble(std::string graph_id, const std::vector<CausalStatement>& statements,
                        std::vector<Agent> agents, const AssemblyOptions& options = {});

/// One statement per edge, carrying the merged evidence; assembling the result
/// reproduces the same edge set.
std::vector<CausalStatement> expand_edges(const AssembledGraph& graph);

struct HyperEdge {
    std::size_t level = 0;
    std::string source_category;
    std::string target_category;
    std::vector<std::size_t> edges;  // ascending edge indices
    std::size_t count = 0;

    std::string id() const;
};

/// Partitions the edge set by (ancestor_at(subj category, level), ancestor_at(obj category, level)).
/// Sorted by (source_category, target_category).
std::vector<HyperEdge> bundle(const AssembledGraph& graph, std::size_t level);

/// Bundles for levels 0..max ontology depth.
std::vector<std::vector<HyperEdge>> bundle_all_levels(const AssembledGraph& graph);

}  // namespace atlas::ingest
