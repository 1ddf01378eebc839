#include "atlas/ingest/assemble.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "atlas/core/errors.hpp"

namespace atlas::ingest {

namespace {

struct EvidenceHash {
    std::size_t operator()(const Evidence& ev) const noexcept {
        const std::hash<std::string> h;
        std::size_t seed = h(ev.text);
        seed ^= h(ev.doi) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
        seed ^= h(ev.source) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
        return seed;
    }
};

struct Accumulator {
    Edge edge;
    std::unordered_set<Evidence, EvidenceHash> seen;
};

}  // namespace

AssembledGraph assemble(std::string graph_id, const std::vector<CausalStatement>& statements,
                        std::vector<Agent> agents, const AssemblyOptions& options) {
    AssembledGraph graph;
    graph.id = std::move(graph_id);

    std::sort(agents.begin(), agents.end(), [](const Agent& a, const Agent& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < agents.size(); ++i) {
        if (agents[i].id.empty()) throw AssemblyError("agent with empty id");
        if (i > 0 && agents[i - 1].id == agents[i].id) throw AssemblyError("duplicate agent '" + agents[i].id + "'");
        split_category_path(agents[i].category_path);
    }
    graph.ontology = build_ontology(agents, options.extra_categories);
    graph.agents = std::move(agents);
    graph.reindex();

    std::unordered_map<std::string, Accumulator> merged;
    for (const auto& st : statements) {
        if (st.belief < options.min_belief) continue;
        if (graph.agent_index(st.subj) == npos) {
            throw AssemblyError("statement '" + st.id + "' references unknown agent '" + st.subj + "'");
        }
        if (graph.agent_index(st.obj) == npos) {
            throw AssemblyError("statement '" + st.id + "' references unknown agent '" + st.obj + "'");
        }
        if (st.subj == st.obj && (!options.allow_self_loops || st.type == StatementType::Complex)) {
            throw AssemblyError("statement '" + st.id + "' is a self-loop on '" + st.subj + "'");
        }
        if (st.evidence.empty()) throw AssemblyError("statement '" + st.id + "' has no evidence");

        auto id = edge_id(st.subj, st.type, st.obj);
        auto [it, inserted] = merged.try_emplace(id);
        auto& acc = it->second;
        if (inserted) {
            const auto info = polarity_of(st.type);
            acc.edge.id = std::move(id);
            acc.edge.subj = st.subj;
            acc.edge.obj = st.obj;
            acc.edge.type = st.type;
            acc.edge.polarity = info.polarity;
            acc.edge.directed = info.directed;
            acc.edge.belief = st.belief;
            acc.edge.curated = st.curated;
        } else {
            acc.edge.belief = std::max(acc.edge.belief, st.belief);
            acc.edge.curated = acc.edge.curated || st.curated;
        }
        acc.edge.statement_ids.push_back(st.id);
        for (const auto& ev : st.evidence) {
            if (acc.seen.insert(ev).second) acc.edge.evidence.push_back(ev);
        }
    }

    graph.edges.reserve(merged.size());
    for (auto& [id, acc] : merged) {
        auto& edge = acc.edge;
        edge.evidence_count = edge.evidence.size();
        for (const auto& ev : edge.evidence) {
            if (!ev.doi.empty()) edge.dois.push_back(ev.doi);
        }
        std::sort(edge.dois.begin(), edge.dois.end());
        edge.dois.erase(std::unique(edge.dois.begin(), edge.dois.end()), edge.dois.end());
        graph.edges.push_back(std::move(edge));
    }
    std::sort(graph.edges.begin(), graph.edges.end(), [](const Edge& a, const Edge& b) { return a.id < b.id; });
    graph.reindex();

    graph.adjacency.assign(graph.agents.size(), {});
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        graph.adjacency[graph.edges[e].subj_index].outgoing.push_back(e);
        graph.adjacency[graph.edges[e].obj_index].incoming.push_back(e);
    }
    return graph;
}

std::vector<CausalStatement> expand_edges(const AssembledGraph& graph) {
    std::vector<CausalStatement> out;
    out.reserve(graph.edges.size());
    for (const auto& edge : graph.edges) {
        out.push_back({edge.id, edge.type, edge.subj, edge.obj, edge.belief, edge.curated, edge.evidence});
    }
    return out;
}

std::string HyperEdge::id() const {
    return std::to_string(level) + ":" + source_category + ">" + target_category;
}

std::vector<HyperEdge> bundle(const AssembledGraph& graph, std::size_t level) {
    // Category ancestors are per agent, so resolve them once.
    std::vector<std::string> ancestor(graph.agents.size());
    for (std::size_t i = 0; i < graph.agents.size(); ++i) ancestor[i] = ancestor_at(graph.agents[i].category_path, level);

    std::map<std::pair<std::string_view, std::string_view>, HyperEdge> groups;
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        const auto& edge = graph.edges[e];
        const auto& src = ancestor[edge.subj_index];
        const auto& dst = ancestor[edge.obj_index];
        auto& group = groups[{src, dst}];
        if (group.edges.empty()) {
            group.level = level;
            group.source_category = src;
            group.target_category = dst;
        }
        group.edges.push_back(e);
    }
    std::vector<HyperEdge> out;
    out.reserve(groups.size());
    for (auto& [key, group] : groups) {
        group.count = group.edges.size();
        out.push_back(std::move(group));
    }
    return out;
}

std::vector<std::vector<HyperEdge>> bundle_all_levels(const AssembledGraph& graph) {
    std::vector<std::vector<HyperEdge>> levels;
    const auto deepest = graph.ontology.max_depth();
    for (std::size_t level = 0; level <= deepest; ++level) levels.push_back(bundle(graph, level));
    return levels;
}

}  // namespace atlas::ingest
