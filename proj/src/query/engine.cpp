#include "atlas/query/engine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <unordered_set>

namespace atlas::query {

Subgraph Subgraph::full(const AssembledGraph& graph) {
    Subgraph s;
    s.nodes.resize(graph.agents.size());
    s.edges.resize(graph.edges.size());
    std::iota(s.nodes.begin(), s.nodes.end(), std::size_t{0});
    std::iota(s.edges.begin(), s.edges.end(), std::size_t{0});
    return s;
}

namespace {

std::vector<char> mask(std::size_t size, const std::vector<std::size_t>& members) {
    std::vector<char> m(size, 0);
    for (const auto i : members) m[i] = 1;
    return m;
}

// Sorted unique endpoints of the given edges.
std::vector<std::size_t> endpoints(const AssembledGraph& graph, const std::vector<std::size_t>& edges) {
    std::vector<char> keep(graph.agents.size(), 0);
    for (const auto e : edges) {
        keep[graph.edges[e].subj_index] = 1;
        keep[graph.edges[e].obj_index] = 1;
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < keep.size(); ++i) {
        if (keep[i]) out.push_back(i);
    }
    return out;
}

bool compare_number(double lhs, CompareOp op, double rhs) {
    switch (op) {
        case CompareOp::Eq: return lhs == rhs;
        case CompareOp::Ne: return lhs != rhs;
        case CompareOp::Lt: return lhs < rhs;
        case CompareOp::Le: return lhs <= rhs;
        case CompareOp::Gt: return lhs > rhs;
        case CompareOp::Ge: return lhs >= rhs;
        case CompareOp::Contains: break;
    }
    return false;
}

bool compare_string(std::string_view lhs, CompareOp op, std::string_view rhs) {
    switch (op) {
        case CompareOp::Eq: return lhs == rhs;
        case CompareOp::Ne: return lhs != rhs;
        case CompareOp::Contains: return lhs.find(rhs) != std::string_view::npos;
        default: return false;
    }
}

bool compare_bool(bool lhs, CompareOp op, bool rhs) {
    return op == CompareOp::Eq ? lhs == rhs : op == CompareOp::Ne ? lhs != rhs : false;
}

bool matches(const AssembledGraph& graph, std::size_t node, const NodeFacet& f) {
    const auto& agent = graph.agents[node];
    switch (f.field) {
        case NodeField::Id: return compare_string(agent.id, f.op, std::get<std::string>(f.value));
        case NodeField::Name: return compare_string(agent.name, f.op, std::get<std::string>(f.value));
        case NodeField::Category: return compare_string(agent.category_path, f.op, std::get<std::string>(f.value));
        case NodeField::Degree:
            return compare_number(static_cast<double>(graph.degree(node)), f.op, std::get<double>(f.value));
        case NodeField::InDegree:
            return compare_number(static_cast<double>(graph.in_degree(node)), f.op, std::get<double>(f.value));
        case NodeField::OutDegree:
            return compare_number(static_cast<double>(graph.out_degree(node)), f.op, std::get<double>(f.value));
    }
    return false;
}

bool matches(const Edge& edge, const EdgeFacet& f) {
    switch (f.field) {
        case EdgeField::Type: return compare_string(to_string(edge.type), f.op, std::get<std::string>(f.value));
        case EdgeField::Polarity:
            return compare_string(to_string(edge.polarity), f.op, std::get<std::string>(f.value));
        case EdgeField::Curated: return compare_bool(edge.curated, f.op, std::get<bool>(f.value));
        case EdgeField::EvidenceCount:
            return compare_number(static_cast<double>(edge.evidence_count), f.op, std::get<double>(f.value));
        case EdgeField::Belief: return compare_number(edge.belief, f.op, std::get<double>(f.value));
    }
    return false;
}

std::vector<std::size_t> resolve(const AssembledGraph& graph, const std::vector<std::string>& ids) {
    std::vector<std::size_t> out;
    for (const auto& id : ids) {
        const auto i = graph.agent_index(id);
        if (i == npos) throw UnknownEntityError("agent", id);
        out.push_back(i);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Traversable steps restricted to the context, per node, in edge-id order.
struct StepIndex {
    struct Step {
        std::size_t edge;
        std::size_t to;
    };
    std::vector<std::vector<Step>> forward;
    std::vector<std::vector<Step>> backward;  // reverse steps, for distance-to-target

    StepIndex(const AssembledGraph& graph, const Subgraph& context) {
        forward.resize(graph.agents.size());
        backward.resize(graph.agents.size());
        const auto in_nodes = mask(graph.agents.size(), context.nodes);
        for (const auto e : context.edges) {
            const auto& edge = graph.edges[e];
            const auto s = edge.subj_index, o = edge.obj_index;
            if (!in_nodes[s] || !in_nodes[o]) continue;
            forward[s].push_back({e, o});
            backward[o].push_back({e, s});
            if (!edge.directed) {
                forward[o].push_back({e, s});
                backward[s].push_back({e, o});
            }
        }
        // context.edges is ascending, but undirected edges were interleaved per endpoint.
        for (auto& list : forward) {
            std::sort(list.begin(), list.end(), [](const Step& a, const Step& b) { return a.edge < b.edge; });
        }
    }
};

struct PathSearch {
    const AssembledGraph& graph;
    const StepIndex& steps;
    const std::vector<char>& is_target;
    const std::vector<std::size_t>& distance;  // lower bound of steps to any target
    std::vector<char> on_path;
    std::vector<std::size_t> node_stack;
    std::vector<std::size_t> edge_stack;

    // Emits every simple path of exactly `length` edges; stops early when `emit` returns false.
    template <typename Emit>
    bool extend(std::size_t u, std::size_t length, Emit& emit) {
        const std::size_t depth = edge_stack.size();
        for (const auto& step : steps.forward[u]) {
            const auto v = step.to;
            if (on_path[v] || distance[v] == npos) continue;
            if (depth + 1 + (depth + 1 == length ? 0 : distance[v]) > length) continue;
            if (depth + 1 == length && !is_target[v]) continue;
            on_path[v] = 1;
            node_stack.push_back(v);
            edge_stack.push_back(step.edge);
            const bool go_on = depth + 1 == length ? emit() : extend(v, length, emit);
            edge_stack.pop_back();
            node_stack.pop_back();
            on_path[v] = 0;
            if (!go_on) return false;
        }
        return true;
    }

    template <typename Emit>
    bool run(const std::vector<std::size_t>& sources, std::size_t length, Emit emit) {
        for (const auto s : sources) {
            if (distance[s] == npos) continue;
            on_path[s] = 1;
            node_stack.assign(1, s);
            edge_stack.clear();
            const bool go_on = extend(s, length, emit);
            on_path[s] = 0;
            if (!go_on) return false;
        }
        return true;
    }
};

}  // namespace

PathSet find_paths(const AssembledGraph& graph, const Subgraph& context, const std::vector<std::size_t>& sources,
                   const std::vector<std::size_t>& targets, std::size_t max_len, std::size_t cap) {
    if (max_len < 1 || max_len > kMaxPathLength) throw PreconditionError("find_paths: max_len must lie in [1, 8]");
    if (cap < 1) throw PreconditionError("find_paths: cap must be >= 1");

    const std::size_t n = graph.agents.size();
    const StepIndex steps(graph, context);
    const auto in_nodes = mask(n, context.nodes);
    std::vector<char> is_target(n, 0);
    std::vector<std::size_t> distance(n, npos);
    std::deque<std::size_t> queue;
    for (const auto t : targets) {
        if (!in_nodes[t] || is_target[t]) continue;
        is_target[t] = 1;
        distance[t] = 0;
        queue.push_back(t);
    }
    while (!queue.empty()) {
        const auto u = queue.front();
        queue.pop_front();
        if (distance[u] >= max_len) continue;
        for (const auto& step : steps.backward[u]) {
            if (distance[step.to] == npos) {
                distance[step.to] = distance[u] + 1;
                queue.push_back(step.to);
            }
        }
    }
    std::vector<std::size_t> starts;
    for (const auto s : sources) {
        if (in_nodes[s]) starts.push_back(s);
    }
    std::sort(starts.begin(), starts.end());
    starts.erase(std::unique(starts.begin(), starts.end()), starts.end());

    PathSearch search{graph, steps, is_target, distance, std::vector<char>(n, 0), {}, {}};
    PathSet result;
    std::size_t length = 1;
    for (; length <= max_len; ++length) {
        search.run(starts, length, [&] {
            Path p;
            p.nodes = search.node_stack;
            p.edges = search.edge_stack;
            for (const auto e : p.edges) {
                p.score += std::log1p(static_cast<double>(graph.edges[e].evidence_count));
                if (!p.id.empty()) p.id += ',';
                p.id += graph.edges[e].id;
            }
            result.paths.push_back(std::move(p));
            return true;
        });
        // Longer paths rank strictly lower, so once the cap is reached they can only be cut.
        if (result.paths.size() >= cap) break;
    }
    std::sort(result.paths.begin(), result.paths.end(), [](const Path& a, const Path& b) {
        if (a.length() != b.length()) return a.length() < b.length();
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
    if (result.paths.size() > cap) {
        result.paths.resize(cap);
        result.truncated = true;
    } else if (length < max_len) {
        for (std::size_t longer = length + 1; longer <= max_len && !result.truncated; ++longer) {
            search.run(starts, longer, [&] {
                result.truncated = true;
                return false;
            });
        }
    }
    return result;
}

Polarity path_polarity(const std::vector<Polarity>& steps) {
    if (steps.empty()) throw PreconditionError("path_polarity: empty path");
    bool negative = false;
    for (const auto p : steps) {
        if (p == Polarity::Unknown) return Polarity::Unknown;
        if (p == Polarity::Negative) negative = !negative;
    }
    return negative ? Polarity::Negative : Polarity::Positive;
}

Polarity path_polarity(const AssembledGraph& graph, const Path& path) {
    std::vector<Polarity> steps;
    steps.reserve(path.edges.size());
    for (const auto e : path.edges) steps.push_back(graph.edges[e].polarity);
    return path_polarity(steps);
}

FacetOutcome apply_facet(const AssembledGraph& graph, const Subgraph& context, const Facet& facet) {
    FacetOutcome out;
    if (const auto* f = std::get_if<NodeFacet>(&facet)) {
        std::vector<char> keep(graph.agents.size(), 0);
        for (const auto v : context.nodes) {
            if (matches(graph, v, *f)) {
                keep[v] = 1;
                out.subgraph.nodes.push_back(v);
            }
        }
        for (const auto e : context.edges) {
            if (keep[graph.edges[e].subj_index] && keep[graph.edges[e].obj_index]) out.subgraph.edges.push_back(e);
        }
        if (context.edge_scoped) {
            out.subgraph.nodes = endpoints(graph, out.subgraph.edges);
            out.subgraph.edge_scoped = true;
        }
        return out;
    }
    if (const auto* f = std::get_if<EdgeFacet>(&facet)) {
        for (const auto e : context.edges) {
            if (matches(graph.edges[e], *f)) out.subgraph.edges.push_back(e);
        }
        out.subgraph.nodes = endpoints(graph, out.subgraph.edges);
        out.subgraph.edge_scoped = true;
        return out;
    }
    if (const auto* f = std::get_if<DocFacet>(&facet)) {
        std::vector<std::string> wanted = f->dois;
        std::sort(wanted.begin(), wanted.end());
        for (const auto e : context.edges) {
            const auto& dois = graph.edges[e].dois;
            auto a = dois.begin();
            auto b = wanted.begin();
            while (a != dois.end() && b != wanted.end()) {
                if (*a < *b) {
                    ++a;
                } else if (*b < *a) {
                    ++b;
                } else {
                    out.subgraph.edges.push_back(e);
                    break;
                }
            }
        }
        out.subgraph.nodes = endpoints(graph, out.subgraph.edges);
        out.subgraph.edge_scoped = true;
        return out;
    }
    const auto& f = std::get<PathFacet>(facet);
    const auto sources = resolve(graph, f.sources);
    const auto targets = resolve(graph, f.targets);
    auto paths = find_paths(graph, context, sources, targets, f.max_len, f.cap);
    std::vector<char> node_keep(graph.agents.size(), 0), edge_keep(graph.edges.size(), 0);
    for (const auto& p : paths.paths) {
        for (const auto v : p.nodes) node_keep[v] = 1;
        for (const auto e : p.edges) edge_keep[e] = 1;
    }
    for (std::size_t v = 0; v < node_keep.size(); ++v) {
        if (node_keep[v]) out.subgraph.nodes.push_back(v);
    }
    for (std::size_t e = 0; e < edge_keep.size(); ++e) {
        if (edge_keep[e]) out.subgraph.edges.push_back(e);
    }
    out.subgraph.edge_scoped = true;
    out.paths = std::move(paths);
    return out;
}

QueryResult run_chain(const AssembledGraph& graph, const QueryChain& chain) {
    QueryResult result;
    Subgraph context = Subgraph::full(graph);
    std::optional<PathSet> paths;
    for (std::size_t i = 0; i < chain.facets.size(); ++i) {
        FacetOutcome step;
        try {
            step = apply_facet(graph, context, chain.facets[i]);
        } catch (const UnknownEntityError& e) {
            throw QueryError(i, "unknown-entity", e.what());
        } catch (const PreconditionError& e) {
            throw QueryError(i, "invalid-facet", e.what());
        }
        context = std::move(step.subgraph);
        if (step.paths) paths = std::move(step.paths);
        result.facet_trace.push_back({std::string(facet_kind(chain.facets[i])), context.nodes.size(), context.edges.size()});
    }
    if (paths) {
        const auto in_edges = mask(graph.edges.size(), context.edges);
        for (auto& p : paths->paths) {
            if (std::all_of(p.edges.begin(), p.edges.end(), [&](std::size_t e) { return in_edges[e] != 0; })) {
                result.paths.push_back(std::move(p));
            }
        }
        result.truncated = paths->truncated;
    }
    result.highlight = context;
    result.subgraph = std::move(context);
    return result;
}

nlohmann::json result_json(const AssembledGraph& graph, const QueryResult& result) {
    using nlohmann::json;
    json nodes = json::array(), edges = json::array(), paths = json::array(), trace = json::array();
    for (const auto v : result.subgraph.nodes) nodes.push_back(graph.agents[v].id);
    for (const auto e : result.subgraph.edges) edges.push_back(graph.edges[e].id);
    for (const auto& p : result.paths) {
        json pn = json::array(), pe = json::array();
        for (const auto v : p.nodes) pn.push_back(graph.agents[v].id);
        for (const auto e : p.edges) pe.push_back(graph.edges[e].id);
        paths.push_back({{"nodes", pn},
                         {"edges", pe},
                         {"polarity", to_string(path_polarity(graph, p))},
                         {"score", p.score}});
    }
    for (const auto& t : result.facet_trace) trace.push_back({{"facet", t.facet}, {"nodes", t.nodes}, {"edges", t.edges}});
    json hn = json::array(), he = json::array();
    for (const auto v : result.highlight.nodes) hn.push_back(graph.agents[v].id);
    for (const auto e : result.highlight.edges) he.push_back(graph.edges[e].id);
    return {{"nodes", nodes},
            {"edges", edges},
            {"highlight", {{"nodes", hn}, {"edges", he}}},
            {"paths", paths},
            {"trace", trace},
            {"truncated", result.truncated}};
}

std::vector<Suggestion> suggest_neighbors(const AssembledGraph& graph, const std::vector<std::size_t>& current_edges,
                                          const std::string& node_id, Direction direction) {
    const auto node = graph.agent_index(node_id);
    if (node == npos) throw UnknownEntityError("agent", node_id);
    const std::unordered_set<std::size_t> current(current_edges.begin(), current_edges.end());
    const auto& adj = graph.adjacency[node];
    const auto& same = direction == Direction::Outgoing ? adj.outgoing : adj.incoming;
    const auto& other = direction == Direction::Outgoing ? adj.incoming : adj.outgoing;

    std::vector<Suggestion> out;
    auto add = [&](std::size_t e) {
        if (current.contains(e)) return;
        const auto& edge = graph.edges[e];
        const auto neighbor = edge.subj_index == node ? edge.obj_index : edge.subj_index;
        out.push_back({e, neighbor, edge.polarity, edge.evidence_count});
    };
    for (const auto e : same) add(e);
    for (const auto e : other) {
        if (!graph.edges[e].directed) add(e);
    }
    std::sort(out.begin(), out.end(), [](const Suggestion& a, const Suggestion& b) {
        if (a.evidence_count != b.evidence_count) return a.evidence_count > b.evidence_count;
        return a.edge < b.edge;
    });
    return out;
}

nlohmann::json suggestions_json(const AssembledGraph& graph, const std::vector<Suggestion>& suggestions) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& s : suggestions) {
        const auto& agent = graph.agents[s.neighbor];
        out.push_back({{"edge", graph.edges[s.edge].id},
                       {"neighbor", {{"id", agent.id}, {"name", agent.name}, {"category", agent.category_path}}},
                       {"type", to_string(graph.edges[s.edge].type)},
                       {"polarity", to_string(s.polarity)},
                       {"curated", graph.edges[s.edge].curated},
                       {"evidence_count", s.evidence_count}});
    }
    return out;
}

}  // namespace atlas::query
