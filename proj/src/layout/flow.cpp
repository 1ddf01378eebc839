#include "atlas/layout/flow.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>
#include <set>

namespace atlas::layout {

FlowGraph flow_subgraph(const AssembledGraph& graph, const std::vector<std::string>& node_ids,
                        const std::vector<std::string>& edge_ids) {
    std::set<std::size_t> nodes;
    std::set<std::size_t> edges;
    for (const auto& id : node_ids) {
        const auto i = graph.agent_index(id);
        if (i == npos) throw UnknownEntityError("agent", id);
        nodes.insert(i);
    }
    for (const auto& id : edge_ids) {
        const auto e = graph.edge_index(id);
        if (e == npos) throw UnknownEntityError("edge", id);
        edges.insert(e);
        nodes.insert(graph.edges[e].subj_index);
        nodes.insert(graph.edges[e].obj_index);
    }
    FlowGraph out;
    std::map<std::size_t, std::size_t> local;
    // Agent and edge indices already follow id order.
    for (const auto n : nodes) {
        local[n] = out.nodes.size();
        out.nodes.push_back(graph.agents[n].id);
    }
    for (const auto e : edges) {
        const auto& edge = graph.edges[e];
        out.edges.push_back({edge.id, local[edge.subj_index], local[edge.obj_index]});
    }
    return out;
}

namespace {

// Layers up to this width are ordered exactly against their fixed neighbour layer.
constexpr std::size_t kExactLayerWidth = 10;
constexpr std::size_t kStaleSweeps = 2;
constexpr std::size_t kTransposePasses = 8;

// Node order by id, used for every deterministic tie-break.
std::vector<std::size_t> rank_by_name(const std::vector<std::string>& names) {
    std::vector<std::size_t> order(names.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return names[a] < names[b]; });
    std::vector<std::size_t> rank(names.size());
    for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r;
    return rank;
}

bool reaches(std::size_t from, std::size_t to, std::size_t skip_edge, const FlowGraph& graph,
             const std::vector<char>& reversed, const std::vector<std::vector<std::size_t>>& incident) {
    std::vector<char> seen(graph.nodes.size(), 0);
    std::vector<std::size_t> stack{from};
    seen[from] = 1;
    while (!stack.empty()) {
        const auto u = stack.back();
        stack.pop_back();
        if (u == to) return true;
        for (const auto e : incident[u]) {
            if (e == skip_edge) continue;
            const auto& arc = graph.edges[e];
            const auto tail = reversed[e] ? arc.to : arc.from;
            const auto head = reversed[e] ? arc.from : arc.to;
            if (tail != u || seen[head]) continue;
            seen[head] = 1;
            stack.push_back(head);
        }
    }
    return false;
}

}  // namespace

std::vector<std::size_t> remove_cycles(const FlowGraph& graph) {
    const std::size_t n = graph.nodes.size();
    const auto rank = rank_by_name(graph.nodes);
    std::vector<std::size_t> by_rank(n);
    for (std::size_t i = 0; i < n; ++i) by_rank[rank[i]] = i;

    std::vector<long> in(n, 0), out(n, 0);
    std::vector<std::vector<std::size_t>> incident(n);
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        const auto& arc = graph.edges[e];
        ++out[arc.from];
        ++in[arc.to];
        incident[arc.from].push_back(e);
        if (arc.to != arc.from) incident[arc.to].push_back(e);
    }

    std::vector<char> removed(n, 0);
    std::vector<std::size_t> head_seq, tail_seq;  // s1 grows forward, s2 is prepended
    auto remove_node = [&](std::size_t u) {
        removed[u] = 1;
        for (const auto e : incident[u]) {
            const auto& arc = graph.edges[e];
            if (arc.from == u && !removed[arc.to]) --in[arc.to];
            if (arc.to == u && !removed[arc.from]) --out[arc.from];
        }
    };
    std::size_t remaining = n;
    while (remaining > 0) {
        bool peeled = true;
        while (peeled) {
            peeled = false;
            for (const auto u : by_rank) {
                if (!removed[u] && out[u] == 0) {
                    tail_seq.push_back(u);
                    remove_node(u);
                    --remaining;
                    peeled = true;
                    break;
                }
            }
        }
        peeled = true;
        while (peeled) {
            peeled = false;
            for (const auto u : by_rank) {
                if (!removed[u] && in[u] == 0) {
                    head_seq.push_back(u);
                    remove_node(u);
                    --remaining;
                    peeled = true;
                    break;
                }
            }
        }
        if (remaining == 0) break;
        std::size_t best = npos;
        long best_delta = 0;
        for (const auto u : by_rank) {
            if (removed[u]) continue;
            const long delta = out[u] - in[u];
            if (best == npos || delta > best_delta) {
                best = u;
                best_delta = delta;
            }
        }
        head_seq.push_back(best);
        remove_node(best);
        --remaining;
    }

    std::vector<std::size_t> position(n);
    std::size_t pos = 0;
    for (const auto u : head_seq) position[u] = pos++;
    for (auto it = tail_seq.rbegin(); it != tail_seq.rend(); ++it) position[*it] = pos++;

    std::vector<char> reversed(graph.edges.size(), 0);
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        reversed[e] = position[graph.edges[e].from] > position[graph.edges[e].to];
    }

    // Restore edges whose reversal is not needed, until a fixpoint.
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t e = 0; e < graph.edges.size(); ++e) {
            if (!reversed[e]) continue;
            const auto& arc = graph.edges[e];
            if (!reaches(arc.to, arc.from, e, graph, reversed, incident)) {
                reversed[e] = 0;
                changed = true;
            }
        }
    }

    std::vector<std::size_t> result;
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        if (reversed[e]) result.push_back(e);
    }
    return result;
}

std::vector<std::size_t> assign_layers(std::size_t node_count,
                                       const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
    std::vector<std::size_t> indegree(node_count, 0), layer(node_count, 0);
    std::vector<std::vector<std::size_t>> succ(node_count);
    for (const auto& [u, v] : edges) {
        succ[u].push_back(v);
        ++indegree[v];
    }
    std::queue<std::size_t> ready;
    for (std::size_t u = 0; u < node_count; ++u) {
        if (indegree[u] == 0) ready.push(u);
    }
    std::size_t visited = 0;
    while (!ready.empty()) {
        const auto u = ready.front();
        ready.pop();
        ++visited;
        for (const auto v : succ[u]) {
            layer[v] = std::max(layer[v], layer[u] + 1);
            if (--indegree[v] == 0) ready.push(v);
        }
    }
    if (visited != node_count) throw PreconditionError("assign_layers: input graph has a cycle");
    return layer;
}

LayerOrder initial_order(const LayeredGraph& graph) {
    LayerOrder order(graph.layer_count);
    for (std::size_t v = 0; v < graph.names.size(); ++v) order[graph.layer_of[v]].push_back(v);
    for (auto& layer : order) {
        std::sort(layer.begin(), layer.end(),
                  [&](std::size_t a, std::size_t b) { return graph.names[a] < graph.names[b]; });
    }
    return order;
}

std::size_t count_crossings(const LayeredGraph& graph, const LayerOrder& order) {
    std::vector<std::size_t> slot(graph.names.size(), 0);
    for (const auto& layer : order) {
        for (std::size_t i = 0; i < layer.size(); ++i) slot[layer[i]] = i;
    }
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> between(graph.layer_count);
    for (const auto& [u, v] : graph.edges) between[graph.layer_of[u]].emplace_back(slot[u], slot[v]);

    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < graph.layer_count; ++l) {
        auto& pairs = between[l];
        std::sort(pairs.begin(), pairs.end());
        // Count strictly inverted lower slots with a Fenwick tree.
        const std::size_t width = order[l + 1].size();
        std::vector<std::size_t> tree(width + 1, 0);
        std::size_t seen = 0;
        for (const auto& [upper, lower] : pairs) {
            std::size_t not_greater = 0;
            for (std::size_t i = lower + 1; i > 0; i -= i & (~i + 1)) not_greater += tree[i];
            total += seen - not_greater;
            for (std::size_t i = lower + 1; i <= width; i += i & (~i + 1)) ++tree[i];
            ++seen;
        }
    }
    return total;
}

LayerOrder order_layers(const LayeredGraph& graph, std::size_t max_iterations) {
    const std::size_t n = graph.names.size();
    std::vector<std::vector<std::size_t>> up(n), down(n);
    for (const auto& [u, v] : graph.edges) {
        down[u].push_back(v);
        up[v].push_back(u);
    }

    LayerOrder order = initial_order(graph);
    std::vector<double> slot(n, 0.0);
    auto refresh = [&](std::size_t l) {
        for (std::size_t i = 0; i < order[l].size(); ++i) slot[order[l][i]] = static_cast<double>(i);
    };
    for (std::size_t l = 0; l < graph.layer_count; ++l) refresh(l);

    // Optimal order of one small layer against a fixed neighbouring layer, by
    // dynamic programming over the set of already placed nodes.
    auto reorder_exact = [&](std::size_t l, const std::vector<std::vector<std::size_t>>& neighbours) {
        const auto& layer = order[l];
        const std::size_t k = layer.size();
        std::vector<std::size_t> cost(k * k, 0);  // cost[i * k + j]: i placed before j
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) {
                if (i == j) continue;
                for (const auto a : neighbours[layer[i]]) {
                    for (const auto b : neighbours[layer[j]]) cost[i * k + j] += slot[a] > slot[b];
                }
            }
        }
        const std::size_t full = (std::size_t{1} << k) - 1;
        constexpr std::size_t kUnset = std::numeric_limits<std::size_t>::max();
        std::vector<std::size_t> best(full + 1, kUnset), last(full + 1, 0);
        best[0] = 0;
        for (std::size_t set = 0; set < full; ++set) {
            if (best[set] == kUnset) continue;
            for (std::size_t j = 0; j < k; ++j) {
                if (set >> j & 1) continue;
                std::size_t add = 0;
                for (std::size_t i = 0; i < k; ++i) {
                    if (set >> i & 1) add += cost[i * k + j];
                }
                const auto next = set | (std::size_t{1} << j);
                if (best[set] + add < best[next]) {
                    best[next] = best[set] + add;
                    last[next] = j;
                }
            }
        }
        std::vector<std::size_t> placed(k);
        for (std::size_t set = full, pos = k; pos-- > 0;) {
            placed[pos] = layer[last[set]];
            set &= ~(std::size_t{1} << last[set]);
        }
        order[l] = std::move(placed);
        refresh(l);
    };

    auto reorder = [&](std::size_t l, const std::vector<std::vector<std::size_t>>& neighbours) {
        if (order[l].size() <= kExactLayerWidth) {
            reorder_exact(l, neighbours);
            return;
        }
        std::vector<std::pair<double, std::size_t>> keyed;
        keyed.reserve(order[l].size());
        for (const auto v : order[l]) {
            double key = slot[v];
            if (!neighbours[v].empty()) {
                double sum = 0.0;
                for (const auto w : neighbours[v]) sum += slot[w];
                key = sum / static_cast<double>(neighbours[v].size());
            }
            keyed.emplace_back(key, v);
        }
        std::stable_sort(keyed.begin(), keyed.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t i = 0; i < keyed.size(); ++i) order[l][i] = keyed[i].second;
        refresh(l);
    };

    // Crossings among the edges of v and w, to both neighbouring layers, when v sits left of w.
    auto pair_crossings = [&](std::size_t v, std::size_t w) {
        std::size_t c = 0;
        for (const auto* side : {&up, &down}) {
            for (const auto a : (*side)[v]) {
                for (const auto b : (*side)[w]) c += slot[a] > slot[b];
            }
        }
        return c;
    };
    // Adjacent swaps that reduce crossings; with `sideways`, equal-cost swaps are
    // taken too so the search can leave plateaus.
    auto transpose = [&](bool sideways) {
        bool improved = true;
        for (std::size_t pass = 0; improved && pass < kTransposePasses; ++pass) {
            improved = false;
            for (auto& layer : order) {
                for (std::size_t i = 0; i + 1 < layer.size(); ++i) {
                    const auto v = layer[i], w = layer[i + 1];
                    const auto now = pair_crossings(v, w), swapped = pair_crossings(w, v);
                    if (swapped < now || (sideways && swapped == now && now > 0)) {
                        improved |= swapped < now;
                        std::swap(layer[i], layer[i + 1]);
                        slot[layer[i]] = static_cast<double>(i);
                        slot[layer[i + 1]] = static_cast<double>(i + 1);
                    }
                }
            }
        }
    };

    // Sweeps from the name order and its mirror, each starting downward and
    // upward; the best ordering over all runs wins.
    const LayerOrder start = order;
    LayerOrder best = start;
    std::size_t best_crossings = count_crossings(graph, start);
    for (int run = 0; run < 4 && best_crossings > 0; ++run) {
        order = start;
        if (run >= 2) {
            for (auto& layer : order) std::reverse(layer.begin(), layer.end());
        }
        for (std::size_t l = 0; l < graph.layer_count; ++l) refresh(l);
        const bool downward_first = run % 2 == 0;
        std::size_t run_best = count_crossings(graph, order);
        std::size_t stale = 0;
        for (std::size_t iter = 0; iter < max_iterations; ++iter) {
            if (downward_first) {
                for (std::size_t l = 1; l < graph.layer_count; ++l) reorder(l, up);
                for (std::size_t l = graph.layer_count; l-- > 1;) reorder(l - 1, down);
            } else {
                for (std::size_t l = graph.layer_count; l-- > 1;) reorder(l - 1, down);
                for (std::size_t l = 1; l < graph.layer_count; ++l) reorder(l, up);
            }
            transpose(iter % 2 == 1);
            const auto crossings = count_crossings(graph, order);
            if (crossings < best_crossings) {
                best = order;
                best_crossings = crossings;
            }
            // Allow a couple of sideways sweeps before giving up on this run.
            if (crossings < run_best) {
                run_best = crossings;
                stale = 0;
            } else if (++stale > kStaleSweeps) {
                break;
            }
        }
    }
    return best;
}

FlowLayout flow_layout(const FlowGraph& graph, double layer_gap, double node_gap) {
    if (graph.nodes.empty()) throw PreconditionError("flow_layout: empty subgraph");
    const auto reversed_list = remove_cycles(graph);
    std::vector<char> reversed(graph.edges.size(), 0);
    for (const auto e : reversed_list) reversed[e] = 1;

    std::vector<std::pair<std::size_t, std::size_t>> oriented;
    oriented.reserve(graph.edges.size());
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        const auto& arc = graph.edges[e];
        oriented.emplace_back(reversed[e] ? arc.to : arc.from, reversed[e] ? arc.from : arc.to);
    }
    const auto layers = assign_layers(graph.nodes.size(), oriented);

    LayeredGraph layered;
    layered.names = graph.nodes;
    layered.layer_of = layers;
    layered.layer_count = 1 + *std::max_element(layers.begin(), layers.end());
    // Per original edge: node chain in oriented direction.
    std::vector<std::vector<std::size_t>> chains(graph.edges.size());
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        const auto [u, v] = oriented[e];
        auto& chain = chains[e];
        chain.push_back(u);
        for (std::size_t l = layers[u] + 1; l < layers[v]; ++l) {
            const auto dummy = layered.names.size();
            // '\x7f' sorts dummies after every printable real id in a layer's initial order.
            layered.names.push_back("\x7f" + graph.edges[e].id + "#" + std::to_string(l - layers[u]));
            layered.layer_of.push_back(l);
            chain.push_back(dummy);
        }
        chain.push_back(v);
        for (std::size_t k = 0; k + 1 < chain.size(); ++k) layered.edges.emplace_back(chain[k], chain[k + 1]);
    }

    FlowLayout out;
    out.initial_crossings = count_crossings(layered, initial_order(layered));
    const auto order = order_layers(layered);
    out.crossings = count_crossings(layered, order);

    std::vector<double> y(layered.names.size(), 0.0);
    for (const auto& layer : order) {
        for (std::size_t i = 0; i < layer.size(); ++i) y[layer[i]] = static_cast<double>(i) * node_gap;
    }
    std::vector<std::vector<std::size_t>> preds(layered.names.size());
    for (const auto& [u, v] : layered.edges) preds[v].push_back(u);
    for (std::size_t l = 1; l < order.size(); ++l) {
        double floor = 0.0;
        for (std::size_t i = 0; i < order[l].size(); ++i) {
            const auto v = order[l][i];
            double want = y[v];
            if (!preds[v].empty()) {
                std::vector<double> ys;
                for (const auto u : preds[v]) ys.push_back(y[u]);
                std::sort(ys.begin(), ys.end());
                const auto m = ys.size();
                want = m % 2 ? ys[m / 2] : 0.5 * (ys[m / 2 - 1] + ys[m / 2]);
            }
            y[v] = i == 0 ? want : std::max(want, floor);
            floor = y[v] + node_gap;
        }
    }

    auto at = [&](std::size_t v) { return Point(static_cast<double>(layered.layer_of[v]) * layer_gap, y[v]); };
    for (std::size_t v = 0; v < graph.nodes.size(); ++v) {
        out.positions[graph.nodes[v]] = at(v);
        out.layer_of[graph.nodes[v]] = layers[v];
    }
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        const auto& id = graph.edges[e].id;
        std::vector<Point> points;
        for (const auto v : chains[e]) points.push_back(at(v));
        if (reversed[e]) std::reverse(points.begin(), points.end());
        out.dummy_chains[id] = std::vector<Point>(points.begin() + 1, points.end() - 1);
        out.edge_points[id] = std::move(points);
        if (reversed[e]) out.reversed_edges.push_back(id);
    }
    std::sort(out.reversed_edges.begin(), out.reversed_edges.end());
    return out;
}

nlohmann::json flow_layout_json(const FlowLayout& layout) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& [id, p] : layout.positions) {
        nodes.push_back({{"id", id}, {"layer", layout.layer_of.at(id)}, {"x", p.x()}, {"y", p.y()}});
    }
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [id, points] : layout.edge_points) {
        nlohmann::json pts = nlohmann::json::array();
        for (const auto& p : points) pts.push_back({p.x(), p.y()});
        const bool rev = std::binary_search(layout.reversed_edges.begin(), layout.reversed_edges.end(), id);
        edges.push_back({{"id", id}, {"points", pts}, {"reversed", rev}});
    }
    return {{"nodes", nodes}, {"edges", edges}, {"crossings", layout.crossings}};
}

}  // namespace atlas::layout
