#pragma once

// Independent oracles and generators shared by the unit and acceptance tests.
// Nothing here calls the code under test for the quantity being checked.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "atlas/core/model.hpp"
#include "atlas/fixtures/fixtures.hpp"
#include "atlas/geometry/polygon.hpp"
#include "atlas/ingest/assemble.hpp"
#include "atlas/layout/circle_pack.hpp"
#include "atlas/layout/flow.hpp"

#include <unistd.h>

namespace support {

using atlas::fixtures::Rng;

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag = "atlas") {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

// ---------------------------------------------------------------- clustering

inline double choose2(double n) { return n * (n - 1) / 2; }

/// Hubert-Arabie adjusted Rand index from the contingency table. Every distinct
/// label (noise included) is its own class.
inline double adjusted_rand_index(const std::vector<long>& a, const std::vector<long>& b) {
    std::map<std::pair<long, long>, double> table;
    std::map<long, double> rows, cols;
    for (std::size_t i = 0; i < a.size(); ++i) {
        table[{a[i], b[i]}] += 1;
        rows[a[i]] += 1;
        cols[b[i]] += 1;
    }
    double index = 0, sum_rows = 0, sum_cols = 0;
    for (const auto& [key, n] : table) index += choose2(n);
    for (const auto& [key, n] : rows) sum_rows += choose2(n);
    for (const auto& [key, n] : cols) sum_cols += choose2(n);
    const double expected = sum_rows * sum_cols / choose2(static_cast<double>(a.size()));
    const double max_index = (sum_rows + sum_cols) / 2;
    if (max_index == expected) return 1.0;
    return (index - expected) / (max_index - expected);
}

// ------------------------------------------------------------------ geometry

using atlas::geometry::Point2d;

inline double segment_distance(const Point2d& p, const Point2d& a, const Point2d& b) {
    const Point2d ab = b - a;
    const double len2 = ab.squaredNorm();
    const double t = len2 == 0 ? 0.0 : std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (a + t * ab - p).norm();
}

/// Inside-or-on by winding number, with an absolute boundary tolerance.
inline bool inside_or_on(const std::vector<Point2d>& ring, const Point2d& p, double eps) {
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (segment_distance(p, ring[i], ring[(i + 1) % n]) <= eps) return true;
    }
    int winding = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = ring[i];
        const auto& b = ring[(i + 1) % n];
        const double side = (b.x() - a.x()) * (p.y() - a.y()) - (p.x() - a.x()) * (b.y() - a.y());
        if (a.y() <= p.y()) {
            if (b.y() > p.y() && side > 0) ++winding;
        } else if (b.y() <= p.y() && side < 0) {
            --winding;
        }
    }
    return winding != 0;
}

inline bool segments_touch(const Point2d& p1, const Point2d& p2, const Point2d& q1, const Point2d& q2) {
    auto cross = [](const Point2d& o, const Point2d& a, const Point2d& b) {
        return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
    };
    auto on = [](const Point2d& a, const Point2d& b, const Point2d& c) {
        return std::min(a.x(), b.x()) <= c.x() && c.x() <= std::max(a.x(), b.x()) && std::min(a.y(), b.y()) <= c.y() &&
               c.y() <= std::max(a.y(), b.y());
    };
    const double d1 = cross(q1, q2, p1), d2 = cross(q1, q2, p2), d3 = cross(p1, p2, q1), d4 = cross(p1, p2, q2);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
    return (d1 == 0 && on(q1, q2, p1)) || (d2 == 0 && on(q1, q2, p2)) || (d3 == 0 && on(p1, p2, q1)) ||
           (d4 == 0 && on(p1, p2, q2));
}

/// Brute-force simplicity: at least 3 distinct vertices, nonzero area, and no
/// pair of non-adjacent edges touching.
inline bool simple_ring(const std::vector<Point2d>& ring) {
    const std::size_t n = ring.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (ring[i] == ring[j]) return false;
        }
    }
    double area = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = ring[i];
        const auto& b = ring[(i + 1) % n];
        area += a.x() * b.y() - b.x() * a.y();
    }
    if (area == 0) return false;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if (adjacent) continue;
            if (segments_touch(ring[i], ring[(i + 1) % n], ring[j], ring[(j + 1) % n])) return false;
        }
    }
    return true;
}

/// Point clouds of assorted shapes: blob, ring, square, crescent, two lobes.
inline std::vector<Point2d> random_cluster(Rng& rng, std::size_t n) {
    std::vector<Point2d> pts;
    const auto shape = rng.below(5);
    const double cx = 10 * rng.uniform(), cy = 10 * rng.uniform();
    const double scale = 0.1 + rng.uniform();
    for (std::size_t i = 0; i < n; ++i) {
        double x = 0, y = 0;
        switch (shape) {
            case 0: x = rng.normal(); y = rng.normal(); break;
            case 1: {
                const double t = 2 * M_PI * rng.uniform();
                const double r = 1 + 0.15 * rng.normal();
                x = r * std::cos(t);
                y = r * std::sin(t);
                break;
            }
            case 2: x = rng.uniform(); y = rng.uniform(); break;
            case 3: {
                const double t = M_PI * rng.uniform();
                const double r = 1 + 0.1 * rng.normal();
                x = r * std::cos(t);
                y = r * std::sin(t);
                break;
            }
            default: {
                const double side = rng.chance(0.5) ? -1.5 : 1.5;
                x = side + 0.4 * rng.normal();
                y = 0.4 * rng.normal();
                break;
            }
        }
        pts.emplace_back(cx + scale * x, cy + scale * y);
    }
    return pts;
}

// --------------------------------------------------------------------- graphs

/// Random assembled graph: agents A00.. under a small ontology and `statements`
/// random statements without self-loops.
inline atlas::AssembledGraph random_graph(Rng& rng, std::size_t agents, std::size_t statements,
                                          double undirected_share = 0.2) {
    static const std::vector<std::string> categories = {"root/a/x", "root/a/y", "root/b/z", "root/b/w/v", "root/c"};
    std::vector<atlas::Agent> list;
    for (std::size_t i = 0; i < agents; ++i) {
        char id[32];
        std::snprintf(id, sizeof id, "A%02zu", i);
        list.push_back({id, std::string("agent ") + id, categories[rng.below(categories.size())], ""});
    }
    static const std::vector<atlas::StatementType> directed = {
        atlas::StatementType::Activation, atlas::StatementType::Inhibition, atlas::StatementType::IncreaseAmount,
        atlas::StatementType::DecreaseAmount, atlas::StatementType::Phosphorylation};
    static const std::vector<atlas::StatementType> undirected = {atlas::StatementType::Complex,
                                                                 atlas::StatementType::Association};
    std::vector<atlas::CausalStatement> sts;
    for (std::size_t k = 0; k < statements; ++k) {
        const auto a = rng.below(agents);
        auto b = rng.below(agents - 1);
        if (b >= a) ++b;
        atlas::CausalStatement s;
        s.id = "s" + std::to_string(k);
        s.type = rng.chance(undirected_share) ? undirected[rng.below(undirected.size())]
                                              : directed[rng.below(directed.size())];
        s.subj = list[a].id;
        s.obj = list[b].id;
        s.belief = 0.5 + 0.5 * rng.uniform();
        s.curated = rng.chance(0.3);
        const auto n_ev = 1 + rng.below(4);
        for (std::size_t e = 0; e < n_ev; ++e) {
            s.evidence.push_back({"text " + std::to_string(k) + "." + std::to_string(e),
                                  "10.1/d" + std::to_string(rng.below(12)), "reach"});
        }
        sts.push_back(std::move(s));
    }
    return atlas::ingest::assemble("random", sts, std::move(list));
}

/// A path as its node sequence followed by its edge sequence; an undirected
/// edge walked both ways gives two distinct paths.
using PathKey = std::pair<std::vector<std::size_t>, std::vector<std::size_t>>;

/// Every simple path of 1..max_len edges from a source to a target, moving
/// along context edges whose endpoints are context nodes; undirected edges run
/// both ways.
inline std::set<PathKey> brute_paths(const atlas::AssembledGraph& g,
                                                      const std::vector<std::size_t>& nodes,
                                                      const std::vector<std::size_t>& edges,
                                                      const std::vector<std::size_t>& sources,
                                                      const std::vector<std::size_t>& targets, std::size_t max_len) {
    const std::set<std::size_t> node_set(nodes.begin(), nodes.end());
    const std::set<std::size_t> target_set(targets.begin(), targets.end());
    std::set<PathKey> out;
    std::vector<std::size_t> path_edges;
    std::vector<std::size_t> path_nodes;
    auto dfs = [&](auto&& self, std::size_t u) -> void {
        if (!path_edges.empty() && target_set.contains(u)) out.insert({path_nodes, path_edges});
        if (path_edges.size() == max_len) return;
        for (const auto e : edges) {
            const auto& edge = g.edges[e];
            if (!node_set.contains(edge.subj_index) || !node_set.contains(edge.obj_index)) continue;
            std::size_t v = atlas::npos;
            if (edge.subj_index == u) v = edge.obj_index;
            else if (!edge.directed && edge.obj_index == u) v = edge.subj_index;
            if (v == atlas::npos) continue;
            if (std::find(path_nodes.begin(), path_nodes.end(), v) != path_nodes.end()) continue;
            path_nodes.push_back(v);
            path_edges.push_back(e);
            self(self, v);
            path_edges.pop_back();
            path_nodes.pop_back();
        }
    };
    for (const auto s : std::set<std::size_t>(sources.begin(), sources.end())) {
        if (!node_set.contains(s)) continue;
        path_nodes = {s};
        dfs(dfs, s);
    }
    return out;
}

/// Random directed multigraph on `n` named nodes without self-loops.
inline atlas::layout::FlowGraph random_flow_graph(Rng& rng, std::size_t n, std::size_t m) {
    atlas::layout::FlowGraph g;
    for (std::size_t i = 0; i < n; ++i) g.nodes.push_back("n" + std::to_string(100 + i));
    for (std::size_t k = 0; k < m && n > 1; ++k) {
        const auto a = rng.below(n);
        auto b = rng.below(n - 1);
        if (b >= a) ++b;
        g.edges.push_back({"e" + std::to_string(k), a, b});
    }
    return g;
}

/// Kahn's algorithm: whether the oriented edge list is acyclic.
inline bool acyclic(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
    std::vector<std::size_t> in(n, 0);
    std::vector<std::vector<std::size_t>> out(n);
    for (const auto& [u, v] : edges) {
        out[u].push_back(v);
        ++in[v];
    }
    std::vector<std::size_t> ready;
    for (std::size_t v = 0; v < n; ++v) {
        if (in[v] == 0) ready.push_back(v);
    }
    std::size_t seen = 0;
    while (!ready.empty()) {
        const auto u = ready.back();
        ready.pop_back();
        ++seen;
        for (const auto v : out[u]) {
            if (--in[v] == 0) ready.push_back(v);
        }
    }
    return seen == n;
}

/// Crossings between two adjacent layers from positions, by pair enumeration.
inline std::size_t pair_crossings(const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                                  const std::vector<std::size_t>& pos) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        for (std::size_t j = i + 1; j < edges.size(); ++j) {
            const auto [a, b] = edges[i];
            const auto [x, y] = edges[j];
            if ((pos[a] < pos[x] && pos[b] > pos[y]) || (pos[a] > pos[x] && pos[b] < pos[y])) ++c;
        }
    }
    return c;
}

/// Exact one-sided minimum: the best order of `free` nodes given the fixed
/// positions of their neighbours, by dynamic programming over subsets.
/// `edges` pairs (free node, fixed node).
inline std::size_t one_sided_minimum(const std::vector<std::size_t>& free,
                                     const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                                     const std::vector<std::size_t>& fixed_pos) {
    const std::size_t k = free.size();
    std::map<std::size_t, std::size_t> slot;
    for (std::size_t i = 0; i < k; ++i) slot[free[i]] = i;
    std::vector<std::vector<std::size_t>> nbrs(k);
    for (const auto& [u, v] : edges) nbrs[slot.at(u)].push_back(fixed_pos[v]);
    // cost[i][j]: crossings among edges of i and j when i precedes j.
    std::vector<std::vector<std::size_t>> cost(k, std::vector<std::size_t>(k, 0));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            if (i == j) continue;
            for (const auto a : nbrs[i]) {
                for (const auto b : nbrs[j]) cost[i][j] += a > b;
            }
        }
    }
    const std::size_t full = (std::size_t{1} << k) - 1;
    std::vector<std::size_t> best(full + 1, std::numeric_limits<std::size_t>::max());
    best[0] = 0;
    for (std::size_t set = 0; set < full; ++set) {
        if (best[set] == std::numeric_limits<std::size_t>::max()) continue;
        for (std::size_t j = 0; j < k; ++j) {
            if (set >> j & 1) continue;
            std::size_t add = 0;
            for (std::size_t i = 0; i < k; ++i) {
                if (set >> i & 1) add += cost[i][j];
            }
            best[set | (std::size_t{1} << j)] = std::min(best[set | (std::size_t{1} << j)], best[set] + add);
        }
    }
    return best[full];
}

/// Minimum crossings of a proper layered graph with two or three layers over
/// every ordering: the middle (or first) layer is enumerated, the outer layers
/// are then independent one-sided problems solved exactly.
inline std::size_t brute_min_crossings(const atlas::layout::LayeredGraph& g) {
    std::vector<std::vector<std::size_t>> layers(g.layer_count);
    for (std::size_t v = 0; v < g.names.size(); ++v) layers[g.layer_of[v]].push_back(v);
    const std::size_t pivot = g.layer_count == 3 ? 1 : 0;
    std::vector<std::size_t> perm = layers[pivot];
    std::sort(perm.begin(), perm.end());
    std::vector<std::size_t> pos(g.names.size(), 0);
    std::size_t best = std::numeric_limits<std::size_t>::max();
    do {
        for (std::size_t i = 0; i < perm.size(); ++i) pos[perm[i]] = i;
        std::size_t total = 0;
        for (std::size_t l = 0; l < g.layer_count; ++l) {
            if (l == pivot) continue;
            std::vector<std::pair<std::size_t, std::size_t>> side;
            for (const auto& [u, v] : g.edges) {
                if (g.layer_of[u] == l && g.layer_of[v] == pivot) side.emplace_back(u, v);
                if (g.layer_of[v] == l && g.layer_of[u] == pivot) side.emplace_back(v, u);
            }
            total += one_sided_minimum(layers[l], side, pos);
        }
        best = std::min(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

/// Random proper layered graph with 2 or 3 layers of 2..8 nodes.
inline atlas::layout::LayeredGraph random_layered(Rng& rng) {
    atlas::layout::LayeredGraph g;
    g.layer_count = 2 + rng.below(2);
    std::vector<std::vector<std::size_t>> layers(g.layer_count);
    for (std::size_t l = 0; l < g.layer_count; ++l) {
        const auto size = 2 + rng.below(7);
        for (std::size_t i = 0; i < size; ++i) {
            layers[l].push_back(g.names.size());
            g.names.push_back("L" + std::to_string(l) + "n" + std::to_string(rng.below(1000) + 1000 * i));
            g.layer_of.push_back(l);
        }
    }
    for (std::size_t l = 0; l + 1 < g.layer_count; ++l) {
        const auto m = layers[l].size() + rng.below(layers[l].size() + layers[l + 1].size());
        for (std::size_t k = 0; k < m; ++k) {
            g.edges.emplace_back(layers[l][rng.below(layers[l].size())], layers[l + 1][rng.below(layers[l + 1].size())]);
        }
    }
    return g;
}

// ------------------------------------------------------------------- packing

/// Random hierarchy of at most `max_leaves` leaves and depth at most `max_depth`.
inline atlas::layout::PackInput random_hierarchy(Rng& rng, std::size_t max_leaves, std::size_t max_depth) {
    std::size_t leaves = 0;
    std::size_t counter = 0;
    auto build = [&](auto&& self, std::size_t depth) -> atlas::layout::PackInput {
        atlas::layout::PackInput node;
        node.id = "n" + std::to_string(counter++);
        const bool leaf = depth == max_depth || leaves + 1 >= max_leaves || (depth > 0 && rng.chance(0.25));
        if (leaf) {
            node.weight = 1 + 20 * rng.uniform() * rng.uniform();
            node.is_agent = true;
            ++leaves;
            return node;
        }
        const auto kids = 1 + rng.below(depth == 0 ? 8 : 6);
        for (std::size_t k = 0; k < kids && leaves < max_leaves; ++k) node.children.push_back(self(self, depth + 1));
        if (node.children.empty()) {
            node.weight = 1;
            ++leaves;
        }
        return node;
    };
    return build(build, 0);
}

struct PackViolations {
    std::size_t overlaps = 0;
    std::size_t escapes = 0;
    double worst = 0;  // largest relative violation seen
};

/// Sibling overlap and child containment checks at a relative tolerance.
inline PackViolations check_pack(const atlas::layout::CirclePack& pack, double rel_tol) {
    PackViolations out;
    for (const auto& node : pack.nodes()) {
        for (const auto c : node.children) {
            const auto& child = pack.node(c).circle;
            const double excess = (child.center - node.circle.center).norm() + child.radius - node.circle.radius;
            const double rel = excess / node.circle.radius;
            out.worst = std::max(out.worst, rel);
            if (rel > rel_tol) ++out.escapes;
        }
        for (std::size_t i = 0; i < node.children.size(); ++i) {
            for (std::size_t j = i + 1; j < node.children.size(); ++j) {
                const auto& a = pack.node(node.children[i]).circle;
                const auto& b = pack.node(node.children[j]).circle;
                const double sum = a.radius + b.radius;
                const double rel = (sum - (a.center - b.center).norm()) / sum;
                out.worst = std::max(out.worst, rel);
                if (rel > rel_tol) ++out.overlaps;
            }
        }
    }
    return out;
}

// ------------------------------------------------------------------- corpus

/// Top-k by cosine similarity (ties by doi), excluding the query and zero rows.
inline std::vector<std::size_t> brute_knn(const Eigen::MatrixXd& emb, const std::vector<std::string>& dois,
                                          std::size_t query, std::size_t k) {
    std::vector<std::pair<double, std::size_t>> scored;
    const double qn = emb.row(static_cast<Eigen::Index>(query)).norm();
    for (Eigen::Index r = 0; r < emb.rows(); ++r) {
        if (static_cast<std::size_t>(r) == query) continue;
        const double rn = emb.row(r).norm();
        if (rn == 0) continue;
        double dot = 0;
        for (Eigen::Index c = 0; c < emb.cols(); ++c) dot += emb(static_cast<Eigen::Index>(query), c) * emb(r, c);
        scored.emplace_back(dot / (qn * rn), static_cast<std::size_t>(r));
    }
    std::sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return dois[a.second] < dois[b.second];
    });
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < k && i < scored.size(); ++i) out.push_back(scored[i].second);
    return out;
}

}  // namespace support
