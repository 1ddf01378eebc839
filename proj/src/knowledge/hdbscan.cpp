#include "atlas/knowledge/hdbscan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "atlas/core/errors.hpp"

namespace atlas::knowledge {

namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

struct MstEdge {
    std::size_t a = 0;
    std::size_t b = 0;
    double weight = 0.0;
};

// Distance to the k-th nearest point, counting the point itself as the first.
std::vector<double> core_distances(const Eigen::Ref<const Eigen::MatrixXd>& points, std::size_t min_samples) {
    const auto n = static_cast<std::size_t>(points.rows());
    const std::size_t k = std::min(min_samples, n);
    std::vector<double> core(n);
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            dist[j] = (points.row(static_cast<Eigen::Index>(i)) - points.row(static_cast<Eigen::Index>(j))).norm();
        }
        std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k - 1), dist.end());
        core[i] = dist[k - 1];
    }
    return core;
}

// Prim's algorithm on the dense mutual-reachability graph.
std::vector<MstEdge> mutual_reachability_mst(const Eigen::Ref<const Eigen::MatrixXd>& points,
                                             const std::vector<double>& core) {
    const std::size_t n = core.size();
    std::vector<MstEdge> out;
    out.reserve(n - 1);
    std::vector<bool> in_tree(n, false);
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> from(n, 0);
    std::size_t current = 0;
    in_tree[0] = true;
    for (std::size_t step = 1; step < n; ++step) {
        std::size_t next = kNone;
        for (std::size_t j = 0; j < n; ++j) {
            if (in_tree[j]) continue;
            const double d = std::max(
                {core[current], core[j],
                 (points.row(static_cast<Eigen::Index>(current)) - points.row(static_cast<Eigen::Index>(j))).norm()});
            if (d < best[j]) {
                best[j] = d;
                from[j] = current;
            }
            if (next == kNone || best[j] < best[next]) next = j;
        }
        in_tree[next] = true;
        out.push_back({from[next], next, best[next]});
        current = next;
    }
    return out;
}

struct Dendrogram {
    std::size_t n = 0;
    std::vector<std::size_t> left, right;  // per merge node (index - n)
    std::vector<double> distance;
    std::vector<std::size_t> size;

    std::size_t node_size(std::size_t node) const { return node < n ? 1 : size[node - n]; }
};

Dendrogram single_linkage(std::size_t n, std::vector<MstEdge> edges) {
    std::stable_sort(edges.begin(), edges.end(), [](const MstEdge& x, const MstEdge& y) { return x.weight < y.weight; });
    Dendrogram tree;
    tree.n = n;
    std::vector<std::size_t> parent(2 * n - 1);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const std::size_t ra = find(edges[k].a);
        const std::size_t rb = find(edges[k].b);
        const std::size_t node = n + k;
        tree.left.push_back(ra);
        tree.right.push_back(rb);
        tree.distance.push_back(edges[k].weight);
        tree.size.push_back(tree.node_size(ra) + tree.node_size(rb));
        parent[ra] = node;
        parent[rb] = node;
    }
    return tree;
}

void collect_leaves(const Dendrogram& tree, std::size_t node, std::vector<std::size_t>& out) {
    std::vector<std::size_t> stack{node};
    while (!stack.empty()) {
        const std::size_t x = stack.back();
        stack.pop_back();
        if (x < tree.n) {
            out.push_back(x);
        } else {
            stack.push_back(tree.right[x - tree.n]);
            stack.push_back(tree.left[x - tree.n]);
        }
    }
}

struct Hierarchy {
    std::size_t n = 0;
    std::size_t clusters = 0;
    std::vector<CondensedRow> rows;
};

Hierarchy condense(const Dendrogram& tree, std::size_t min_cluster_size) {
    const std::size_t n = tree.n;
    Hierarchy h;
    h.n = n;
    h.clusters = 1;
    if (n == 1) {
        h.rows.push_back({0, 0, 0.0, 1});
        return h;
    }

    // Zero merge distances (duplicate points) would give infinite density; cap them.
    double smallest = std::numeric_limits<double>::infinity();
    for (double d : tree.distance) {
        if (d > 0) smallest = std::min(smallest, d);
    }
    const double floor = std::isfinite(smallest) ? smallest * 1e-3 : 1.0;
    auto lambda_of = [&](double d) { return 1.0 / std::max(d, floor); };

    const std::size_t root = 2 * n - 2;
    std::vector<std::size_t> label(2 * n - 1, kNone);
    label[root] = 0;
    std::vector<std::size_t> queue{root};
    std::vector<std::size_t> leaves;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const std::size_t node = queue[head];
        if (node < n) continue;
        const std::size_t l = tree.left[node - n];
        const std::size_t r = tree.right[node - n];
        const double lambda = lambda_of(tree.distance[node - n]);
        const std::size_t ls = tree.node_size(l);
        const std::size_t rs = tree.node_size(r);
        const std::size_t here = label[node];
        auto fall_out = [&](std::size_t sub) {
            leaves.clear();
            collect_leaves(tree, sub, leaves);
            for (auto p : leaves) h.rows.push_back({here, p, lambda, 1});
        };
        if (ls >= min_cluster_size && rs >= min_cluster_size) {
            for (auto [child, size] : {std::pair{l, ls}, std::pair{r, rs}}) {
                label[child] = h.clusters++;
                h.rows.push_back({here, n + label[child], lambda, size});
                queue.push_back(child);
            }
        } else if (ls < min_cluster_size && rs < min_cluster_size) {
            fall_out(l);
            fall_out(r);
        } else if (ls < min_cluster_size) {
            fall_out(l);
            label[r] = here;
            queue.push_back(r);
        } else {
            fall_out(r);
            label[l] = here;
            queue.push_back(l);
        }
    }
    return h;
}

Hierarchy build_hierarchy(const Eigen::Ref<const Eigen::MatrixXd>& points, std::size_t min_cluster_size,
                          std::size_t min_samples) {
    const auto n = static_cast<std::size_t>(points.rows());
    if (min_cluster_size < 2) throw PreconditionError("min_cluster_size must be at least 2");
    if (min_samples < 1) throw PreconditionError("min_samples must be at least 1");
    if (n < min_cluster_size) {
        throw PreconditionError("clustering needs at least min_cluster_size (" + std::to_string(min_cluster_size) +
                                ") points, got " + std::to_string(n));
    }
    if (!points.allFinite()) throw PreconditionError("clustering input has non-finite coordinates");
    const auto core = core_distances(points, min_samples);
    return condense(single_linkage(n, mutual_reachability_mst(points, core)), min_cluster_size);
}

}  // namespace

std::string_view to_string(ClusterLevel level) noexcept { return level == ClusterLevel::Coarse ? "coarse" : "fine"; }

std::vector<CondensedRow> condensed_tree(const Eigen::Ref<const Eigen::MatrixXd>& points, std::size_t min_cluster_size,
                                         std::size_t min_samples) {
    return build_hierarchy(points, min_cluster_size, min_samples).rows;
}

ClusterTree hdbscan(const Eigen::Ref<const Eigen::MatrixXd>& points, const ClusterOptions& options) {
    const Hierarchy h = build_hierarchy(points, options.min_cluster_size, options.min_samples);
    const std::size_t n = h.n;
    const std::size_t k = h.clusters;

    std::vector<std::size_t> parent(k, kNone);
    std::vector<std::vector<std::size_t>> children(k);
    std::vector<double> birth(k, 0.0);
    std::vector<std::size_t> fell_from(n, 0);
    for (const auto& row : h.rows) {
        if (row.child >= n) {
            const std::size_t c = row.child - n;
            parent[c] = row.parent;
            children[row.parent].push_back(c);
            birth[c] = row.lambda;
        } else {
            fell_from[row.child] = row.parent;
        }
    }
    std::vector<double> stability(k, 0.0);
    for (const auto& row : h.rows) {
        stability[row.parent] += (row.lambda - birth[row.parent]) * static_cast<double>(row.size);
    }

    // Excess of mass; children always carry larger labels than their parent.
    std::vector<bool> selected(k, false);
    if (k == 1) {
        selected[0] = true;
    } else {
        std::vector<double> best = stability;
        for (std::size_t c = k; c-- > 1;) {
            double subtree = 0.0;
            for (auto ch : children[c]) subtree += best[ch];
            if (!children[c].empty() && subtree > stability[c]) {
                best[c] = subtree;
            } else {
                selected[c] = true;
                std::vector<std::size_t> stack(children[c]);
                while (!stack.empty()) {
                    const auto x = stack.back();
                    stack.pop_back();
                    selected[x] = false;
                    stack.insert(stack.end(), children[x].begin(), children[x].end());
                }
            }
        }
    }

    // Coarse candidates: the parent of each selected cluster, or the cluster itself
    // when it hangs off the root; nested candidates collapse to the outermost.
    std::vector<bool> candidate(k, false);
    for (std::size_t c = 0; c < k; ++c) {
        if (!selected[c]) continue;
        candidate[(c == 0 || parent[c] == 0) ? c : parent[c]] = true;
    }
    std::vector<std::size_t> coarse_node(k, kNone);
    std::vector<std::size_t> fine_node(k, kNone);
    for (std::size_t c = 0; c < k; ++c) {
        const std::size_t up = c == 0 ? kNone : coarse_node[parent[c]];
        coarse_node[c] = up != kNone ? up : (candidate[c] ? c : kNone);
        fine_node[c] = selected[c] ? c : (c == 0 ? kNone : fine_node[parent[c]]);
    }

    std::map<std::size_t, std::vector<std::size_t>> coarse_members, fine_members;
    for (std::size_t p = 0; p < n; ++p) {
        const auto c = fell_from[p];
        if (coarse_node[c] != kNone) coarse_members[coarse_node[c]].push_back(p);
        if (fine_node[c] != kNone) fine_members[fine_node[c]].push_back(p);
    }

    ClusterTree out;
    out.fine_of.assign(n, std::nullopt);
    out.coarse_of.assign(n, std::nullopt);

    std::vector<std::size_t> coarse_order;
    for (const auto& [node, members] : coarse_members) coarse_order.push_back(node);
    std::sort(coarse_order.begin(), coarse_order.end(),
              [&](auto a, auto b) { return coarse_members[a].front() < coarse_members[b].front(); });
    std::map<std::size_t, std::size_t> coarse_id;
    for (auto node : coarse_order) {
        Cluster cluster;
        cluster.id = out.clusters.size();
        cluster.level = ClusterLevel::Coarse;
        cluster.members = coarse_members[node];
        cluster.stability = stability[node];
        coarse_id[node] = cluster.id;
        for (auto p : cluster.members) out.coarse_of[p] = cluster.id;
        out.clusters.push_back(std::move(cluster));
    }

    std::vector<std::size_t> fine_order;
    for (const auto& [node, members] : fine_members) fine_order.push_back(node);
    auto coarse_of_node = [&](std::size_t node) { return coarse_id.at(coarse_node[node]); };
    std::sort(fine_order.begin(), fine_order.end(), [&](auto a, auto b) {
        const auto ca = coarse_of_node(a), cb = coarse_of_node(b);
        return ca != cb ? ca < cb : fine_members[a].front() < fine_members[b].front();
    });
    int hue = 0;
    for (auto node : fine_order) {
        Cluster cluster;
        cluster.id = out.clusters.size();
        cluster.level = ClusterLevel::Fine;
        cluster.parent = coarse_of_node(node);
        cluster.members = fine_members[node];
        cluster.stability = stability[node];
        cluster.hue = hue++;
        auto& coarse = out.clusters[*cluster.parent];
        const bool first_child = std::none_of(out.clusters.begin(), out.clusters.end(), [&](const Cluster& c) {
            return c.level == ClusterLevel::Fine && c.parent == cluster.parent;
        });
        if (first_child) coarse.hue = cluster.hue;
        for (auto p : cluster.members) out.fine_of[p] = cluster.id;
        out.clusters.push_back(std::move(cluster));
    }
    for (std::size_t p = 0; p < n; ++p) {
        if (!out.fine_of[p]) out.noise.push_back(p);
    }

    if (options.boundaries) {
        for (auto& cluster : out.clusters) {
            std::vector<geometry::Point2d> pts;
            pts.reserve(cluster.members.size());
            for (auto p : cluster.members) {
                const auto i = static_cast<Eigen::Index>(p);
                pts.emplace_back(points(i, 0), points.cols() > 1 ? points(i, 1) : 0.0);
            }
            const double alpha = options.alpha_radius.value_or(0.0);
            cluster.boundary = geometry::cluster_boundary(pts, alpha);
        }
    }
    return out;
}

}  // namespace atlas::knowledge
