#include "atlas/layout/circle_pack.hpp"

#include <algorithm>
#include <cmath>

namespace atlas::layout {

std::size_t CirclePack::index_of(std::string_view id) const {
    const auto it = lookup_.find(std::string(id));
    return it == lookup_.end() ? npos : it->second;
}

const PackNode* CirclePack::find(std::string_view id) const {
    const auto i = index_of(id);
    return i == npos ? nullptr : &nodes_[i];
}

std::size_t CirclePack::leaf_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const PackNode& n) { return n.children.empty(); }));
}

namespace {

struct Builder {
    const PackOptions& options;
    std::vector<PackNode>& nodes;
    std::vector<double>& padding;
    std::vector<Point> relative;  // centre relative to the parent's centre

    std::size_t add(const PackInput& in, std::size_t parent, std::size_t depth) {
        const std::size_t self = nodes.size();
        nodes.push_back({in.id, parent, {}, depth, in.is_agent, {}});
        padding.push_back(0.0);
        relative.emplace_back(Point::Zero());
        for (const auto& child : in.children) {
            const auto c = add(child, self, depth + 1);
            nodes[self].children.push_back(c);
        }
        if (in.children.empty()) {
            if (!(in.weight > 0.0) || !std::isfinite(in.weight)) {
                throw PreconditionError("pack: leaf '" + in.id + "' has non-positive weight");
            }
            nodes[self].circle.radius = options.base_radius * std::sqrt(in.weight);
            return self;
        }

        auto order = nodes[self].children;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (nodes[a].circle.radius != nodes[b].circle.radius) return nodes[a].circle.radius > nodes[b].circle.radius;
            return nodes[a].id < nodes[b].id;
        });
        std::vector<Circled> circles;
        circles.reserve(order.size());
        for (const auto c : order) circles.push_back({Point::Zero(), nodes[c].circle.radius});
        const double enclosure = geometry::pack_siblings(std::span<Circled>(circles));
        for (std::size_t k = 0; k < order.size(); ++k) relative[order[k]] = circles[k].center;

        const double pad = options.padding ? *options.padding : std::max(0.02 * enclosure, 1.0);
        padding[self] = pad;
        nodes[self].circle.radius = enclosure + pad;
        return self;
    }
};

}  // namespace

CirclePack pack(const PackInput& root, const PackOptions& options) {
    if (options.padding && !(*options.padding >= 0.0)) throw PreconditionError("pack: padding must be >= 0");
    CirclePack out;
    Builder builder{options, out.nodes_, out.padding_, {}};
    builder.add(root, npos, 0);

    // Preorder guarantees parents are positioned before their children.
    for (std::size_t i = 0; i < out.nodes_.size(); ++i) {
        auto& node = out.nodes_[i];
        node.circle.center = node.parent == npos ? Point::Zero()
                                                 : Point(out.nodes_[node.parent].circle.center + builder.relative[i]);
        if (!out.lookup_.emplace(node.id, i).second) throw FormatError("pack: duplicate node id '" + node.id + "'");
    }
    return out;
}

namespace {

PackInput category_input(const OntologyNode& category, const AssembledGraph& graph, LeafWeight mode) {
    PackInput in{category.id, 1.0, false, {}};
    for (const auto& child : category.children) in.children.push_back(category_input(child, graph, mode));
    for (const auto& member : category.member_agents) {
        double weight = 1.0;
        if (mode == LeafWeight::Degree) {
            const auto idx = graph.agent_index(member);
            if (idx != npos) weight += static_cast<double>(graph.degree(idx));
        }
        in.children.push_back({member, weight, true, {}});
    }
    return in;
}

}  // namespace

PackInput pack_input(const AssembledGraph& graph, LeafWeight mode) {
    return category_input(graph.ontology, graph, mode);
}

std::vector<std::size_t> lod_visible(double zoom_scale, const CirclePack& pack, double threshold_px) {
    if (!(zoom_scale > 0.0)) throw PreconditionError("lod: zoom scale must be positive");
    std::vector<std::size_t> visible{0};
    std::vector<std::size_t> stack{0};
    while (!stack.empty()) {
        const auto i = stack.back();
        stack.pop_back();
        const auto& node = pack.node(i);
        if (node.circle.radius * zoom_scale < threshold_px) continue;
        for (const auto c : node.children) {
            visible.push_back(c);
            stack.push_back(c);
        }
    }
    std::sort(visible.begin(), visible.end());
    return visible;
}

std::vector<std::string> lod_depth(double zoom_scale, const CirclePack& pack, double threshold_px) {
    std::vector<std::string> ids;
    for (const auto i : lod_visible(zoom_scale, pack, threshold_px)) ids.push_back(pack.node(i).id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

}  // namespace atlas::layout
