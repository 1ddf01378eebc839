#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "atlas/core/model.hpp"
#include "atlas/geometry/circle.hpp"

namespace atlas::layout {

using geometry::Circled;
using Point = geometry::Point2<double>;

/// Input hierarchy for packing: leaves carry weights, inner nodes are sized by
/// their children.
struct PackInput {
    std::string id;
    double weight = 1.0;
    bool is_agent = false;
    std::vector<PackInput> children;
};

enum class LeafWeight { Uniform, Degree };

struct PackOptions {
    /// Absolute gap between a parent ring and its enclosed children. When unset,
    /// 2% of the enclosure radius with a floor of one layout unit.
    std::optional<double> padding;
    double base_radius = 1.0;
    LeafWeight leaf_weight = LeafWeight::Degree;
};

struct PackNode {
    std::string id;
    std::size_t parent = npos;
    std::vector<std::size_t> children;
    std::size_t depth = 0;
    bool is_agent = false;
    Circled circle;
};

/// Packed circle geometry, stored preorder with the root at index 0 and centred
/// on the origin.
class CirclePack {
public:
    const std::vector<PackNode>& nodes() const noexcept { return nodes_; }
    const PackNode& root() const { return nodes_.front(); }
    const PackNode& node(std::size_t i) const { return nodes_[i]; }
    std::size_t size() const noexcept { return nodes_.size(); }
    std::size_t index_of(std::string_view id) const;  // npos if absent
    const PackNode* find(std::string_view id) const;
    std::size_t leaf_count() const;
    double padding_used(std::size_t i) const { return padding_[i]; }

private:
    friend CirclePack pack(const PackInput&, const PackOptions&);
    std::vector<PackNode> nodes_;
    std::vector<double> padding_;
    std::unordered_map<std::string, std::size_t> lookup_;
};

/// Bottom-up packing: leaf radius = base * sqrt(weight); siblings placed by
/// front-chain packing in order of decreasing radius (ties by id); parent =
/// min_enclosing_circle(children) inflated by padding. Throws PreconditionError
/// for non-positive leaf weights and FormatError for duplicate ids.
CirclePack pack(const PackInput& root, const PackOptions& options = {});

/// The ontology with every agent attached as a leaf under its category. Agent
/// weight is 1 + undirected degree in Degree mode, 1 otherwise.
PackInput pack_input(const AssembledGraph& graph, LeafWeight mode = LeafWeight::Degree);

inline CirclePack pack_graph(const AssembledGraph& graph, const PackOptions& options = {}) {
    return pack(pack_input(graph, options.leaf_weight), options);
}

/// Nodes visible at a zoom level: a node discloses its children when its
/// projected radius (radius * zoom_scale) reaches threshold_px. Returns the root
/// plus the children of every disclosed node, as ascending pack indices.
std::vector<std::size_t> lod_visible(double zoom_scale, const CirclePack& pack, double threshold_px = 50.0);

/// Same as lod_visible, as sorted ids.
std::vector<std::string> lod_depth(double zoom_scale, const CirclePack& pack, double threshold_px = 50.0);

}  // namespace atlas::layout
