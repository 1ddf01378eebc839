#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "atlas/geometry/polygon.hpp"

namespace atlas::knowledge {

enum class ClusterLevel { Coarse, Fine };

std::string_view to_string(ClusterLevel level) noexcept;

struct Cluster {
    std::size_t id = 0;
    std::optional<std::size_t> parent;  // coarse id, for fine clusters
    ClusterLevel level = ClusterLevel::Fine;
    std::vector<std::size_t> members;   // row indices, ascending
    double stability = 0.0;
    int hue = 0;
    std::optional<geometry::Polygon> boundary;
};

struct ClusterTree {
    std::vector<Cluster> clusters;             // coarse first, then fine
    std::vector<std::size_t> noise;            // rows without a fine cluster
    std::vector<std::optional<std::size_t>> fine_of;    // per row
    std::vector<std::optional<std::size_t>> coarse_of;  // per row
};

struct ClusterOptions {
    std::size_t min_cluster_size = 25;
    std::size_t min_samples = 5;
    std::optional<double> alpha_radius;  // default: 2x median nearest-neighbour distance per cluster
    bool boundaries = true;
};

/// One edge of the single-linkage tree over mutual-reachability distances.
struct CondensedRow {
    std::size_t parent = 0;  // condensed cluster index, root = 0
    std::size_t child = 0;   // point row (< n) or n + cluster index
    double lambda = 0.0;
    std::size_t size = 0;
};

/// Condensed HDBSCAN hierarchy over the rows of `points`.
std::vector<CondensedRow> condensed_tree(const Eigen::Ref<const Eigen::MatrixXd>& points, std::size_t min_cluster_size,
                                         std::size_t min_samples);

/// HDBSCAN with excess-of-mass selection. Selected clusters are the fine level;
/// coarse clusters are their outermost non-root ancestors in the condensed tree
/// (a fine cluster hanging directly off the root is its own coarse cluster).
/// Ids: coarse clusters ordered by smallest member row, then fine clusters by
/// (coarse id, smallest member row). Fine hue is the fine ordinal; a coarse
/// cluster takes the hue of its first fine child. When the tree has no split,
/// the root is the single cluster. Throws PreconditionError when
/// min_cluster_size < 2, min_samples < 1, or fewer rows than min_cluster_size.
ClusterTree hdbscan(const Eigen::Ref<const Eigen::MatrixXd>& points, const ClusterOptions& options);

}  // namespace atlas::knowledge
