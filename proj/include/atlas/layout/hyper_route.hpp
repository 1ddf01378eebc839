#pragma once

#include <array>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "atlas/ingest/assemble.hpp"
#include "atlas/layout/circle_pack.hpp"

namespace atlas::layout {

struct ArcSegment {
    Point center;
    double radius = 0.0;
    double start_angle = 0.0;
    double end_angle = 0.0;  // |end - start| <= pi
    int winding = 1;         // +1 counterclockwise, -1 clockwise

    Point start() const;
    Point end() const;
};

struct CubicSegment {
    std::array<Point, 4> points;

    Point start() const { return points[0]; }
    Point end() const { return points[3]; }
    Point at(double t) const;
};

using RouteSegment = std::variant<ArcSegment, CubicSegment>;

Point segment_start(const RouteSegment& segment);
Point segment_end(const RouteSegment& segment);

struct RoutedPath {
    std::string hyper_edge;
    std::vector<RouteSegment> segments;
    double brightness = 1.0;

    Point start() const { return segment_start(segments.front()); }
    Point end() const { return segment_end(segments.back()); }
};

/// Route from the source category's boundary, wrapped half-way along the
/// source's parent ring toward the target, one cubic bridge, wrapped along the
/// target's parent ring, into the target boundary. Straight connectors (as
/// cubics) join category boundaries to the rings. Bundles within a single
/// category become an outward loop. Throws UnknownEntityError for categories
/// missing from the pack.
RoutedPath route_hyper_edge(const ingest::HyperEdge& bundle, const CirclePack& pack);

/// ln(1 + count) / ln(1 + max_count). Throws PreconditionError unless 1 <= count <= max_count.
double bundle_brightness(std::size_t count, std::size_t max_count);

/// {circles: [{id,x,y,r,depth,kind,parent}], hyperEdges: [{id,level,src,dst,count,brightness,segments}]}
/// restricted to circles of depth <= max_depth and bundles at that level.
nlohmann::json overview_json(const CirclePack& pack, const std::vector<ingest::HyperEdge>& bundles,
                             std::size_t max_depth);

nlohmann::json route_json(const RoutedPath& path);

}  // namespace atlas::layout
