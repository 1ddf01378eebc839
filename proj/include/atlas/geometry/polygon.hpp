#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "atlas/geometry/circle.hpp"

namespace atlas::geometry {

using Point2d = Point2<double>;

/// Closed, counterclockwise ring (the closing edge is implicit).
struct Polygon {
    std::vector<Point2d> vertices;
};

double signed_area(const Polygon& polygon);

/// Twice the signed area of triangle (a, b, c); positive when counterclockwise.
inline double orient(const Point2d& a, const Point2d& b, const Point2d& c) {
    return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

/// Inside or on the boundary. `eps` is an absolute distance tolerance for the
/// on-boundary test.
bool contains_point(const Polygon& polygon, const Point2d& p, double eps = 1e-9);

/// No two non-adjacent edges touch and no vertex repeats.
bool is_simple(const Polygon& polygon);

/// Counterclockwise hull without collinear vertices (Andrew's monotone chain).
/// Vertices are input points. Throws DegenerateGeometryError when the points
/// are all collinear.
Polygon convex_hull(std::span<const Point2d> points);

/// Delaunay triangulation by incremental Bowyer-Watson insertion in input order,
/// closed by a ghost vertex at infinity so the triangles tile the convex hull
/// exactly. Exact duplicate points are skipped; collinear input gives none.
/// Triangles index into `points` and are counterclockwise.
std::vector<std::array<std::size_t, 3>> delaunay(std::span<const Point2d> points);

double circumradius(const Point2d& a, const Point2d& b, const Point2d& c);

/// 2x the median nearest-neighbour distance.
double default_alpha_radius(std::span<const Point2d> points);

/// Boundaries of the union of Delaunay triangles with circumradius <=
/// alpha_radius, stitched into counterclockwise rings (holes are dropped,
/// pinch vertices split rings). Falls back to the convex hull when no triangle
/// survives. Throws PreconditionError for fewer than 3 points and
/// DegenerateGeometryError when all points are collinear.
std::vector<Polygon> alpha_shape(std::span<const Point2d> points, double alpha_radius);

/// A single simple polygon enclosing every point: the alpha shape at
/// `alpha_radius`, widened geometrically until it is one ring covering all
/// points, with the convex hull as the limit. Degenerate (collinear or < 3
/// distinct) inputs get a bounding box inflated by `inflate`.
Polygon cluster_boundary(std::span<const Point2d> points, double alpha_radius, double inflate = 1e-3);

}  // namespace atlas::geometry
