#include "atlas/geometry/polygon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <utility>

#include "atlas/core/errors.hpp"

namespace atlas::geometry {

namespace {

using Triangle = std::array<std::size_t, 3>;

inline constexpr std::size_t npos_index = static_cast<std::size_t>(-1);

double segment_distance(const Point2d& p, const Point2d& a, const Point2d& b) {
    const Point2d ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 == 0.0) return (p - a).norm();
    const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

bool on_segment(const Point2d& p, const Point2d& a, const Point2d& b) {
    return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) && std::min(a.y(), b.y()) <= p.y() &&
           p.y() <= std::max(a.y(), b.y());
}

int sign(double v) { return (v > 0) - (v < 0); }

bool segments_touch(const Point2d& p1, const Point2d& p2, const Point2d& q1, const Point2d& q2) {
    const int o1 = sign(orient(p1, p2, q1));
    const int o2 = sign(orient(p1, p2, q2));
    const int o3 = sign(orient(q1, q2, p1));
    const int o4 = sign(orient(q1, q2, p2));
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(q1, p1, p2)) return true;
    if (o2 == 0 && on_segment(q2, p1, p2)) return true;
    if (o3 == 0 && on_segment(p1, q1, q2)) return true;
    if (o4 == 0 && on_segment(p2, q1, q2)) return true;
    return false;
}

// Indices of the first occurrence of each distinct point, in input order.
std::vector<std::size_t> distinct_indices(std::span<const Point2d> points) {
    std::set<std::pair<double, double>> seen;
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (seen.emplace(points[i].x(), points[i].y()).second) out.push_back(i);
    }
    return out;
}

double extent(std::span<const Point2d> points) {
    if (points.empty()) return 0.0;
    Point2d lo = points[0], hi = points[0];
    for (const auto& p : points) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    return (hi - lo).maxCoeff();
}

bool all_collinear(std::span<const Point2d> points, const std::vector<std::size_t>& distinct) {
    if (distinct.size() < 3) return true;
    const Point2d& a = points[distinct[0]];
    std::size_t far = distinct[1];
    for (auto i : distinct) {
        if ((points[i] - a).squaredNorm() > (points[far] - a).squaredNorm()) far = i;
    }
    const Point2d& b = points[far];
    const double scale = (b - a).norm();
    for (auto i : distinct) {
        // orient / |b - a| is the distance of point i from the line.
        if (std::abs(orient(a, b, points[i])) > 1e-12 * scale * std::max(scale, 1.0)) return false;
    }
    return true;
}

// Positive when d lies strictly inside the circumcircle of counterclockwise (a, b, c).
double incircle(const Point2d& a, const Point2d& b, const Point2d& c, const Point2d& d) {
    const double adx = a.x() - d.x(), ady = a.y() - d.y();
    const double bdx = b.x() - d.x(), bdy = b.y() - d.y();
    const double cdx = c.x() - d.x(), cdy = c.y() - d.y();
    const double ad = adx * adx + ady * ady;
    const double bd = bdx * bdx + bdy * bdy;
    const double cd = cdx * cdx + cdy * cdy;
    return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

struct Shape {
    std::vector<Triangle> triangles;
    std::vector<double> radii;
};

Shape triangulate(std::span<const Point2d> points) {
    Shape shape;
    shape.triangles = delaunay(points);
    shape.radii.reserve(shape.triangles.size());
    for (const auto& t : shape.triangles) {
        shape.radii.push_back(circumradius(points[t[0]], points[t[1]], points[t[2]]));
    }
    return shape;
}

// Clockwise angle from direction `from` to direction `to`, in (0, 2pi].
double clockwise_turn(const Point2d& from, const Point2d& to) {
    double angle = std::atan2(from.y(), from.x()) - std::atan2(to.y(), to.x());
    while (angle <= 0) angle += 2 * std::numbers::pi;
    while (angle > 2 * std::numbers::pi) angle -= 2 * std::numbers::pi;
    return angle;
}

std::vector<Polygon> stitch(std::span<const Point2d> points, const std::vector<Triangle>& kept) {
    std::set<std::pair<std::size_t, std::size_t>> directed;
    for (const auto& t : kept) {
        for (int k = 0; k < 3; ++k) directed.emplace(t[k], t[(k + 1) % 3]);
    }
    // Boundary edges keep the region on their left.
    std::map<std::size_t, std::vector<std::size_t>> outgoing;
    std::set<std::pair<std::size_t, std::size_t>> unused;
    for (const auto& [u, v] : directed) {
        if (!directed.contains({v, u})) {
            outgoing[u].push_back(v);
            unused.emplace(u, v);
        }
    }

    std::vector<std::pair<double, Polygon>> rings;
    while (!unused.empty()) {
        const auto start = *unused.begin();
        unused.erase(unused.begin());
        std::vector<std::size_t> ring{start.first};
        std::size_t prev = start.first, cur = start.second;
        while (cur != start.first) {
            ring.push_back(cur);
            // Stay on the same region at pinch vertices: take the first boundary
            // edge met turning clockwise from the way we came in.
            std::size_t best = cur;
            double best_turn = std::numeric_limits<double>::infinity();
            for (auto w : outgoing[cur]) {
                if (!unused.contains({cur, w})) continue;
                const double turn = clockwise_turn(points[prev] - points[cur], points[w] - points[cur]);
                if (turn < best_turn) {
                    best_turn = turn;
                    best = w;
                }
            }
            if (best == cur) break;  // open chain; cannot happen for a consistent triangulation
            unused.erase({cur, best});
            prev = cur;
            cur = best;
        }
        if (cur != start.first || ring.size() < 3) continue;
        Polygon polygon;
        for (auto i : ring) polygon.vertices.push_back(points[i]);
        const double area = signed_area(polygon);
        if (area > 0) rings.emplace_back(area, std::move(polygon));
    }
    std::stable_sort(rings.begin(), rings.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<Polygon> out;
    for (auto& [area, polygon] : rings) out.push_back(std::move(polygon));
    return out;
}

std::vector<Polygon> shape_at(std::span<const Point2d> points, const Shape& shape, double alpha_radius) {
    std::vector<Triangle> kept;
    for (std::size_t i = 0; i < shape.triangles.size(); ++i) {
        if (shape.radii[i] <= alpha_radius) kept.push_back(shape.triangles[i]);
    }
    if (kept.empty()) return {convex_hull(points)};
    return stitch(points, kept);
}

void check_shape_input(std::span<const Point2d> points) {
    if (points.size() < 3) throw PreconditionError("alpha shape needs at least 3 points");
    if (all_collinear(points, distinct_indices(points))) {
        throw DegenerateGeometryError("alpha shape of collinear points");
    }
}

}  // namespace

double signed_area(const Polygon& polygon) {
    const auto& v = polygon.vertices;
    double twice = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto& a = v[i];
        const auto& b = v[(i + 1) % v.size()];
        twice += a.x() * b.y() - b.x() * a.y();
    }
    return twice / 2.0;
}

bool contains_point(const Polygon& polygon, const Point2d& p, double eps) {
    const auto& v = polygon.vertices;
    const std::size_t n = v.size();
    if (n == 0) return false;
    for (std::size_t i = 0; i < n; ++i) {
        if (segment_distance(p, v[i], v[(i + 1) % n]) <= eps) return true;
    }
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const auto& a = v[i];
        const auto& b = v[j];
        if ((a.y() > p.y()) != (b.y() > p.y())) {
            const double x = a.x() + (p.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
            if (p.x() < x) inside = !inside;
        }
    }
    return inside;
}

bool is_simple(const Polygon& polygon) {
    const auto& v = polygon.vertices;
    const std::size_t n = v.size();
    if (n < 3) return false;
    std::set<std::pair<double, double>> seen;
    for (const auto& p : v) {
        if (!seen.emplace(p.x(), p.y()).second) return false;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a1 = v[i];
        const auto& a2 = v[(i + 1) % n];
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto& b1 = v[j];
            const auto& b2 = v[(j + 1) % n];
            const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if (adjacent) {
                // Shared endpoint only; reject edges folding back onto each other.
                const Point2d shared = j == i + 1 ? a2 : a1;
                const Point2d x = j == i + 1 ? a1 : a2;
                const Point2d y = j == i + 1 ? b2 : b1;
                if (orient(x, shared, y) == 0.0 && (x - shared).dot(y - shared) > 0) return false;
                continue;
            }
            if (segments_touch(a1, a2, b1, b2)) return false;
        }
    }
    return true;
}

Polygon convex_hull(std::span<const Point2d> points) {
    const auto distinct = distinct_indices(points);
    if (all_collinear(points, distinct)) throw DegenerateGeometryError("convex hull of collinear points");
    std::vector<Point2d> sorted;
    for (auto i : distinct) sorted.push_back(points[i]);
    std::sort(sorted.begin(), sorted.end(), [](const Point2d& a, const Point2d& b) {
        return a.x() != b.x() ? a.x() < b.x() : a.y() < b.y();
    });
    std::vector<Point2d> hull(2 * sorted.size());
    std::size_t k = 0;
    for (const auto& p : sorted) {
        while (k >= 2 && orient(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = sorted.size() - 1, lower = k + 1; i-- > 0;) {
        const auto& p = sorted[i];
        while (k >= lower && orient(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    hull.resize(k - 1);
    return Polygon{std::move(hull)};
}

double circumradius(const Point2d& a, const Point2d& b, const Point2d& c) {
    const double twice_area = std::abs(orient(a, b, c));
    if (twice_area == 0.0) return std::numeric_limits<double>::infinity();
    return (b - a).norm() * (c - b).norm() * (a - c).norm() / (2.0 * twice_area);
}

std::vector<std::array<std::size_t, 3>> delaunay(std::span<const Point2d> points) {
    const auto distinct = distinct_indices(points);
    if (distinct.size() < 3) return {};

    // Start from the first non-collinear triple; the rest follow in input order.
    const std::size_t a = distinct[0], b = distinct[1];
    std::size_t c = npos_index;
    for (std::size_t k = 2; k < distinct.size(); ++k) {
        if (orient(points[a], points[b], points[distinct[k]]) != 0.0) {
            c = distinct[k];
            break;
        }
    }
    if (c == npos_index) return {};

    // A single ghost vertex at infinity closes the hull: ghost triangle (u, v, G)
    // stands for the open half-plane left of u -> v plus the open segment uv.
    const std::size_t ghost = points.size();
    auto conflicts = [&](const Triangle& t, const Point2d& p) {
        if (t[2] != ghost) return incircle(points[t[0]], points[t[1]], points[t[2]], p) > 0;
        const auto& u = points[t[0]];
        const auto& v = points[t[1]];
        const double side = orient(u, v, p);
        if (side != 0.0) return side > 0;
        return (p - u).dot(v - u) > 0 && (p - v).dot(u - v) > 0;
    };
    auto normalized = [&](Triangle t) {
        while (t[2] != ghost && (t[0] == ghost || t[1] == ghost)) t = {t[1], t[2], t[0]};
        return t;
    };

    std::vector<Triangle> tris;
    if (orient(points[a], points[b], points[c]) > 0) {
        tris = {{a, b, c}, {b, a, ghost}, {c, b, ghost}, {a, c, ghost}};
    } else {
        tris = {{a, c, b}, {c, a, ghost}, {b, c, ghost}, {a, b, ghost}};
    }
    std::vector<Triangle> keep;
    std::map<std::pair<std::size_t, std::size_t>, int> edges;
    for (auto p : distinct) {
        if (p == a || p == b || p == c) continue;
        keep.clear();
        edges.clear();
        std::vector<Triangle> cavity;
        for (const auto& t : tris) {
            if (conflicts(t, points[p])) {
                cavity.push_back(t);
                for (int k = 0; k < 3; ++k) {
                    const auto u = t[k], v = t[(k + 1) % 3];
                    ++edges[{std::min(u, v), std::max(u, v)}];
                }
            } else {
                keep.push_back(t);
            }
        }
        if (cavity.empty()) continue;
        for (const auto& t : cavity) {
            for (int k = 0; k < 3; ++k) {
                const auto u = t[k], v = t[(k + 1) % 3];
                if (edges[{std::min(u, v), std::max(u, v)}] == 1) keep.push_back(normalized({u, v, p}));
            }
        }
        tris.swap(keep);
    }

    std::vector<std::array<std::size_t, 3>> out;
    for (const auto& t : tris) {
        if (t[2] == ghost || orient(points[t[0]], points[t[1]], points[t[2]]) <= 0) continue;
        out.push_back(t);
    }
    return out;
}

double default_alpha_radius(std::span<const Point2d> points) {
    const auto distinct = distinct_indices(points);
    if (distinct.size() < 2) throw PreconditionError("alpha radius needs at least 2 distinct points");
    std::vector<double> nearest;
    nearest.reserve(distinct.size());
    for (auto i : distinct) {
        double best = std::numeric_limits<double>::infinity();
        for (auto j : distinct) {
            if (i != j) best = std::min(best, (points[i] - points[j]).squaredNorm());
        }
        nearest.push_back(std::sqrt(best));
    }
    const auto middle = nearest.begin() + static_cast<std::ptrdiff_t>(nearest.size() / 2);
    std::nth_element(nearest.begin(), middle, nearest.end());
    double median = *middle;
    if (nearest.size() % 2 == 0) {
        median = (median + *std::max_element(nearest.begin(), middle)) / 2.0;
    }
    return 2.0 * median;
}

std::vector<Polygon> alpha_shape(std::span<const Point2d> points, double alpha_radius) {
    check_shape_input(points);
    return shape_at(points, triangulate(points), alpha_radius);
}

Polygon cluster_boundary(std::span<const Point2d> points, double alpha_radius, double inflate) {
    const auto distinct = distinct_indices(points);
    if (all_collinear(points, distinct)) {
        if (points.empty()) throw PreconditionError("cluster boundary of no points");
        Point2d lo = points[0], hi = points[0];
        for (const auto& p : points) {
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
        const double pad = inflate * std::max((hi - lo).maxCoeff(), 1.0);
        lo.array() -= pad;
        hi.array() += pad;
        return Polygon{{lo, Point2d(hi.x(), lo.y()), hi, Point2d(lo.x(), hi.y())}};
    }

    const Shape shape = triangulate(points);
    const double eps = 1e-9 * std::max(extent(points), 1.0);
    double largest = 0.0;
    for (double r : shape.radii) {
        if (std::isfinite(r)) largest = std::max(largest, r);
    }
    double alpha = std::isfinite(alpha_radius) && alpha_radius > 0 ? alpha_radius : default_alpha_radius(points);
    while (true) {
        auto rings = shape_at(points, shape, alpha);
        if (rings.size() == 1 && is_simple(rings[0]) &&
            std::all_of(points.begin(), points.end(), [&](const Point2d& p) { return contains_point(rings[0], p, eps); })) {
            return std::move(rings[0]);
        }
        if (alpha > largest) break;
        alpha *= 1.5;
    }
    return convex_hull(points);
}

}  // namespace atlas::geometry
