#include "atlas/layout/hyper_route.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace atlas::layout {

namespace {

constexpr double kPi = std::numbers::pi;

Point polar(const Point& center, double radius, double angle) {
    return center + radius * Point(std::cos(angle), std::sin(angle));
}

double angle_of(const Point& v, double fallback) {
    return v.squaredNorm() > 0.0 ? std::atan2(v.y(), v.x()) : fallback;
}

// Shortest signed rotation from `from` to `to`; a half turn resolves counterclockwise.
double shortest_turn(double from, double to) {
    double d = std::remainder(to - from, 2.0 * kPi);
    if (d <= -kPi) d += 2.0 * kPi;
    if (std::abs(std::abs(d) - kPi) < 1e-12) d = kPi;
    return d;
}

CubicSegment straight(const Point& a, const Point& b) {
    return {{a, a + (b - a) / 3.0, a + 2.0 * (b - a) / 3.0, b}};
}

const PackNode& lookup(const CirclePack& pack, const std::string& id) {
    const auto* node = pack.find(id);
    if (node == nullptr) throw UnknownEntityError("category", id);
    return *node;
}

}  // namespace

Point ArcSegment::start() const { return polar(center, radius, start_angle); }
Point ArcSegment::end() const { return polar(center, radius, end_angle); }

Point CubicSegment::at(double t) const {
    const double u = 1.0 - t;
    return u * u * u * points[0] + 3 * u * u * t * points[1] + 3 * u * t * t * points[2] + t * t * t * points[3];
}

Point segment_start(const RouteSegment& segment) {
    return std::visit([](const auto& s) { return s.start(); }, segment);
}

Point segment_end(const RouteSegment& segment) {
    return std::visit([](const auto& s) { return s.end(); }, segment);
}

RoutedPath route_hyper_edge(const ingest::HyperEdge& bundle, const CirclePack& pack) {
    const auto& src = lookup(pack, bundle.source_category);
    const auto& dst = lookup(pack, bundle.target_category);
    RoutedPath path;
    path.hyper_edge = bundle.id();

    const Circled& s = src.circle;
    const Circled& t = dst.circle;

    if (&src == &dst) {
        const double spread = 0.35;
        const double out = kPi / 2 + spread, in = kPi / 2 - spread;
        const Point p = polar(s.center, s.radius, out);
        const Point q = polar(s.center, s.radius, in);
        const double reach = 0.6 * s.radius;
        path.segments.emplace_back(CubicSegment{{p, polar(p, reach, out), polar(q, reach, in), q}});
        return path;
    }

    const double exit_angle = angle_of(t.center - s.center, kPi / 2);
    const double entry_angle = angle_of(s.center - t.center, -kPi / 2);
    const Point exit = polar(s.center, s.radius, exit_angle);
    const Point entry = polar(t.center, t.radius, entry_angle);

    // Source side: connector out to the parent ring, then half the shorter way toward the target.
    Point bridge_start = exit;
    Point bridge_start_dir(std::cos(exit_angle), std::sin(exit_angle));
    double bridge_scale = s.radius;
    if (src.parent != npos) {
        const Circled& ring = pack.node(src.parent).circle;
        const double wrap = angle_of(exit - ring.center, exit_angle);
        const double sweep = 0.5 * shortest_turn(wrap, angle_of(t.center - ring.center, wrap));
        const Point on_ring = polar(ring.center, ring.radius, wrap);
        if ((on_ring - exit).norm() > 0.0) path.segments.emplace_back(straight(exit, on_ring));
        if (sweep != 0.0) {
            path.segments.emplace_back(ArcSegment{ring.center, ring.radius, wrap, wrap + sweep, sweep > 0 ? 1 : -1});
        }
        bridge_start = polar(ring.center, ring.radius, wrap + sweep);
        bridge_start_dir = Point(std::cos(wrap + sweep), std::sin(wrap + sweep));
        bridge_scale = ring.radius;
    }

    // Target side mirrors the source side; build it first so the bridge can aim at it.
    std::vector<RouteSegment> tail;
    Point bridge_end = entry;
    Point bridge_end_dir(std::cos(entry_angle), std::sin(entry_angle));
    if (dst.parent != npos) {
        const Circled& ring = pack.node(dst.parent).circle;
        const double wrap = angle_of(entry - ring.center, entry_angle);
        const double sweep = 0.5 * shortest_turn(wrap, angle_of(s.center - ring.center, wrap));
        const Point on_ring = polar(ring.center, ring.radius, wrap);
        if (sweep != 0.0) {
            tail.emplace_back(ArcSegment{ring.center, ring.radius, wrap + sweep, wrap, sweep > 0 ? -1 : 1});
        }
        if ((entry - on_ring).norm() > 0.0) tail.emplace_back(straight(on_ring, entry));
        bridge_end = polar(ring.center, ring.radius, wrap + sweep);
        bridge_end_dir = Point(std::cos(wrap + sweep), std::sin(wrap + sweep));
        bridge_scale = std::max(bridge_scale, ring.radius);
    }

    const double reach = std::max(0.3 * (bridge_end - bridge_start).norm(), 0.05 * bridge_scale);
    path.segments.emplace_back(CubicSegment{
        {bridge_start, bridge_start + reach * bridge_start_dir, bridge_end + reach * bridge_end_dir, bridge_end}});
    for (auto& seg : tail) path.segments.push_back(std::move(seg));
    return path;
}

double bundle_brightness(std::size_t count, std::size_t max_count) {
    if (count < 1 || count > max_count) {
        throw PreconditionError("bundle_brightness: need 1 <= count <= max_count");
    }
    return std::log1p(static_cast<double>(count)) / std::log1p(static_cast<double>(max_count));
}

nlohmann::json route_json(const RoutedPath& path) {
    auto pt = [](const Point& p) { return nlohmann::json::array({p.x(), p.y()}); };
    nlohmann::json segments = nlohmann::json::array();
    for (const auto& seg : path.segments) {
        if (const auto* arc = std::get_if<ArcSegment>(&seg)) {
            segments.push_back({{"type", "arc"},
                                {"cx", arc->center.x()},
                                {"cy", arc->center.y()},
                                {"r", arc->radius},
                                {"start", arc->start_angle},
                                {"end", arc->end_angle},
                                {"winding", arc->winding}});
        } else {
            const auto& cubic = std::get<CubicSegment>(seg);
            nlohmann::json points = nlohmann::json::array();
            for (const auto& p : cubic.points) points.push_back(pt(p));
            segments.push_back({{"type", "cubic"}, {"points", points}});
        }
    }
    return segments;
}

nlohmann::json overview_json(const CirclePack& pack, const std::vector<ingest::HyperEdge>& bundles,
                             std::size_t max_depth) {
    nlohmann::json circles = nlohmann::json::array();
    for (const auto& node : pack.nodes()) {
        if (node.depth > max_depth) continue;
        circles.push_back({{"id", node.id},
                           {"x", node.circle.center.x()},
                           {"y", node.circle.center.y()},
                           {"r", node.circle.radius},
                           {"depth", node.depth},
                           {"kind", node.is_agent ? "agent" : "category"},
                           {"parent", node.parent == npos ? nlohmann::json(nullptr)
                                                          : nlohmann::json(pack.node(node.parent).id)}});
    }
    std::size_t max_count = 1;
    for (const auto& b : bundles) max_count = std::max(max_count, b.count);
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& b : bundles) {
        auto route = route_hyper_edge(b, pack);
        route.brightness = bundle_brightness(b.count, max_count);
        edges.push_back({{"id", b.id()},
                         {"level", b.level},
                         {"src", b.source_category},
                         {"dst", b.target_category},
                         {"count", b.count},
                         {"brightness", route.brightness},
                         {"segments", route_json(route)}});
    }
    return {{"circles", std::move(circles)}, {"hyperEdges", std::move(edges)}};
}

}  // namespace atlas::layout
