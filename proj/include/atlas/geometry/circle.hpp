#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "atlas/core/errors.hpp"

namespace atlas::geometry {

template <typename Scalar>
using Point2 = Eigen::Matrix<Scalar, 2, 1>;

template <typename Scalar>
struct Circle {
    Point2<Scalar> center = Point2<Scalar>::Zero();
    Scalar radius = Scalar(0);

    bool contains(const Circle& other, Scalar rel_tol = Scalar(0)) const {
        return (other.center - center).norm() + other.radius <= radius + rel_tol * radius;
    }
};

using Circled = Circle<double>;

namespace detail {

template <typename Scalar>
bool encloses_not(const Circle<Scalar>& a, const Circle<Scalar>& b) {
    const Scalar dr = a.radius - b.radius;
    const Point2<Scalar> d = b.center - a.center;
    return dr < 0 || dr * dr < d.squaredNorm();
}

template <typename Scalar>
bool encloses_weak(const Circle<Scalar>& a, const Circle<Scalar>& b) {
    const Scalar slack = std::max({a.radius, b.radius, Scalar(1)}) * Scalar(1e-9);
    const Scalar dr = a.radius - b.radius + slack;
    const Point2<Scalar> d = b.center - a.center;
    return dr > 0 && dr * dr > d.squaredNorm();
}

template <typename Scalar>
bool encloses_weak_all(const Circle<Scalar>& a, std::span<const Circle<Scalar>> basis) {
    return std::all_of(basis.begin(), basis.end(), [&](const auto& b) { return encloses_weak(a, b); });
}

template <typename Scalar>
Circle<Scalar> enclose_basis2(const Circle<Scalar>& a, const Circle<Scalar>& b) {
    const Point2<Scalar> d = b.center - a.center;
    const Scalar l = d.norm();
    if (l == Scalar(0)) return a.radius >= b.radius ? a : b;
    const Scalar dr = b.radius - a.radius;
    return {(a.center + b.center + d / l * dr) / Scalar(2), (l + a.radius + b.radius) / Scalar(2)};
}

// Apollonius: the circle internally tangent to three circles.
template <typename Scalar>
Circle<Scalar> enclose_basis3(const Circle<Scalar>& a, const Circle<Scalar>& b, const Circle<Scalar>& c) {
    const Scalar x1 = a.center.x(), y1 = a.center.y(), r1 = a.radius;
    const Scalar x2 = b.center.x(), y2 = b.center.y(), r2 = b.radius;
    const Scalar x3 = c.center.x(), y3 = c.center.y(), r3 = c.radius;
    const Scalar a2 = x1 - x2, a3 = x1 - x3, b2 = y1 - y2, b3 = y1 - y3;
    const Scalar c2 = r2 - r1, c3 = r3 - r1;
    const Scalar d1 = x1 * x1 + y1 * y1 - r1 * r1;
    const Scalar d2 = d1 - x2 * x2 - y2 * y2 + r2 * r2;
    const Scalar d3 = d1 - x3 * x3 - y3 * y3 + r3 * r3;
    const Scalar ab = a3 * b2 - a2 * b3;
    const Scalar xa = (b2 * d3 - b3 * d2) / (ab * 2) - x1;
    const Scalar xb = (b3 * c2 - b2 * c3) / ab;
    const Scalar ya = (a3 * d2 - a2 * d3) / (ab * 2) - y1;
    const Scalar yb = (a2 * c3 - a3 * c2) / ab;
    const Scalar qa = xb * xb + yb * yb - 1;
    const Scalar qb = 2 * (r1 + xa * xb + ya * yb);
    const Scalar qc = xa * xa + ya * ya - r1 * r1;
    const Scalar r = -(std::abs(qa) > Scalar(1e-6) ? (qb + std::sqrt(qb * qb - 4 * qa * qc)) / (2 * qa) : qc / qb);
    return {Point2<Scalar>(x1 + xa + xb * r, y1 + ya + yb * r), r};
}

template <typename Scalar>
Circle<Scalar> enclose_basis(std::span<const Circle<Scalar>> basis) {
    switch (basis.size()) {
        case 1: return basis[0];
        case 2: return enclose_basis2(basis[0], basis[1]);
        default: return enclose_basis3(basis[0], basis[1], basis[2]);
    }
}

template <typename Scalar>
bool finite(const Circle<Scalar>& c) {
    return std::isfinite(c.center.x()) && std::isfinite(c.center.y()) && std::isfinite(c.radius);
}

// Smallest basis (<= 3 circles) containing `p` whose enclosure covers the old basis.
template <typename Scalar>
bool extend_basis(std::vector<Circle<Scalar>>& basis, const Circle<Scalar>& p) {
    using Span = std::span<const Circle<Scalar>>;
    if (encloses_weak_all<Scalar>(p, Span(basis))) {
        basis = {p};
        return true;
    }
    for (std::size_t i = 0; i < basis.size(); ++i) {
        if (encloses_not(p, basis[i]) && encloses_weak_all<Scalar>(enclose_basis2(basis[i], p), Span(basis))) {
            basis = {basis[i], p};
            return true;
        }
    }
    for (std::size_t i = 0; i + 1 < basis.size(); ++i) {
        for (std::size_t j = i + 1; j < basis.size(); ++j) {
            if (encloses_not(enclose_basis2(basis[i], basis[j]), p) &&
                encloses_not(enclose_basis2(basis[i], p), basis[j]) &&
                encloses_not(enclose_basis2(basis[j], p), basis[i])) {
                const auto e3 = enclose_basis3(basis[i], basis[j], p);
                if (finite(e3) && encloses_weak_all<Scalar>(e3, Span(basis))) {
                    basis = {basis[i], basis[j], p};
                    return true;
                }
            }
        }
    }
    return false;
}

}  // namespace detail

inline constexpr std::uint64_t kEncloseSeed = 0x5eed'c1c1e5ULL;

/// Smallest circle containing every input circle. Randomized incremental
/// construction over a seeded shuffle, so the result is deterministic. The
/// radius is finally widened to cover any rounding shortfall, which keeps
/// containment exact.
///
/// Throws PreconditionError on an empty input.
template <typename Scalar>
Circle<Scalar> min_enclosing_circle(std::span<const Circle<Scalar>> circles, std::uint64_t seed = kEncloseSeed) {
    if (circles.empty()) throw PreconditionError("min_enclosing_circle: empty input");
    std::vector<Circle<Scalar>> order(circles.begin(), circles.end());
    std::mt19937_64 rng(seed);
    for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[rng() % i]);
    }

    std::vector<Circle<Scalar>> basis;
    Circle<Scalar> e{};
    bool have = false;
    bool failed = false;
    for (std::size_t i = 0; i < order.size();) {
        const auto& p = order[i];
        if (have && detail::encloses_weak(e, p)) {
            ++i;
            continue;
        }
        if (!detail::extend_basis(basis, p)) {
            failed = true;
            break;
        }
        e = detail::enclose_basis<Scalar>(basis);
        have = true;
        i = 0;
    }
    if (failed || !detail::finite(e)) {
        // Numerically degenerate support set: fall back to the centroid-centred cover.
        Point2<Scalar> c = Point2<Scalar>::Zero();
        for (const auto& p : order) c += p.center;
        e.center = c / static_cast<Scalar>(order.size());
        e.radius = 0;
    }
    for (const auto& p : order) e.radius = std::max(e.radius, (p.center - e.center).norm() + p.radius);
    return e;
}

template <typename Scalar>
Circle<Scalar> min_enclosing_circle(const std::vector<Circle<Scalar>>& circles, std::uint64_t seed = kEncloseSeed) {
    return min_enclosing_circle(std::span<const Circle<Scalar>>(circles), seed);
}

/// Places circles with the front-chain method, in the given order, each new
/// circle tangent to two front-chain neighbours and overlapping nothing. Only
/// the centres are written; the result is translated so the enclosing circle
/// sits at the origin and its radius is returned.
template <typename Scalar>
Scalar pack_siblings(std::span<Circle<Scalar>> circles) {
    const std::size_t n = circles.size();
    if (n == 0) return Scalar(0);

    auto place = [](const Circle<Scalar>& b, const Circle<Scalar>& a, Circle<Scalar>& c) {
        const Point2<Scalar> d = b.center - a.center;
        const Scalar d2 = d.squaredNorm();
        if (d2 > 0) {
            Scalar a2 = a.radius + c.radius;
            a2 *= a2;
            Scalar b2 = b.radius + c.radius;
            b2 *= b2;
            if (a2 > b2) {
                const Scalar x = (d2 + b2 - a2) / (2 * d2);
                const Scalar y = std::sqrt(std::max(Scalar(0), b2 / d2 - x * x));
                c.center = {b.center.x() - x * d.x() - y * d.y(), b.center.y() - x * d.y() + y * d.x()};
            } else {
                const Scalar x = (d2 + a2 - b2) / (2 * d2);
                const Scalar y = std::sqrt(std::max(Scalar(0), a2 / d2 - x * x));
                c.center = {a.center.x() + x * d.x() - y * d.y(), a.center.y() + x * d.y() + y * d.x()};
            }
        } else {
            c.center = {a.center.x() + c.radius, a.center.y()};
        }
    };
    auto intersects = [](const Circle<Scalar>& a, const Circle<Scalar>& b) {
        const Scalar sum = a.radius + b.radius;
        const Scalar dr = sum - sum * Scalar(1e-7);
        return dr > 0 && dr * dr > (b.center - a.center).squaredNorm();
    };

    circles[0].center.setZero();
    if (n == 1) return circles[0].radius;
    circles[0].center = {-circles[1].radius, 0};
    circles[1].center = {circles[0].radius, 0};
    // Already centred: the pair spans [-(r0 + r1), r0 + r1] on the x axis.
    if (n == 2) return circles[0].radius + circles[1].radius;
    place(circles[1], circles[0], circles[2]);

    // Front chain as a circular doubly linked list over circle indices.
    std::vector<std::size_t> next(n), prev(n);
    std::size_t a = 0, b = 1, c = 2;
    next[a] = b; prev[b] = a;
    next[b] = c; prev[c] = b;
    next[c] = a; prev[a] = c;

    auto score = [&](std::size_t node) {
        const auto& ca = circles[node];
        const auto& cb = circles[next[node]];
        const Scalar ab = ca.radius + cb.radius;
        const Point2<Scalar> m = (ca.center * cb.radius + cb.center * ca.radius) / ab;
        return m.squaredNorm();
    };

    for (std::size_t i = 3; i < n; ++i) {
        place(circles[a], circles[b], circles[i]);
        bool restart = false;
        std::size_t j = next[b], k = prev[a];
        Scalar sj = circles[b].radius, sk = circles[a].radius;
        do {
            if (sj <= sk) {
                if (intersects(circles[j], circles[i])) {
                    b = j;
                    next[a] = b;
                    prev[b] = a;
                    restart = true;
                    break;
                }
                sj += circles[j].radius;
                j = next[j];
            } else {
                if (intersects(circles[k], circles[i])) {
                    a = k;
                    next[a] = b;
                    prev[b] = a;
                    restart = true;
                    break;
                }
                sk += circles[k].radius;
                k = prev[k];
            }
        } while (j != next[k]);
        if (restart) {
            --i;
            continue;
        }
        prev[i] = a;
        next[i] = b;
        next[a] = i;
        prev[b] = i;
        b = i;

        // Pick the front-chain pair closest to the centroid for the next placement.
        Scalar best = score(a);
        for (std::size_t node = next[b]; node != b; node = next[node]) {
            const Scalar s = score(node);
            if (s < best) {
                a = node;
                best = s;
            }
        }
        b = next[a];
    }

    std::vector<Circle<Scalar>> chain{circles[b]};
    for (std::size_t node = next[b]; node != b; node = next[node]) chain.push_back(circles[node]);
    auto enclosure = min_enclosing_circle(std::span<const Circle<Scalar>>(chain));
    // The chain bounds the packing, but widen to every circle so containment is exact.
    for (const auto& circle : circles) {
        enclosure.radius = std::max(enclosure.radius, (circle.center - enclosure.center).norm() + circle.radius);
    }
    for (auto& circle : circles) circle.center -= enclosure.center;
    return enclosure.radius;
}

}  // namespace atlas::geometry
