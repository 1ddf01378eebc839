#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

#include <Eigen/Core>

#include "atlas/core/errors.hpp"

namespace atlas::knowledge {

template <typename Scalar>
using Coords2 = Eigen::Matrix<Scalar, Eigen::Dynamic, 2>;

template <typename Scalar>
struct Projection {
    Coords2<Scalar> coords;                                 // n x 2
    Eigen::Matrix<Scalar, Eigen::Dynamic, 2> components;    // d x 2, unit columns
    Eigen::Matrix<Scalar, 2, 1> variances;                  // eigenvalues of the covariance
    Eigen::Matrix<Scalar, 1, Eigen::Dynamic> mean;
};

namespace detail {

// Dominant eigenpair of a symmetric positive semidefinite matrix by power
// iteration, orthogonal to `against` when it is nonempty.
template <typename Scalar>
Scalar dominant_eigen(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& c,
                      const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>* against,
                      Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& v, Scalar tol, std::size_t max_iterations) {
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    const Eigen::Index d = c.rows();
    auto project_out = [&](Vec& x) {
        if (against) x -= against->dot(x) * *against;
    };
    auto run = [&](Vec start) {
        project_out(start);
        const Scalar n0 = start.norm();
        if (n0 == Scalar(0)) return Scalar(-1);
        v = start / n0;
        for (std::size_t it = 0; it < max_iterations; ++it) {
            Vec w = c * v;
            project_out(w);
            const Scalar norm = w.norm();
            if (norm == Scalar(0)) return Scalar(0);
            Vec next = w / norm;
            if (next.dot(v) < 0) next = -next;
            const Scalar change = (next - v).norm();
            v = next;
            if (change < tol) break;
        }
        return v.dot(c * v);
    };

    // Deterministic ramp start; a coordinate axis rescues the rare orthogonal start.
    Vec ramp(d);
    for (Eigen::Index i = 0; i < d; ++i) ramp(i) = Scalar(1) + Scalar(i) / Scalar(d);
    Scalar lambda = run(ramp);
    if (lambda <= Scalar(0)) {
        Eigen::Index axis = 0;
        Vec diag = c.diagonal();
        if (against) diag -= (c * *against).cwiseProduct(*against);
        diag.maxCoeff(&axis);
        lambda = run(Vec::Unit(d, axis));
    }
    if (lambda < Scalar(0)) lambda = 0;
    return lambda;
}

template <typename Scalar>
void fix_sign(Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& v) {
    Eigen::Index i = 0;
    v.cwiseAbs().maxCoeff(&i);
    if (v(i) < 0) v = -v;
}

}  // namespace detail

/// Principal-component projection of the rows of `data` onto the top two
/// covariance eigenvectors, found by power iteration with deflation. Each
/// component is signed so its largest-magnitude loading is positive. A
/// component whose variance is below `tol` times the leading one yields a
/// zero column. Throws DegenerateInputError for fewer than 2 rows, no
/// columns, or rows that are all equal.
template <typename Derived>
Projection<typename Derived::Scalar> project_2d(const Eigen::MatrixBase<Derived>& data,
                                                typename Derived::Scalar tol = typename Derived::Scalar(1e-9),
                                                std::size_t max_iterations = 200000) {
    using Scalar = typename Derived::Scalar;
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    if (data.rows() < 2 || data.cols() == 0) throw DegenerateInputError("projection needs at least 2 rows and 1 column");

    Projection<Scalar> out;
    out.mean = data.colwise().mean();
    const Mat centered = data.rowwise() - out.mean;
    const Mat cov = (centered.transpose() * centered) / Scalar(data.rows() - 1);
    const Eigen::Index d = cov.rows();
    out.components = Eigen::Matrix<Scalar, Eigen::Dynamic, 2>::Zero(d, 2);
    out.variances.setZero();

    Vec first;
    const Scalar l1 = detail::dominant_eigen<Scalar>(cov, nullptr, first, tol, max_iterations);
    if (!(l1 > Scalar(0))) throw DegenerateInputError("projection of rank-0 data (all rows equal)");
    detail::fix_sign(first);
    out.components.col(0) = first;
    out.variances(0) = l1;
    if (d > 1) {
        Vec second;
        const Scalar l2 = detail::dominant_eigen<Scalar>(cov, &first, second, tol, max_iterations);
        if (l2 > tol * l1) {
            detail::fix_sign(second);
            out.components.col(1) = second;
            out.variances(1) = l2;
        }
    }
    out.coords = centered * out.components;
    return out;
}

}  // namespace atlas::knowledge
