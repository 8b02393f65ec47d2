#pragma once

#include "lagrot/field.hpp"

namespace lagrot {

namespace detail {
/// First derivative along `axis` at node k: central in the interior,
/// one-sided second-order at the two boundary layers.
double d1_at(const ScalarField& f, std::int64_t k, int axis);
/// Second derivative along `axis`: central in the interior; at the boundary
/// a 4-point one-sided stencil (3-point shifted when the axis has 3 nodes).
double d2_at(const ScalarField& f, std::int64_t k, int axis);
}  // namespace detail

/// Central differences in the interior, one-sided second-order at the
/// boundary. Exact on polynomials of degree <= 2.
VectorField gradient(const ScalarField& f);

ScalarField axis_derivative(const ScalarField& f, int axis);

/// Symmetric discrete Hessian: dedicated second differences on the diagonal,
/// symmetrized first-derivative composition off the diagonal.
MatrixField hessian(const ScalarField& f);

/// Copy the nodes in [lo, hi] (inclusive multi-index ranges) into a new field.
ScalarField restrict_field(const ScalarField& f, const NodeIndex& lo, const NodeIndex& hi);

/// Multilinear resampling onto `target`; throws std::domain_error if a target
/// node leaves f's domain by more than ~one spacing worth of roundoff.
ScalarField resample(const ScalarField& f, const Grid& target);

}  // namespace lagrot
