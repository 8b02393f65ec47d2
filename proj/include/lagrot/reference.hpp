#pragma once

#include "lagrot/convex.hpp"
#include "lagrot/geometry.hpp"

namespace lagrot::ref {

/// Serial reference implementations of the parallel kernels. Same per-node
/// arithmetic, plain loops; outputs must match the OpenMP versions exactly.
VectorField gradient(const ScalarField& f);
MatrixField hessian(const ScalarField& f);
ScalarField discrete_conjugate(const ScalarField& f, const Grid& dual, ConjugateMode mode);
ScalarField laplace_beltrami(const ScalarField& f, const InducedMetric& metric);
VmoTable vmo_modulus(const MatrixField& M, std::vector<double> radii);

}  // namespace lagrot::ref
