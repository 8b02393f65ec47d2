#pragma once

#include "lagrot/field.hpp"

namespace lagrot {

/// Eigen-decomposition of a small symmetric matrix. Eigenvalues ascending;
/// eigenvector i is column i of `vec` (vec[r*dim + i] = component r).
struct SymEigen {
    int dim = 0;
    std::array<double, 3> lambda{};
    std::array<double, 9> vec{};

    double vector(int r, int i) const { return vec[r * dim + i]; }
};

/// Closed form for dim <= 2, cyclic Jacobi for dim 3.
SymEigen sym_eigen(const SymMat& m);

/// Ascending eigenvalues per node.
VectorField eigenvalues_field(const MatrixField& M);

/// Q f(Lambda) Q^T for a scalar map applied to the eigenvalues.
SymMat eigen_map(const SymMat& m, double (*f)(double));

}  // namespace lagrot
