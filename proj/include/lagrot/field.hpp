#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "lagrot/grid.hpp"

namespace lagrot {

/// Packed symmetric matrix, upper triangle in row order:
/// 2D (a00,a01,a11), 3D (a00,a01,a02,a11,a12,a22).
struct SymMat {
    int dim = 0;
    std::array<double, 6> tri{};

    static int tri_size(int dim) { return dim * (dim + 1) / 2; }

    static int tri_index(int dim, int a, int b) {
        if (a > b) std::swap(a, b);
        // row a starts after a full rows of lengths dim, dim-1, ...
        return a * dim - a * (a - 1) / 2 + (b - a);
    }

    double at(int a, int b) const { return tri[tri_index(dim, a, b)]; }
    double& at(int a, int b) { return tri[tri_index(dim, a, b)]; }

    static SymMat zero(int dim) { return SymMat{dim, {}}; }
    static SymMat identity(int dim) {
        SymMat m = zero(dim);
        for (int a = 0; a < dim; ++a) m.at(a, a) = 1.0;
        return m;
    }
    static SymMat diag(int dim, std::array<double, 3> d) {
        SymMat m = zero(dim);
        for (int a = 0; a < dim; ++a) m.at(a, a) = d[a];
        return m;
    }

    double trace() const {
        double t = 0;
        for (int a = 0; a < dim; ++a) t += at(a, a);
        return t;
    }

    // quadratic form w' M w
    double quad(const double* w) const {
        double q = 0;
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b) q += w[a] * at(a, b) * w[b];
        return q;
    }

    void matvec(const double* x, double* y) const {
        for (int a = 0; a < dim; ++a) {
            y[a] = 0;
            for (int b = 0; b < dim; ++b) y[a] += at(a, b) * x[b];
        }
    }

    double frobenius() const;
};

struct ScalarField {
    Grid grid;
    std::vector<double> values;

    ScalarField() = default;
    ScalarField(Grid g, std::vector<double> v);
    explicit ScalarField(Grid g);  // zero-filled

    double operator()(std::int64_t k) const { return values[k]; }
    double operator()(const NodeIndex& iv) const { return values[grid.index(iv)]; }
    double& at(const NodeIndex& iv) { return values[grid.index(iv)]; }
};

/// Per-node vector samples; ncomp defaults to grid.dim but may differ
/// (e.g. ambient 2n-vectors on an n-dim grid). Layout: values[node*ncomp + c].
struct VectorField {
    Grid grid;
    int ncomp = 0;
    std::vector<double> values;

    VectorField() = default;
    VectorField(Grid g, int ncomp_);
    VectorField(Grid g, int ncomp_, std::vector<double> v);

    double operator()(std::int64_t k, int c) const { return values[k * ncomp + c]; }
    double& at(std::int64_t k, int c) { return values[k * ncomp + c]; }
};

/// Per-node symmetric matrix samples, upper triangle packed per node.
struct MatrixField {
    Grid grid;
    std::vector<double> values;

    MatrixField() = default;
    explicit MatrixField(Grid g);
    MatrixField(Grid g, std::vector<double> v);

    int tri_size() const { return SymMat::tri_size(grid.dim); }

    SymMat matrix(std::int64_t k) const {
        SymMat m = SymMat::zero(grid.dim);
        const int ts = tri_size();
        for (int t = 0; t < ts; ++t) m.tri[t] = values[k * ts + t];
        return m;
    }
    void set_matrix(std::int64_t k, const SymMat& m) {
        const int ts = tri_size();
        for (int t = 0; t < ts; ++t) values[k * ts + t] = m.tri[t];
    }
    double entry(std::int64_t k, int a, int b) const {
        return values[k * tri_size() + SymMat::tri_index(grid.dim, a, b)];
    }
};

void require_finite(const std::vector<double>& v, const char* what);

/// Multilinear interpolation. Points may sit outside the box by at most
/// `slack` (clamped); farther out throws std::domain_error.
double interp_scalar(const ScalarField& f, const double* p, double slack);
void interp_vector(const VectorField& f, const double* p, double slack, double* out);
SymMat interp_matrix(const MatrixField& f, const double* p, double slack);

/// Tensor-product quadratic (3-point Lagrange) interpolation; O(h^3) on
/// smooth data, for samples that will be differenced again.
double interp_scalar_quadratic(const ScalarField& f, const double* p, double slack);

}  // namespace lagrot
