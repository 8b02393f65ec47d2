#include "lagrot/stencil.hpp"

#include <cmath>
#include <stdexcept>

namespace lagrot {

namespace detail {

double d1_at(const ScalarField& f, std::int64_t k, int axis) {
    const Grid& g = f.grid;
    const NodeIndex iv = g.unindex(k);
    const int n = g.shape[axis];
    const double h = g.spacing;
    // stride of one step along axis
    std::int64_t stride = 1;
    for (int a = g.dim - 1; a > axis; --a) stride *= g.shape[a];

    const int i = iv[axis];
    const double* v = f.values.data();
    if (i == 0) return (-3.0 * v[k] + 4.0 * v[k + stride] - v[k + 2 * stride]) / (2.0 * h);
    if (i == n - 1) return (3.0 * v[k] - 4.0 * v[k - stride] + v[k - 2 * stride]) / (2.0 * h);
    return (v[k + stride] - v[k - stride]) / (2.0 * h);
}

double d2_at(const ScalarField& f, std::int64_t k, int axis) {
    const Grid& g = f.grid;
    const NodeIndex iv = g.unindex(k);
    const int n = g.shape[axis];
    const double h2 = g.spacing * g.spacing;
    std::int64_t stride = 1;
    for (int a = g.dim - 1; a > axis; --a) stride *= g.shape[a];

    const int i = iv[axis];
    const double* v = f.values.data();
    if (i == 0) {
        if (n >= 4)
            return (2.0 * v[k] - 5.0 * v[k + stride] + 4.0 * v[k + 2 * stride] -
                    v[k + 3 * stride]) / h2;
        return (v[k] - 2.0 * v[k + stride] + v[k + 2 * stride]) / h2;
    }
    if (i == n - 1) {
        if (n >= 4)
            return (2.0 * v[k] - 5.0 * v[k - stride] + 4.0 * v[k - 2 * stride] -
                    v[k - 3 * stride]) / h2;
        return (v[k] - 2.0 * v[k - stride] + v[k - 2 * stride]) / h2;
    }
    return (v[k + stride] - 2.0 * v[k] + v[k - stride]) / h2;
}

}  // namespace detail

ScalarField axis_derivative(const ScalarField& f, int axis) {
    ScalarField out(f.grid);
    const std::int64_t n = f.grid.node_count();
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < n; ++k) out.values[k] = detail::d1_at(f, k, axis);
    return out;
}

VectorField gradient(const ScalarField& f) {
    const int d = f.grid.dim;
    VectorField out(f.grid, d);
    const std::int64_t n = f.grid.node_count();
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < n; ++k)
        for (int a = 0; a < d; ++a) out.values[k * d + a] = detail::d1_at(f, k, a);
    return out;
}

MatrixField hessian(const ScalarField& f) {
    const int d = f.grid.dim;
    MatrixField out(f.grid);
    const std::int64_t n = f.grid.node_count();
    const int ts = out.tri_size();

    // first-derivative fields for the symmetrized cross terms
    std::vector<ScalarField> grads;
    grads.reserve(d);
    for (int a = 0; a < d; ++a) grads.push_back(axis_derivative(f, a));

#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < n; ++k) {
        for (int a = 0; a < d; ++a) {
            out.values[k * ts + SymMat::tri_index(d, a, a)] = detail::d2_at(f, k, a);
            for (int b = a + 1; b < d; ++b) {
                const double hab = 0.5 * (detail::d1_at(grads[b], k, a) +
                                          detail::d1_at(grads[a], k, b));
                out.values[k * ts + SymMat::tri_index(d, a, b)] = hab;
            }
        }
    }
    return out;
}

ScalarField restrict_field(const ScalarField& f, const NodeIndex& lo, const NodeIndex& hi) {
    const Grid& g = f.grid;
    std::array<int, 3> shape{1, 1, 1};
    std::array<double, 3> origin{0, 0, 0};
    for (int a = 0; a < g.dim; ++a) {
        if (lo[a] < 0 || hi[a] >= g.shape[a] || lo[a] > hi[a])
            throw std::domain_error("restrict_field: subbox outside grid");
        shape[a] = hi[a] - lo[a] + 1;
        origin[a] = g.origin[a] + g.spacing * lo[a];
    }
    Grid sub(g.dim, origin, g.spacing, shape);
    ScalarField out(sub);
    const std::int64_t n = sub.node_count();
    for (std::int64_t k = 0; k < n; ++k) {
        NodeIndex iv = sub.unindex(k);
        for (int a = 0; a < g.dim; ++a) iv[a] += lo[a];
        out.values[k] = f.values[g.index(iv)];
    }
    return out;
}

ScalarField resample(const ScalarField& f, const Grid& target) {
    if (target.dim != f.grid.dim) throw std::invalid_argument("resample: dim mismatch");
    const double slack = 1e-9 * f.grid.spacing;
    for (int a = 0; a < f.grid.dim; ++a) {
        if (target.origin[a] < f.grid.origin[a] - slack ||
            target.axis_max(a) > f.grid.axis_max(a) + slack)
            throw std::domain_error("resample: target grid outside source domain on axis " +
                                    std::to_string(a));
    }
    ScalarField out(target);
    const std::int64_t n = target.node_count();
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < n; ++k) {
        const auto x = target.coord(target.unindex(k));
        out.values[k] = interp_scalar(f, x.data(), slack);
    }
    return out;
}

}  // namespace lagrot
