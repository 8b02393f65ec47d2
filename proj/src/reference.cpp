#include "lagrot/reference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lagrot/stencil.hpp"

namespace lagrot::ref {

VectorField gradient(const ScalarField& f) {
    const int d = f.grid.dim;
    VectorField out(f.grid, d);
    for (std::int64_t k = 0; k < f.grid.node_count(); ++k)
        for (int a = 0; a < d; ++a) out.values[k * d + a] = detail::d1_at(f, k, a);
    return out;
}

MatrixField hessian(const ScalarField& f) {
    const int d = f.grid.dim;
    MatrixField out(f.grid);
    const int ts = out.tri_size();

    std::vector<ScalarField> grads;
    for (int a = 0; a < d; ++a) {
        ScalarField ga(f.grid);
        for (std::int64_t k = 0; k < f.grid.node_count(); ++k)
            ga.values[k] = detail::d1_at(f, k, a);
        grads.push_back(std::move(ga));
    }

    for (std::int64_t k = 0; k < f.grid.node_count(); ++k) {
        for (int a = 0; a < d; ++a) {
            out.values[k * ts + SymMat::tri_index(d, a, a)] = detail::d2_at(f, k, a);
            for (int b = a + 1; b < d; ++b) {
                const double hab =
                    0.5 * (detail::d1_at(grads[b], k, a) + detail::d1_at(grads[a], k, b));
                out.values[k * ts + SymMat::tri_index(d, a, b)] = hab;
            }
        }
    }
    return out;
}

ScalarField discrete_conjugate(const ScalarField& f, const Grid& dual, ConjugateMode mode) {
    if (dual.dim != f.grid.dim)
        throw std::invalid_argument("ref::discrete_conjugate: dim mismatch");
    std::vector<double> v = lagrot::detail::conjugate_factored(
        f.grid, f.values, dual, mode == ConjugateMode::hull_refined, /*parallel=*/false);
    return ScalarField(dual, std::move(v));
}

ScalarField laplace_beltrami(const ScalarField& f, const InducedMetric& metric) {
    const Grid& grid = f.grid;
    if (!grid.same_layout(metric.g.grid))
        throw std::invalid_argument("ref::laplace_beltrami: grid mismatch");
    const int d = grid.dim;

    const MatrixField w = metric_flux_weights(metric);
    const VectorField grad = ref::gradient(f);

    std::array<std::int64_t, 3> stride{0, 0, 0};
    for (int a = 0; a < d; ++a) {
        std::int64_t s = 1;
        for (int b = d - 1; b > a; --b) s *= grid.shape[b];
        stride[a] = s;
    }

    ScalarField out(grid);
    for (std::int64_t k = 0; k < grid.node_count(); ++k) {
        if (!grid.is_interior(grid.unindex(k))) continue;
        out.values[k] = lagrot::detail::laplace_beltrami_at(f, metric, w, grad, k, stride);
    }
    return out;
}

VmoTable vmo_modulus(const MatrixField& M, std::vector<double> radii) {
    const Grid& grid = M.grid;
    const double h = grid.spacing;
    const int d = grid.dim;
    for (double r : radii)
        if (r < 2.0 * h - 1e-12 * h)
            throw std::invalid_argument("ref::vmo_modulus: radius below 2h");
    std::sort(radii.begin(), radii.end());

    VmoTable table;
    double running = 0.0;
    for (double r : radii) {
        const auto offsets = lagrot::detail::ball_offsets(d, r, h);
        const int R = static_cast<int>(std::floor(r / h + 1e-12));
        double worst = 0.0;
        for (std::int64_t k = 0; k < grid.node_count(); ++k) {
            const NodeIndex iv = grid.unindex(k);
            bool ok = true;
            for (int a = 0; a < d; ++a)
                if (iv[a] < R || iv[a] > grid.shape[a] - 1 - R) ok = false;
            if (!ok) continue;
            worst = std::max(worst, lagrot::detail::vmo_ball_deviation(M, iv, offsets));
        }
        running = std::max(running, worst);
        table.radius.push_back(r);
        table.omega.push_back(running);
    }
    return table;
}

}  // namespace lagrot::ref
