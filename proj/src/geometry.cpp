#include "lagrot/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lagrot/eigen_sym.hpp"
#include "lagrot/stencil.hpp"

namespace lagrot {

namespace {

SymMat sym_square(const SymMat& m) {
    SymMat out = SymMat::zero(m.dim);
    for (int a = 0; a < m.dim; ++a)
        for (int b = a; b < m.dim; ++b) {
            double s = 0;
            for (int c = 0; c < m.dim; ++c) s += m.at(a, c) * m.at(c, b);
            out.at(a, b) = s;
        }
    return out;
}

double sym_det(const SymMat& m) {
    switch (m.dim) {
        case 1: return m.at(0, 0);
        case 2: return m.at(0, 0) * m.at(1, 1) - m.at(0, 1) * m.at(0, 1);
        case 3:
            return m.at(0, 0) * (m.at(1, 1) * m.at(2, 2) - m.at(1, 2) * m.at(1, 2)) -
                   m.at(0, 1) * (m.at(0, 1) * m.at(2, 2) - m.at(1, 2) * m.at(0, 2)) +
                   m.at(0, 2) * (m.at(0, 1) * m.at(1, 2) - m.at(1, 1) * m.at(0, 2));
        default: throw std::invalid_argument("sym_det: dim must be <= 3");
    }
}

SymMat sym_inverse(const SymMat& m) {
    const double det = sym_det(m);
    SymMat inv = SymMat::zero(m.dim);
    switch (m.dim) {
        case 1:
            inv.at(0, 0) = 1.0 / det;
            break;
        case 2:
            inv.at(0, 0) = m.at(1, 1) / det;
            inv.at(1, 1) = m.at(0, 0) / det;
            inv.at(0, 1) = -m.at(0, 1) / det;
            break;
        case 3:
            inv.at(0, 0) = (m.at(1, 1) * m.at(2, 2) - m.at(1, 2) * m.at(1, 2)) / det;
            inv.at(0, 1) = -(m.at(0, 1) * m.at(2, 2) - m.at(0, 2) * m.at(1, 2)) / det;
            inv.at(0, 2) = (m.at(0, 1) * m.at(1, 2) - m.at(0, 2) * m.at(1, 1)) / det;
            inv.at(1, 1) = (m.at(0, 0) * m.at(2, 2) - m.at(0, 2) * m.at(0, 2)) / det;
            inv.at(1, 2) = -(m.at(0, 0) * m.at(1, 2) - m.at(0, 1) * m.at(0, 2)) / det;
            inv.at(2, 2) = (m.at(0, 0) * m.at(1, 1) - m.at(0, 1) * m.at(0, 1)) / det;
            break;
    }
    return inv;
}

}  // namespace

InducedMetric induced_metric(const MatrixField& H) {
    const Grid& grid = H.grid;
    InducedMetric out{MatrixField(grid), MatrixField(grid), ScalarField(grid)};
    const std::int64_t n = grid.node_count();
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < n; ++k) {
        SymMat g = sym_square(H.matrix(k));
        for (int a = 0; a < grid.dim; ++a) g.at(a, a) += 1.0;
        out.g.set_matrix(k, g);
        out.g_inv.set_matrix(k, sym_inverse(g));
        out.sqrt_det.values[k] = std::sqrt(sym_det(g));
    }
    return out;
}

MeanCurvature mean_curvature(const ScalarField& u, const PhaseField& psi) {
    if (!u.grid.same_layout(psi.field.grid))
        throw std::invalid_argument("mean_curvature: psi must be sampled on u's grid");
    const Grid& grid = u.grid;
    const int d = grid.dim;
    const MatrixField H = hessian(u);
    const InducedMetric metric = induced_metric(H);
    const VectorField dpsi = gradient(psi.field);

    MeanCurvature out{VectorField(grid, 2 * d), ScalarField(grid)};
    const std::int64_t n = grid.node_count();
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < n; ++k) {
        double grad[3], v[3], hv[3];
        for (int a = 0; a < d; ++a) grad[a] = dpsi.values[k * d + a];
        metric.g_inv.matrix(k).matvec(grad, v);
        H.matrix(k).matvec(v, hv);
        double norm2 = 0;
        for (int a = 0; a < d; ++a) {
            out.ambient.values[k * 2 * d + a] = -hv[a];      // x-part of J(v, Hv)
            out.ambient.values[k * 2 * d + d + a] = v[a];    // y-part
            norm2 += grad[a] * v[a];
        }
        out.norm.values[k] = std::sqrt(std::max(norm2, 0.0));
    }
    return out;
}

namespace detail {

double laplace_beltrami_at(const ScalarField& f, const InducedMetric& metric,
                           const MatrixField& w, const VectorField& grad, std::int64_t k,
                           const std::array<std::int64_t, 3>& stride) {
    const int d = f.grid.dim;
    const double h = f.grid.spacing;
    double div = 0;
    for (int a = 0; a < d; ++a) {
        double flux[2];  // [0]: at k - e_a/2, [1]: at k + e_a/2
        for (int side = 0; side < 2; ++side) {
            const std::int64_t nb = side == 0 ? k - stride[a] : k + stride[a];
            double phi = 0;
            for (int b = 0; b < d; ++b) {
                const double wab = 0.5 * (w.entry(k, a, b) + w.entry(nb, a, b));
                double dfb;
                if (b == a) {
                    dfb = side == 0 ? (f.values[k] - f.values[nb]) / h
                                    : (f.values[nb] - f.values[k]) / h;
                } else {
                    dfb = 0.5 * (grad.values[k * d + b] + grad.values[nb * d + b]);
                }
                phi += wab * dfb;
            }
            flux[side] = phi;
        }
        div += (flux[1] - flux[0]) / h;
    }
    return div / metric.sqrt_det.values[k];
}

}  // namespace detail

MatrixField metric_flux_weights(const InducedMetric& metric) {
    const Grid& grid = metric.g.grid;
    const int ts = SymMat::tri_size(grid.dim);
    MatrixField w(grid);
    const std::int64_t n = grid.node_count();
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < n; ++k)
        for (int t = 0; t < ts; ++t)
            w.values[k * ts + t] = metric.sqrt_det.values[k] * metric.g_inv.values[k * ts + t];
    return w;
}

ScalarField laplace_beltrami(const ScalarField& f, const InducedMetric& metric) {
    const Grid& grid = f.grid;
    if (!grid.same_layout(metric.g.grid))
        throw std::invalid_argument("laplace_beltrami: grid mismatch");
    const int d = grid.dim;

    const MatrixField w = metric_flux_weights(metric);
    const VectorField grad = gradient(f);

    std::array<std::int64_t, 3> stride{0, 0, 0};
    for (int a = 0; a < d; ++a) {
        std::int64_t s = 1;
        for (int b = d - 1; b > a; --b) s *= grid.shape[b];
        stride[a] = s;
    }

    ScalarField out(grid);
    const std::int64_t n = grid.node_count();
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < n; ++k) {
        if (!grid.is_interior(grid.unindex(k))) continue;
        out.values[k] = detail::laplace_beltrami_at(f, metric, w, grad, k, stride);
    }
    return out;
}

MaxPrincipleQuantity bm_quantity(const VectorField& lambda_bar, int m) {
    const Grid& grid = lambda_bar.grid;
    const int d = lambda_bar.ncomp;
    if (m < 1 || m > d) throw std::invalid_argument("bm_quantity: m must be in [1, dim]");
    MaxPrincipleQuantity out{m, ScalarField(grid), ScalarField(grid)};
    const std::int64_t n = grid.node_count();
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < n; ++k) {
        // eigenvalues are ascending; the m largest are the trailing m
        double s = 0;
        for (int i = d - m; i < d; ++i) {
            const double l = lambda_bar.values[k * d + i];
            s += 0.5 * std::log(1.0 + l * l);
        }
        out.bm.values[k] = s / m;
        out.gap.values[k] = kBmMax - out.bm.values[k];
    }
    return out;
}

double bm_convexity_gap(double t) {
    if (t < 0.0 || t > 1.0)
        throw std::domain_error("bm_convexity_gap: argument outside [0, 1]");
    const double b1 = kBmMax;
    const double bt = 0.5 * std::log(1.0 + t * t);
    const double chord = b1 - bt;
    return chord * chord / (b1 * b1) - (1.0 - t) * (1.0 - t);
}

double bm_second_derivative(double t) {
    const double q = 1.0 + t * t;
    return (1.0 - t * t) / (q * q);
}

PhaseTermsContext make_phase_terms_context(const PhaseField& psi, const RotatedPotential& r) {
    if (std::abs(r.angle.alpha - std::numbers::pi / 4.0) > 1e-12)
        throw std::invalid_argument(
            "rotated_phase_hessian_terms: decomposition is specific to the quarter-pi rotation");
    PhaseTermsContext ctx;
    ctx.psibar = rotated_phase(psi, r);
    // psibar samples that will be differenced need O(h^3) interpolation;
    // the multilinear field's cell kinks do not survive a second difference
    ScalarField smooth_psibar(r.ubar.grid);
    const Grid& dg = r.ubar.grid;
    const int dd = dg.dim;
    const double shift = dd * r.angle.alpha;
    const double sl = psi.field.grid.spacing;
    for (std::int64_t k = 0; k < dg.node_count(); ++k) {
        double x[3] = {0, 0, 0};
        for (int a = 0; a < dd; ++a) x[a] = r.reverse_map.values[k * dd + a];
        for (int a = 0; a < dd; ++a)
            x[a] = std::clamp(x[a], psi.field.grid.origin[a] - sl,
                              psi.field.grid.axis_max(a) + sl);
        smooth_psibar.values[k] = interp_scalar_quadratic(psi.field, x, sl) - shift;
    }
    ctx.psibar_hess = hessian(smooth_psibar);
    const Grid& dual = r.ubar.grid;
    const int d = dual.dim;
    ctx.lambda_grad.reserve(d);
    for (int i = 0; i < d; ++i) {
        ScalarField li(dual);
        for (std::int64_t k = 0; k < dual.node_count(); ++k)
            li.values[k] = r.lambda_bar.values[k * d + i];
        ctx.lambda_grad.push_back(gradient(li));
    }
    ctx.dpsi = gradient(psi.field);
    ctx.d2psi = hessian(psi.field);
    return ctx;
}

std::vector<PhaseHessianTerm> rotated_phase_hessian_terms(const PhaseTermsContext& ctx,
                                                          const RotatedPotential& r,
                                                          const NodeIndex& node) {
    const Grid& dual = r.ubar.grid;
    const int d = dual.dim;
    std::vector<PhaseHessianTerm> out(d);

    bool deep = true;
    for (int a = 0; a < d; ++a)
        if (node[a] < 2 || node[a] > dual.shape[a] - 3) deep = false;
    const std::int64_t k = dual.index(node);

    const SymEigen e = sym_eigen(r.hess.matrix(k));
    const double slack = r.source_grid.spacing;
    double x[3] = {0, 0, 0};
    for (int a = 0; a < d; ++a) x[a] = r.reverse_map.values[k * d + a];

    const Grid& src = r.source_grid;
    bool interpolable = deep;
    for (int a = 0; a < d; ++a)
        if (x[a] < src.origin[a] - slack || x[a] > src.axis_max(a) + slack)
            interpolable = false;

    // the differencing footprint (2 dual cells through the reverse map) must
    // clear the gradient-image seam, where one-sided data pollutes every
    // second difference
    double jnorm = 0.0;
    for (int i = 0; i < d; ++i)
        jnorm = std::max(jnorm, std::abs(r.angle.c - r.angle.s * e.lambda[i]));
    const double margin = 2.0 * src.spacing + 3.0 * dual.spacing * jnorm;
    bool clear_of_seam = interpolable;
    for (int a = 0; a < d; ++a)
        if (x[a] < src.origin[a] + margin || x[a] > src.axis_max(a) - margin)
            clear_of_seam = false;

    if (!interpolable) return out;

    double dpsi_x[3] = {0, 0, 0};
    interp_vector(ctx.dpsi, x, slack, dpsi_x);
    const SymMat d2psi_x = interp_matrix(ctx.d2psi, x, slack);
    const SymMat d2psibar = ctx.psibar_hess.matrix(k);

    for (int i = 0; i < d; ++i) {
        PhaseHessianTerm& term = out[i];
        term.lambda = e.lambda[i];
        bool simple = true;
        for (int j = 0; j < d; ++j)
            if (j != i && std::abs(e.lambda[j] - e.lambda[i]) < 1e-6) simple = false;
        if (!simple) continue;
        term.frame_valid = true;
        term.valid = clear_of_seam;

        double q[3];
        for (int a = 0; a < d; ++a) q[a] = e.vector(a, i);

        term.direct = d2psibar.quad(q);

        double transport = 0;
        for (int a = 0; a < d; ++a)
            transport += dpsi_x[a] * ctx.lambda_grad[i].values[k * d + a];
        term.transport = -transport / std::sqrt(2.0);

        const double oml = 1.0 - e.lambda[i];
        term.zeroth = 0.5 * d2psi_x.quad(q) * oml * oml;
    }
    return out;
}

std::vector<PhaseHessianTerm> rotated_phase_hessian_terms(const PhaseField& psi,
                                                          const RotatedPotential& r,
                                                          const NodeIndex& node) {
    return rotated_phase_hessian_terms(make_phase_terms_context(psi, r), r, node);
}

namespace detail {

std::vector<std::array<int, 3>> ball_offsets(int dim, double r, double h) {
    const int R = static_cast<int>(std::floor(r / h + 1e-12));
    std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
    for (int a = 0; a < dim; ++a) {
        lo[a] = -R;
        hi[a] = R;
    }
    std::vector<std::array<int, 3>> offsets;
    for (int i0 = lo[0]; i0 <= hi[0]; ++i0)
        for (int i1 = lo[1]; i1 <= hi[1]; ++i1)
            for (int i2 = lo[2]; i2 <= hi[2]; ++i2) {
                const double dist2 = double(i0) * i0 + double(i1) * i1 + double(i2) * i2;
                if (dist2 * h * h <= r * r + 1e-12 * h * h) offsets.push_back({i0, i1, i2});
            }
    return offsets;
}

double vmo_ball_deviation(const MatrixField& M, const NodeIndex& center,
                          const std::vector<std::array<int, 3>>& offsets) {
    const Grid& grid = M.grid;
    const int d = grid.dim;
    const int ts = M.tri_size();
    // mean relative to the first member keeps constant fields exact
    std::array<double, 6> ref{}, sum{};
    bool first = true;
    for (const auto& off : offsets) {
        NodeIndex iv = center;
        for (int a = 0; a < d; ++a) iv[a] += off[a];
        const std::int64_t kk = grid.index(iv);
        if (first) {
            for (int t = 0; t < ts; ++t) ref[t] = M.values[kk * ts + t];
            first = false;
        }
        for (int t = 0; t < ts; ++t) sum[t] += M.values[kk * ts + t] - ref[t];
    }
    std::array<double, 6> mean{};
    for (int t = 0; t < ts; ++t) mean[t] = ref[t] + sum[t] / offsets.size();

    double dev = 0.0;
    for (const auto& off : offsets) {
        NodeIndex iv = center;
        for (int a = 0; a < d; ++a) iv[a] += off[a];
        const std::int64_t kk = grid.index(iv);
        SymMat diff = SymMat::zero(d);
        for (int t = 0; t < ts; ++t) diff.tri[t] = M.values[kk * ts + t] - mean[t];
        dev += diff.frobenius();
    }
    return dev / offsets.size();
}

}  // namespace detail

VmoTable vmo_modulus(const MatrixField& M, std::vector<double> radii) {
    const Grid& grid = M.grid;
    const double h = grid.spacing;
    const int d = grid.dim;
    for (double r : radii)
        if (r < 2.0 * h - 1e-12 * h)
            throw std::invalid_argument("vmo_modulus: radius " + std::to_string(r) +
                                        " below 2h = " + std::to_string(2.0 * h));
    std::sort(radii.begin(), radii.end());

    VmoTable table;
    double running = 0.0;
    for (double r : radii) {
        const auto offsets = detail::ball_offsets(d, r, h);
        const int R = static_cast<int>(std::floor(r / h + 1e-12));

        // centers with the full ball inside the domain
        std::vector<std::int64_t> centers;
        for (std::int64_t k = 0; k < grid.node_count(); ++k) {
            const NodeIndex iv = grid.unindex(k);
            bool ok = true;
            for (int a = 0; a < d; ++a)
                if (iv[a] < R || iv[a] > grid.shape[a] - 1 - R) ok = false;
            if (ok) centers.push_back(k);
        }

        double worst = 0.0;
#pragma omp parallel for schedule(static) reduction(max : worst)
        for (std::int64_t ci = 0; ci < static_cast<std::int64_t>(centers.size()); ++ci)
            worst = std::max(worst,
                             detail::vmo_ball_deviation(M, grid.unindex(centers[ci]), offsets));

        running = std::max(running, worst);
        table.radius.push_back(r);
        table.omega.push_back(running);
    }
    return table;
}

}  // namespace lagrot
