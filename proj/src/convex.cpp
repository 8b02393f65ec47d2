#include "lagrot/convex.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lagrot/eigen_sym.hpp"
#include "lagrot/stencil.hpp"

namespace lagrot {

ConvexityReport convexity_check(const ScalarField& f) {
    const Grid& g = f.grid;
    ConvexityReport rep;
    rep.tolerance = 10.0 * g.spacing * g.spacing;
    rep.min_eigenvalue = std::numeric_limits<double>::infinity();

    const MatrixField H = hessian(f);
    const std::int64_t n = g.node_count();
    double min_eig = std::numeric_limits<double>::infinity();
    std::int64_t first_bad = -1, violations = 0;
    for (std::int64_t k = 0; k < n; ++k) {
        if (!g.is_interior(g.unindex(k))) continue;
        const SymEigen e = sym_eigen(H.matrix(k));
        min_eig = std::min(min_eig, e.lambda[0]);
        if (e.lambda[0] < -rep.tolerance) {
            ++violations;
            if (first_bad < 0) first_bad = k;
        }
    }
    rep.min_eigenvalue = min_eig;
    rep.violating_node = first_bad;
    rep.violations = violations;
    rep.certified = (violations == 0);
    return rep;
}

ConvexPotential make_convex_potential(ScalarField f) {
    ConvexPotential p;
    p.report = convexity_check(f);
    p.certified = p.report.certified;
    p.field = std::move(f);
    return p;
}

ConvexPotential require_convex_potential(ScalarField f) {
    ConvexPotential p = make_convex_potential(std::move(f));
    if (!p.certified)
        throw std::invalid_argument(
            "potential is not convex: min Hessian eigenvalue " +
            std::to_string(p.report.min_eigenvalue) + " at node " +
            std::to_string(p.report.violating_node));
    return p;
}

namespace detail {

void conjugate_line(const double* xs, int nx, const double* fv, double h, const double* ss,
                    int ns, double* out, bool refined, int* hull) {
    // lower convex hull of (xs[i], fv[i]) by monotone chain
    int m = 0;
    for (int i = 0; i < nx; ++i) {
        while (m >= 2) {
            const int p = hull[m - 1], q = hull[m - 2];
            // pop p if it lies on or above the segment q--i
            const double lhs = (fv[p] - fv[q]) * (xs[i] - xs[q]);
            const double rhs = (fv[i] - fv[q]) * (xs[p] - xs[q]);
            if (lhs >= rhs) --m;
            else break;
        }
        hull[m++] = i;
    }

    // centered slope with one-sided fallback; drives the per-cell models
    auto node_slope = [&](int j) {
        if (j == 0) return (fv[1] - fv[0]) / h;
        if (j == nx - 1) return (fv[nx - 1] - fv[nx - 2]) / h;
        return (fv[j + 1] - fv[j - 1]) / (2.0 * h);
    };

    int j = 0;  // hull edge pointer
    for (int q = 0; q < ns; ++q) {
        const double s = ss[q];
        while (j < m - 1) {
            const int a = hull[j], b = hull[j + 1];
            const double edge = (fv[b] - fv[a]) / (xs[b] - xs[a]);
            if (edge < s) ++j;
            else break;
        }
        const int i = hull[j];
        double best = xs[i] * s - fv[i];
        if (!refined) {
            out[q] = best;
            continue;
        }
        // refine the sup inside the two cells adjacent to the argmax node,
        // each with a quadratic anchored to its own far-side slope so kinks
        // at the node never leak into the model
        if (i + 1 < nx) {
            const double edge = (fv[i + 1] - fv[i]) / h;
            const double d1 = node_slope(i + 1);
            const double curv = 2.0 * (d1 - edge) / h;
            if (curv > 0.0) {
                double xstar = xs[i + 1] + (s - d1) / curv;
                xstar = std::clamp(xstar, xs[i], xs[i + 1]);
                const double dx = xstar - xs[i + 1];
                const double qv = fv[i + 1] + d1 * dx + 0.5 * curv * dx * dx;
                best = std::max(best, xstar * s - qv);
            }
        }
        if (i > 0) {
            const double edge = (fv[i] - fv[i - 1]) / h;
            const double d0 = node_slope(i - 1);
            const double curv = 2.0 * (edge - d0) / h;
            if (curv > 0.0) {
                double xstar = xs[i - 1] + (s - d0) / curv;
                xstar = std::clamp(xstar, xs[i - 1], xs[i]);
                const double dx = xstar - xs[i - 1];
                const double qv = fv[i - 1] + d0 * dx + 0.5 * curv * dx * dx;
                best = std::max(best, xstar * s - qv);
            }
        }
        out[q] = best;
    }
}

std::vector<double> conjugate_factored(const Grid& src, const std::vector<double>& f,
                                       const Grid& dual, bool refined, bool parallel) {
    const int d = src.dim;
    std::array<int, 3> sizes{1, 1, 1};
    for (int a = 0; a < d; ++a) sizes[a] = src.shape[a];

    std::vector<double> cur = f;

    std::vector<double> xcoord, scoord;
    for (int axis = 0; axis < d; ++axis) {
        const int nx = sizes[axis];
        const int ns = dual.shape[axis];
        xcoord.resize(nx);
        for (int i = 0; i < nx; ++i) xcoord[i] = src.origin[axis] + src.spacing * i;
        scoord.resize(ns);
        for (int i = 0; i < ns; ++i) scoord[i] = dual.origin[axis] + dual.spacing * i;

        // strides in the current mixed-shape row-major array
        std::int64_t stride = 1;
        for (int a = d - 1; a > axis; --a) stride *= sizes[a];
        std::int64_t outer = 1;
        for (int a = 0; a < axis; ++a) outer *= sizes[a];
        const std::int64_t inner = stride;

        std::array<int, 3> nsizes = sizes;
        nsizes[axis] = ns;
        std::int64_t nstride = 1;
        for (int a = d - 1; a > axis; --a) nstride *= nsizes[a];

        std::vector<double> next(static_cast<size_t>(outer) * ns * inner);
        const bool negate = (axis > 0);
        const std::int64_t lines = outer * inner;

#pragma omp parallel if (parallel)
        {
            std::vector<double> in(nx), res(ns);
            std::vector<int> hullbuf(nx);
#pragma omp for schedule(static)
            for (std::int64_t line = 0; line < lines; ++line) {
                const std::int64_t o = line / inner;
                const std::int64_t r = line % inner;
                const double* base = cur.data() + (o * nx) * stride + r;
                for (int i = 0; i < nx; ++i)
                    in[i] = negate ? -base[i * stride] : base[i * stride];
                conjugate_line(xcoord.data(), nx, in.data(), src.spacing, scoord.data(), ns,
                               res.data(), refined, hullbuf.data());
                double* obase = next.data() + (o * ns) * nstride + r;
                for (int i = 0; i < ns; ++i) obase[i * nstride] = res[i];
            }
        }
        cur.swap(next);
        sizes = nsizes;
    }
    return cur;
}

}  // namespace detail

Grid auto_dual_grid(const ScalarField& f) {
    const Grid& g = f.grid;
    const int d = g.dim;
    std::array<double, 3> lo{}, hi{};
    for (int a = 0; a < d; ++a) {
        lo[a] = std::numeric_limits<double>::infinity();
        hi[a] = -std::numeric_limits<double>::infinity();
    }
    const std::int64_t n = g.node_count();
    for (std::int64_t k = 0; k < n; ++k) {
        const NodeIndex iv = g.unindex(k);
        for (int a = 0; a < d; ++a) {
            if (iv[a] + 1 >= g.shape[a]) continue;
            std::int64_t stride = 1;
            for (int b = d - 1; b > a; --b) stride *= g.shape[b];
            const double s = (f.values[k + stride] - f.values[k]) / g.spacing;
            lo[a] = std::min(lo[a], s);
            hi[a] = std::max(hi[a], s);
        }
    }
    // isotropic spacing: widest axis decides; pad the others symmetrically
    double spacing = 0.0;
    for (int a = 0; a < d; ++a)
        spacing = std::max(spacing, (hi[a] - lo[a]) / (g.shape[a] - 1));
    if (!(spacing > 0.0)) spacing = g.spacing;  // constant-slope data
    std::array<double, 3> origin{0, 0, 0};
    std::array<int, 3> shape{1, 1, 1};
    for (int a = 0; a < d; ++a) {
        const double center = 0.5 * (lo[a] + hi[a]);
        shape[a] = g.shape[a];
        origin[a] = center - 0.5 * spacing * (shape[a] - 1);
    }
    return Grid(d, origin, spacing, shape);
}

ScalarField discrete_conjugate(const ScalarField& f, const Grid& dual, ConjugateMode mode) {
    if (dual.dim != f.grid.dim) throw std::invalid_argument("discrete_conjugate: dim mismatch");
    std::vector<double> v = detail::conjugate_factored(f.grid, f.values, dual,
                                                       mode == ConjugateMode::hull_refined, true);
    return ScalarField(dual, std::move(v));
}

DualSamples legendre(const ConvexPotential& f, const std::optional<Grid>& dual) {
    if (!f.certified)
        throw std::invalid_argument("legendre: input not certified convex (violating node " +
                                    std::to_string(f.report.violating_node) + ")");
    const Grid dg = dual ? *dual : auto_dual_grid(f.field);
    DualSamples out;
    out.values = discrete_conjugate(f.field, dg, ConjugateMode::hull);
    out.certified = convexity_check(out.values).certified;
    return out;
}

ScalarField convex_envelope_1d(const ScalarField& f) {
    if (f.grid.dim != 1) throw std::invalid_argument("convex_envelope_1d: 1D only");
    const int n = f.grid.shape[0];
    std::vector<int> hull(n);
    int m = 0;
    for (int i = 0; i < n; ++i) {
        while (m >= 2) {
            const int p = hull[m - 1], q = hull[m - 2];
            if ((f.values[p] - f.values[q]) * (i - q) >= (f.values[i] - f.values[q]) * (p - q))
                --m;
            else break;
        }
        hull[m++] = i;
    }
    ScalarField env(f.grid);
    int j = 0;
    for (int i = 0; i < n; ++i) {
        while (j < m - 2 && hull[j + 1] <= i) ++j;
        const int a = hull[j], b = hull[j + 1];
        const double t = static_cast<double>(i - a) / (b - a);
        env.values[i] = (1.0 - t) * f.values[a] + t * f.values[b];
    }
    return env;
}

double biconjugate_check(const ScalarField& f) {
    const Grid dual = auto_dual_grid(f);
    const ScalarField fstar = discrete_conjugate(f, dual, ConjugateMode::hull);
    const ScalarField fss = discrete_conjugate(fstar, f.grid, ConjugateMode::hull);

    ScalarField env;
    if (convexity_check(f).certified) {
        env = f;
    } else if (f.grid.dim == 1) {
        env = convex_envelope_1d(f);
    } else {
        throw std::invalid_argument(
            "biconjugate_check: envelope of a non-convex field is only available in 1D");
    }

    double gap = 0.0;
    const std::int64_t n = f.grid.node_count();
    for (std::int64_t k = 0; k < n; ++k) {
        if (!f.grid.is_interior(f.grid.unindex(k))) continue;
        gap = std::max(gap, std::abs(fss.values[k] - env.values[k]));
    }
    return gap;
}

SubdiffBox subdifferential(const ConvexPotential& f, const NodeIndex& node) {
    if (!f.certified) throw std::invalid_argument("subdifferential: input not certified convex");
    const Grid& g = f.field.grid;
    const double h = g.spacing;
    SubdiffBox box;
    box.dim = g.dim;
    const std::int64_t k = g.index(node);
    for (int a = 0; a < g.dim; ++a) {
        std::int64_t stride = 1;
        for (int b = g.dim - 1; b > a; --b) stride *= g.shape[b];
        const bool has_lo = node[a] > 0;
        const bool has_hi = node[a] < g.shape[a] - 1;
        double back = 0, fwd = 0;
        if (has_lo) back = (f.field.values[k] - f.field.values[k - stride]) / h;
        if (has_hi) fwd = (f.field.values[k + stride] - f.field.values[k]) / h;
        if (!has_lo) back = fwd;
        if (!has_hi) fwd = back;
        box.lo[a] = back;
        box.hi[a] = fwd;
        box.one_sided[a] = !(has_lo && has_hi);
    }
    return box;
}

double strict_convexity_gap(const ConvexPotential& u, const ConvexPotential& v,
                            const NodeIndex& a, const NodeIndex& b, const double* xbar) {
    if (!u.field.grid.same_layout(v.field.grid))
        throw std::invalid_argument("strict_convexity_gap: grids differ");
    const double tol = std::sqrt(u.field.grid.spacing);
    const SubdiffBox da = subdifferential(u, a);
    const SubdiffBox db = subdifferential(v, b);
    if (!da.contains(xbar, tol))
        throw std::invalid_argument("strict_convexity_gap: slope not in subdifferential of u at a");
    if (!db.contains(xbar, tol))
        throw std::invalid_argument("strict_convexity_gap: slope not in subdifferential of v at b");

    const Grid& g = u.field.grid;
    const auto xa = g.coord(a), xb = g.coord(b);
    double dist2 = 0;
    for (int c = 0; c < g.dim; ++c) dist2 += (xb[c] - xa[c]) * (xb[c] - xa[c]);
    const double du_a = std::abs(u.field(a) - v.field(a));
    const double du_b = std::abs(u.field(b) - v.field(b));
    return 2.0 * std::sqrt(2.0) * (du_a + du_b) - dist2;
}

}  // namespace lagrot
