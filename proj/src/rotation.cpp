#include "lagrot/rotation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lagrot/eigen_sym.hpp"
#include "lagrot/stencil.hpp"

namespace lagrot {

RotationAngle RotationAngle::from_radians(double a) {
    if (!(a > 0.0) || !(a < std::numbers::pi / 2.0))
        throw std::invalid_argument("RotationAngle: alpha must lie in (0, pi/2)");
    // at the quarter-pi default, c == s bitwise so that tan(alpha) is exactly 1
    if (a == std::numbers::pi / 4.0) {
        const double r = std::sqrt(0.5);
        return RotationAngle{a, r, r};
    }
    return RotationAngle{a, std::cos(a), std::sin(a)};
}

RotationAngle RotationAngle::from_degrees(double deg) {
    return from_radians(deg * std::numbers::pi / 180.0);
}

RotationAngle RotationAngle::quarter_pi() { return from_radians(std::numbers::pi / 4.0); }

namespace {

ScalarField tilde_potential(const ScalarField& u, RotationAngle a) {
    ScalarField t(u.grid);
    const std::int64_t n = u.grid.node_count();
    for (std::int64_t k = 0; k < n; ++k) {
        const auto x = u.grid.coord(u.grid.unindex(k));
        double r2 = 0;
        for (int d = 0; d < u.grid.dim; ++d) r2 += x[d] * x[d];
        t.values[k] = a.s * u.values[k] + 0.5 * a.c * r2;
    }
    return t;
}

HessianBoundStats bound_stats(const VectorField& lambda_bar, RotationAngle a) {
    const Grid& g = lambda_bar.grid;
    HessianBoundStats st;
    st.tolerance = 10.0 * g.spacing;
    st.lower = -(a.s / a.c) - st.tolerance;
    st.upper = (a.c / a.s) + st.tolerance;
    st.lambda_min = std::numeric_limits<double>::infinity();
    st.lambda_max = -std::numeric_limits<double>::infinity();
    const int d = g.dim;
    for (std::int64_t k = 0; k < g.node_count(); ++k) {
        if (!g.is_interior(g.unindex(k))) continue;
        for (int i = 0; i < d; ++i) {
            const double l = lambda_bar.values[k * d + i];
            st.lambda_min = std::min(st.lambda_min, l);
            st.lambda_max = std::max(st.lambda_max, l);
            if (l < st.lower || l > st.upper) {
                ++st.violations;
                if (st.first_violation < 0) st.first_violation = k;
            }
        }
    }
    return st;
}

}  // namespace

RotatedPotential rotate(const ConvexPotential& u, RotationAngle angle) {
    if (!u.certified)
        throw std::invalid_argument("rotate: input not certified convex (violating node " +
                                    std::to_string(u.report.violating_node) + ")");
    const Grid& src = u.field.grid;
    const ScalarField tilde = tilde_potential(u.field, angle);
    const Grid dual = auto_dual_grid(tilde);
    const ScalarField conj = discrete_conjugate(tilde, dual, ConjugateMode::hull_refined);

    RotatedPotential r;
    r.angle = angle;
    r.source_grid = src;
    r.source = u.field;
    r.ubar = ScalarField(dual);
    const std::int64_t n = dual.node_count();
    for (std::int64_t k = 0; k < n; ++k) {
        const auto xb = dual.coord(dual.unindex(k));
        double r2 = 0;
        for (int d = 0; d < dual.dim; ++d) r2 += xb[d] * xb[d];
        r.ubar.values[k] = (0.5 * angle.c * r2 - conj.values[k]) / angle.s;
    }

    r.dubar = gradient(r.ubar);
    const int d = dual.dim;
    r.reverse_map = VectorField(dual, d);
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < n; ++k) {
        const auto xb = dual.coord(dual.unindex(k));
        for (int a = 0; a < d; ++a)
            r.reverse_map.values[k * d + a] = angle.c * xb[a] - angle.s * r.dubar.values[k * d + a];
    }

    r.hess = hessian(r.ubar);
    r.lambda_bar = eigenvalues_field(r.hess);
    r.bounds = bound_stats(r.lambda_bar, angle);
    if (r.bounds.violations > 0)
        throw BoundViolationError(
            "rotate: Hessian bound violated at dual node " +
                std::to_string(r.bounds.first_violation) + " (lambda range [" +
                std::to_string(r.bounds.lambda_min) + ", " + std::to_string(r.bounds.lambda_max) +
                "], tolerance " + std::to_string(r.bounds.tolerance) + ")",
            r.bounds.first_violation);
    return r;
}

HessianBoundStats check_hessian_bounds(const ScalarField& ubar, RotationAngle angle) {
    return bound_stats(eigenvalues_field(hessian(ubar)), angle);
}

AngleShiftResult angle_shift_check(const ConvexPotential& u, const RotatedPotential& r) {
    const Grid& src = u.field.grid;
    const Grid& dual = r.ubar.grid;
    const int d = src.dim;
    const double h = src.spacing;
    const double hb = dual.spacing;
    const RotationAngle a = r.angle;

    const VectorField du = gradient(u.field);
    const MatrixField hu = hessian(u.field);

    AngleShiftResult res;
    std::int64_t interior = 0;
    const std::int64_t n = src.node_count();
    for (std::int64_t k = 0; k < n; ++k) {
        const NodeIndex iv = src.unindex(k);
        bool deep = true;  // >= 2h inside the source box
        for (int ax = 0; ax < d; ++ax)
            if (iv[ax] < 2 || iv[ax] > src.shape[ax] - 3) deep = false;
        if (!deep) continue;
        ++interior;

        const auto x = src.coord(iv);
        double xb[3];
        bool inside = true;
        for (int ax = 0; ax < d; ++ax) {
            xb[ax] = a.c * x[ax] + a.s * du.values[k * d + ax];
            if (xb[ax] < dual.origin[ax] + 2.0 * hb || xb[ax] > dual.axis_max(ax) - 2.0 * hb)
                inside = false;
        }
        if (!inside) continue;

        const SymEigen es = sym_eigen(hu.matrix(k));
        const SymEigen eb = sym_eigen(interp_matrix(r.hess, xb, 0.0));
        double dev = 0;
        for (int i = 0; i < d; ++i)
            dev = std::max(dev, std::abs(std::atan(eb.lambda[i]) -
                                         (std::atan(es.lambda[i]) - a.alpha)));
        res.max_deviation = std::max(res.max_deviation, dev);
        ++res.matched;
    }
    res.coverage = interior > 0 ? static_cast<double>(res.matched) / interior : 0.0;
    return res;
}

double inverse_hessian_law(double lb, RotationAngle angle) {
    const double t = angle.s / angle.c;
    const double denom = 1.0 - lb * t;
    if (denom <= kEpsClamp)
        throw std::overflow_error("inverse_hessian_law: lambda_bar at the coordinate blowup");
    return (lb + t) / denom;
}

double inverse_hessian_law(double lb) { return inverse_hessian_law(lb, RotationAngle::quarter_pi()); }

double forward_hessian_law(double l, RotationAngle angle) {
    const double t = angle.s / angle.c;
    return (l - t) / (1.0 + l * t);
}

double forward_hessian_law(double l) { return forward_hessian_law(l, RotationAngle::quarter_pi()); }

SymMat inverse_hessian_law(const SymMat& Hbar, RotationAngle angle) {
    const SymEigen e = sym_eigen(Hbar);
    SymMat out = SymMat::zero(Hbar.dim);
    for (int a = 0; a < Hbar.dim; ++a)
        for (int b = a; b < Hbar.dim; ++b) {
            double s = 0;
            for (int i = 0; i < Hbar.dim; ++i)
                s += inverse_hessian_law(e.lambda[i], angle) * e.vector(a, i) * e.vector(b, i);
            out.at(a, b) = s;
        }
    return out;
}

RotatedPhase rotated_phase(const PhaseField& psi, const RotatedPotential& r) {
    const Grid& pg = psi.field.grid;
    const Grid& dual = r.ubar.grid;
    if (pg.dim != dual.dim) throw std::invalid_argument("rotated_phase: dim mismatch");
    const int d = pg.dim;
    const double slack = pg.spacing;  // reverse map may overshoot by at most h

    // validate all reverse points up front (keeps the parallel loop throw-free)
    const std::int64_t n = dual.node_count();
    for (std::int64_t k = 0; k < n; ++k) {
        for (int a = 0; a < d; ++a) {
            const double x = r.reverse_map.values[k * d + a];
            if (x < pg.origin[a] - slack || x > pg.axis_max(a) + slack)
                throw std::domain_error(
                    "rotated_phase: reverse-map point outside the phase domain at dual node " +
                    std::to_string(k));
        }
    }

    RotatedPhase out;
    out.angle = r.angle;
    out.psibar = ScalarField(dual);
    const double shift = d * r.angle.alpha;
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < n; ++k) {
        double x[3] = {0, 0, 0};
        for (int a = 0; a < d; ++a) x[a] = r.reverse_map.values[k * d + a];
        out.psibar.values[k] = interp_scalar(psi.field, x, slack) - shift;
    }
    return out;
}

OrderPreservationResult order_preservation_check(const ConvexPotential& u,
                                                 const ConvexPotential& v, RotationAngle angle) {
    if (!u.field.grid.same_layout(v.field.grid))
        throw std::invalid_argument("order_preservation_check: grids differ");
    const std::int64_t n = u.field.grid.node_count();
    for (std::int64_t k = 0; k < n; ++k)
        if (u.field.values[k] > v.field.values[k] + 1e-12)
            throw std::invalid_argument("order_preservation_check: u <= v violated at node " +
                                        std::to_string(k));

    const RotatedPotential ru = rotate(u, angle);
    const RotatedPotential rv = rotate(v, angle);

    OrderPreservationResult res;
    res.tolerance = 10.0 * u.field.grid.spacing;
    const Grid& gu = ru.ubar.grid;
    const Grid& gv = rv.ubar.grid;
    for (std::int64_t k = 0; k < gu.node_count(); ++k) {
        const auto xb = gu.coord(gu.unindex(k));
        bool common = true;
        for (int a = 0; a < gu.dim; ++a)
            if (xb[a] < gv.origin[a] || xb[a] > gv.axis_max(a)) common = false;
        if (!common) continue;
        const double vb = interp_scalar(rv.ubar, xb.data(), 0.0);
        res.max_violation = std::max(res.max_violation, ru.ubar.values[k] - vb);
        ++res.compared;
    }
    res.pass = res.compared > 0 && res.max_violation <= res.tolerance;
    return res;
}

ScalarField rotate_up(const ScalarField& ubar, RotationAngle angle, double delta) {
    // m(xbar) = (c/2)|xbar|^2 - s*ubar is the conjugate of the tilde
    // potential; recovering u = (m* - (c/2)|x|^2)/s needs m convex, i.e.
    // eigenvalues of D2ubar in (-tan a + delta, cot a].
    const Grid& g = ubar.grid;
    const VectorField lb = eigenvalues_field(hessian(ubar));
    const double lo = -(angle.s / angle.c) + delta;
    const double hi = angle.c / angle.s;
    for (std::int64_t k = 0; k < g.node_count(); ++k) {
        if (!g.is_interior(g.unindex(k))) continue;
        for (int i = 0; i < g.dim; ++i) {
            const double l = lb.values[k * g.dim + i];
            if (l < lo || l > hi + 10.0 * g.spacing)
                throw std::domain_error("rotate_up: eigenvalue " + std::to_string(l) +
                                        " outside the guarded upward-rotation domain");
        }
    }

    ScalarField m(g);
    for (std::int64_t k = 0; k < g.node_count(); ++k) {
        const auto xb = g.coord(g.unindex(k));
        double r2 = 0;
        for (int a = 0; a < g.dim; ++a) r2 += xb[a] * xb[a];
        m.values[k] = 0.5 * angle.c * r2 - angle.s * ubar.values[k];
    }
    const Grid back = auto_dual_grid(m);
    const ScalarField mstar = discrete_conjugate(m, back, ConjugateMode::hull_refined);
    ScalarField u(back);
    for (std::int64_t k = 0; k < back.node_count(); ++k) {
        const auto x = back.coord(back.unindex(k));
        double r2 = 0;
        for (int a = 0; a < back.dim; ++a) r2 += x[a] * x[a];
        u.values[k] = (mstar.values[k] - 0.5 * angle.c * r2) / angle.s;
    }
    return u;
}

}  // namespace lagrot
