#include "lagrot/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "lagrot/convex.hpp"
#include "lagrot/eigen_sym.hpp"
#include "lagrot/stencil.hpp"

namespace lagrot {

std::string variant_name(OperatorVariant v) {
    switch (v) {
        case OperatorVariant::arctan: return "arctan";
        case OperatorVariant::modified_concave: return "mconcave";
        case OperatorVariant::ma_dual: return "madual";
    }
    return "?";
}

OperatorVariant variant_from_name(const std::string& name) {
    if (name == "arctan") return OperatorVariant::arctan;
    if (name == "mconcave") return OperatorVariant::modified_concave;
    if (name == "madual") return OperatorVariant::ma_dual;
    throw std::invalid_argument("unknown operator variant: " + name);
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

struct ProblemLayout {
    const Grid* grid;
    std::vector<std::int64_t> eq_of_node;  // -1 for boundary
    std::vector<std::int64_t> node_of_eq;
    std::array<std::int64_t, 3> stride{1, 1, 1};

    explicit ProblemLayout(const Grid& g) : grid(&g) {
        const std::int64_t n = g.node_count();
        eq_of_node.assign(n, -1);
        for (int a = 0; a < g.dim; ++a) {
            std::int64_t s = 1;
            for (int b = g.dim - 1; b > a; --b) s *= g.shape[b];
            stride[a] = s;
        }
        for (std::int64_t k = 0; k < n; ++k) {
            if (grid->is_interior(grid->unindex(k))) {
                eq_of_node[k] = static_cast<std::int64_t>(node_of_eq.size());
                node_of_eq.push_back(k);
            }
        }
    }
    std::int64_t unknowns() const { return static_cast<std::int64_t>(node_of_eq.size()); }
};

void validate_problem(const DirichletProblem& p) {
    if (p.grid.dim > 2)
        throw std::invalid_argument("solve: only dim <= 2 is supported");
    if (!p.phase.grid.same_layout(p.grid))
        throw std::invalid_argument("solve: phase grid differs from problem grid");
    std::vector<char> seen(static_cast<size_t>(p.grid.node_count()), 0);
    for (const auto& [k, v] : p.boundary) {
        if (k < 0 || k >= p.grid.node_count())
            throw std::invalid_argument("solve: boundary node index out of range");
        if (p.grid.is_interior(p.grid.unindex(k)))
            throw std::invalid_argument("solve: boundary map contains interior node " +
                                        std::to_string(k));
        if (!std::isfinite(v)) throw std::invalid_argument("solve: non-finite boundary value");
        seen[static_cast<size_t>(k)] = 1;
    }
    for (std::int64_t k = 0; k < p.grid.node_count(); ++k)
        if (!p.grid.is_interior(p.grid.unindex(k)) && !seen[static_cast<size_t>(k)])
            throw std::invalid_argument("solve: boundary value missing for node " +
                                        std::to_string(k));
    if (p.variant != OperatorVariant::ma_dual) {
        AdmissibilityReport rep = admissibility(PhaseField{p.phase});
        if (!rep.admissible)
            throw std::invalid_argument("solve: phase not admissible at node " +
                                        std::to_string(rep.bad_node));
    }
}

double op_value(OperatorVariant v, const SymMat& H, bool& ok) {
    switch (v) {
        case OperatorVariant::arctan: return phase_of(H);
        case OperatorVariant::modified_concave: return modified_concave_value(H);
        case OperatorVariant::ma_dual: {
            const SymEigen e = sym_eigen(H);
            double s = 0;
            for (int i = 0; i < H.dim; ++i) {
                if (!(e.lambda[i] > 0.0)) {
                    ok = false;
                    return 0.0;
                }
                s += std::log(e.lambda[i]);
            }
            return s;
        }
    }
    ok = false;
    return 0.0;
}

SymMat op_linearize(OperatorVariant v, const SymMat& H) {
    switch (v) {
        case OperatorVariant::arctan: return linearize(H);
        case OperatorVariant::modified_concave: return modified_concave_linearize(H);
        case OperatorVariant::ma_dual:
            return eigen_map(H, +[](double l) { return 1.0 / l; });
    }
    return SymMat::identity(H.dim);
}

/// sup-norm interior residual; ok=false if an iterate left the operator's
/// domain (log-det variant needs positive definite Hessians).
double residual_norm(const DirichletProblem& p, const ProblemLayout& lay, const ScalarField& u,
                     MatrixField& H, std::vector<double>& res, bool& ok) {
    H = hessian(u);
    const std::int64_t m = lay.unknowns();
    res.resize(static_cast<size_t>(m));
    ok = true;
    double norm = 0.0;
    bool all_ok = true;
#pragma omp parallel for schedule(static) reduction(max : norm) reduction(&& : all_ok)
    for (std::int64_t e = 0; e < m; ++e) {
        const std::int64_t k = lay.node_of_eq[e];
        bool node_ok = true;
        const double val = op_value(p.variant, H.matrix(k), node_ok);
        res[static_cast<size_t>(e)] = val - p.phase.values[k];
        all_ok = all_ok && node_ok;
        norm = std::max(norm, std::abs(res[static_cast<size_t>(e)]));
    }
    ok = all_ok;
    return norm;
}

/// Assemble sum_ab A_ab(x) D_ab with zero Dirichlet data for the update.
SpMat assemble_linearized(const DirichletProblem& p, const ProblemLayout& lay,
                          const MatrixField& H) {
    const Grid& g = p.grid;
    const int d = g.dim;
    const double h2 = g.spacing * g.spacing;
    const std::int64_t m = lay.unknowns();

    std::vector<Triplet> trip;
    trip.reserve(static_cast<size_t>(m) * (d == 1 ? 3 : 9));
    for (std::int64_t e = 0; e < m; ++e) {
        const std::int64_t k = lay.node_of_eq[e];
        const SymMat A = op_linearize(p.variant, H.matrix(k));
        double diag = 0.0;
        for (int a = 0; a < d; ++a) {
            const double w = A.at(a, a) / h2;
            diag += -2.0 * w;
            for (int side : {-1, +1}) {
                const std::int64_t nb = k + side * lay.stride[a];
                const std::int64_t col = lay.eq_of_node[static_cast<size_t>(nb)];
                if (col >= 0) trip.emplace_back(e, col, w);
            }
            for (int b = a + 1; b < d; ++b) {
                const double wc = 2.0 * A.at(a, b) / (4.0 * h2);
                for (int sa : {-1, +1})
                    for (int sb : {-1, +1}) {
                        const std::int64_t nb = k + sa * lay.stride[a] + sb * lay.stride[b];
                        const std::int64_t col = lay.eq_of_node[static_cast<size_t>(nb)];
                        if (col >= 0) trip.emplace_back(e, col, sa * sb * wc);
                    }
            }
        }
        trip.emplace_back(e, e, diag);
    }
    SpMat mat(m, m);
    mat.setFromTriplets(trip.begin(), trip.end());
    return mat;
}

/// Interior harmonic extension of the boundary data minus a quadratic,
/// yielding the initial guess base + extension.
ScalarField initial_guess(const DirichletProblem& p, const ProblemLayout& lay) {
    const Grid& g = p.grid;
    const int d = g.dim;
    const double h2 = g.spacing * g.spacing;

    double mean_phase = 0.0;
    for (double v : p.phase.values) mean_phase += v;
    mean_phase /= static_cast<double>(p.phase.values.size());
    const double tau = p.variant == OperatorVariant::ma_dual ? std::exp(mean_phase / d)
                                                             : std::tan(mean_phase / d);

    ScalarField u(g);
    auto quad = [&](std::int64_t k) {
        const auto x = g.coord(g.unindex(k));
        double r2 = 0;
        for (int a = 0; a < d; ++a) r2 += x[a] * x[a];
        return 0.5 * tau * r2;
    };
    for (const auto& [k, v] : p.boundary) u.values[static_cast<size_t>(k)] = v;

    const std::int64_t m = lay.unknowns();
    std::vector<Triplet> trip;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    for (std::int64_t e = 0; e < m; ++e) {
        const std::int64_t k = lay.node_of_eq[e];
        trip.emplace_back(e, e, -2.0 * d / h2);
        for (int a = 0; a < d; ++a)
            for (int side : {-1, +1}) {
                const std::int64_t nb = k + side * lay.stride[a];
                const std::int64_t col = lay.eq_of_node[static_cast<size_t>(nb)];
                if (col >= 0)
                    trip.emplace_back(e, col, 1.0 / h2);
                else
                    rhs[e] -= (u.values[static_cast<size_t>(nb)] - quad(nb)) / h2;
            }
    }
    SpMat lap(m, m);
    lap.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<SpMat> lu(lap);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error("initial_guess: Laplace factorization failed");
    Eigen::VectorXd ext = lu.solve(rhs);
    for (std::int64_t e = 0; e < m; ++e)
        u.values[static_cast<size_t>(lay.node_of_eq[e])] = quad(lay.node_of_eq[e]) + ext[e];
    return u;
}

SolveResult solve_from(const DirichletProblem& p, ScalarField u, const SolveOptions& opts) {
    const ProblemLayout lay(p.grid);
    SolveResult out;
    SolveReport& rep = out.report;

    MatrixField H;
    std::vector<double> res;
    bool ok = true;
    double rnorm = residual_norm(p, lay, u, H, res, ok);
    if (!ok) {
        rep.error = "initial iterate outside the operator domain";
        out.u = std::move(u);
        return out;
    }
    rep.residual_history.push_back(rnorm);

    const std::int64_t m = lay.unknowns();
    while (rnorm > opts.tol && rep.iterations < opts.max_iter) {
        SpMat A = assemble_linearized(p, lay, H);
        Eigen::SparseLU<SpMat> lu(A);
        if (lu.info() != Eigen::Success) {
            rep.error = "linear solve breakdown (factorization failed)";
            break;
        }
        Eigen::VectorXd rhs(m);
        for (std::int64_t e = 0; e < m; ++e) rhs[e] = -res[static_cast<size_t>(e)];
        Eigen::VectorXd delta = lu.solve(rhs);
        if (lu.info() != Eigen::Success) {
            rep.error = "linear solve breakdown (back substitution failed)";
            break;
        }

        double step = 1.0;
        ScalarField trial = u;
        MatrixField Ht;
        std::vector<double> rest;
        double tnorm = 0.0;
        bool accepted = false;
        while (step >= opts.min_step) {
            for (std::int64_t e = 0; e < m; ++e)
                trial.values[static_cast<size_t>(lay.node_of_eq[e])] =
                    u.values[static_cast<size_t>(lay.node_of_eq[e])] + step * delta[e];
            bool tok = true;
            tnorm = residual_norm(p, lay, trial, Ht, rest, tok);
            if (tok && tnorm < rnorm) {
                accepted = true;
                break;
            }
            step *= opts.backtrack;
            ++rep.damping_events;
        }
        if (!accepted) {
            rep.error = "damping failed: no residual decrease above the minimum step";
            break;
        }
        u = trial;
        H = Ht;
        res.swap(rest);
        rnorm = tnorm;
        ++rep.iterations;
        rep.residual_history.push_back(rnorm);
        if (!opts.quiet)
            std::printf("  newton %3d  residual %.3e  step %.2e\n", rep.iterations, rnorm, step);
    }

    rep.final_residual = rnorm;
    rep.converged = rnorm <= opts.tol && rep.error.empty();
    if (!rep.converged && rep.error.empty())
        rep.error = "no convergence after " + std::to_string(opts.max_iter) + " iterations";

    double emin = std::numeric_limits<double>::infinity(), emax = -emin;
    for (std::int64_t e = 0; e < m; ++e) {
        const SymEigen ev = sym_eigen(H.matrix(lay.node_of_eq[e]));
        emin = std::min(emin, ev.lambda[0]);
        emax = std::max(emax, ev.lambda[p.grid.dim - 1]);
    }
    rep.eig_min = emin;
    rep.eig_max = emax;
    rep.convex = convexity_check(u).certified;
    out.u = std::move(u);
    return out;
}

}  // namespace

SolveResult solve(const DirichletProblem& p, const SolveOptions& opts) {
    validate_problem(p);
    const ProblemLayout lay(p.grid);
    return solve_from(p, initial_guess(p, lay), opts);
}

ContinuationResult continuation_solve(const DirichletProblem& p, int steps,
                                      const SolveOptions& opts) {
    if (steps < 1) throw std::invalid_argument("continuation_solve: steps must be >= 1");
    validate_problem(p);
    const double base =
        p.variant == OperatorVariant::ma_dual ? 0.0 : p.grid.dim * std::numbers::pi / 4.0;

    ContinuationResult out;
    out.converged = true;
    ScalarField current;
    bool have_warm = false;
    for (int s = 1; s <= steps; ++s) {
        const double t = static_cast<double>(s) / steps;
        DirichletProblem q = p;
        for (size_t i = 0; i < q.phase.values.size(); ++i)
            q.phase.values[i] = (1.0 - t) * base + t * p.phase.values[i];

        SolveResult r = have_warm ? solve_from(q, current, opts)
                                  : solve_from(q, initial_guess(q, ProblemLayout(q.grid)), opts);
        out.steps.push_back(r.report);
        if (!r.report.converged) {
            out.converged = false;
            out.u = have_warm ? current : r.u;
            return out;
        }
        current = std::move(r.u);
        have_warm = true;
        out.last_good_t = t;
    }
    out.u = std::move(current);
    return out;
}

DirichletProblem manufactured_problem(const ScalarField& ustar, OperatorVariant variant) {
    DirichletProblem p;
    p.grid = ustar.grid;
    p.variant = variant;
    const MatrixField H = hessian(ustar);
    ScalarField phase(ustar.grid);
    bool ok = true;
    for (std::int64_t k = 0; k < ustar.grid.node_count(); ++k) {
        phase.values[k] = op_value(variant, H.matrix(k), ok);
        if (!ok)
            throw std::invalid_argument(
                "manufactured_problem: potential leaves the operator domain at node " +
                std::to_string(k));
    }
    p.phase = std::move(phase);
    for (std::int64_t k = 0; k < ustar.grid.node_count(); ++k)
        if (!ustar.grid.is_interior(ustar.grid.unindex(k)))
            p.boundary.emplace_back(k, ustar.values[k]);
    return p;
}

ProbeResult hessian_estimate_probe(const ProbeOptions& opts) {
    const Grid g = make_grid_box(2, -1.0, 1.0, opts.n);
    ProbeResult out;
    out.exponent = 2 * g.dim - 2;

    for (int j = 0; j < opts.count; ++j) {
        const double a =
            opts.count == 1
                ? opts.scale_min
                : opts.scale_min + (opts.scale_max - opts.scale_min) * j / (opts.count - 1.0);
        ScalarField ustar(g);
        for (std::int64_t k = 0; k < g.node_count(); ++k) {
            const auto x = g.coord(g.unindex(k));
            double base = 0.5 * (x[0] * x[0] + x[1] * x[1]);
            if (opts.family == ProbeFamily::quartic) base += x[0] * x[0] * x[0] * x[0] / 12.0;
            ustar.values[k] = a * base;
        }
        const DirichletProblem p = manufactured_problem(ustar, OperatorVariant::arctan);
        SolveResult r = solve(p, opts.solve);
        if (!r.report.converged)
            throw std::runtime_error("hessian_estimate_probe: solve failed at scale " +
                                     std::to_string(a));

        // oscillation over the half box
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::int64_t k = 0; k < g.node_count(); ++k) {
            const auto x = g.coord(g.unindex(k));
            if (std::abs(x[0]) > 0.5 || std::abs(x[1]) > 0.5) continue;
            lo = std::min(lo, r.u.values[k]);
            hi = std::max(hi, r.u.values[k]);
        }
        const MatrixField H = hessian(r.u);
        const double origin[3] = {0, 0, 0};
        const SymEigen e = sym_eigen(interp_matrix(H, origin, 0.0));
        const double norm0 = std::max(std::abs(e.lambda[0]), std::abs(e.lambda[g.dim - 1]));
        out.rows.push_back({a, hi - lo, norm0});
    }

    // least squares of ln|D2u(0)| against osc^(2n-2)
    const size_t n = out.rows.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (const ProbeRow& r : out.rows) {
        const double x = std::pow(r.osc, out.exponent);
        const double y = std::log(r.hess_norm0);
        sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
    }
    const double denom = n * sxx - sx * sx;
    out.c2 = denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
    const double intercept = (sy - out.c2 * sx) / n;
    out.c1 = std::exp(intercept);
    const double sst = syy - sy * sy / n;
    double sse = 0;
    for (const ProbeRow& r : out.rows) {
        const double x = std::pow(r.osc, out.exponent);
        const double y = std::log(r.hess_norm0);
        const double fit = intercept + out.c2 * x;
        sse += (y - fit) * (y - fit);
    }
    out.r_squared = sst > 0 ? 1.0 - sse / sst : 1.0;
    return out;
}

}  // namespace lagrot
