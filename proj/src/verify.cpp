#include "lagrot/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "lagrot/convex.hpp"
#include "lagrot/eigen_sym.hpp"
#include "lagrot/io.hpp"
#include "lagrot/phase_op.hpp"
#include "lagrot/rng.hpp"
#include "lagrot/rotation.hpp"
#include "lagrot/solver.hpp"
#include "lagrot/stencil.hpp"

namespace lagrot {

namespace {

constexpr double kPi = std::numbers::pi;

void add(SuiteResult& out, const VerifyOptions& opts, const std::string& name, double measured,
         double tolerance, bool smaller_is_pass = true) {
    CheckResult c;
    c.name = name;
    c.measured = measured;
    c.tolerance = tolerance * opts.tol_scale;
    c.pass = smaller_is_pass ? measured <= c.tolerance : measured >= c.tolerance;
    if (!opts.quiet)
        std::printf("  [%s] %-52s measured %.3e  tol %.3e\n", c.pass ? "PASS" : "FAIL",
                    name.c_str(), measured, c.tolerance);
    out.checks.push_back(std::move(c));
}

SymMat conjugate_dense(const SymMat& H, const double Q[3][3]) {
    SymMat out = SymMat::zero(H.dim);
    for (int a = 0; a < H.dim; ++a)
        for (int b = a; b < H.dim; ++b) {
            double s = 0;
            for (int i = 0; i < H.dim; ++i)
                for (int j = 0; j < H.dim; ++j) s += Q[a][i] * H.at(i, j) * Q[b][j];
            out.at(a, b) = s;
        }
    return out;
}

void random_rotation(Rng& rng, int dim, double Q[3][3]) {
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) Q[a][b] = a == b ? 1.0 : 0.0;
    if (dim == 1) return;
    if (dim == 2) {
        const double th = rng.uniform(0.0, 2.0 * kPi);
        Q[0][0] = std::cos(th); Q[0][1] = -std::sin(th);
        Q[1][0] = std::sin(th); Q[1][1] = std::cos(th);
        return;
    }
    // compose three plane rotations
    for (int p = 0; p < 2; ++p)
        for (int q = p + 1; q < 3; ++q) {
            const double th = rng.uniform(0.0, 2.0 * kPi);
            const double cs = std::cos(th), sn = std::sin(th);
            for (int r = 0; r < 3; ++r) {
                const double vp = Q[r][p], vq = Q[r][q];
                Q[r][p] = cs * vp - sn * vq;
                Q[r][q] = sn * vp + cs * vq;
            }
        }
}

// ---------------------------------------------------------------- convex ---

void suite_convex(SuiteResult& out, const VerifyOptions& opts) {
    Rng rng(opts.seed);
    const Grid g = make_grid_box(1, -1.0, 1.0, 129);
    const Grid g2 = make_grid_box(2, -1.0, 1.0, 49);

    // Legendre order reversal on random convex pairs: f <= g => f* >= g*.
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const Grid& gg = trial % 2 == 0 ? g : g2;
        ScalarField f = random_convex_potential(rng, gg);
        ScalarField fg = f;
        ScalarField extra = random_convex_potential(rng, gg, 0.0, 0.2, 1, 1);
        for (size_t i = 0; i < fg.values.size(); ++i)
            fg.values[i] += extra.values[i] + 0.1;
        const Grid dual = auto_dual_grid(fg);  // contained in f's slope range
        const ScalarField fs = discrete_conjugate(f, dual, ConjugateMode::hull);
        const ScalarField gs = discrete_conjugate(fg, dual, ConjugateMode::hull);
        for (size_t i = 0; i < fs.values.size(); ++i)
            worst = std::max(worst, gs.values[i] - fs.values[i]);
    }
    add(out, opts, "legendre_order_reversal_max_violation", worst, 1e-12);

    // Involution f** ~ f on convex inputs, first order under refinement.
    auto biconj_gap = [](int n) {
        const Grid gg = make_grid_1d(-1.0, 1.0, n);
        ScalarField f(gg);
        for (int i = 0; i < n; ++i) {
            const double x = gg.origin[0] + gg.spacing * i;
            f.values[i] = std::exp(x) + 0.3 * std::abs(x);
        }
        return biconjugate_check(f);
    };
    const double gap1 = biconj_gap(129), gap2 = biconj_gap(257);
    add(out, opts, "involution_gap_over_h", gap1 / (2.0 / 128), 5.0);
    add(out, opts, "involution_refinement_ratio", gap2 / gap1, 0.75);

    // Conjugates of certified convex inputs certify convex.
    int certified = 0;
    const int cases = 10;
    for (int trial = 0; trial < cases; ++trial) {
        const Grid& gg = trial % 2 == 0 ? g : g2;
        ConvexPotential p = make_convex_potential(random_convex_potential(rng, gg));
        if (!p.certified) continue;
        if (legendre(p).certified) ++certified;
    }
    add(out, opts, "legendre_output_certified_fraction", certified / double(cases), 1.0, false);

    // Strict-convexity inequality on tilde-form pairs at shared slopes.
    const double c = std::cos(kPi / 4), s = std::sin(kPi / 4);
    double worst_gap = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        ScalarField base = random_convex_potential(rng, g);
        ScalarField ut(g), vt(g);
        const double bump = rng.uniform(0.0, 0.2);
        for (int i = 0; i < g.shape[0]; ++i) {
            const double x = g.origin[0] + g.spacing * i;
            ut.values[i] = s * base.values[i] + 0.5 * c * x * x;
            vt.values[i] = ut.values[i] + bump * (1.0 + 0.5 * std::sin(3.0 * x));
        }
        ConvexPotential cu = make_convex_potential(ut);
        ConvexPotential cv = make_convex_potential(vt);
        if (!cu.certified || !cv.certified) continue;
        // sample a shared slope via the discrete argmax (exact membership)
        const double sl = rng.uniform(-0.5, 0.5);
        auto argmax = [&](const ScalarField& f) {
            int best = 0;
            double bv = -1e300;
            for (int i = 0; i < g.shape[0]; ++i) {
                const double x = g.origin[0] + g.spacing * i;
                const double v = x * sl - f.values[i];
                if (v > bv) { bv = v; best = i; }
            }
            return best;
        };
        const NodeIndex a{argmax(ut), 0, 0}, b{argmax(vt), 0, 0};
        const double res = strict_convexity_gap(cu, cv, a, b, &sl);
        worst_gap = std::min(worst_gap, res);
    }
    add(out, opts, "strict_convexity_min_residual", -worst_gap, 10.0 * g.spacing);
}

// -------------------------------------------------------------- rotation ---

ScalarField quartic_2d(const Grid& g) {
    ScalarField u(g);
    for (std::int64_t k = 0; k < g.node_count(); ++k) {
        const auto x = g.coord(g.unindex(k));
        u.values[k] = 0.5 * (x[0] * x[0] + x[1] * x[1]) + x[0] * x[0] * x[0] * x[0] / 12.0;
    }
    return u;
}

void suite_rotation(SuiteResult& out, const VerifyOptions& opts) {
    const RotationAngle a4 = RotationAngle::quarter_pi();

    if (!opts.in_path.empty()) {
        // claimed rotated potential: check the eigenvalue bounds on it
        const ScalarField ubar = read_scalar_field(opts.in_path);
        const HessianBoundStats st = check_hessian_bounds(ubar, a4);
        add(out, opts, "claimed_ubar_bound_violations", double(st.violations), 0.0);
        add(out, opts, "claimed_ubar_lambda_max_excess",
            std::max(0.0, st.lambda_max - st.upper), 0.0);
        return;
    }

    Rng rng(opts.seed);

    // Hessian bounds on random convex rotations.
    std::int64_t violations = 0;
    for (int trial = 0; trial < 10; ++trial) {
        const Grid g = make_grid_box(2, -1.0, 1.0, 49);
        ConvexPotential u = make_convex_potential(random_convex_potential(rng, g));
        if (!u.certified) continue;
        try {
            const RotatedPotential r = rotate(u, a4);
            violations += r.bounds.violations;
        } catch (const BoundViolationError&) {
            ++violations;
        }
    }
    add(out, opts, "random_rotation_bound_violations", double(violations), 0.0);

    // Angle shift on the quartic instance, first order under refinement.
    auto shift_dev = [&](int n) {
        const Grid g = make_grid_box(2, -1.0, 1.0, n);
        ConvexPotential u = make_convex_potential(quartic_2d(g));
        const RotatedPotential r = rotate(u, a4);
        return angle_shift_check(u, r).max_deviation;
    };
    const double dev1 = shift_dev(65), dev2 = shift_dev(129);
    add(out, opts, "angle_shift_dev_over_half_h", dev1 / (0.5 * 2.0 / 64), 1.0);
    add(out, opts, "angle_shift_refinement_ratio", dev2 / dev1, 0.65);

    // Round trip through the guarded upward rotation.
    {
        const Grid g = make_grid_box(1, -1.0, 1.0, 129);
        ScalarField u0(g);
        for (int i = 0; i < g.shape[0]; ++i) {
            const double x = g.origin[0] + g.spacing * i;
            u0.values[i] = 0.5 * x * x + x * x * x * x / 12.0;
        }
        ConvexPotential u = make_convex_potential(u0);
        const RotatedPotential r = rotate(u, a4);
        const ScalarField back = rotate_up(r.ubar, a4);
        double dev = 0.0;
        for (int i = 0; i < g.shape[0]; ++i) {
            const double x = g.origin[0] + g.spacing * i;
            if (x < back.grid.origin[0] + 2 * back.grid.spacing ||
                x > back.grid.axis_max(0) - 2 * back.grid.spacing)
                continue;
            dev = std::max(dev, std::abs(interp_scalar(back, &x, 0.0) - u0.values[i]));
        }
        add(out, opts, "round_trip_sup_error_over_h", dev / g.spacing, 5.0);
    }

    // inverse(forward(lambda)) = lambda on [0, 1e6], in the angle metric
    // (the lambda metric degrades with the conditioning of 1 - lambda_bar).
    double law_dev = 0.0;
    for (int i = 0; i <= 120; ++i) {
        const double l = std::pow(10.0, -2.0 + i * (8.0 / 120.0)) - 0.01;  // 0 .. ~1e6
        const double rt = inverse_hessian_law(forward_hessian_law(l));
        law_dev = std::max(law_dev, std::abs(std::atan(rt) - std::atan(l)));
    }
    add(out, opts, "hessian_law_round_trip_angle", law_dev, 1e-12);

    // Constant phase stays exactly constant through the rotation.
    {
        const Grid g = make_grid_box(2, -1.0, 1.0, 33);
        ConvexPotential u = make_convex_potential(random_convex_potential(rng, g));
        const RotatedPotential r = rotate(u, a4);
        PhaseField psi;
        psi.field = ScalarField(g);
        for (auto& v : psi.field.values) v = 2.0 * kPi / 4.0;
        const RotatedPhase pb = rotated_phase(psi, r);
        double dev = 0.0;
        for (double v : pb.psibar.values) dev = std::max(dev, std::abs(v - 0.0));
        add(out, opts, "constant_phase_rotation_exactness", dev, 0.0);
    }
}

// -------------------------------------------------------------- operator ---

void suite_operator(SuiteResult& out, const VerifyOptions& opts) {
    Rng rng(opts.seed);

    double conj_dev = 0.0, mono_worst = 0.0, sigma_dev = 0.0, lin_dev = 0.0, concav_worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int dim = 2 + trial % 2;
        const SymMat H = random_sym(rng, dim, 3.0);

        double Q[3][3];
        random_rotation(rng, dim, Q);
        conj_dev = std::max(conj_dev,
                            std::abs(phase_of(conjugate_dense(H, Q)) - phase_of(H)));

        SymMat Hp = H;
        const SymMat P = random_psd(rng, dim, 1.0);
        for (int t = 0; t < SymMat::tri_size(dim); ++t) Hp.tri[t] += P.tri[t];
        mono_worst = std::min(mono_worst, phase_of(Hp) - phase_of(H));

        sigma_dev = std::max(sigma_dev, std::abs(sigma_form_residual(H, phase_of(H))));

        // directional derivative against the linearization
        const SymMat A = linearize(H);
        const SymMat E = random_sym(rng, dim, 1.0);
        const double t = 1e-6;
        SymMat Hp2 = H, Hm2 = H;
        for (int q = 0; q < SymMat::tri_size(dim); ++q) {
            Hp2.tri[q] += t * E.tri[q];
            Hm2.tri[q] -= t * E.tri[q];
        }
        const double fd = (phase_of(Hp2) - phase_of(Hm2)) / (2.0 * t);
        double tr = 0.0;
        for (int aa = 0; aa < dim; ++aa)
            for (int bb = 0; bb < dim; ++bb) tr += A.at(aa, bb) * E.at(bb, aa);
        lin_dev = std::max(lin_dev, std::abs(fd - tr) / std::max(1.0, std::abs(tr)));

        // concavity on the PSD cone
        const SymMat P1 = random_psd(rng, dim, 1.5), P2 = random_psd(rng, dim, 1.5);
        SymMat mid = P1;
        for (int q = 0; q < SymMat::tri_size(dim); ++q)
            mid.tri[q] = 0.5 * (P1.tri[q] + P2.tri[q]);
        concav_worst = std::min(concav_worst,
                                phase_of(mid) - 0.5 * (phase_of(P1) + phase_of(P2)));
    }
    add(out, opts, "phase_orthogonal_invariance", conj_dev, 1e-10);
    add(out, opts, "phase_monotonicity_min_gap", -mono_worst, 1e-12);
    add(out, opts, "sigma_form_residual_max", sigma_dev, 1e-10);
    add(out, opts, "linearize_fd_rel_deviation", lin_dev, 1e-5);
    add(out, opts, "psd_concavity_min_gap", -concav_worst, 1e-12);
}

// -------------------------------------------------------------- geometry ---

void suite_geometry(SuiteResult& out, const VerifyOptions& opts) {
    Rng rng(opts.seed);
    const Grid g = make_grid_box(2, -1.0, 1.0, 49);

    ScalarField u = opts.in_path.empty() ? quartic_2d(g) : read_scalar_field(opts.in_path);
    PhaseField psi;
    if (opts.phase_path.empty()) {
        psi.field = ScalarField(u.grid);
        for (std::int64_t k = 0; k < u.grid.node_count(); ++k) {
            const auto x = u.grid.coord(u.grid.unindex(k));
            psi.field.values[k] = 0.8 + 0.2 * x[0] + 0.1 * x[0] * x[0] - 0.15 * x[1] +
                                  (u.grid.dim > 1 ? 0.05 * x[0] * x[1] : 0.0);
        }
    } else {
        psi.field = read_scalar_field(opts.phase_path);
    }
    const int d = u.grid.dim;

    const MatrixField H = hessian(u);
    const InducedMetric metric = induced_metric(H);

    // g >= I and det g >= 1
    double min_eig = 1e300, min_det = 1e300;
    for (std::int64_t k = 0; k < u.grid.node_count(); ++k) {
        const SymEigen e = sym_eigen(metric.g.matrix(k));
        min_eig = std::min(min_eig, e.lambda[0]);
        min_det = std::min(min_det, metric.sqrt_det.values[k]);
    }
    add(out, opts, "metric_min_eigenvalue", min_eig, 1.0 - 1e-12, false);
    add(out, opts, "metric_min_sqrt_det", min_det, 1.0 - 1e-12, false);

    // mean curvature: zero for constant phase, bounded by |Dpsi| in general
    {
        PhaseField cpsi;
        cpsi.field = ScalarField(u.grid);
        for (auto& v : cpsi.field.values) v = 0.7;
        const MeanCurvature mc = mean_curvature(u, cpsi);
        double worst = 0.0;
        for (double v : mc.norm.values) worst = std::max(worst, v);
        add(out, opts, "mean_curvature_constant_phase_sup", worst, 1e-10);
    }
    {
        const MeanCurvature mc = mean_curvature(u, psi);
        const VectorField dpsi = gradient(psi.field);
        double worst = 0.0;
        for (std::int64_t k = 0; k < u.grid.node_count(); ++k) {
            double n2 = 0;
            for (int a = 0; a < d; ++a) n2 += dpsi(k, a) * dpsi(k, a);
            worst = std::max(worst, mc.norm.values[k] - std::sqrt(n2));
        }
        add(out, opts, "mean_curvature_gradient_bound_excess", worst, 1e-12);
    }

    // flat metric reduces to the 5-point Laplacian exactly
    {
        MatrixField zero(u.grid);
        const InducedMetric flat = induced_metric(zero);
        const ScalarField lb = laplace_beltrami(u, flat);
        double worst = 0.0;
        const auto stride = [&](int a) {
            std::int64_t s = 1;
            for (int b = d - 1; b > a; --b) s *= u.grid.shape[b];
            return s;
        };
        const double h2 = u.grid.spacing * u.grid.spacing;
        for (std::int64_t k = 0; k < u.grid.node_count(); ++k) {
            if (!u.grid.is_interior(u.grid.unindex(k))) continue;
            double lap = 0;
            for (int a = 0; a < d; ++a)
                lap += (u.values[k + stride(a)] - 2 * u.values[k] + u.values[k - stride(a)]) / h2;
            worst = std::max(worst, std::abs(lb.values[k] - lap));
        }
        add(out, opts, "laplace_beltrami_flat_equals_5point", worst, 1e-11);
    }

    // divergence form vs nondivergence form, one-off O(h) agreement
    {
        auto lb_compare = [&](int n) {
            const Grid gg = make_grid_box(2, -1.0, 1.0, n);
            ScalarField uu = quartic_2d(gg);
            ScalarField f(gg);
            for (std::int64_t k = 0; k < gg.node_count(); ++k) {
                const auto x = gg.coord(gg.unindex(k));
                f.values[k] = std::sin(x[0]) * std::cos(x[1]);
            }
            const MatrixField HH = hessian(uu);
            const InducedMetric met = induced_metric(HH);
            const ScalarField div_form = laplace_beltrami(f, met);

            // nondivergence route: g^{ij} d_ij f + (d_i (sqrt G g^{ij}) / sqrt G) d_j f
            const MatrixField w = metric_flux_weights(met);
            const MatrixField Hf = hessian(f);
            const VectorField Df = gradient(f);
            std::vector<ScalarField> wcols;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    ScalarField col(gg);
                    for (std::int64_t k = 0; k < gg.node_count(); ++k)
                        col.values[k] = w.entry(k, i, j);
                    wcols.push_back(std::move(col));
                }
            double worst = 0.0;
            for (std::int64_t k = 0; k < gg.node_count(); ++k) {
                const NodeIndex iv = gg.unindex(k);
                bool deep = true;
                for (int a = 0; a < 2; ++a)
                    if (iv[a] < 2 || iv[a] > gg.shape[a] - 3) deep = false;
                if (!deep) continue;
                const SymMat gi = met.g_inv.matrix(k);
                double nondiv = 0;
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j) {
                        nondiv += gi.at(i, j) * Hf.entry(k, i, j);
                        nondiv += detail::d1_at(wcols[i * 2 + j], k, i) * Df(k, j) /
                                  met.sqrt_det.values[k];
                    }
                worst = std::max(worst, std::abs(div_form.values[k] - nondiv));
            }
            return worst;
        };
        const double c1 = lb_compare(33), c2 = lb_compare(65);
        add(out, opts, "divergence_vs_nondivergence_gap", c1, 0.05);
        add(out, opts, "divergence_form_refinement_ratio", c2 / c1, 0.6);
    }

    // bm bounds on a rotated field + chord convexity
    {
        ConvexPotential cp = make_convex_potential(quartic_2d(make_grid_box(2, -1, 1, 49)));
        const RotatedPotential r = rotate(cp, RotationAngle::quarter_pi());
        const MaxPrincipleQuantity q1 = bm_quantity(r.lambda_bar, 1);
        double worst = 0.0;
        for (std::int64_t k = 0; k < q1.bm.grid.node_count(); ++k) {
            if (!q1.bm.grid.is_interior(q1.bm.grid.unindex(k))) continue;
            worst = std::max(worst, q1.bm.values[k] - kBmMax);
        }
        add(out, opts, "bm_upper_bound_excess", worst, 1e-8);

        double min_gap = 0.0, min_b2 = 0.0;
        for (int i = 0; i <= 10000; ++i) {
            const double t = i / 10000.0;
            min_gap = std::min(min_gap, bm_convexity_gap(t));
            min_b2 = std::min(min_b2, bm_second_derivative(t));
        }
        add(out, opts, "bm_convexity_min_residual", -min_gap, 1e-12);
        add(out, opts, "bm_second_derivative_min", -min_b2, 0.0);
    }

    // two-contribution decomposition of the rotated-phase Hessian
    {
        ConvexPotential cp = make_convex_potential(quartic_2d(make_grid_box(2, -1, 1, 65)));
        const RotatedPotential r = rotate(cp, RotationAngle::quarter_pi());
        PhaseField ps;
        ps.field = ScalarField(cp.field.grid);
        for (std::int64_t k = 0; k < cp.field.grid.node_count(); ++k) {
            const auto x = cp.field.grid.coord(cp.field.grid.unindex(k));
            ps.field.values[k] = 0.9 + 0.1 * x[0] + 0.07 * x[0] * x[0] + 0.05 * x[0] * x[1] -
                                 0.08 * x[1] * x[1];
        }
        const PhaseTermsContext ctx = make_phase_terms_context(ps, r);
        double worst = 0.0;
        const Grid& dual = r.ubar.grid;
        for (std::int64_t k = 0; k < dual.node_count(); ++k) {
            const auto terms = rotated_phase_hessian_terms(ctx, r, dual.unindex(k));
            for (const auto& t : terms)
                if (t.valid)
                    worst = std::max(worst, std::abs(t.direct - (t.transport + t.zeroth)));
        }
        add(out, opts, "phase_hessian_decomposition_over_h", worst / cp.field.grid.spacing, 1.0);
    }

    // VMO: exact zero for constants, linear slope vs its exact ball value, and
    // the table for the report
    {
        MatrixField constM(g);
        for (std::int64_t k = 0; k < g.node_count(); ++k) {
            SymMat m = SymMat::identity(2);
            m.at(0, 1) = 0.25;
            constM.set_matrix(k, m);
        }
        const double h = g.spacing;
        const std::vector<double> radii{2 * h, 4 * h, 6 * h, 8 * h};
        const VmoTable ct = vmo_modulus(constM, radii);
        double worst = 0.0;
        for (double o : ct.omega) worst = std::max(worst, o);
        add(out, opts, "vmo_constant_field_omega", worst, 0.0);

        MatrixField linM(g);
        for (std::int64_t k = 0; k < g.node_count(); ++k) {
            const auto x = g.coord(g.unindex(k));
            SymMat m = SymMat::zero(2);
            m.at(0, 0) = x[0];
            m.at(0, 1) = 0.5 * x[0];
            m.at(1, 1) = -0.3 * x[0];
            linM.set_matrix(k, m);
        }
        const VmoTable lt = vmo_modulus(linM, radii);
        out.omega = lt;
        // direct-summation value of the same deviation for the largest ball
        const double enorm = std::sqrt(1.0 + 2 * 0.25 + 0.09);
        const auto offs = detail::ball_offsets(2, radii.back(), h);
        double mean = 0.0;
        for (const auto& o : offs) mean += o[0] * h;
        mean /= offs.size();
        double dev = 0.0;
        for (const auto& o : offs) dev += std::abs(o[0] * h - mean) * enorm;
        dev /= offs.size();
        add(out, opts, "vmo_linear_slope_rel_error",
            std::abs(lt.omega.back() - dev) / dev, 0.10);
    }
}

// ---------------------------------------------------------------- solver ---

void suite_solver(SuiteResult& out, const VerifyOptions& opts) {
    // constant-phase quadratic: exact in <= 2 Newton steps
    {
        const Grid g = make_grid_box(2, -1.0, 1.0, 33);
        ScalarField ustar(g);
        for (std::int64_t k = 0; k < g.node_count(); ++k) {
            const auto x = g.coord(g.unindex(k));
            ustar.values[k] = 0.5 * (x[0] * x[0] + x[1] * x[1]);
        }
        const DirichletProblem p = manufactured_problem(ustar, OperatorVariant::arctan);
        const SolveResult r = solve(p);
        double err = 0.0;
        for (size_t i = 0; i < ustar.values.size(); ++i)
            err = std::max(err, std::abs(r.u.values[i] - ustar.values[i]));
        add(out, opts, "constant_phase_quadratic_error", err, 1e-8);
        add(out, opts, "constant_phase_quadratic_iterations", r.report.iterations, 2.0);
    }

    // manufactured convergence order over three grids
    {
        auto sup_err = [&](int n) {
            const Grid g = make_grid_box(2, -1.0, 1.0, n);
            ScalarField ustar = quartic_2d(g);
            const DirichletProblem p = manufactured_problem(ustar, OperatorVariant::arctan);
            const SolveResult r = solve(p);
            if (!r.report.converged) return 1e300;
            double err = 0.0;
            for (size_t i = 0; i < ustar.values.size(); ++i)
                err = std::max(err, std::abs(r.u.values[i] - ustar.values[i]));
            return err;
        };
        const double e1 = sup_err(17), e2 = sup_err(33), e3 = sup_err(65);
        const double order = 0.5 * (std::log2(e1 / e2) + std::log2(e2 / e3));
        add(out, opts, "manufactured_convergence_order", order, 1.8, false);
    }

    // residual history monotone, convexity persists, variants agree
    {
        const Grid g = make_grid_box(2, -1.0, 1.0, 33);
        ScalarField ustar = quartic_2d(g);
        const DirichletProblem p = manufactured_problem(ustar, OperatorVariant::arctan);
        const SolveResult r = solve(p);
        double worst_increase = 0.0;
        for (size_t i = 1; i < r.report.residual_history.size(); ++i)
            worst_increase = std::max(worst_increase, r.report.residual_history[i] -
                                                          r.report.residual_history[i - 1]);
        add(out, opts, "residual_history_monotone", worst_increase, 0.0);
        add(out, opts, "solver_convexity_persistence", r.report.convex ? 1.0 : 0.0, 1.0, false);

        DirichletProblem pm = p;
        pm.variant = OperatorVariant::modified_concave;
        const SolveResult rm = solve(pm);
        double gap = 0.0;
        for (size_t i = 0; i < r.u.values.size(); ++i)
            gap = std::max(gap, std::abs(r.u.values[i] - rm.u.values[i]));
        add(out, opts, "operator_variant_consistency_gap", gap, 1e-6);
    }
}

}  // namespace

std::vector<std::string> suite_names() {
    return {"convex", "rotation", "operator", "geometry", "solver"};
}

SuiteResult run_suite(const std::string& suite, const VerifyOptions& opts) {
    SuiteResult out;
    out.suite = suite;
    out.seed = opts.seed;
    if (!opts.quiet) std::printf("suite %s (seed %llu)\n", suite.c_str(),
                                 static_cast<unsigned long long>(opts.seed));
    if (suite == "convex") suite_convex(out, opts);
    else if (suite == "rotation") suite_rotation(out, opts);
    else if (suite == "operator") suite_operator(out, opts);
    else if (suite == "geometry") suite_geometry(out, opts);
    else if (suite == "solver") suite_solver(out, opts);
    else if (suite == "all") {
        for (const std::string& name : suite_names()) {
            SuiteResult sub = run_suite(name, opts);
            for (auto& c : sub.checks) {
                c.name = name + "." + c.name;
                out.checks.push_back(std::move(c));
            }
            if (name == "geometry") out.omega = sub.omega;
        }
    } else {
        throw std::invalid_argument("unknown suite: " + suite);
    }
    return out;
}

}  // namespace lagrot
