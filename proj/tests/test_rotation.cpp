#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lagrot/eigen_sym.hpp"
#include "lagrot/rng.hpp"
#include "lagrot/rotation.hpp"
#include "lagrot/stencil.hpp"
#include "support.hpp"

using namespace lagrot;
using lagrot::test::sample;

namespace {

constexpr double kPi = std::numbers::pi;

// Graph-rotation oracle: rotate the subdifferential graph {(x, p)} of a 1D
// convex function by e^{-i alpha} and difference the resulting curve.
struct GraphOracle {
    std::vector<double> xb, yb;  // rotated curve, sorted by xb

    GraphOracle(const std::vector<std::pair<double, double>>& graph, double alpha) {
        const double c = std::cos(alpha), s = std::sin(alpha);
        std::vector<std::pair<double, double>> pts;
        pts.reserve(graph.size());
        for (const auto& [x, p] : graph) pts.emplace_back(c * x + s * p, -s * x + c * p);
        std::sort(pts.begin(), pts.end());
        for (const auto& [a, b] : pts) {
            xb.push_back(a);
            yb.push_back(b);
        }
    }

    // slope of the rotated curve near query = lambda_bar there
    double lambda_bar(double q) const {
        const auto it = std::lower_bound(xb.begin(), xb.end(), q);
        size_t i = static_cast<size_t>(it - xb.begin());
        i = std::min(std::max<size_t>(i, 2), xb.size() - 3);
        return (yb[i + 2] - yb[i - 2]) / (xb[i + 2] - xb[i - 2]);
    }
};

std::vector<std::pair<double, double>> abs_graph(int samples) {
    std::vector<std::pair<double, double>> g;
    for (int i = 0; i <= samples; ++i) {
        const double x = -1.0 + 2.0 * i / samples;
        if (std::abs(x) > 1e-14) g.emplace_back(x, x > 0 ? 1.0 : -1.0);
    }
    for (int i = 0; i <= samples; ++i) g.emplace_back(0.0, -1.0 + 2.0 * i / samples);
    return g;
}

}  // namespace

TEST_CASE("rotation angle validation") {
    CHECK_THROWS_AS(RotationAngle::from_radians(0.0), std::invalid_argument);
    CHECK_THROWS_AS(RotationAngle::from_radians(kPi / 2), std::invalid_argument);
    const RotationAngle a = RotationAngle::from_degrees(45.0);
    CHECK(a.c == doctest::Approx(std::sqrt(0.5)));
    CHECK(a.s * a.s + a.c * a.c == doctest::Approx(1.0));
}

TEST_CASE("rotating |x|^2/2 by pi/4 gives the zero potential") {
    for (int dim : {1, 2}) {
        const Grid g = make_grid_box(dim, -1.0, 1.0, 65);
        ConvexPotential u = require_convex_potential(sample(g, [dim](const double* x) {
            double r2 = 0;
            for (int a = 0; a < dim; ++a) r2 += x[a] * x[a];
            return 0.5 * r2;
        }));
        const RotatedPotential r = rotate(u, RotationAngle::quarter_pi());
        double worst = 0;
        for (double v : r.ubar.values) worst = std::max(worst, std::abs(v));
        CHECK(worst <= g.spacing * g.spacing);
        CHECK(r.bounds.violations == 0);
    }
}

TEST_CASE("1D quadratic rotates by the eigenvalue law: 3 -> 1/2") {
    const Grid g = make_grid_1d(-1.0, 1.0, 129);
    const double h = g.spacing;
    ConvexPotential u = require_convex_potential(
        sample(g, [](const double* x) { return 1.5 * x[0] * x[0]; }));
    const RotatedPotential r = rotate(u, RotationAngle::quarter_pi());

    // brute-force oracle for the Legendre step on a 10x finer sampling
    const double c = std::sqrt(0.5), s = std::sqrt(0.5);
    double worst_oracle = 0, worst_closed = 0;
    for (std::int64_t k = 0; k < r.ubar.grid.node_count(); ++k) {
        const double xb = r.ubar.grid.origin[0] + r.ubar.grid.spacing * k;
        double sup = -1e300;
        for (int i = 0; i <= 1280; ++i) {
            const double x = -1.0 + 2.0 * i / 1280.0;
            sup = std::max(sup, x * xb - (s * 1.5 * x * x + 0.5 * c * x * x));
        }
        const double oracle = (0.5 * c * xb * xb - sup) / s;
        worst_oracle = std::max(worst_oracle, std::abs(r.ubar.values[k] - oracle));
        worst_closed = std::max(worst_closed, std::abs(r.ubar.values[k] - xb * xb / 4.0));
    }
    CHECK(worst_oracle <= 10.0 * h);
    CHECK(worst_closed <= 10.0 * h);

    // interior eigenvalue is (3-1)/(3+1) = 1/2
    for (std::int64_t k = 2; k < r.ubar.grid.node_count() - 2; ++k)
        CHECK(r.lambda_bar(k, 0) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("rotating |x| matches the graph-rotation oracle on the kink segment") {
    const Grid g = make_grid_1d(-1.0, 1.0, 129);  // odd count puts a node on the kink
    const double h = g.spacing;
    ConvexPotential u =
        require_convex_potential(sample(g, [](const double* x) { return std::abs(x[0]); }));
    const RotatedPotential r = rotate(u, RotationAngle::quarter_pi());

    const GraphOracle oracle(abs_graph(4000), kPi / 4.0);
    const double inner = 1.0 / std::sqrt(2.0) - 5.0 * h;
    std::int64_t tested = 0;
    for (std::int64_t k = 0; k < r.ubar.grid.node_count(); ++k) {
        const double xb = r.ubar.grid.origin[0] + r.ubar.grid.spacing * k;
        if (std::abs(xb) >= inner) continue;
        ++tested;
        CHECK(std::abs(r.lambda_bar(k, 0) - 1.0) <= 10.0 * h);
        CHECK(std::abs(r.lambda_bar(k, 0) - oracle.lambda_bar(xb)) <= 10.0 * h);
    }
    CHECK(tested > 20);
}

TEST_CASE("angle shift check") {
    const RotationAngle a4 = RotationAngle::quarter_pi();

    SUBCASE("quadratic bowl is exact") {
        const Grid g = make_grid_box(2, -1.0, 1.0, 33);
        ConvexPotential u = require_convex_potential(sample(g, [](const double* x) {
            return 0.5 * (x[0] * x[0] + x[1] * x[1]);
        }));
        const RotatedPotential r = rotate(u, a4);
        const AngleShiftResult res = angle_shift_check(u, r);
        CHECK(res.matched > 0);
        CHECK(res.max_deviation <= 1e-8);
    }

    SUBCASE("1D quartic deviation is first order, C stable") {
        auto dev_at = [&](int n) {
            const Grid g = make_grid_1d(-1.0, 1.0, n);
            ConvexPotential u = require_convex_potential(sample(g, [](const double* x) {
                return std::pow(x[0], 4) / 12.0 + 0.5 * x[0] * x[0];
            }));
            const RotatedPotential r = rotate(u, a4);
            return angle_shift_check(u, r).max_deviation;
        };
        const double d1 = dev_at(129), d2 = dev_at(257);
        const double h1 = 2.0 / 128;
        CHECK(d1 <= 1.0 * h1);
        CHECK(d2 / d1 >= 0.3);
        CHECK(d2 / d1 <= 0.7);
    }

    SUBCASE("2D constant Hessian: both eigenvalues shift") {
        const Grid g = make_grid_box(2, -1.0, 1.0, 65);
        ConvexPotential u = require_convex_potential(sample(g, [](const double* x) {
            return 0.5 * (3.0 * x[0] * x[0] + x[1] * x[1]);
        }));
        const RotatedPotential r = rotate(u, a4);
        const AngleShiftResult res = angle_shift_check(u, r);
        CHECK(res.max_deviation <= 10.0 * g.spacing);
        // lambda_bar = {(3-1)/(3+1), 0} = {1/2, 0} in the interior
        const Grid& dg = r.ubar.grid;
        const NodeIndex center{dg.shape[0] / 2, dg.shape[1] / 2, 0};
        const std::int64_t kc = dg.index(center);
        CHECK(r.lambda_bar(kc, 0) == doctest::Approx(0.0).epsilon(1e-5));
        CHECK(r.lambda_bar(kc, 1) == doctest::Approx(0.5).epsilon(1e-5));
    }
}

TEST_CASE("eigenvalue transformation laws") {
    CHECK(inverse_hessian_law(0.0) == doctest::Approx(1.0));
    CHECK(inverse_hessian_law(0.5) == doctest::Approx(3.0));
    CHECK(inverse_hessian_law(-1.0 / 3.0) == doctest::Approx(0.5));
    // tangent subtraction identity
    CHECK(std::abs((std::atan(0.5) - kPi / 4.0) - std::atan(-1.0 / 3.0)) <= 1e-12);
    CHECK_THROWS_AS(inverse_hessian_law(1.0 - 1e-9), std::overflow_error);
    CHECK_THROWS_AS(inverse_hessian_law(1.0), std::overflow_error);

    // round trip identity over [0, 1e6]: exact in the angle metric everywhere;
    // in the lambda metric up to the conditioning of 1 - lambda_bar
    for (int i = 0; i <= 60; ++i) {
        const double l = std::pow(10.0, -2.0 + 8.0 * i / 60.0) - 0.01;
        const double rt = inverse_hessian_law(forward_hessian_law(l));
        CHECK(std::abs(std::atan(rt) - std::atan(l)) <= 1e-12);
        if (l <= 1e3) CHECK(std::abs(rt - l) <= 1e-12 * (1.0 + l));
    }

    // matrix version applies the law in the eigenframe
    SymMat hb = SymMat::zero(2);
    hb.at(0, 0) = 0.25;
    hb.at(0, 1) = 0.15;
    hb.at(1, 1) = -0.1;
    const SymMat law = inverse_hessian_law(hb, RotationAngle::quarter_pi());
    const SymEigen eb = sym_eigen(hb), el = sym_eigen(law);
    for (int i = 0; i < 2; ++i)
        CHECK(el.lambda[i] == doctest::Approx(inverse_hessian_law(eb.lambda[i])).epsilon(1e-12));
}

TEST_CASE("rotated phase") {
    const RotationAngle a4 = RotationAngle::quarter_pi();

    SUBCASE("constant n*pi/4 phase maps to exactly zero") {
        const Grid g = make_grid_box(2, -1.0, 1.0, 33);
        ConvexPotential u = require_convex_potential(sample(g, [](const double* x) {
            return 0.5 * (x[0] * x[0] + x[1] * x[1]) + 0.1 * std::pow(x[0], 4);
        }));
        const RotatedPotential r = rotate(u, a4);
        const PhaseField psi = lagrot::test::phase_field(g, [](const double*) {
            return 2.0 * kPi / 4.0;
        });
        const RotatedPhase pb = rotated_phase(psi, r);
        for (double v : pb.psibar.values) CHECK(v == 0.0);
    }

    SUBCASE("bowl reverse map is x/sqrt2 and psibar follows the closed form") {
        const Grid g = make_grid_1d(-1.0, 1.0, 129);
        ConvexPotential u = require_convex_potential(
            sample(g, [](const double* x) { return 0.5 * x[0] * x[0]; }));
        const RotatedPotential r = rotate(u, a4);
        const PhaseField psi = lagrot::test::phase_field(g, [](const double* x) {
            return 0.5 + 0.2 * std::sin(2.0 * x[0]);
        });
        const RotatedPhase pb = rotated_phase(psi, r);
        const Grid& dg = pb.psibar.grid;
        double worst = 0;
        for (std::int64_t k = 2; k < dg.node_count() - 2; ++k) {
            const double xb = dg.origin[0] + dg.spacing * k;
            CHECK(std::abs(r.reverse_map(k, 0) - xb / std::sqrt(2.0)) <= 1e-8);
            const double expected = 0.5 + 0.2 * std::sin(2.0 * xb / std::sqrt(2.0)) - kPi / 4.0;
            worst = std::max(worst, std::abs(pb.psibar.values[k] - expected));
        }
        CHECK(worst <= 5.0 * dg.spacing * dg.spacing);  // interpolation is O(h^2)
    }

    SUBCASE("reverse-map contraction factor for lambda = 3") {
        const Grid g = make_grid_1d(-1.0, 1.0, 129);
        ConvexPotential u = require_convex_potential(
            sample(g, [](const double* x) { return 1.5 * x[0] * x[0]; }));
        const RotatedPotential r = rotate(u, a4);
        // dx/dxbar = c (1 - lambda_bar tan alpha) = (1/sqrt2)(1 - 1/2)
        const double expected = (1.0 - 0.5) / std::sqrt(2.0);
        const Grid& dg = r.ubar.grid;
        for (std::int64_t k = 4; k < dg.node_count() - 4; ++k) {
            const double slope =
                (r.reverse_map(k + 1, 0) - r.reverse_map(k - 1, 0)) / (2.0 * dg.spacing);
            CHECK(slope == doctest::Approx(expected).epsilon(1e-4));
        }
    }
}

TEST_CASE("order preservation through the rotation") {
    const RotationAngle a4 = RotationAngle::quarter_pi();
    const Grid g = make_grid_1d(-1.0, 1.0, 129);

    SUBCASE("constant offset passes through with the same gap") {
        ConvexPotential u = require_convex_potential(
            sample(g, [](const double* x) { return 0.5 * x[0] * x[0] + std::pow(x[0], 4); }));
        ScalarField vf = u.field;
        for (auto& v : vf.values) v += 1.0;
        ConvexPotential v = require_convex_potential(vf);
        const RotatedPotential ru = rotate(u, a4);
        const RotatedPotential rv = rotate(v, a4);
        REQUIRE(ru.ubar.grid.same_layout(rv.ubar.grid));
        for (std::int64_t k = 0; k < ru.ubar.grid.node_count(); ++k) {
            CHECK(ru.ubar.values[k] <= rv.ubar.values[k] + 1e-10);
            CHECK(rv.ubar.values[k] - ru.ubar.values[k] == doctest::Approx(1.0).epsilon(1e-9));
        }
    }

    SUBCASE("x^2/2 vs x^2/2 + x^4 via the brute-force oracle") {
        ConvexPotential u = require_convex_potential(
            sample(g, [](const double* x) { return 0.5 * x[0] * x[0]; }));
        ConvexPotential v = require_convex_potential(
            sample(g, [](const double* x) { return 0.5 * x[0] * x[0] + std::pow(x[0], 4); }));
        const OrderPreservationResult res = order_preservation_check(u, v, a4);
        CHECK(res.pass);
        CHECK(res.compared > 50);

        // independent route: rotate both by brute-force conjugation, compare
        const double c = std::sqrt(0.5), s = std::sqrt(0.5);
        auto brute_ubar = [&](const std::function<double(double)>& f, double xb) {
            double sup = -1e300;
            for (int i = 0; i <= 1280; ++i) {
                const double x = -1.0 + 2.0 * i / 1280.0;
                sup = std::max(sup, x * xb - (s * f(x) + 0.5 * c * x * x));
            }
            return (0.5 * c * xb * xb - sup) / s;
        };
        for (double xb : {-0.5, -0.1, 0.2, 0.6}) {
            const double bu = brute_ubar([](double x) { return 0.5 * x * x; }, xb);
            const double bv =
                brute_ubar([](double x) { return 0.5 * x * x + std::pow(x, 4); }, xb);
            CHECK(bu <= bv + 1e-12);
        }
    }

    SUBCASE("seeded random pairs pass") {
        Rng rng(2024);
        int passed = 0;
        for (int trial = 0; trial < 20; ++trial) {
            const ScalarField a = random_convex_potential(rng, g);
            ScalarField b = a;
            const ScalarField extra = random_convex_potential(rng, g, 0.0, 0.3, 1, 1);
            for (size_t i = 0; i < b.values.size(); ++i)
                b.values[i] += extra.values[i] + 0.05;
            ConvexPotential u = make_convex_potential(a);
            ConvexPotential v = make_convex_potential(b);
            REQUIRE(u.certified);
            REQUIRE(v.certified);
            if (order_preservation_check(u, v, a4).pass) ++passed;
        }
        CHECK(passed == 20);
    }

    SUBCASE("precondition u <= v enforced") {
        ConvexPotential u = require_convex_potential(
            sample(g, [](const double* x) { return 0.5 * x[0] * x[0] + 1.0; }));
        ConvexPotential v = require_convex_potential(
            sample(g, [](const double* x) { return 0.5 * x[0] * x[0]; }));
        CHECK_THROWS_AS(order_preservation_check(u, v, a4), std::invalid_argument);
    }
}

TEST_CASE("round trip: rotate down then up reproduces the potential") {
    const RotationAngle a4 = RotationAngle::quarter_pi();
    const Grid g = make_grid_1d(-1.0, 1.0, 257);
    const ScalarField u0 = sample(g, [](const double* x) {
        return 0.5 * x[0] * x[0] + std::pow(x[0], 4) / 12.0;
    });
    ConvexPotential u = require_convex_potential(u0);
    const RotatedPotential r = rotate(u, a4);
    const ScalarField back = rotate_up(r.ubar, a4);
    double worst = 0;
    for (int i = 0; i < g.shape[0]; ++i) {
        const double x = g.origin[0] + g.spacing * i;
        if (x < back.grid.origin[0] + 2 * back.grid.spacing ||
            x > back.grid.axis_max(0) - 2 * back.grid.spacing)
            continue;
        worst = std::max(worst, std::abs(interp_scalar(back, &x, 0.0) - u0.values[i]));
    }
    CHECK(worst <= 5.0 * g.spacing);
}

TEST_CASE("rotate rejects non-convex input; bounds always certified") {
    const Grid g = make_grid_1d(-1.0, 1.0, 65);
    ConvexPotential bad =
        make_convex_potential(sample(g, [](const double* x) { return -x[0] * x[0]; }));
    CHECK_THROWS_AS(rotate(bad, RotationAngle::quarter_pi()), std::invalid_argument);

    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const Grid gg = trial % 2 == 0 ? make_grid_1d(-1.0, 1.0, 101)
                                       : make_grid_box(2, -1.0, 1.0, 41);
        ConvexPotential u = make_convex_potential(random_convex_potential(rng, gg));
        REQUIRE(u.certified);
        const RotatedPotential r = rotate(u, RotationAngle::quarter_pi());
        CHECK(r.bounds.violations == 0);
        CHECK(r.bounds.lambda_max <= 1.0 + r.bounds.tolerance);
        CHECK(r.bounds.lambda_min >= -1.0 - r.bounds.tolerance);
    }
}

TEST_CASE("general angle keeps the shifted bounds") {
    const Grid g = make_grid_1d(-1.0, 1.0, 129);
    ConvexPotential u = require_convex_potential(
        sample(g, [](const double* x) { return x[0] * x[0] + 0.2 * std::pow(x[0], 4); }));
    for (double deg : {30.0, 60.0}) {
        const RotationAngle a = RotationAngle::from_degrees(deg);
        const RotatedPotential r = rotate(u, a);
        CHECK(r.bounds.violations == 0);
        // angle shift still holds at general alpha
        const AngleShiftResult res = angle_shift_check(u, r);
        CHECK(res.max_deviation <= 10.0 * g.spacing);
    }
}
