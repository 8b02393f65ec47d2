#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lagrot/eigen_sym.hpp"
#include "lagrot/phase_op.hpp"
#include "lagrot/rng.hpp"
#include "support.hpp"

using namespace lagrot;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("phase_of basics") {
    CHECK(phase_of(SymMat::identity(2)) == doctest::Approx(kPi / 2).epsilon(1e-14));
    CHECK(phase_of(SymMat::identity(3)) == doctest::Approx(3 * kPi / 4).epsilon(1e-14));
    // arctan(3) + arctan(1/2), frozen from the scalar arctan oracle
    const SymMat d = SymMat::diag(2, {3.0, 0.5, 0.0});
    CHECK(std::abs(phase_of(d) - 1.7126933813990605) <= 1e-10);
    CHECK(std::abs(phase_of(d) - (std::atan(3.0) + std::atan(0.5))) <= 1e-14);
}

TEST_CASE("sigma form of the constant phase equation") {
    CHECK(sigma_form_residual(SymMat::identity(2), kPi / 2) == doctest::Approx(0.0));

    const SymMat h23 = SymMat::diag(2, {2.0, 3.0, 0.0});
    CHECK(std::abs(sigma_form_residual(h23, std::atan(2.0) + std::atan(3.0))) <= 1e-12);

    // n=3, H=I: sigma = (3, 3, 1), phase 3pi/4
    CHECK(std::abs(sigma_form_residual(SymMat::identity(3), 3 * kPi / 4)) <= 1e-12);

    // equivalence against phase_of on random matrices, dims 2 and 3
    Rng rng(321);
    for (int trial = 0; trial < 1000; ++trial) {
        const SymMat H = random_sym(rng, 2 + trial % 2, 3.0);
        CHECK(std::abs(sigma_form_residual(H, phase_of(H))) <= 1e-10);
    }
}

TEST_CASE("log-eigenvalue dual form") {
    CHECK(ma_dual_residual(SymMat::identity(2), 0.0) == doctest::Approx(0.0));
    const double e = std::exp(1.0);
    CHECK(std::abs(ma_dual_residual(SymMat::diag(2, {e, e, 0.0}), 2.0)) <= 1e-14);

    // determinant cofactor oracle on seeded SPD matrices
    Rng rng(55);
    for (int trial = 0; trial < 100; ++trial) {
        SymMat H = random_psd(rng, 2, 1.5);
        H.at(0, 0) += 0.3;
        H.at(1, 1) += 0.3;
        const double det = H.at(0, 0) * H.at(1, 1) - H.at(0, 1) * H.at(0, 1);
        CHECK(std::abs(ma_dual_residual(H, std::log(det))) <= 1e-12);
    }

    SymMat bad = SymMat::diag(2, {1.0, -0.5, 0.0});
    CHECK_THROWS_AS(ma_dual_residual(bad, 0.0), std::domain_error);
}

TEST_CASE("linearization") {
    const SymMat a0 = linearize(SymMat::zero(2));
    CHECK(a0.at(0, 0) == doctest::Approx(1.0));
    CHECK(a0.at(1, 1) == doctest::Approx(1.0));
    CHECK(a0.at(0, 1) == doctest::Approx(0.0));

    const SymMat a1 = linearize(SymMat::diag(2, {1.0, 0.0, 0.0}));
    CHECK(a1.at(0, 0) == doctest::Approx(0.5));
    CHECK(a1.at(1, 1) == doctest::Approx(1.0));

    // central finite-difference directional derivative oracle
    Rng rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const int dim = 1 + trial % 3;
        const SymMat H = random_sym(rng, dim, 2.0);
        const SymMat E = random_sym(rng, dim, 1.0);
        const SymMat A = linearize(H);
        const double t = 1e-6;
        SymMat Hp = H, Hm = H;
        for (int q = 0; q < SymMat::tri_size(dim); ++q) {
            Hp.tri[q] += t * E.tri[q];
            Hm.tri[q] -= t * E.tri[q];
        }
        const double fd = (phase_of(Hp) - phase_of(Hm)) / (2 * t);
        double tr = 0;
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b) tr += A.at(a, b) * E.at(b, a);
        CHECK(std::abs(fd - tr) <= 1e-6 * std::max(1.0, std::abs(tr)));
    }

    // eigenvalues of A lie in (0, 1]
    for (int trial = 0; trial < 100; ++trial) {
        const SymMat H = random_sym(rng, 3, 5.0);
        const SymEigen e = sym_eigen(linearize(H));
        CHECK(e.lambda[0] > 0.0);
        CHECK(e.lambda[2] <= 1.0 + 1e-12);
    }
}

TEST_CASE("phase invariance under orthogonal conjugation") {
    Rng rng(13);
    for (int trial = 0; trial < 300; ++trial) {
        const SymMat H = random_sym(rng, 2, 3.0);
        const double th = rng.uniform(0.0, 2 * kPi);
        const double q[2][2] = {{std::cos(th), -std::sin(th)}, {std::sin(th), std::cos(th)}};
        SymMat R = SymMat::zero(2);
        for (int a = 0; a < 2; ++a)
            for (int b = a; b < 2; ++b) {
                double s = 0;
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j) s += q[a][i] * H.at(i, j) * q[b][j];
                R.at(a, b) = s;
            }
        CHECK(std::abs(phase_of(R) - phase_of(H)) <= 1e-10);
    }
}

TEST_CASE("phase monotonicity and concavity on the convex cone") {
    Rng rng(17);
    for (int trial = 0; trial < 1000; ++trial) {
        const int dim = 2 + trial % 2;
        const SymMat H = random_sym(rng, dim, 2.0);
        const SymMat P = random_psd(rng, dim, 1.0);
        SymMat Hp = H;
        for (int q = 0; q < SymMat::tri_size(dim); ++q) Hp.tri[q] += P.tri[q];
        CHECK(phase_of(Hp) >= phase_of(H) - 1e-12);

        const SymMat A = random_psd(rng, dim, 1.5);
        const SymMat B = random_psd(rng, dim, 1.5);
        SymMat mid = A;
        for (int q = 0; q < SymMat::tri_size(dim); ++q)
            mid.tri[q] = 0.5 * (A.tri[q] + B.tri[q]);
        CHECK(phase_of(mid) >= 0.5 * (phase_of(A) + phase_of(B)) - 1e-10);
    }
}

TEST_CASE("modified concave extension") {
    // agrees with the arctangent operator on the PSD cone
    Rng rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        const SymMat P = random_psd(rng, 2, 2.0);
        CHECK(modified_concave_value(P) == doctest::Approx(phase_of(P)).epsilon(1e-13));
    }
    // linear below zero
    const SymMat m = SymMat::diag(2, {-2.0, 1.0, 0.0});
    CHECK(modified_concave_value(m) == doctest::Approx(-2.0 + std::atan(1.0)));
    const SymMat a = modified_concave_linearize(m);
    CHECK(a.at(0, 0) == doctest::Approx(1.0));  // slope 1 on the negative side
    CHECK(a.at(1, 1) == doctest::Approx(0.5));
}

TEST_CASE("admissibility range and criticality classification") {
    const Grid g2 = make_grid_box(2, -1.0, 1.0, 9);
    PhaseField p2 = lagrot::test::phase_field(g2, [](const double*) { return 0.1; });
    AdmissibilityReport r = admissibility(p2);
    CHECK(r.admissible);
    CHECK(r.n_supercritical == g2.node_count());  // threshold (n-2)pi/2 = 0

    const Grid g3 = make_grid_box(3, -1.0, 1.0, 5);
    PhaseField p3 = lagrot::test::phase_field(g3, [](const double*) { return kPi / 2; });
    r = admissibility(p3);
    CHECK(r.admissible);
    CHECK(r.n_critical == g3.node_count());

    PhaseField p3bad = lagrot::test::phase_field(g3, [](const double*) { return 3 * kPi / 2; });
    r = admissibility(p3bad);
    CHECK(!r.admissible);
    CHECK(r.bad_node == 0);

    PhaseField pneg = lagrot::test::phase_field(g2, [](const double* x) { return x[0]; });
    CHECK(!admissibility(pneg).admissible);
}
