// Timings of the OpenMP kernels against their serial reference
// implementations on representative field sizes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>

#include <omp.h>

#include "lagrot/convex.hpp"
#include "lagrot/geometry.hpp"
#include "lagrot/reference.hpp"
#include "lagrot/stencil.hpp"

using namespace lagrot;

namespace {

double now() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

template <typename F>
double time_best_of(int reps, F&& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const double t0 = now();
        f();
        best = std::min(best, now() - t0);
    }
    return best;
}

void row(const char* name, double serial, double parallel) {
    std::printf("%-28s %10.4f ms %10.4f ms %8.2fx\n", name, serial * 1e3, parallel * 1e3,
                serial / parallel);
}

ScalarField smooth_field(const Grid& g) {
    ScalarField f(g);
    for (std::int64_t k = 0; k < g.node_count(); ++k) {
        const auto x = g.coord(g.unindex(k));
        double v = 0;
        for (int a = 0; a < g.dim; ++a) v += 0.5 * x[a] * x[a] + 0.1 * std::sin(3.0 * x[a]);
        f.values[k] = v;
    }
    return f;
}

}  // namespace

int main(int argc, char** argv) {
    bool quick = false;
    for (int i = 1; i < argc; ++i)
        if (std::strcmp(argv[i], "--quick") == 0) quick = true;

    const int n = quick ? 65 : 513;
    const int nleg = quick ? 65 : 257;
    const int nvmo = quick ? 33 : 129;
    const int reps = quick ? 1 : 3;

    std::printf("threads: %d\n", omp_get_max_threads());
    std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");

    const Grid g = make_grid_box(2, -1.0, 1.0, n);
    const ScalarField f = smooth_field(g);

    {
        MatrixField a, b;
        const double ts = time_best_of(reps, [&] { a = ref::hessian(f); });
        const double tp = time_best_of(reps, [&] { b = hessian(f); });
        row("hessian 2d", ts, tp);
    }
    {
        const Grid gl = make_grid_box(2, -1.0, 1.0, nleg);
        ScalarField u(gl);
        for (std::int64_t k = 0; k < gl.node_count(); ++k) {
            const auto x = gl.coord(gl.unindex(k));
            u.values[k] = 0.5 * (x[0] * x[0] + x[1] * x[1]) + 0.1 * x[0] * x[0] * x[0] * x[0];
        }
        const Grid dual = auto_dual_grid(u);
        ScalarField a, b;
        const double ts = time_best_of(
            reps, [&] { a = ref::discrete_conjugate(u, dual, ConjugateMode::hull_refined); });
        const double tp = time_best_of(
            reps, [&] { b = discrete_conjugate(u, dual, ConjugateMode::hull_refined); });
        row("legendre 2d (refined)", ts, tp);
    }
    {
        const Grid gg = make_grid_box(2, -1.0, 1.0, nvmo);
        const ScalarField ff = smooth_field(gg);
        const MatrixField M = hessian(ff);
        const double h = gg.spacing;
        const std::vector<double> radii{2 * h, 4 * h, 8 * h};
        VmoTable a, b;
        const double ts = time_best_of(reps, [&] { a = ref::vmo_modulus(M, radii); });
        const double tp = time_best_of(reps, [&] { b = vmo_modulus(M, radii); });
        row("vmo modulus", ts, tp);
    }
    {
        const MatrixField H = hessian(f);
        const InducedMetric metric = induced_metric(H);
        ScalarField a, b;
        const double ts = time_best_of(reps, [&] { a = ref::laplace_beltrami(f, metric); });
        const double tp = time_best_of(reps, [&] { b = laplace_beltrami(f, metric); });
        row("laplace-beltrami", ts, tp);
    }
    return 0;
}
