#include "lagrot/rng.hpp"

#include <cmath>
#include <numbers>

namespace lagrot {

void Rng::unit_vector(int dim, double* e) {
    if (dim == 1) {
        e[0] = uniform() < 0.5 ? -1.0 : 1.0;
        return;
    }
    if (dim == 2) {
        const double th = uniform(0.0, std::numbers::pi);
        e[0] = std::cos(th);
        e[1] = std::sin(th);
        return;
    }
    const double z = uniform(-1.0, 1.0);
    const double th = uniform(0.0, 2.0 * std::numbers::pi);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    e[0] = r * std::cos(th);
    e[1] = r * std::sin(th);
    e[2] = z;
}

ScalarField random_convex_potential(Rng& rng, const Grid& g, double gamma_lo, double gamma_hi,
                                    int max_quadratics, int max_quartics) {
    const int d = g.dim;
    const double gamma = rng.uniform(gamma_lo, gamma_hi);
    const int nq = rng.uniform_int(1, max_quadratics);
    const int n4 = rng.uniform_int(0, max_quartics);

    struct Term {
        double coeff;
        double e[3];
    };
    std::vector<Term> quads(nq), quarts(n4);
    for (Term& t : quads) {
        t.coeff = rng.uniform(0.0, 3.0);
        rng.unit_vector(d, t.e);
    }
    for (Term& t : quarts) {
        t.coeff = rng.uniform(0.0, 1.5);
        rng.unit_vector(d, t.e);
    }

    ScalarField u(g);
    for (std::int64_t k = 0; k < g.node_count(); ++k) {
        const auto x = g.coord(g.unindex(k));
        double r2 = 0;
        for (int a = 0; a < d; ++a) r2 += x[a] * x[a];
        double v = 0.5 * gamma * r2;
        for (const Term& t : quads) {
            double p = 0;
            for (int a = 0; a < d; ++a) p += t.e[a] * x[a];
            v += 0.5 * t.coeff * p * p;
        }
        for (const Term& t : quarts) {
            double p = 0;
            for (int a = 0; a < d; ++a) p += t.e[a] * x[a];
            v += t.coeff * p * p * p * p;
        }
        u.values[k] = v;
    }
    return u;
}

SymMat random_sym(Rng& rng, int dim, double range) {
    SymMat m = SymMat::zero(dim);
    for (int a = 0; a < dim; ++a)
        for (int b = a; b < dim; ++b) m.at(a, b) = rng.uniform(-range, range);
    return m;
}

SymMat random_psd(Rng& rng, int dim, double range) {
    double B[3][3];
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b) B[a][b] = rng.uniform(-range, range);
    SymMat m = SymMat::zero(dim);
    for (int a = 0; a < dim; ++a)
        for (int b = a; b < dim; ++b) {
            double s = 0;
            for (int c = 0; c < dim; ++c) s += B[c][a] * B[c][b];
            m.at(a, b) = s;
        }
    return m;
}

}  // namespace lagrot
