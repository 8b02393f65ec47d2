#include "lagrot/eigen_sym.hpp"

#include <algorithm>
#include <cmath>

namespace lagrot {

namespace {

SymEigen eigen_1(const SymMat& m) {
    SymEigen e;
    e.dim = 1;
    e.lambda[0] = m.tri[0];
    e.vec[0] = 1.0;
    return e;
}

SymEigen eigen_2(const SymMat& m) {
    SymEigen e;
    e.dim = 2;
    const double a = m.at(0, 0), b = m.at(0, 1), c = m.at(1, 1);
    const double mean = 0.5 * (a + c);
    const double disc = std::hypot(0.5 * (a - c), b);
    const double l0 = mean - disc, l1 = mean + disc;
    e.lambda[0] = l0;
    e.lambda[1] = l1;

    double v0[2], v1[2];
    if (std::abs(b) < 1e-300 * (std::abs(a) + std::abs(c) + 1.0)) {
        if (a <= c) {
            v0[0] = 1; v0[1] = 0;
            v1[0] = 0; v1[1] = 1;
        } else {
            v0[0] = 0; v0[1] = 1;
            v1[0] = 1; v1[1] = 0;
        }
    } else {
        // eigenvector for l1 from the better-conditioned row
        if (std::abs(l1 - a) > std::abs(l1 - c)) {
            v1[0] = b; v1[1] = l1 - a;
        } else {
            v1[0] = l1 - c; v1[1] = b;
        }
        const double n1 = std::hypot(v1[0], v1[1]);
        v1[0] /= n1; v1[1] /= n1;
        v0[0] = -v1[1]; v0[1] = v1[0];
    }
    e.vec[0 * 2 + 0] = v0[0];
    e.vec[1 * 2 + 0] = v0[1];
    e.vec[0 * 2 + 1] = v1[0];
    e.vec[1 * 2 + 1] = v1[1];
    return e;
}

// cyclic Jacobi for 3x3
SymEigen eigen_3(const SymMat& m) {
    double A[3][3];
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) A[a][b] = m.at(a, b);
    double V[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

    double scale = 0.0;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) scale = std::max(scale, std::abs(A[a][b]));
    const double tol = (scale > 0 ? scale : 1.0) * 1e-15;

    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = std::abs(A[0][1]) + std::abs(A[0][2]) + std::abs(A[1][2]);
        if (off < tol) break;
        for (int p = 0; p < 2; ++p) {
            for (int q = p + 1; q < 3; ++q) {
                if (std::abs(A[p][q]) < tol * 1e-2) continue;
                const double theta = 0.5 * (A[q][q] - A[p][p]) / A[p][q];
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double cs = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * cs;
                for (int r = 0; r < 3; ++r) {
                    const double arp = A[r][p], arq = A[r][q];
                    A[r][p] = cs * arp - sn * arq;
                    A[r][q] = sn * arp + cs * arq;
                }
                for (int r = 0; r < 3; ++r) {
                    const double apr = A[p][r], aqr = A[q][r];
                    A[p][r] = cs * apr - sn * aqr;
                    A[q][r] = sn * apr + cs * aqr;
                }
                for (int r = 0; r < 3; ++r) {
                    const double vrp = V[r][p], vrq = V[r][q];
                    V[r][p] = cs * vrp - sn * vrq;
                    V[r][q] = sn * vrp + cs * vrq;
                }
            }
        }
    }

    int order[3] = {0, 1, 2};
    std::sort(order, order + 3, [&](int i, int j) { return A[i][i] < A[j][j]; });

    SymEigen e;
    e.dim = 3;
    for (int i = 0; i < 3; ++i) {
        e.lambda[i] = A[order[i]][order[i]];
        for (int r = 0; r < 3; ++r) e.vec[r * 3 + i] = V[r][order[i]];
    }
    return e;
}

}  // namespace

SymEigen sym_eigen(const SymMat& m) {
    switch (m.dim) {
        case 1: return eigen_1(m);
        case 2: return eigen_2(m);
        case 3: return eigen_3(m);
        default: throw std::invalid_argument("sym_eigen: dim must be 1, 2, or 3");
    }
}

VectorField eigenvalues_field(const MatrixField& M) {
    const int d = M.grid.dim;
    VectorField out(M.grid, d);
    const std::int64_t n = M.grid.node_count();
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < n; ++k) {
        const SymEigen e = sym_eigen(M.matrix(k));
        for (int i = 0; i < d; ++i) out.values[k * d + i] = e.lambda[i];
    }
    return out;
}

SymMat eigen_map(const SymMat& m, double (*f)(double)) {
    const SymEigen e = sym_eigen(m);
    SymMat out = SymMat::zero(m.dim);
    for (int a = 0; a < m.dim; ++a) {
        for (int b = a; b < m.dim; ++b) {
            double s = 0;
            for (int i = 0; i < m.dim; ++i)
                s += f(e.lambda[i]) * e.vector(a, i) * e.vector(b, i);
            out.at(a, b) = s;
        }
    }
    return out;
}

}  // namespace lagrot
