#pragma once

#include <cstdint>
#include <random>

#include "lagrot/field.hpp"

namespace lagrot {

/// mt19937_64 with explicit bit-to-double mapping so draws are pinned across
/// standard-library implementations.
struct Rng {
    std::mt19937_64 gen;

    explicit Rng(std::uint64_t seed) : gen(seed) {}

    double uniform() { return (gen() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int uniform_int(int lo, int hi) {  // inclusive
        return lo + static_cast<int>(uniform() * (hi - lo + 1 - 1e-12));
    }
    void unit_vector(int dim, double* e);
};

/// gamma/2 |x|^2 + random positive quadratics a <e,x>^2/2 + random quartics
/// b <d,x>^4; always certifiably convex.
ScalarField random_convex_potential(Rng& rng, const Grid& g, double gamma_lo = 0.1,
                                    double gamma_hi = 0.5, int max_quadratics = 3,
                                    int max_quartics = 2);

/// Random symmetric matrix with entries in [-range, range].
SymMat random_sym(Rng& rng, int dim, double range);
/// Random positive semidefinite matrix B^T B with B entries in [-range, range].
SymMat random_psd(Rng& rng, int dim, double range);

}  // namespace lagrot
