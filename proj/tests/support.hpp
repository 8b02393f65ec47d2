#pragma once

#include <cmath>
#include <functional>

#include "lagrot/field.hpp"
#include "lagrot/phase_op.hpp"

namespace lagrot::test {

inline ScalarField sample(const Grid& g, const std::function<double(const double*)>& f) {
    ScalarField out(g);
    for (std::int64_t k = 0; k < g.node_count(); ++k) {
        const auto x = g.coord(g.unindex(k));
        out.values[k] = f(x.data());
    }
    return out;
}

inline double sup_diff(const ScalarField& a, const ScalarField& b) {
    double d = 0;
    for (size_t i = 0; i < a.values.size(); ++i)
        d = std::max(d, std::abs(a.values[i] - b.values[i]));
    return d;
}

inline double sup_interior_diff(const ScalarField& a,
                                const std::function<double(const double*)>& f) {
    double d = 0;
    const Grid& g = a.grid;
    for (std::int64_t k = 0; k < g.node_count(); ++k) {
        if (!g.is_interior(g.unindex(k))) continue;
        const auto x = g.coord(g.unindex(k));
        d = std::max(d, std::abs(a.values[k] - f(x.data())));
    }
    return d;
}

inline PhaseField phase_field(const Grid& g, const std::function<double(const double*)>& f) {
    PhaseField p;
    p.field = sample(g, f);
    return p;
}

}  // namespace lagrot::test
