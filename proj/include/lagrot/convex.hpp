#pragma once

#include <optional>

#include "lagrot/field.hpp"

namespace lagrot {

struct ConvexityReport {
    bool certified = false;
    std::int64_t violating_node = -1;  // first violation, -1 if none
    std::int64_t violations = 0;
    double min_eigenvalue = 0.0;
    double tolerance = 0.0;  // tau = 10 h^2
};

/// Discrete convexity certificate: min Hessian eigenvalue >= -10 h^2 at every
/// interior node.
ConvexityReport convexity_check(const ScalarField& f);

struct ConvexPotential {
    ScalarField field;
    bool certified = false;
    ConvexityReport report;
};

ConvexPotential make_convex_potential(ScalarField f);
/// Same, but throws std::invalid_argument naming the violating node.
ConvexPotential require_convex_potential(ScalarField f);

struct DualSamples {
    ScalarField values;  // grid = dual (slope-space) grid
    bool certified = false;
};

/// Slope-space grid covering the per-axis one-sided slope ranges with the
/// source node counts. Spacing is isotropic (the widest axis decides);
/// narrower axes are padded symmetrically.
Grid auto_dual_grid(const ScalarField& f);

enum class ConjugateMode {
    hull,          // exact discrete sup over nodes (piecewise-linear conjugate)
    hull_refined,  // + local quadratic refinement of the sup (smooth data)
};

/// f*(s) = sup_x [x.s - f(x)] on the dual grid, axis-factored linear-time
/// transform over the lower-hull slopes.
ScalarField discrete_conjugate(const ScalarField& f, const Grid& dual, ConjugateMode mode);

/// Legendre transform of a certified convex potential; output certified.
DualSamples legendre(const ConvexPotential& f, const std::optional<Grid>& dual = {});

/// Lower convex hull of the 1D samples, interpolated back onto the nodes.
ScalarField convex_envelope_1d(const ScalarField& f);

/// Sup-norm gap between the double transform and the convex envelope on the
/// interior. Envelope = f itself when f certifies convex; otherwise 1D only.
double biconjugate_check(const ScalarField& f);

struct SubdiffBox {
    int dim = 0;
    std::array<double, 3> lo{}, hi{};         // per-axis slope interval
    std::array<bool, 3> one_sided{};          // axis touched the boundary
    bool contains(const double* s, double tol) const {
        for (int a = 0; a < dim; ++a)
            if (s[a] < lo[a] - tol || s[a] > hi[a] + tol) return false;
        return true;
    }
};

/// Per-axis [backward slope, forward slope] interval at a grid node.
SubdiffBox subdifferential(const ConvexPotential& f, const NodeIndex& node);

/// Strict-convexity inequality residual
///   2*sqrt(2)*(|u-v|(a) + |u-v|(b)) - |b-a|^2
/// for a shared slope xbar in the subdifferentials of u at a and v at b
/// (membership within h^(1/2), else std::invalid_argument).
double strict_convexity_gap(const ConvexPotential& u, const ConvexPotential& v,
                            const NodeIndex& a, const NodeIndex& b, const double* xbar);

namespace detail {
/// One 1D conjugate line: hull + two-pointer sweep, optional refinement.
/// xs: source coords (ascending, uniform spacing h); fv: contiguous samples;
/// ss: ascending query slopes; out: conjugate values. hull: workspace[nx].
void conjugate_line(const double* xs, int nx, const double* fv, double h, const double* ss,
                    int ns, double* out, bool refined, int* hull);
/// Axis-factored conjugate; `parallel` toggles the OpenMP line loop.
std::vector<double> conjugate_factored(const Grid& src, const std::vector<double>& f,
                                       const Grid& dual, bool refined, bool parallel);
}  // namespace detail

}  // namespace lagrot
