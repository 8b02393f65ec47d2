#pragma once

#include <stdexcept>

#include "lagrot/convex.hpp"
#include "lagrot/phase_op.hpp"

namespace lagrot {

struct RotationAngle {
    double alpha = 0.0;  // in (0, pi/2)
    double c = 0.0;      // cos(alpha)
    double s = 0.0;      // sin(alpha)

    static RotationAngle from_radians(double a);
    static RotationAngle from_degrees(double deg);
    static RotationAngle quarter_pi();
};

struct BoundViolationError : std::runtime_error {
    std::int64_t node;
    BoundViolationError(const std::string& msg, std::int64_t node_)
        : std::runtime_error(msg), node(node_) {}
};

struct HessianBoundStats {
    double lambda_min = 0.0, lambda_max = 0.0;
    std::int64_t violations = 0;
    std::int64_t first_violation = -1;
    double tolerance = 0.0;  // tau = 10 * dual spacing
    double lower = 0.0, upper = 0.0;  // certified interval
};

/// Downward rotation of a convex potential: conjugate of s*u + (c/2)|x|^2 on
/// the slope-space grid, assembled into ubar with its derivative fields and
/// the reverse map x(xbar) = c*xbar - s*Dubar(xbar).
struct RotatedPotential {
    ScalarField ubar;
    RotationAngle angle;
    VectorField dubar;        // gradient of ubar
    VectorField reverse_map;  // x(xbar)
    MatrixField hess;         // discrete Hessian of ubar
    VectorField lambda_bar;   // ascending eigenvalues per node
    HessianBoundStats bounds;
    Grid source_grid;
    ScalarField source;       // the rotated potential's pre-image
};

/// Throws std::invalid_argument for non-convex input, BoundViolationError if
/// the rotated eigenvalues leave [-tan(a)-tau, cot(a)+tau].
RotatedPotential rotate(const ConvexPotential& u, RotationAngle angle);

/// Eigenvalue-bound check on interior nodes of a claimed rotated potential.
HessianBoundStats check_hessian_bounds(const ScalarField& ubar, RotationAngle angle);

struct AngleShiftResult {
    double max_deviation = 0.0;
    double coverage = 0.0;       // matched / interior source nodes
    std::int64_t matched = 0;
};

/// Pairs arctan(lambda_i(D2u)) - alpha against arctan(lambda_bar_i) at
/// forward-mapped points (ascending order both sides), sup over matched
/// interior nodes; nodes mapping outside the dual grid are skipped.
AngleShiftResult angle_shift_check(const ConvexPotential& u, const RotatedPotential& r);

inline constexpr double kEpsClamp = 1e-8;

/// lambda = (lambda_bar + tan a)/(1 - lambda_bar tan a); the singular side
/// throws std::overflow_error (coordinate blowup, never silently clamped).
double inverse_hessian_law(double lambda_bar);
double inverse_hessian_law(double lambda_bar, RotationAngle angle);
/// lambda_bar = (lambda - tan a)/(1 + lambda tan a).
double forward_hessian_law(double lambda);
double forward_hessian_law(double lambda, RotationAngle angle);
/// Matrix versions apply the scalar law in the eigenframe.
SymMat inverse_hessian_law(const SymMat& Hbar, RotationAngle angle);

struct RotatedPhase {
    ScalarField psibar;  // on the dual grid
    RotationAngle angle;
};

/// psibar(xbar) = psi(x(xbar)) - n*alpha via multilinear sampling along the
/// reverse map; reverse points outside psi's domain by more than one source
/// spacing raise std::domain_error.
RotatedPhase rotated_phase(const PhaseField& psi, const RotatedPotential& r);

struct OrderPreservationResult {
    bool pass = false;
    double max_violation = 0.0;  // max(ubar - vbar) over common nodes
    double tolerance = 0.0;
    std::int64_t compared = 0;
};

/// u <= v pointwise must give ubar <= vbar + 10h on common dual nodes.
OrderPreservationResult order_preservation_check(const ConvexPotential& u,
                                                 const ConvexPotential& v, RotationAngle angle);

/// Upward (inverse) rotation, a test utility with a guarded domain: requires
/// eigenvalues of D2ubar in (-tan a + delta, cot a] so the recovered
/// potential is convex.
ScalarField rotate_up(const ScalarField& ubar, RotationAngle angle, double delta = 0.05);

}  // namespace lagrot
