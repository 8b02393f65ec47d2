#pragma once

#include "lagrot/field.hpp"
#include "lagrot/phase_op.hpp"
#include "lagrot/rotation.hpp"

namespace lagrot {

/// g = I + H^2 with inverse and sqrt(det) per node; g >= I always.
struct InducedMetric {
    MatrixField g;
    MatrixField g_inv;
    ScalarField sqrt_det;
};

InducedMetric induced_metric(const MatrixField& H);

/// sqrt(det g) g^{-1} per node, the flux weight of the divergence form.
MatrixField metric_flux_weights(const InducedMetric& metric);

/// Mean curvature of the gradient graph (x, Du): ambient 2n-vector
/// J * (v, Hv) with v = g^{-1} D(psi), plus the g-norm |grad_g psi|_g
/// (which equals the ambient Euclidean norm).
struct MeanCurvature {
    VectorField ambient;  // ncomp = 2n
    ScalarField norm;
};

MeanCurvature mean_curvature(const ScalarField& u, const PhaseField& psi);

/// Divergence-form discretization (1/sqrt(det g)) d_i (sqrt(det g) g^{ij} d_j f)
/// with staggered fluxes; reduces exactly to the 5-point Laplacian for g = I.
/// Boundary nodes are left at zero.
ScalarField laplace_beltrami(const ScalarField& f, const InducedMetric& metric);

/// bm = (1/m) sum of ln sqrt(1 + lambda_k^2) over the m largest eigenvalues;
/// gap = ln(sqrt 2) - bm (the distance to the value at lambda = 1).
struct MaxPrincipleQuantity {
    int m = 0;
    ScalarField bm;
    ScalarField gap;
};

MaxPrincipleQuantity bm_quantity(const VectorField& lambda_bar, int m);

inline constexpr double kBmMax = 0.34657359027997264;  // ln(sqrt(2))

/// Chord-convexity residual C*(b(1)-b(t))^2 - (1-t)^2 with C = 1/b(1)^2,
/// b(t) = ln sqrt(1+t^2); nonnegative on [0,1], domain error outside.
double bm_convexity_gap(double t);

/// d^2/dt^2 of ln sqrt(1+t^2).
double bm_second_derivative(double t);

/// The two chain-rule contributions to the rotated-phase second derivative in
/// the eigenframe, against the direct second difference:
///   direct  = q_i' D2psibar q_i
///   transport = -(1/sqrt2) <Dpsi(x), grad lambda_i>
///   zeroth  = (1/2) (q_i' D2psi(x) q_i) (1 - lambda_i)^2
/// Only defined for the quarter-pi rotation.
struct PhaseHessianTerm {
    // eigenvalue simple and the node deep enough for its own stencils
    bool frame_valid = false;
    // additionally, the differencing footprint clears the gradient-image seam;
    // transport and direct are only meaningful when this holds
    bool valid = false;
    double transport = 0.0;
    double zeroth = 0.0;
    double direct = 0.0;
    double lambda = 0.0;
};

struct PhaseTermsContext {
    RotatedPhase psibar;
    MatrixField psibar_hess;
    std::vector<VectorField> lambda_grad;  // gradient of each ascending eigenvalue field
    VectorField dpsi;                      // on the source grid
    MatrixField d2psi;                     // on the source grid
};

PhaseTermsContext make_phase_terms_context(const PhaseField& psi, const RotatedPotential& r);

std::vector<PhaseHessianTerm> rotated_phase_hessian_terms(const PhaseTermsContext& ctx,
                                                          const RotatedPotential& r,
                                                          const NodeIndex& node);
std::vector<PhaseHessianTerm> rotated_phase_hessian_terms(const PhaseField& psi,
                                                          const RotatedPotential& r,
                                                          const NodeIndex& node);

/// Discrete VMO modulus of a matrix field: for each radius, the sup over
/// fully-contained grid balls of the mean Frobenius deviation from the ball
/// average; reported cumulatively (nondecreasing in r). Radii below 2h are
/// rejected.
struct VmoTable {
    std::vector<double> radius;
    std::vector<double> omega;
};

VmoTable vmo_modulus(const MatrixField& M, std::vector<double> radii);

namespace detail {
/// Integer offsets within Euclidean distance r of a node.
std::vector<std::array<int, 3>> ball_offsets(int dim, double r, double h);
/// Mean Frobenius deviation from the ball average around one center.
double vmo_ball_deviation(const MatrixField& M, const NodeIndex& center,
                          const std::vector<std::array<int, 3>>& offsets);
/// Staggered divergence-form value at one interior node; w = sqrt(det g) g^{-1}.
double laplace_beltrami_at(const ScalarField& f, const InducedMetric& metric,
                           const MatrixField& w, const VectorField& grad, std::int64_t k,
                           const std::array<std::int64_t, 3>& stride);
}  // namespace detail

}  // namespace lagrot
