#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lagrot/field.hpp"

namespace lagrot {

/// Sum of arctangents of the eigenvalues, in (-n*pi/2, n*pi/2).
double phase_of(const SymMat& H);

/// Residual of the elementary-symmetric-polynomial form of the constant
/// phase equation: cos(c) * sum_k (-1)^k sigma_{2k+1} - sin(c) * sum_k (-1)^k sigma_{2k}.
/// Zero iff phase_of(H) == c (mod pi). Hard-coded for dim <= 3.
double sigma_form_residual(const SymMat& H, double c);

/// log-eigenvalue dual form: sum_i ln(lambda_i) - c = ln(det H) - c.
/// Throws std::domain_error unless H is positive definite.
double ma_dual_residual(const SymMat& H, double c);

/// Derivative of phase_of: A = Q diag(1/(1+lambda_i^2)) Q^T. Eigenvalues of A
/// lie in (0, 1].
SymMat linearize(const SymMat& H);

/// Concave extension variant: f(lambda) = arctan(lambda) for lambda >= 0,
/// lambda below. Off by default in the solver; exposed for experiments.
double modified_concave_value(const SymMat& H);
SymMat modified_concave_linearize(const SymMat& H);

struct PhaseField {
    enum class Regularity { lipschitz, c2alpha };
    ScalarField field;
    Regularity regularity = Regularity::c2alpha;

    int dim() const { return field.grid.dim; }
};

enum class Criticality : std::uint8_t { subcritical = 0, critical = 1, supercritical = 2 };

struct AdmissibilityReport {
    bool admissible = false;
    std::int64_t bad_node = -1;  // first node outside [0, n*pi/2)
    std::int64_t n_subcritical = 0, n_critical = 0, n_supercritical = 0;
    std::vector<Criticality> labels;
};

/// Range check against [0, n*pi/2) plus per-node classification of |psi|
/// against the critical level (n-2)*pi/2.
AdmissibilityReport admissibility(const PhaseField& psi);

}  // namespace lagrot
