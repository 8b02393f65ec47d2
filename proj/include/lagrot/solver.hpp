#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lagrot/phase_op.hpp"

namespace lagrot {

enum class OperatorVariant { arctan, modified_concave, ma_dual };

std::string variant_name(OperatorVariant v);
OperatorVariant variant_from_name(const std::string& name);

/// Dirichlet problem for sum arctan lambda_i(D2u) = psi(x) (or a variant) on
/// a rectangular grid, dim <= 2. Boundary values are a per-node map covering
/// every boundary node.
struct DirichletProblem {
    Grid grid;
    ScalarField phase;
    std::vector<std::pair<std::int64_t, double>> boundary;
    OperatorVariant variant = OperatorVariant::arctan;
};

struct SolveOptions {
    double tol = 1e-8;
    int max_iter = 100;
    double backtrack = 0.5;
    double min_step = 9.5367431640625e-7;  // 2^-20
    bool quiet = true;
};

struct SolveReport {
    std::vector<double> residual_history;  // accepted sup-norm residuals, initial first
    double final_residual = 0.0;
    int iterations = 0;
    int damping_events = 0;
    double eig_min = 0.0, eig_max = 0.0;  // interior Hessian eigenvalue range
    bool convex = false;                  // final convexity certificate
    bool converged = false;
    std::string error;
};

struct SolveResult {
    ScalarField u;
    SolveReport report;
};

/// Damped Newton with frozen nondivergence coefficients per step and direct
/// sparse factorization. Non-convergence is reported, not thrown.
SolveResult solve(const DirichletProblem& p, const SolveOptions& opts = {});

struct ContinuationResult {
    ScalarField u;
    std::vector<SolveReport> steps;
    bool converged = false;
    double last_good_t = 0.0;
};

/// Warm-started homotopy from the constant-phase problem: the right side at
/// step t is (1-t)*base + t*psi, base = n*pi/4 (0 for the log-det variant).
ContinuationResult continuation_solve(const DirichletProblem& p, int steps,
                                      const SolveOptions& opts = {});

enum class ProbeFamily { quadratic, quartic };

struct ProbeRow {
    double scale = 0.0;
    double osc = 0.0;        // oscillation of the solution over the half box
    double hess_norm0 = 0.0; // |D2u(0)| (spectral norm)
};

struct ProbeResult {
    std::vector<ProbeRow> rows;
    int exponent = 0;     // 2n - 2
    double c1 = 0.0;      // ln|D2u(0)| ~ ln(c1) + c2 * osc^exponent
    double c2 = 0.0;
    double r_squared = 0.0;
};

struct ProbeOptions {
    ProbeFamily family = ProbeFamily::quartic;
    int count = 8;
    int n = 33;           // nodes per axis on [-1,1]^2
    double scale_min = 0.5;
    double scale_max = 4.0;
    SolveOptions solve;
};

/// Scaled-oscillation solve family: solves with psi and boundary manufactured
/// from scale * base potential, then fits ln|D2u(0)| against osc^(2n-2).
/// Purely empirical; finiteness is the only contract.
ProbeResult hessian_estimate_probe(const ProbeOptions& opts = {});

/// Manufactured-problem helper: boundary map and exact phase for a given
/// potential (used by the probe, tests, and the verify suites).
DirichletProblem manufactured_problem(const ScalarField& ustar, OperatorVariant variant);

}  // namespace lagrot
