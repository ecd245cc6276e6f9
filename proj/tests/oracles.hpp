#pragma once

// Test-only oracles, kept independent of the implementation paths they
// check: quadrature of the penalty's defining integral, grid search for
// the scalar prox, an iterative matrix prox, directional finite
// differences, and second codings of the theory formulas.

#include <functional>

#include "lowrank/matrix.hpp"
#include "lowrank/penalty.hpp"
#include "lowrank/problems.hpp"
#include "lowrank/theory.hpp"

namespace oracles {

// Integral of max(a*lambda - u, 0)/a over [0, t], by composite Simpson
// with the integrand's kink as a panel boundary (the integrand is
// piecewise linear, so Simpson is exact up to rounding).
double mcp_value_quadrature(double t, double a, double lambda);

// argmin over a uniform grid of the scalar prox objective
// 0.5 (t - v)^2 + step * P_lambda(t) on [0, hi] with `points` samples.
double mcp_prox_grid_search(double v, double step, const lowrank::McpParams& prm, double hi,
                            int points);

// Scalar prox objective value (shared by the grid search and its tests).
double prox_objective(double t, double v, double step, const lowrank::McpParams& prm);

// Projected gradient descent on T |-> 0.5 ||T - X||_F^2 + step * penalty
// over the PSD cone; independent of mcp_prox_scalar.
lowrank::SymMatrix matrix_prox_pgd(const lowrank::SymMatrix& x, double step,
                                   const lowrank::McpParams& prm, int iters = 5000,
                                   double tol = 1e-9);

// Central finite difference of the empirical objective along direction v.
double directional_fd(const lowrank::ProblemInstance& inst, const lowrank::SampleBatch& batch,
                      const lowrank::SymMatrix& x, const lowrank::SymMatrix& v, double h);

// Second, independently factored codings of the theory evaluators.
double lambda_second(const lowrank::theory::TheoryInputs& in);
double risk_bound_i_second(const lowrank::theory::TheoryInputs& in);
double risk_bound_ii_second(const lowrank::theory::TheoryInputs& in);
double condition_i_rhs_second(const lowrank::theory::TheoryInputs& in);
double condition_ii_rhs_second(const lowrank::theory::TheoryInputs& in);
double rank_bound_second(const lowrank::theory::TheoryInputs& in, double epsilon);
double covering_log_second(int r, double radius, double epsilon, int p);
double saa_bound_second(int p, long long n, double scale);

} // namespace oracles
