#pragma once

#include <utility>
#include <vector>

#include "lowrank/matrix.hpp"
#include "lowrank/penalty.hpp"
#include "lowrank/problems.hpp"

namespace lowrank {

// Verifiable stationarity certificate for the penalized empirical
// objective. First-order stationarity is measured as a projected-gradient
// residual (the feasible set is the PSD ball, so the raw gradient need not
// vanish at boundary points). The curvature condition reduces, in the
// regime a * u_l < 1 enforced by McpParams, to the spectrum avoiding the
// open band (0, a*lambda): inside it the penalty curvature -1/a would
// dominate the cost curvature, so certified points must not park there.
struct S3oncCertificate {
    double first_order_residual = 0.0;
    std::vector<std::pair<int, double>> band_violations; // (index, eigenvalue)
    bool second_order_ok = true;
    double tol_zero = 0.0;
    double tol_band = 0.0;
    double kkt_tol = 0.0;
    double step_used = 0.0; // eta of the projected-gradient map
    bool passed = false;
};

S3oncCertificate check_s3onc(const ProblemInstance& inst, const SampleBatch& batch,
                             const SymMatrix& x, const McpParams& prm, double kkt_tol);

// F_{n,lambda}(x) = F_n(x) + sum_j P_lambda(sigma_j(x)); the quantity the
// RSAA stage descends and both certificate inequalities compare.
double penalized_objective(const ProblemInstance& inst, const SampleBatch& batch,
                           const SymMatrix& x, const McpParams& prm);

struct GapCheck {
    bool passed = false;
    double gap = 0.0; // lhs - rhs, negative when the inequality holds strictly
    double lhs = 0.0; // F_{n,lambda}(x_l1)
    double rhs = 0.0; // F_{n,lambda}(X*) + lambda * ||X*||_*
};

// Initializer-quality inequality: the nuclear-norm minimizer's penalized
// objective is at most F_{n,lambda}(X*) + lambda*||X*||_*. Holds exactly
// for the exact minimizer; slack absorbs solver tolerance.
GapCheck check_initial_gap(const ProblemInstance& inst, const SampleBatch& batch,
                           const SymMatrix& x_l1, const McpParams& prm, double slack);

} // namespace lowrank
