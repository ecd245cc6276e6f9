#pragma once

#include "lowrank/matrix.hpp"
#include "lowrank/spectral.hpp"

namespace lowrank {

// Minimax concave penalty parameters. The regime a * u_l < 1 is required
// for the thresholding rule (no eigenvalue of a certified point may fall
// strictly inside the band (0, a*lambda)), so it is validated here once
// rather than at every call site.
struct McpParams {
    double a;      // concavity scale, > 0
    double lambda; // penalty level, >= 0
    double u_l;    // eigen-gradient Lipschitz constant, for validation only

    McpParams(double a, double lambda, double u_l = 1.0);

    double band_edge() const { return a * lambda; } // a*lambda
};

// P_lambda(t) = integral_0^t max(a*lambda - u, 0)/a du
//             = lambda*t - t^2/(2a) on [0, a*lambda], a*lambda^2/2 beyond.
double mcp_value(double t, const McpParams& prm);

// P'_lambda(t) = max(lambda - t/a, 0), for t > 0.
double mcp_derivative(double t, const McpParams& prm);

// P''_lambda(t) = -1/a on the open band (0, a*lambda); undefined at the
// endpoints, which are rejected.
double mcp_second_derivative(double t, const McpParams& prm);

// argmin_{t >= 0} { (t - v)^2 / 2 + step * P_lambda(t) }. Requires
// step < a so the objective is strictly convex piecewise and the
// minimizer unique; ties at the kink v = step*lambda resolve to 0.
double mcp_prox_scalar(double v, double step, const McpParams& prm);

// Penalty of the spectrum: sum_j P_lambda(sigma_j(X)). X must be PSD up
// to tolerance; eigenvalues in [-1e-8 * sigma_max, 0) are clipped to 0,
// anything below -1e-6 * sigma_max raises NotPsd.
double mcp_spectral_value(const SymMatrix& x, const McpParams& prm);
double mcp_spectral_value(std::span<const double> eigenvalues, const McpParams& prm);

// Eigenvalue-wise prox: decompose, clip the spectrum to [0, inf), apply
// the scalar prox, reconstruct. Result is PSD.
SymMatrix mcp_spectral_prox(const SymMatrix& x, double step, const McpParams& prm);

} // namespace lowrank
