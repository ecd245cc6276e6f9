#include "lowrank/penalty.hpp"

#include <algorithm>
#include <cmath>

#include "lowrank/errors.hpp"

namespace lowrank {

McpParams::McpParams(double a_in, double lambda_in, double u_l_in)
    : a(a_in), lambda(lambda_in), u_l(u_l_in) {
    if (!(a > 0.0)) throw InvalidInput("McpParams: a must be positive");
    if (!(lambda >= 0.0)) throw InvalidInput("McpParams: lambda must be nonnegative");
    if (!(u_l > 0.0)) throw InvalidInput("McpParams: u_l must be positive");
    if (!(a * u_l < 1.0)) throw InvalidInput("McpParams: requires a * u_l < 1");
}

double mcp_value(double t, const McpParams& prm) {
    if (t < 0.0) throw InvalidInput("mcp_value: t must be nonnegative");
    const double cap = 0.5 * prm.a * prm.lambda * prm.lambda;
    if (t >= prm.band_edge()) return cap;
    // The cap also bounds rounding of the closed form near the band edge.
    return std::min(prm.lambda * t - t * t / (2.0 * prm.a), cap);
}

double mcp_derivative(double t, const McpParams& prm) {
    if (!(t > 0.0)) throw InvalidInput("mcp_derivative: t must be positive");
    return std::max(prm.lambda - t / prm.a, 0.0);
}

double mcp_second_derivative(double t, const McpParams& prm) {
    if (!(t > 0.0) || !(t < prm.band_edge()))
        throw InvalidInput("mcp_second_derivative: t must lie strictly inside (0, a*lambda)");
    return -1.0 / prm.a;
}

double mcp_prox_scalar(double v, double step, const McpParams& prm) {
    if (!(step > 0.0)) throw InvalidInput("mcp_prox_scalar: step must be positive");
    if (!(step < prm.a)) throw InvalidStep("mcp_prox_scalar: requires step < a");
    if (v >= prm.band_edge()) return v;
    if (v <= step * prm.lambda) return 0.0;
    return (v - step * prm.lambda) / (1.0 - step / prm.a);
}

double mcp_spectral_value(std::span<const double> eigenvalues, const McpParams& prm) {
    double sigma_max = 0.0;
    for (double w : eigenvalues) sigma_max = std::max(sigma_max, w);
    // Absolute floor keeps rounding dust on near-zero matrices from
    // tripping the PSD check.
    const double cutoff = -1e-6 * std::max(sigma_max, 1e-8);
    double total = 0.0;
    for (double w : eigenvalues) {
        if (w < cutoff)
            throw NotPsd("mcp_spectral_value: matrix has a significantly negative eigenvalue");
        total += mcp_value(std::max(w, 0.0), prm);
    }
    return total;
}

double mcp_spectral_value(const SymMatrix& x, const McpParams& prm) {
    return mcp_spectral_value(eig_sym(x).eigenvalues, prm);
}

SymMatrix mcp_spectral_prox(const SymMatrix& x, double step, const McpParams& prm) {
    return apply_spectral(x, [&](double w) {
        return mcp_prox_scalar(std::max(w, 0.0), step, prm);
    });
}

} // namespace lowrank
