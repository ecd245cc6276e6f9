#include "lowrank/certificates.hpp"

#include <algorithm>
#include <cmath>

#include "lowrank/errors.hpp"
#include "lowrank/spectral.hpp"

namespace lowrank {

double penalized_objective(const ProblemInstance& inst, const SampleBatch& batch,
                           const SymMatrix& x, const McpParams& prm) {
    return empirical_objective(inst, x, batch) + mcp_spectral_value(x, prm);
}

S3oncCertificate check_s3onc(const ProblemInstance& inst, const SampleBatch& batch,
                             const SymMatrix& x, const McpParams& prm, double kkt_tol) {
    S3oncCertificate cert;
    cert.kkt_tol = kkt_tol;

    const SpectralDecomp d = eig_sym(x);

    // Penalized gradient: grad F_n plus the spectral MCP gradient. The
    // scalar derivative extends one-sidedly to 0 with value lambda, which
    // matches the subgradient the PSD projection selects at zeroed
    // eigenvalues.
    SymMatrix g = empirical_gradient(inst, x, batch);
    g += apply_spectral(d, [&prm](double w) {
        if (w >= prm.band_edge()) return 0.0;
        return prm.lambda - std::max(w, 0.0) / prm.a;
    });

    const double lip = grad_lipschitz_bound(inst, batch);
    cert.step_used = std::min(0.9 * prm.a, 1.0 / lip);

    SymMatrix stepped = x;
    stepped -= cert.step_used * g;
    const SymMatrix projected = project_psd_ball(stepped, inst.radius);
    cert.first_order_residual = frobenius_distance(x, projected) / cert.step_used;

    cert.tol_zero = 1e-8 * std::max(1.0, d.spectral_radius());
    cert.tol_band = 1e-6 * prm.band_edge();
    for (int j = 0; j < d.dim(); ++j) {
        const double w = d.eigenvalues[j];
        if (w > cert.tol_zero && w < prm.band_edge() - cert.tol_band)
            cert.band_violations.emplace_back(j, w);
    }
    cert.second_order_ok = cert.band_violations.empty();
    cert.passed = cert.first_order_residual <= kkt_tol && cert.second_order_ok;
    return cert;
}

GapCheck check_initial_gap(const ProblemInstance& inst, const SampleBatch& batch,
                           const SymMatrix& x_l1, const McpParams& prm, double slack) {
    GapCheck out;
    out.lhs = penalized_objective(inst, batch, x_l1, prm);
    out.rhs = penalized_objective(inst, batch, inst.x_star, prm) +
              prm.lambda * nuclear_norm(inst.x_star);
    out.gap = out.lhs - out.rhs;
    out.passed = out.gap <= slack;
    return out;
}

} // namespace lowrank
