#include "oracles.hpp"

#include <algorithm>
#include <cmath>

#include "lowrank/spectral.hpp"

namespace oracles {

namespace {

double simpson(const std::function<double(double)>& f, double lo, double hi, int panels) {
    if (hi <= lo) return 0.0;
    const double h = (hi - lo) / panels;
    double acc = f(lo) + f(hi);
    for (int i = 1; i < panels; ++i) acc += f(lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

} // namespace

double mcp_value_quadrature(double t, double a, double lambda) {
    const auto integrand = [a, lambda](double u) {
        return std::max(a * lambda - u, 0.0) / a;
    };
    const double kink = a * lambda;
    constexpr int kPanels = 256;
    if (t <= kink) return simpson(integrand, 0.0, t, kPanels);
    return simpson(integrand, 0.0, kink, kPanels) + simpson(integrand, kink, t, kPanels);
}

double prox_objective(double t, double v, double step, const lowrank::McpParams& prm) {
    return 0.5 * (t - v) * (t - v) + step * lowrank::mcp_value(t, prm);
}

double mcp_prox_grid_search(double v, double step, const lowrank::McpParams& prm, double hi,
                            int points) {
    double best_t = 0.0;
    double best = prox_objective(0.0, v, step, prm);
    for (int i = 1; i < points; ++i) {
        const double t = hi * i / (points - 1);
        const double val = prox_objective(t, v, step, prm);
        if (val < best) {
            best = val;
            best_t = t;
        }
    }
    return best_t;
}

lowrank::SymMatrix matrix_prox_pgd(const lowrank::SymMatrix& x, double step,
                                   const lowrank::McpParams& prm, int iters, double tol) {
    using namespace lowrank;
    SymMatrix t = project_psd_ball(x, 1e12); // start from the PSD part of x
    // Gradient Lipschitz constant of the smooth surrogate is at most
    // 1 + step/a; a fixed step below its inverse keeps the iteration stable.
    const double eta = 0.9 / (1.0 + step / prm.a);
    for (int k = 0; k < iters; ++k) {
        const SpectralDecomp d = eig_sym(t);
        SymMatrix grad = t - x;
        grad += apply_spectral(d, [&](double w) {
            if (w >= prm.band_edge()) return 0.0;
            return step * (prm.lambda - std::max(w, 0.0) / prm.a);
        });
        SymMatrix stepped = t;
        stepped -= eta * grad;
        SymMatrix next = project_psd_ball(stepped, 1e12);
        const double move = frobenius_distance(next, t);
        t = next;
        if (move <= tol) break;
    }
    return t;
}

double directional_fd(const lowrank::ProblemInstance& inst, const lowrank::SampleBatch& batch,
                      const lowrank::SymMatrix& x, const lowrank::SymMatrix& v, double h) {
    using namespace lowrank;
    SymMatrix plus = x;
    SymMatrix minus = x;
    SymMatrix hv = v;
    hv *= h;
    plus += hv;
    minus -= hv;
    return (empirical_objective(inst, plus, batch) - empirical_objective(inst, minus, batch)) /
           (2.0 * h);
}

// ---- second codings of the theory formulas (different factorings) ----

namespace {

double log_factor(const lowrank::theory::TheoryInputs& in) {
    // ln(n^{1/3} p) + ln(18 R (K_C + C_mu)) combined into one log.
    return std::log(std::pow(double(in.n), 1.0 / 3.0) * in.p * 18.0 * in.radius *
                    (in.constants.k_c + in.constants.c_mu));
}

} // namespace

double lambda_second(const lowrank::theory::TheoryInputs& in) {
    const double a = 0.5 / in.constants.u_l;
    const double ratio = 8.0 * in.constants.k *
                         std::cbrt((2.0 * in.p + 1.0) * (2.0 * in.p + 1.0)) /
                         (in.constants.bernstein_c * a);
    return std::sqrt(ratio * log_factor(in) / std::cbrt(double(in.n) * double(in.n)));
}

double risk_bound_i_second(const lowrank::theory::TheoryInputs& in) {
    const double L = log_factor(in);
    const double n = double(in.n);
    const double p = double(in.p);
    const double k = in.constants.k;
    const double term_gamma = std::sqrt(k * std::cbrt(p) * in.gamma / std::cbrt(n));
    const double bracket = in.s * std::cbrt(p * p) * L / std::cbrt(n * n) +
                           std::sqrt(in.s * L / n) + std::cbrt(p / n);
    return term_gamma + in.gamma + in.universal.c1 * k * bracket;
}

double risk_bound_ii_second(const lowrank::theory::TheoryInputs& in) {
    const double L = log_factor(in);
    const double n13 = std::cbrt(double(in.n));
    const double p13 = std::cbrt(double(in.p));
    return in.universal.c2 * in.s * in.constants.k * p13 *
           (p13 * L / (n13 * n13) +
            in.radius * std::sqrt(in.constants.u_l * L) / n13);
}

double condition_i_rhs_second(const lowrank::theory::TheoryInputs& in) {
    const double g = in.gamma / in.constants.k;
    return in.universal.c1 * ((std::pow(g, 3.0) + 1.0) * in.p + in.s * log_factor(in));
}

double condition_ii_rhs_second(const lowrank::theory::TheoryInputs& in) {
    return in.universal.c2 * in.p * in.constants.u_l * log_factor(in) *
           std::sqrt(double(in.s) * in.s * in.s) * std::sqrt(in.radius * in.radius * in.radius);
}

double rank_bound_second(const lowrank::theory::TheoryInputs& in, double epsilon) {
    const double delta1 = std::log(18.0 * (in.constants.k_c + in.constants.c_mu) * in.p *
                                   in.radius) - std::log(epsilon);
    const double c = in.constants.bernstein_c;
    const double n = double(in.n);
    const double tp = 2.0 * in.p + 1.0;
    const double first = 2.0 * c * std::cbrt(n) / (delta1 * std::cbrt(tp));
    const double second = 2.0 * c * std::cbrt(n * n) * (in.gamma + 2.0 * epsilon) /
                          (in.constants.k * delta1 * std::cbrt(tp * tp));
    return std::ceil(first + second + 8.0 * in.s);
}

double covering_log_second(int r, double radius, double epsilon, int p) {
    const double base = 9.0 * std::sqrt(double(r)) * radius / epsilon;
    if (base <= 1.0) return 0.0;
    return double(r) * (2.0 * p + 1.0) * std::log(base);
}

double saa_bound_second(int p, long long n, double scale) {
    return scale * double(p) * std::sqrt(std::log(double(n)) / double(n));
}

} // namespace oracles
