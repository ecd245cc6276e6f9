#include "lowrank/problems.hpp"

#include <algorithm>
#include <cmath>

#include "lowrank/errors.hpp"
#include "lowrank/rng.hpp"
#include "lowrank/spectral.hpp"

namespace lowrank {

namespace {

// Stream tags for seed derivation; fixed so serialized seeds replay.
enum : std::uint64_t {
    kTagXstar = 0x01,
    kTagBatch = 0x02,
    kTagPilot = 0x03,
    kTagEval = 0x04,
    kTagProbe = 0x05,
};

double noise_draw(Rng& rng, NoiseKind kind) {
    return kind == NoiseKind::kGaussian ? rng.normal() : rng.exponential_centered();
}

// Symmetric matrix with upper-triangle (diagonal included) entries i.i.d.
// scale * noise; mirrored below. Draw order is fixed row-major.
SymMatrix random_symmetric(Rng& rng, int p, double scale, NoiseKind kind) {
    SymMatrix e(p);
    for (int i = 0; i < p; ++i)
        for (int j = i; j < p; ++j) e.set(i, j, scale * noise_draw(rng, kind));
    return e;
}

Scenario draw_scenario(const ProblemInstance& inst, std::uint64_t stream_seed) {
    Rng rng(stream_seed);
    Scenario z;
    if (inst.family == Family::kDenoising) {
        z.mat = inst.x_star + random_symmetric(rng, inst.dim, inst.noise_scale, inst.noise_kind);
    } else {
        SymMatrix a = random_symmetric(rng, inst.dim, 1.0, NoiseKind::kGaussian);
        const double nrm = a.frobenius_norm();
        if (nrm > 0.0) a *= 1.0 / nrm;
        z.mat = a;
        z.response = inner(a, inst.x_star) + inst.noise_scale * noise_draw(rng, inst.noise_kind);
    }
    return z;
}

// Orthonormal p-by-s frame from a seeded Gaussian matrix via modified
// Gram-Schmidt.
Matrix random_frame(Rng& rng, int p, int s) {
    Matrix v(p, s);
    for (int j = 0; j < s; ++j)
        for (int i = 0; i < p; ++i) v(i, j) = rng.normal();
    for (int j = 0; j < s; ++j) {
        for (int k = 0; k < j; ++k) {
            double dot = 0.0;
            for (int i = 0; i < p; ++i) dot += v(i, k) * v(i, j);
            for (int i = 0; i < p; ++i) v(i, j) -= dot * v(i, k);
        }
        double nrm = 0.0;
        for (int i = 0; i < p; ++i) nrm += v(i, j) * v(i, j);
        nrm = std::sqrt(nrm);
        if (nrm < 1e-12) throw NumericalFailure("random_frame: degenerate Gaussian draw");
        for (int i = 0; i < p; ++i) v(i, j) /= nrm;
    }
    return v;
}

SymMatrix build_x_star(int p, int s, double radius, std::uint64_t seed) {
    Rng rng(mix_seed(seed, {kTagXstar}));
    Matrix v = random_frame(rng, p, s);
    std::vector<double> d(s);
    for (int j = 0; j < s; ++j) d[j] = std::min(rng.uniform(radius / 2.0, radius), radius);
    SymMatrix x(p);
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j <= i; ++j) {
            double acc = 0.0;
            for (int k = 0; k < s; ++k) acc += v(i, k) * d[k] * v(j, k);
            x.set(i, j, acc);
        }
    }
    return x;
}

// Sub-exponential norm estimate of centered samples via the moment ratio
// sup_q (E|x|^q)^(1/q) / q over q in {1, 2, 3}.
double psi1_estimate(const std::vector<double>& samples) {
    if (samples.empty()) return 0.0;
    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= static_cast<double>(samples.size());
    double best = 0.0;
    for (int q = 1; q <= 3; ++q) {
        double acc = 0.0;
        for (double v : samples) acc += std::pow(std::abs(v - mean), q);
        acc /= static_cast<double>(samples.size());
        best = std::max(best, std::pow(acc, 1.0 / q) / q);
    }
    return best;
}

// Analytic Lipschitz envelope C(z) of f(., z) over the feasible ball
// {X PSD, sigma_max <= R}: sup of the gradient Frobenius norm.
double envelope(const ProblemInstance& inst, const Scenario& z) {
    const double ball = inst.radius * std::sqrt(static_cast<double>(inst.dim));
    if (inst.family == Family::kDenoising) return ball + z.mat.frobenius_norm();
    const double a_norm = z.mat.frobenius_norm();
    return a_norm * (a_norm * ball + std::abs(z.response));
}

void estimate_constants(ProblemInstance& inst, int pilot_n) {
    AssumptionConstants c;
    c.bernstein_c = 0.5;

    // Probe points for the cost-fluctuation bound K: ground truth, origin,
    // and one seeded random feasible point.
    std::vector<SymMatrix> probes;
    probes.push_back(inst.x_star);
    probes.push_back(SymMatrix(inst.dim));
    {
        Rng rng(mix_seed(inst.seed, {kTagProbe}));
        SymMatrix w = random_symmetric(rng, inst.dim, inst.radius / std::sqrt(double(inst.dim)),
                                       NoiseKind::kGaussian);
        probes.push_back(project_psd_ball(w, inst.radius));
    }

    std::vector<std::vector<double>> costs(probes.size());
    for (auto& v : costs) v.reserve(pilot_n);
    std::vector<double> envs;
    envs.reserve(pilot_n);

    double max_spec_sq = 0.0;
    const int spec_probe_count = std::min(pilot_n, 100);
    for (int i = 0; i < pilot_n; ++i) {
        Scenario z = draw_scenario(inst, mix_seed(inst.seed, {kTagPilot, std::uint64_t(i)}));
        for (std::size_t k = 0; k < probes.size(); ++k) costs[k].push_back(cost(inst, probes[k], z));
        envs.push_back(envelope(inst, z));
        if (inst.family == Family::kSensing && i < spec_probe_count) {
            const double s = eig_sym(z.mat).spectral_radius();
            max_spec_sq = std::max(max_spec_sq, s * s);
        }
    }

    double k_hat = 0.0;
    for (const auto& v : costs) k_hat = std::max(k_hat, psi1_estimate(v));
    c.k = std::max(1.0, k_hat);

    double env_mean = 0.0;
    for (double v : envs) env_mean += v;
    env_mean /= std::max<std::size_t>(1, envs.size());
    c.c_mu = std::max(1.0, env_mean);
    c.k_c = std::max(1.0, psi1_estimate(envs));

    // Denoising: the cost is an exact quadratic in each eigenvalue, so the
    // eigen-gradient Lipschitz constant is 1. Sensing: largest squared
    // spectral norm among sampled measurements, floored at 1.
    c.u_l = inst.family == Family::kDenoising ? 1.0 : std::max(1.0, max_spec_sq);

    c.validate();
    inst.constants = c;
}

} // namespace

void AssumptionConstants::validate() const {
    if (!(u_l >= 1.0)) throw InvalidInput("AssumptionConstants: u_l must be >= 1");
    if (!(k >= 1.0)) throw InvalidInput("AssumptionConstants: k must be >= 1");
    if (!(k_c >= 1.0)) throw InvalidInput("AssumptionConstants: k_c must be >= 1");
    if (!(c_mu >= 1.0)) throw InvalidInput("AssumptionConstants: c_mu must be >= 1");
    if (!(bernstein_c > 0.0 && bernstein_c <= 0.5))
        throw InvalidInput("AssumptionConstants: bernstein_c must lie in (0, 0.5]");
}

ProblemInstance make_problem_with_constants(Family family, int p, int s, double radius,
                                            double noise_scale, std::uint64_t seed,
                                            const AssumptionConstants& constants,
                                            NoiseKind noise_kind) {
    if (p < 1) throw InvalidInput("make_problem: p must be >= 1");
    if (s < 1 || s > p) throw InvalidInput("make_problem: requires 1 <= s <= p");
    if (!(radius >= 1.0)) throw InvalidInput("make_problem: requires R >= 1");
    if (!(noise_scale >= 0.0)) throw InvalidInput("make_problem: noise_scale must be >= 0");
    constants.validate();

    ProblemInstance inst;
    inst.family = family;
    inst.dim = p;
    inst.rank = s;
    inst.radius = radius;
    inst.noise_scale = noise_scale;
    inst.noise_kind = noise_kind;
    inst.seed = seed;
    inst.x_star = build_x_star(p, s, radius, seed);
    inst.constants = constants;
    return inst;
}

ProblemInstance make_problem(Family family, int p, int s, double radius, double noise_scale,
                             std::uint64_t seed, int pilot_n, NoiseKind noise_kind) {
    ProblemInstance inst = make_problem_with_constants(family, p, s, radius, noise_scale, seed,
                                                       AssumptionConstants{}, noise_kind);
    if (pilot_n > 0) estimate_constants(inst, pilot_n);
    return inst;
}

SampleBatch sample(const ProblemInstance& inst, int n, std::uint64_t seed) {
    if (n < 1) throw InvalidInput("sample: n must be >= 1");
    SampleBatch batch;
    batch.family = inst.family;
    batch.scenarios.reserve(n);
    for (int i = 0; i < n; ++i)
        batch.scenarios.push_back(
            draw_scenario(inst, mix_seed(inst.seed, {kTagBatch, seed, std::uint64_t(i)})));
    return batch;
}

double cost(const ProblemInstance& inst, const SymMatrix& x, const Scenario& z) {
    if (inst.family == Family::kDenoising) {
        const double d = frobenius_distance(x, z.mat);
        return 0.5 * d * d;
    }
    const double r = inner(z.mat, x) - z.response;
    return 0.5 * r * r;
}

double empirical_objective(const ProblemInstance& inst, const SymMatrix& x,
                           const SampleBatch& batch) {
    if (batch.size() == 0) throw InvalidInput("empirical_objective: empty batch");
    double acc = 0.0;
    for (const Scenario& z : batch.scenarios) acc += cost(inst, x, z);
    return acc / batch.size();
}

SymMatrix empirical_gradient(const ProblemInstance& inst, const SymMatrix& x,
                             const SampleBatch& batch) {
    if (batch.size() == 0) throw InvalidInput("empirical_gradient: empty batch");
    SymMatrix g(x.dim());
    if (inst.family == Family::kDenoising) {
        for (const Scenario& z : batch.scenarios) g += z.mat;
        g *= -1.0 / batch.size();
        g += x;
        return g;
    }
    for (const Scenario& z : batch.scenarios) {
        SymMatrix term = z.mat;
        term *= inner(z.mat, x) - z.response;
        g += term;
    }
    g *= 1.0 / batch.size();
    return g;
}

RiskEstimate true_risk(const ProblemInstance& inst, const SymMatrix& x, int n_eval) {
    if (inst.family == Family::kDenoising) {
        // E 0.5*||X - X* - E||^2 = 0.5*||X - X*||^2 + 0.5*E||E||^2 with
        // E||E||^2 = noise^2 * p^2 (p diagonal entries plus p(p-1) mirrored
        // off-diagonal entries, each of variance noise^2).
        const double d = frobenius_distance(x, inst.x_star);
        const double p = static_cast<double>(inst.dim);
        return {0.5 * d * d + 0.5 * inst.noise_scale * inst.noise_scale * p * p, 0.0};
    }
    if (n_eval < 1) throw InvalidInput("true_risk: n_eval must be >= 1");
    double acc = 0.0;
    double acc_sq = 0.0;
    for (int i = 0; i < n_eval; ++i) {
        Scenario z = draw_scenario(inst, mix_seed(inst.seed, {kTagEval, std::uint64_t(i)}));
        const double v = cost(inst, x, z);
        acc += v;
        acc_sq += v * v;
    }
    const double mean = acc / n_eval;
    const double var = std::max(0.0, acc_sq / n_eval - mean * mean);
    return {mean, std::sqrt(var / n_eval)};
}

RiskEstimate excess_risk(const ProblemInstance& inst, const SymMatrix& x, int n_eval) {
    if (inst.family == Family::kDenoising) {
        const double d = frobenius_distance(x, inst.x_star);
        return {0.5 * d * d, 0.0};
    }
    if (n_eval < 1) throw InvalidInput("excess_risk: n_eval must be >= 1");
    // Paired estimator: same scenario stream for X and X*.
    double acc = 0.0;
    double acc_sq = 0.0;
    for (int i = 0; i < n_eval; ++i) {
        Scenario z = draw_scenario(inst, mix_seed(inst.seed, {kTagEval, std::uint64_t(i)}));
        const double v = cost(inst, x, z) - cost(inst, inst.x_star, z);
        acc += v;
        acc_sq += v * v;
    }
    const double mean = acc / n_eval;
    const double var = std::max(0.0, acc_sq / n_eval - mean * mean);
    return {mean, std::sqrt(var / n_eval)};
}

double grad_lipschitz_bound(const ProblemInstance& inst, const SampleBatch& batch) {
    if (inst.family == Family::kDenoising) return 1.0;
    double acc = 0.0;
    for (const Scenario& z : batch.scenarios) {
        const double nrm = z.mat.frobenius_norm();
        acc += nrm * nrm;
    }
    return batch.size() > 0 ? std::max(acc / batch.size(), 1e-12) : 1.0;
}

const char* family_name(Family f) {
    return f == Family::kDenoising ? "Denoising" : "Sensing";
}

} // namespace lowrank
