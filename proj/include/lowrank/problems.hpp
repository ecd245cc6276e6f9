#pragma once

#include <cstdint>
#include <vector>

#include "lowrank/matrix.hpp"

namespace lowrank {

enum class Family { kDenoising, kSensing };
enum class NoiseKind { kGaussian, kExponential };

// Constants of the standing assumptions, either analytic or estimated from
// pilot samples at construction. All are floored at their assumed lower
// bounds so downstream formulas stay in their valid regime.
struct AssumptionConstants {
    double u_l = 1.0;         // eigen-gradient Lipschitz constant, >= 1
    double k = 1.0;           // sub-exponential norm bound on the cost, >= 1
    double k_c = 1.0;         // sub-exponential norm bound on the envelope, >= 1
    double c_mu = 1.0;        // mean bound on the Lipschitz envelope, >= 1
    double bernstein_c = 0.5; // Bernstein constant, in (0, 0.5]

    void validate() const;
};

// One sampled scenario. Denoising: mat is the observation Y (response
// unused). Sensing: mat is the measurement A, response is y.
struct Scenario {
    SymMatrix mat;
    double response = 0.0;
};

struct SampleBatch {
    Family family = Family::kDenoising;
    std::vector<Scenario> scenarios;

    int size() const { return static_cast<int>(scenarios.size()); }
};

struct ProblemInstance {
    Family family = Family::kDenoising;
    int dim = 0;  // p
    int rank = 0; // s
    double radius = 1.0;
    double noise_scale = 0.0;
    NoiseKind noise_kind = NoiseKind::kGaussian;
    SymMatrix x_star;
    AssumptionConstants constants;
    std::uint64_t seed = 0;
};

inline constexpr int kDefaultPilotSamples = 10000;
inline constexpr int kDefaultRiskSamples = 100000;

// Builds a synthetic instance: X* = V diag(d) V^T with V a seeded random
// p-by-s orthonormal frame and d uniform on [R/2, R]. Assumption constants
// are estimated from pilot_n pilot scenarios (see README), except where
// analytic values exist. Deterministic per seed.
ProblemInstance make_problem(Family family, int p, int s, double radius, double noise_scale,
                             std::uint64_t seed, int pilot_n = kDefaultPilotSamples,
                             NoiseKind noise_kind = NoiseKind::kGaussian);

// Same construction but with caller-supplied constants (used when loading
// a serialized problem; skips pilot estimation).
ProblemInstance make_problem_with_constants(Family family, int p, int s, double radius,
                                            double noise_scale, std::uint64_t seed,
                                            const AssumptionConstants& constants,
                                            NoiseKind noise_kind = NoiseKind::kGaussian);

// n i.i.d. scenarios; deterministic per (inst.seed, seed), with one RNG
// stream per scenario index so parallel consumers see identical data.
SampleBatch sample(const ProblemInstance& inst, int n, std::uint64_t seed);

// f(X, z): Denoising 0.5*||X - Y||_F^2; Sensing 0.5*(<A, X> - y)^2.
double cost(const ProblemInstance& inst, const SymMatrix& x, const Scenario& z);

// F_n and its gradient in X.
double empirical_objective(const ProblemInstance& inst, const SymMatrix& x,
                           const SampleBatch& batch);
SymMatrix empirical_gradient(const ProblemInstance& inst, const SymMatrix& x,
                             const SampleBatch& batch);

struct RiskEstimate {
    double value = 0.0;
    double std_error = 0.0; // 0 when the value is closed-form
};

// Population risk F(X). Denoising has the closed form
// 0.5*||X - X*||_F^2 + 0.5*noise_scale^2*p^2; Sensing is estimated by
// Monte Carlo over n_eval fresh scenarios.
RiskEstimate true_risk(const ProblemInstance& inst, const SymMatrix& x,
                       int n_eval = kDefaultRiskSamples);

// F(X) - F(X*). Denoising: exactly 0.5*||X - X*||_F^2. Sensing: paired
// Monte Carlo (common scenarios for X and X*), so the noise constant
// cancels scenario-by-scenario.
RiskEstimate excess_risk(const ProblemInstance& inst, const SymMatrix& x,
                         int n_eval = kDefaultRiskSamples);

// Upper bound on the Lipschitz constant of grad F_n; used for step sizes
// and stationarity residuals.
double grad_lipschitz_bound(const ProblemInstance& inst, const SampleBatch& batch);

const char* family_name(Family f);

} // namespace lowrank
