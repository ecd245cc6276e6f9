#pragma once

#include <optional>
#include <vector>

#include "lowrank/certificates.hpp"
#include "lowrank/matrix.hpp"
#include "lowrank/penalty.hpp"
#include "lowrank/problems.hpp"

namespace lowrank {

enum class StepRule { kFixedBacktracking };

struct SolverConfig {
    int max_iters = 5000;
    double kkt_tol = 1e-7; // Frobenius norm of the prox-gradient residual
    StepRule step_rule = StepRule::kFixedBacktracking;
    double initial_step = 1.0;
    double backtrack_factor = 0.5;
    double armijo_const = 1e-4;
    double radius = 0.0; // feasible spectral radius; <= 0 means use the problem's

    void validate() const;
    double effective_radius(const ProblemInstance& inst) const;
};

struct TracePoint {
    double objective = 0.0; // penalized objective after the step
    double step = 0.0;      // accepted step size
    double grad_norm = 0.0; // prox-gradient residual ||X_{k+1}-X_k||_F / step
};

struct SolveReport {
    SymMatrix solution;
    double objective_empirical = 0.0; // F_n at the solution
    double objective_penalized = 0.0; // stage objective (F_n, +nuclear, or +MCP)
    int rank = 0;
    int iterations = 0;
    bool converged = false;
    std::optional<S3oncCertificate> certificate;
    std::vector<TracePoint> trace;
};

// Stage 1: proximal gradient on F_n + lambda*||X||_* over the PSD ball
// (eigenvalue soft-threshold by step*lambda, clamped to [0, R]).
SolveReport solve_nuclear(const ProblemInstance& inst, const SampleBatch& batch, double lambda,
                          const SolverConfig& cfg);

// Stage 2: proximal gradient on F_{n,lambda} with the spectral MCP prox,
// started from a feasible init. Monotone in the penalized objective, so
// the output never exceeds F_{n,lambda}(init). A polishing pass moves any
// eigenvalue left strictly inside (0, a*lambda) to the better of its band
// endpoints and re-descends, enforcing the thresholding rule.
SolveReport solve_rsaa(const ProblemInstance& inst, const SampleBatch& batch,
                       const McpParams& prm, const SolverConfig& cfg, const SymMatrix& init);

// Baseline: projected gradient on F_n alone.
SolveReport solve_saa(const ProblemInstance& inst, const SampleBatch& batch,
                      const SolverConfig& cfg);

struct PipelineResult {
    SolveReport nuclear;
    SolveReport rsaa;
};

// Nuclear stage, then the RSAA stage initialized at its solution; verifies
// F_{n,lambda}(rsaa) <= F_{n,lambda}(nuclear) + 1e-10.
PipelineResult solve_pipeline(const ProblemInstance& inst, const SampleBatch& batch,
                              const McpParams& prm, const SolverConfig& cfg);

} // namespace lowrank
