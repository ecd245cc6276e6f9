#include "lowrank/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "lowrank/errors.hpp"
#include "lowrank/spectral.hpp"

namespace lowrank {

void SolverConfig::validate() const {
    if (max_iters < 1) throw InvalidInput("SolverConfig: max_iters must be >= 1");
    if (!(kkt_tol > 0.0)) throw InvalidInput("SolverConfig: kkt_tol must be positive");
    if (!(initial_step > 0.0)) throw InvalidInput("SolverConfig: initial_step must be positive");
    if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0))
        throw InvalidInput("SolverConfig: backtrack_factor must lie in (0,1)");
    if (!(armijo_const > 0.0 && armijo_const < 1.0))
        throw InvalidInput("SolverConfig: armijo_const must lie in (0,1)");
}

double SolverConfig::effective_radius(const ProblemInstance& inst) const {
    return radius > 0.0 ? radius : inst.radius;
}

namespace {

constexpr double kMinStep = 1e-15;
constexpr int kStagnationLimit = 10;
constexpr double kStagnationRelTol = 1e-12;
constexpr int kPolishDescentIters = 100;
constexpr int kPolishRounds = 3;

// Empirical objective with the family-specific structure factored out once
// per solve. Denoising reduces to a fixed quadratic around the scenario
// mean, which makes iterations independent of the batch size.
class Model {
  public:
    Model(const ProblemInstance& inst, const SampleBatch& batch) : inst_(inst), batch_(batch) {
        if (batch.size() == 0) throw InvalidInput("solver: empty batch");
        if (inst.family == Family::kDenoising) {
            y_bar_ = SymMatrix(inst.dim);
            double sq = 0.0;
            for (const Scenario& z : batch.scenarios) {
                y_bar_ += z.mat;
                const double nrm = z.mat.frobenius_norm();
                sq += nrm * nrm;
            }
            y_bar_ *= 1.0 / batch.size();
            const double yb = y_bar_.frobenius_norm();
            offset_ = 0.5 * sq / batch.size() - 0.5 * yb * yb;
        }
    }

    double objective(const SymMatrix& x) const {
        if (inst_.family == Family::kDenoising) {
            const double d = frobenius_distance(x, y_bar_);
            return 0.5 * d * d + offset_;
        }
        return empirical_objective(inst_, x, batch_);
    }

    SymMatrix gradient(const SymMatrix& x) const {
        if (inst_.family == Family::kDenoising) return x - y_bar_;
        return empirical_gradient(inst_, x, batch_);
    }

  private:
    const ProblemInstance& inst_;
    const SampleBatch& batch_;
    SymMatrix y_bar_;
    double offset_ = 0.0;
};

// Eigenvalue map of the prox step (already includes the [0, R] clamp) and
// the penalty evaluated on the mapped spectrum.
struct SpectralStage {
    std::function<double(double w, double step)> map;
    std::function<double(std::span<const double> w)> penalty;
};

struct EngineState {
    SymMatrix x;
    double objective = 0.0; // penalized
    std::vector<TracePoint> trace;
    int iterations = 0;
    bool converged = false;
};

void descend(EngineState& st, const Model& model, const SpectralStage& stage,
             const SolverConfig& cfg, double step_cap, int max_iters) {
    const int p = st.x.dim();
    std::vector<double> mapped(p);
    int stagnant = 0;

    for (int it = 0; it < max_iters; ++it) {
        const SymMatrix g = model.gradient(st.x);
        double s = step_cap;
        SymMatrix candidate(p);
        double cand_obj = 0.0;
        double dx = 0.0;
        while (true) {
            SymMatrix z = st.x;
            z -= s * g;
            SpectralDecomp d = eig_sym(z);
            for (int j = 0; j < p; ++j) mapped[j] = stage.map(d.eigenvalues[j], s);
            d.eigenvalues = mapped;
            candidate = reconstruct(d);
            cand_obj = model.objective(candidate) + stage.penalty(mapped);
            dx = frobenius_distance(candidate, st.x);
            if (cand_obj <= st.objective - cfg.armijo_const * dx * dx / s) break;
            s *= cfg.backtrack_factor;
            if (s < kMinStep) {
                // No acceptable move; stay put and let the residual decide.
                candidate = st.x;
                cand_obj = st.objective;
                dx = 0.0;
                break;
            }
        }

        const double residual = dx / s;
        st.trace.push_back({cand_obj, s, residual});
        ++st.iterations;

        const double prev = st.objective;
        st.x = candidate;
        st.objective = cand_obj;

        if (residual <= cfg.kkt_tol) {
            st.converged = true;
            return;
        }
        if (std::abs(prev - cand_obj) <= kStagnationRelTol * std::max(1.0, std::abs(cand_obj)))
            ++stagnant;
        else
            stagnant = 0;
        if (stagnant >= kStagnationLimit) return;
    }
}

// Penalized objective with eigenvalue j of the decomposition replaced,
// eigenvectors held fixed.
double eval_with_eigenvalue(const Model& model, const McpParams& prm, const SpectralDecomp& d,
                            int j, double w_new) {
    SpectralDecomp modified = d;
    modified.eigenvalues[j] = w_new;
    const SymMatrix x = reconstruct(modified);
    return model.objective(x) + mcp_spectral_value(modified.eigenvalues, prm);
}

SolveReport finish_report(const ProblemInstance& inst, const SampleBatch& batch,
                          const EngineState& st, double penalty_at_solution) {
    SolveReport rep;
    rep.solution = st.x;
    rep.objective_empirical = empirical_objective(inst, st.x, batch);
    rep.objective_penalized = rep.objective_empirical + penalty_at_solution;
    rep.rank = numerical_rank(st.x);
    rep.iterations = st.iterations;
    rep.converged = st.converged;
    rep.trace = st.trace;
    return rep;
}

} // namespace

SolveReport solve_saa(const ProblemInstance& inst, const SampleBatch& batch,
                      const SolverConfig& cfg) {
    cfg.validate();
    const double radius = cfg.effective_radius(inst);
    const Model model(inst, batch);

    SpectralStage stage;
    stage.map = [radius](double w, double) { return std::clamp(w, 0.0, radius); };
    stage.penalty = [](std::span<const double>) { return 0.0; };

    EngineState st;
    st.x = SymMatrix(inst.dim);
    st.objective = model.objective(st.x);
    descend(st, model, stage, cfg, cfg.initial_step, cfg.max_iters);
    return finish_report(inst, batch, st, 0.0);
}

SolveReport solve_nuclear(const ProblemInstance& inst, const SampleBatch& batch, double lambda,
                          const SolverConfig& cfg) {
    cfg.validate();
    if (lambda < 0.0) throw InvalidInput("solve_nuclear: lambda must be >= 0");
    const double radius = cfg.effective_radius(inst);
    const Model model(inst, batch);

    SpectralStage stage;
    stage.map = [radius, lambda](double w, double s) {
        return std::clamp(w - s * lambda, 0.0, radius);
    };
    stage.penalty = [lambda](std::span<const double> w) {
        double t = 0.0;
        for (double v : w) t += v;
        return lambda * t;
    };

    EngineState st;
    st.x = SymMatrix(inst.dim);
    st.objective = model.objective(st.x);
    descend(st, model, stage, cfg, cfg.initial_step, cfg.max_iters);
    return finish_report(inst, batch, st, lambda * nuclear_norm(st.x));
}

SolveReport solve_rsaa(const ProblemInstance& inst, const SampleBatch& batch,
                       const McpParams& prm, const SolverConfig& cfg, const SymMatrix& init) {
    cfg.validate();
    const double radius = cfg.effective_radius(inst);
    if (init.dim() != inst.dim) throw InvalidInput("solve_rsaa: init dimension mismatch");
    {
        const SpectralDecomp d0 = eig_sym(init);
        if (d0.eigenvalues.front() > radius + 1e-8 || d0.eigenvalues.back() < -1e-8)
            throw InvalidInput("solve_rsaa: init is not feasible");
    }

    const Model model(inst, batch);
    // The scalar prox closed form needs step < a.
    const double step_cap = std::min(cfg.initial_step, 0.9 * prm.a);

    SpectralStage stage;
    stage.map = [radius, &prm](double w, double s) {
        return std::min(mcp_prox_scalar(std::max(w, 0.0), s, prm), radius);
    };
    stage.penalty = [&prm](std::span<const double> w) { return mcp_spectral_value(w, prm); };

    EngineState st;
    st.x = project_psd_ball(init, radius); // clean up rounding-level infeasibility
    st.objective = model.objective(st.x) + mcp_spectral_value(st.x, prm);

    int budget = cfg.max_iters;
    descend(st, model, stage, cfg, step_cap, budget);
    budget = std::max(0, budget - st.iterations);

    // Polish: the prox map can park an eigenvalue inside the excluded band
    // under finite tolerance. Move each such eigenvalue to the better of
    // {0, a*lambda} (the restricted objective is concave on the band, so
    // an endpoint is at least as good), then re-descend briefly.
    const double band_hi = prm.band_edge() * (1.0 - 1e-12);
    for (int round = 0; round < kPolishRounds; ++round) {
        SpectralDecomp d = eig_sym(st.x);
        const double tol_zero = 1e-8 * std::max(1.0, d.spectral_radius());
        bool touched = false;
        for (int j = 0; j < d.dim(); ++j) {
            const double w = d.eigenvalues[j];
            if (!(w > tol_zero && w < band_hi)) continue;
            const double raise = prm.band_edge();
            double best_w = 0.0;
            double best_obj = eval_with_eigenvalue(model, prm, d, j, 0.0);
            if (raise <= radius) {
                const double raised = eval_with_eigenvalue(model, prm, d, j, raise);
                if (raised < best_obj) {
                    best_obj = raised;
                    best_w = raise;
                }
            }
            d.eigenvalues[j] = best_w;
            touched = true;
        }
        if (!touched) break;
        st.x = reconstruct(d);
        st.objective = model.objective(st.x) + mcp_spectral_value(st.x, prm);
        st.converged = false;
        descend(st, model, stage, cfg, step_cap, std::min(budget, kPolishDescentIters));
        budget = std::max(0, budget - kPolishDescentIters);
    }

    SolveReport rep = finish_report(inst, batch, st, mcp_spectral_value(st.x, prm));
    rep.certificate = check_s3onc(inst, batch, st.x, prm, cfg.kkt_tol);
    return rep;
}

PipelineResult solve_pipeline(const ProblemInstance& inst, const SampleBatch& batch,
                              const McpParams& prm, const SolverConfig& cfg) {
    PipelineResult out;
    out.nuclear = solve_nuclear(inst, batch, prm.lambda, cfg);
    out.rsaa = solve_rsaa(inst, batch, prm, cfg, out.nuclear.solution);
    const double at_init = penalized_objective(inst, batch, out.nuclear.solution, prm);
    const double at_out = penalized_objective(inst, batch, out.rsaa.solution, prm);
    if (at_out > at_init + 1e-10)
        throw NumericalFailure("solve_pipeline: RSAA stage failed to descend from the initializer");
    return out;
}

} // namespace lowrank
