// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// fail. Run a single criterion with `acceptance --only K`.

#include <chrono>
#include <cmath>
#include <cstring>
#include <iostream>
#include <string>
#include <vector>

#include "lowrank/certificates.hpp"
#include "lowrank/experiments.hpp"
#include "lowrank/json_io.hpp"
#include "lowrank/penalty.hpp"
#include "lowrank/rng.hpp"
#include "lowrank/solvers.hpp"
#include "lowrank/spectral.hpp"
#include "lowrank/theory.hpp"
#include "oracles.hpp"

using namespace lowrank;

namespace {

struct Criterion {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

Criterion make_criterion(int id, std::string name) {
    Criterion c;
    c.id = id;
    c.name = std::move(name);
    return c;
}

double now() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

McpParams scalar_params(double a, double lambda) { return McpParams(a, lambda, 0.9 / a); }

// ---------------------------------------------------------------- 1
Criterion criterion_mcp_correctness() {
    Criterion c = make_criterion(1, "MCP value matches quadrature; bounds hold exactly");
    Rng rng(101);
    int bad = 0;
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double a = 0.05 + 4.0 * rng.uniform();
        const double lambda = 3.0 * rng.uniform();
        const McpParams prm = scalar_params(a, lambda);
        const double t = 2.5 * std::max(a * lambda, 0.2) * rng.uniform();
        const double value = mcp_value(t, prm);
        const double quad = oracles::mcp_value_quadrature(t, a, lambda);
        worst = std::max(worst, std::abs(value - quad));
        if (std::abs(value - quad) > 1e-8) ++bad;
        if (!(value >= 0.0) || value > lambda * t || value > 0.5 * a * lambda * lambda) ++bad;
    }
    c.passed = bad == 0;
    c.detail = "1000 triples, max |value - quadrature| = " + fmt(worst);
    return c;
}

// ---------------------------------------------------------------- 2
Criterion criterion_prox_oracles() {
    Criterion c = make_criterion(2, "Prox equals grid search (scalar) and iterative oracle (spectral)");
    Rng rng(202);
    int bad = 0;
    double worst_scalar = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double a = 0.1 + 3.0 * rng.uniform();
        const double lambda = 0.05 + 2.5 * rng.uniform();
        const McpParams prm = scalar_params(a, lambda);
        const double step = a * (0.02 + 0.95 * rng.uniform());
        const double v = -2.0 + 8.0 * rng.uniform();
        const double hi = std::max(2.0 * std::abs(v), 2.0 * a * lambda) + 1.0;
        const double expected = oracles::mcp_prox_grid_search(v, step, prm, hi, 100000);
        const double got = mcp_prox_scalar(v, step, prm);
        worst_scalar = std::max(worst_scalar, std::abs(got - expected));
        if (std::abs(got - expected) > 1e-4) ++bad;
    }

    double worst_mat = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double a = 0.3 + 2.0 * rng.uniform();
        const double lambda = 0.1 + 1.5 * rng.uniform();
        const McpParams prm = scalar_params(a, lambda);
        const double step = a * (0.1 + 0.8 * rng.uniform());
        SymMatrix x(5);
        for (int r = 0; r < 5; ++r)
            for (int s = r; s < 5; ++s) x.set(r, s, rng.normal());
        x = project_psd_ball(x, 20.0);
        const double err =
            frobenius_distance(mcp_spectral_prox(x, step, prm),
                               oracles::matrix_prox_pgd(x, step, prm, 20000, 1e-10));
        worst_mat = std::max(worst_mat, err);
        if (err > 1e-4) ++bad;
    }
    c.passed = bad == 0;
    c.detail = "scalar max err " + fmt(worst_scalar) + ", spectral max err " + fmt(worst_mat);
    return c;
}

// Shared pipeline runs for criteria 3 and 4.
struct PipelineRun {
    ProblemInstance inst;
    SampleBatch batch;
    McpParams prm;
    SolverConfig cfg;
    PipelineResult result;
};

std::vector<PipelineRun> pipeline_runs() {
    std::vector<PipelineRun> runs;
    runs.reserve(100);
    int made = 0;
    for (int rep = 0; made < 100; ++rep) {
        for (Family family : {Family::kDenoising, Family::kSensing}) {
            for (int p : {6, 12}) {
                for (int s : {1, 2}) {
                    if (made >= 100) break;
                    const std::uint64_t seed = mix_seed(4242, {std::uint64_t(made),
                                                               std::uint64_t(rep)});
                    PipelineRun run{
                        make_problem(family, p, s, 1.0, 0.5, seed, 2000),
                        SampleBatch{},
                        McpParams(0.5, 0.0, 1.0),
                        SolverConfig{},
                        PipelineResult{}};
                    const int n = 50 + 25 * (rep % 3);
                    run.batch = sample(run.inst, n, mix_seed(seed, {7}));
                    theory::TheoryInputs tin;
                    tin.p = p;
                    tin.n = n;
                    tin.s = s;
                    tin.constants = run.inst.constants;
                    tin.radius = run.inst.radius;
                    run.prm = McpParams(1.0 / (2.0 * run.inst.constants.u_l),
                                        theory::tuned_lambda(tin), run.inst.constants.u_l);
                    run.cfg.radius = run.inst.radius;
                    run.result = solve_pipeline(run.inst, run.batch, run.prm, run.cfg);
                    runs.push_back(std::move(run));
                    ++made;
                }
            }
        }
    }
    return runs;
}

// ---------------------------------------------------------------- 3
Criterion criterion_thresholding(const std::vector<PipelineRun>& runs) {
    Criterion c = make_criterion(3, "Thresholding rule and certificates across 100 pipeline runs");
    int bad_eigs = 0, bad_certs = 0;
    for (const PipelineRun& run : runs) {
        const double edge = run.prm.band_edge();
        const SpectralDecomp d = eig_sym(run.result.rsaa.solution);
        const double tol_zero = 1e-8 * std::max(1.0, d.spectral_radius());
        for (double w : d.eigenvalues)
            if (w > tol_zero && w < edge * (1.0 - 1e-6)) ++bad_eigs;
        if (!run.result.rsaa.certificate || !run.result.rsaa.certificate->passed) ++bad_certs;
    }
    c.passed = bad_eigs == 0 && bad_certs == 0;
    c.detail = std::to_string(runs.size()) + " runs, band violations " +
               std::to_string(bad_eigs) + ", failed certificates " + std::to_string(bad_certs);
    return c;
}

// ---------------------------------------------------------------- 4
Criterion criterion_descent_and_gap(const std::vector<PipelineRun>& runs) {
    Criterion c = make_criterion(4, "Descent premise and initial-gap inequality on every pipeline run");
    int bad_descent = 0, bad_gap = 0;
    for (const PipelineRun& run : runs) {
        const double at_init =
            penalized_objective(run.inst, run.batch, run.result.nuclear.solution, run.prm);
        const double at_out =
            penalized_objective(run.inst, run.batch, run.result.rsaa.solution, run.prm);
        if (!(at_out <= at_init + 1e-10)) ++bad_descent;

        const double slack = run.cfg.kkt_tol * run.inst.x_star.frobenius_norm();
        const GapCheck gap =
            check_initial_gap(run.inst, run.batch, run.result.nuclear.solution, run.prm, slack);
        if (!gap.passed) ++bad_gap;
    }
    c.passed = bad_descent == 0 && bad_gap == 0;
    c.detail = "descent violations " + std::to_string(bad_descent) + ", gap violations " +
               std::to_string(bad_gap);
    return c;
}

// ---------------------------------------------------------------- 5
Criterion criterion_gradient_checks() {
    Criterion c = make_criterion(5, "Empirical gradient matches central finite differences");
    Rng rng(505);
    double worst = 0.0;
    int bad = 0;
    for (Family family : {Family::kDenoising, Family::kSensing}) {
        const ProblemInstance inst = make_problem(family, 5, 2, 1.0, 0.4, 909, 500);
        const SampleBatch batch = sample(inst, 40, 3);
        for (int state = 0; state < 20; ++state) {
            SymMatrix x(5);
            for (int i = 0; i < 5; ++i)
                for (int j = i; j < 5; ++j) x.set(i, j, rng.normal());
            const SymMatrix grad = empirical_gradient(inst, x, batch);
            for (int dir = 0; dir < 5; ++dir) {
                SymMatrix v(5);
                for (int i = 0; i < 5; ++i)
                    for (int j = i; j < 5; ++j) v.set(i, j, rng.normal());
                v *= 1.0 / v.frobenius_norm();
                const double analytic = inner(grad, v);
                const double fd = oracles::directional_fd(inst, batch, x, v, 1e-6);
                const double rel = std::abs(analytic - fd) / std::max(1.0, std::abs(fd));
                worst = std::max(worst, rel);
                if (rel > 1e-5) ++bad;
            }
        }
    }
    c.passed = bad == 0;
    c.detail = "worst relative error " + fmt(worst);
    return c;
}

// ---------------------------------------------------------------- 6
Criterion criterion_noiseless_recovery() {
    Criterion c = make_criterion(6, "Noiseless exact recovery for all methods");
    int bad = 0;
    double worst_den = 0.0, worst_sen = 0.0;

    for (int s : {1, 2}) {
        for (int n : {1, 4}) {
            const ProblemInstance inst =
                make_problem(Family::kDenoising, 6, s, 1.0, 0.0, 77 + s, 500);
            const SampleBatch batch = sample(inst, n, 5);
            SolverConfig cfg;
            cfg.radius = inst.radius;
            const McpParams prm(0.5, 0.0, 1.0);
            const double er_saa = excess_risk(inst, solve_saa(inst, batch, cfg).solution).value;
            const double er_nuc =
                excess_risk(inst, solve_nuclear(inst, batch, 0.0, cfg).solution).value;
            const double er_rsaa =
                excess_risk(inst, solve_rsaa(inst, batch, prm, cfg, SymMatrix(6)).solution).value;
            for (double er : {er_saa, er_nuc, er_rsaa}) {
                worst_den = std::max(worst_den, er);
                if (er > 1e-8) ++bad;
            }
        }
    }

    for (int p : {4, 7, 10}) {
        const ProblemInstance inst = make_problem(Family::kSensing, p, 1, 1.0, 0.0, 88 + p, 500);
        const SampleBatch batch = sample(inst, p * (p + 1), 9);
        SolverConfig cfg;
        cfg.radius = inst.radius;
        cfg.max_iters = 50000;
        const McpParams prm(0.5, 0.0, 1.0);
        const double er_saa = excess_risk(inst, solve_saa(inst, batch, cfg).solution).value;
        const double er_nuc =
            excess_risk(inst, solve_nuclear(inst, batch, 0.0, cfg).solution).value;
        const double er_rsaa =
            excess_risk(inst, solve_rsaa(inst, batch, prm, cfg, SymMatrix(p)).solution).value;
        for (double er : {er_saa, er_nuc, er_rsaa}) {
            worst_sen = std::max(worst_sen, er);
            if (er > 1e-6) ++bad;
        }
    }
    c.passed = bad == 0;
    c.detail = "denoising worst " + fmt(worst_den) + ", sensing worst " + fmt(worst_sen);
    return c;
}

// Shared sweep for criteria 7 and 9. The theory lambda is used with a
// pinned calibration factor: its unspecified universal constants make the
// literal value collapse every solution to zero at these sample sizes.
ExperimentSpec trend_spec() {
    ExperimentSpec spec;
    spec.family = Family::kDenoising;
    spec.p_grid = {8, 16, 32};
    spec.n_grid = {25, 50, 100, 200, 400, 800, 1600};
    spec.s = 1;
    spec.radius = 1.0;
    spec.noise_scale = 0.5;
    spec.replications = 20;
    spec.base_seed = 42;
    spec.lambda_source = LambdaSource::kTheory;
    spec.lambda_scale = 0.02;
    spec.pilot_n = 10000;
    return spec;
}

struct SweepData {
    ExperimentResult result_1w;
    std::string csv_1w;
    std::string csv_4w;
};

SweepData run_sweeps() {
    SweepData data;
    const ExperimentSpec spec = trend_spec();
    data.result_1w = run_experiment(spec, 1);
    data.csv_1w = io::records_csv(data.result_1w.records);
    data.csv_4w = io::records_csv(run_experiment(spec, 4).records);
    return data;
}

// ---------------------------------------------------------------- 7
Criterion criterion_sample_complexity_trend(const SweepData& sweep) {
    Criterion c = make_criterion(7, "RSAA dominates SAA at p >= 16 and scales with a flatter slope");
    const auto& records = sweep.result_1w.records;

    const double eps = mean_excess_risk(records, 8, 400, Method::kSaa);
    if (!std::isfinite(eps)) {
        c.detail = "target epsilon undefined (SAA cell empty)";
        return c;
    }

    int ordering_violations = 0;
    std::string worst_cell;
    for (int p : {16, 32}) {
        for (int n : {25, 50, 100, 200, 400, 800, 1600}) {
            const double rsaa = mean_excess_risk(records, p, n, Method::kRsaa);
            const double saa = mean_excess_risk(records, p, n, Method::kSaa);
            if (!(rsaa <= saa)) {
                ++ordering_violations;
                worst_cell = " (p=" + std::to_string(p) + ", n=" + std::to_string(n) +
                             ": RSAA " + fmt(rsaa) + " vs SAA " + fmt(saa) + ")";
            }
        }
    }

    const std::vector<ScalingFit> fits = fit_scaling(records, eps);
    double slope_saa = 0.0, slope_rsaa = 0.0;
    bool have_saa = false, have_rsaa = false;
    for (const ScalingFit& f : fits) {
        if (f.method == Method::kSaa) {
            slope_saa = f.slope;
            have_saa = f.valid;
        }
        if (f.method == Method::kRsaa) {
            slope_rsaa = f.slope;
            have_rsaa = f.valid;
        }
    }
    const bool slopes_ok = have_saa && have_rsaa && (slope_rsaa <= slope_saa - 0.2);

    c.passed = ordering_violations == 0 && slopes_ok;
    c.detail = "eps " + fmt(eps) + ", ordering violations " +
               std::to_string(ordering_violations) + worst_cell + ", slopes SAA " +
               fmt(slope_saa) + " / RSAA " + fmt(slope_rsaa);
    return c;
}

// ---------------------------------------------------------------- 8
Criterion criterion_theory_evaluators() {
    Criterion c = make_criterion(8, "Theory evaluators agree with independent codings; monotone; rank bound > s");
    Rng rng(808);
    int bad = 0;
    for (int trial = 0; trial < 100; ++trial) {
        theory::TheoryInputs in;
        in.p = 2 + int(rng.uniform() * 60);
        in.s = 1 + int(rng.uniform() * std::min(in.p, 5));
        in.n = 16 + std::int64_t(rng.uniform() * 100000);
        in.radius = 1.0 + 4.0 * rng.uniform();
        in.gamma = rng.uniform() < 0.4 ? 0.0 : 2.0 * rng.uniform();
        in.constants.u_l = 1.0 + 3.0 * rng.uniform();
        in.constants.k = 1.0 + 5.0 * rng.uniform();
        in.constants.k_c = 1.0 + 3.0 * rng.uniform();
        in.constants.c_mu = 1.0 + 3.0 * rng.uniform();
        in.constants.bernstein_c = 0.05 + 0.45 * rng.uniform();
        in.universal.c1 = 0.2 + 2.0 * rng.uniform();
        in.universal.c2 = 0.2 + 2.0 * rng.uniform();

        const auto close = [](double a, double b) {
            return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
        };
        if (!close(theory::tuned_lambda(in), oracles::lambda_second(in))) ++bad;
        if (!close(theory::risk_bound_i(in), oracles::risk_bound_i_second(in))) ++bad;
        if (!close(theory::risk_bound_ii(in), oracles::risk_bound_ii_second(in))) ++bad;
        if (!close(theory::sample_condition_i(in).required_n,
                   oracles::condition_i_rhs_second(in)))
            ++bad;
        if (!close(theory::sample_condition_ii(in).required_n,
                   oracles::condition_ii_rhs_second(in)))
            ++bad;
        const double eps = 1.0 / std::cbrt(double(in.n));
        if (double(theory::rank_bound(in, eps)) != oracles::rank_bound_second(in, eps)) ++bad;
        if (!(theory::rank_bound(in) > in.s)) ++bad;
    }

    // Monotonicity of bound (ii) in n (down) and s, p (up).
    theory::TheoryInputs base;
    base.p = 10;
    base.n = 1000;
    base.s = 1;
    double prev = theory::risk_bound_ii(base);
    for (int k = 1; k <= 10; ++k) {
        theory::TheoryInputs t = base;
        t.n = base.n * (1 << k);
        const double cur = theory::risk_bound_ii(t);
        if (!(cur < prev)) ++bad;
        prev = cur;
    }
    prev = 0.0;
    for (int k = 1; k <= 10; ++k) {
        theory::TheoryInputs t = base;
        t.p = 10 * k;
        const double cur = theory::risk_bound_ii(t);
        if (!(cur > prev)) ++bad;
        prev = cur;
    }
    prev = 0.0;
    for (int k = 1; k <= 10; ++k) {
        theory::TheoryInputs t = base;
        t.p = 64;
        t.s = k;
        const double cur = theory::risk_bound_ii(t);
        if (!(cur > prev)) ++bad;
        prev = cur;
    }

    c.passed = bad == 0;
    c.detail = "mismatches " + std::to_string(bad);
    return c;
}

// ---------------------------------------------------------------- 9
Criterion criterion_determinism(const SweepData& sweep) {
    Criterion c = make_criterion(9, "Sweep CSV is byte-identical across 1 and 4 workers");
    c.passed = !sweep.csv_1w.empty() && sweep.csv_1w == sweep.csv_4w;
    c.detail = "csv bytes " + std::to_string(sweep.csv_1w.size()) +
               (c.passed ? ", identical" : ", DIFFER");
    return c;
}

} // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i)
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[i + 1]);

    std::vector<Criterion> results;
    const auto want = [&](int id) { return only == 0 || only == id; };

    const auto timed = [&](auto&& fn) {
        const double t0 = now();
        Criterion c = fn();
        c.seconds = now() - t0;
        results.push_back(std::move(c));
    };

    if (want(1)) timed(criterion_mcp_correctness);
    if (want(2)) timed(criterion_prox_oracles);
    if (want(3) || want(4)) {
        const double t0 = now();
        const std::vector<PipelineRun> runs = pipeline_runs();
        const double shared = now() - t0;
        if (want(3)) {
            Criterion c = criterion_thresholding(runs);
            c.seconds = shared;
            results.push_back(std::move(c));
        }
        if (want(4)) {
            const double t1 = now();
            Criterion c = criterion_descent_and_gap(runs);
            c.seconds = now() - t1;
            results.push_back(std::move(c));
        }
    }
    if (want(5)) timed(criterion_gradient_checks);
    if (want(6)) timed(criterion_noiseless_recovery);
    if (want(7) || want(9)) {
        const double t0 = now();
        const SweepData sweep = run_sweeps();
        const double shared = now() - t0;
        if (want(7)) {
            Criterion c = criterion_sample_complexity_trend(sweep);
            c.seconds = shared;
            results.push_back(std::move(c));
        }
        if (want(9)) {
            Criterion c = criterion_determinism(sweep);
            c.seconds = shared;
            results.push_back(std::move(c));
        }
    }
    if (want(8)) timed(criterion_theory_evaluators);

    std::sort(results.begin(), results.end(),
              [](const Criterion& a, const Criterion& b) { return a.id < b.id; });

    int failures = 0;
    for (const Criterion& c : results) {
        const bool ok = c.passed;
        failures += ok ? 0 : 1;
        std::printf("[%s] criterion %d: %s — %s (%.1fs)\n", ok ? "PASS" : "FAIL", c.id,
                    c.name.c_str(), c.detail.c_str(), c.seconds);
    }
    if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
