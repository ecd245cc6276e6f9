// Command-line front end: solve single instances, run experiment sweeps,
// evaluate the theory calculators, and re-verify stored reports.
//
// Exit codes: 0 success, 1 invalid input, 2 internal failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lowrank/certificates.hpp"
#include "lowrank/errors.hpp"
#include "lowrank/experiments.hpp"
#include "lowrank/json_io.hpp"
#include "lowrank/solvers.hpp"
#include "lowrank/theory.hpp"

namespace {

using lowrank::io::json;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitInternal = 2;

void emit(const json& j, const std::string& out_path) {
    if (out_path.empty())
        std::cout << j.dump(2) << std::endl;
    else
        lowrank::io::save_json_file(out_path, j);
}

int run_theory(const std::string& inputs_path, const std::string& out_path) {
    const auto inputs = lowrank::io::theory_inputs_from_json(
        lowrank::io::load_json_file(inputs_path));
    emit(lowrank::io::theory_report(inputs), out_path);
    return kExitOk;
}

int run_solve(const std::string& problem_path, const std::string& batch_path,
              const std::string& method, double lambda_flag, bool use_theory_lambda,
              double lambda_scale, const std::string& out_path) {
    const json problem_json = lowrank::io::load_json_file(problem_path);
    const lowrank::ProblemInstance inst = lowrank::io::problem_from_json(problem_json);
    const json batch_json = lowrank::io::load_json_file(batch_path);
    const lowrank::SampleBatch batch = lowrank::io::batch_from_json(batch_json, inst);

    lowrank::SolverConfig cfg;
    cfg.radius = inst.radius;

    double lambda = lambda_flag;
    if (use_theory_lambda) {
        lowrank::theory::TheoryInputs tin;
        tin.p = inst.dim;
        tin.n = batch.size();
        tin.s = inst.rank;
        tin.constants = inst.constants;
        tin.radius = inst.radius;
        lambda = lambda_scale * lowrank::theory::tuned_lambda(tin);
    }
    const lowrank::McpParams prm(1.0 / (2.0 * inst.constants.u_l), lambda,
                                 inst.constants.u_l);

    json out;
    out["problem"] = problem_json;
    // Store the batch as given; a lazy {"n","seed"} spec stays lazy so the
    // report is small and replayable.
    out["batch"] = batch_json;
    out["method"] = method;
    out["mcp"] = lowrank::io::mcp_to_json(prm);

    if (method == "saa") {
        out["report"] = lowrank::io::report_to_json(lowrank::solve_saa(inst, batch, cfg));
    } else if (method == "nuclear") {
        out["report"] =
            lowrank::io::report_to_json(lowrank::solve_nuclear(inst, batch, lambda, cfg));
    } else if (method == "rsaa") {
        const lowrank::SolveReport rep =
            lowrank::solve_rsaa(inst, batch, prm, cfg, lowrank::SymMatrix(inst.dim));
        out["report"] = lowrank::io::report_to_json(rep);
    } else if (method == "pipeline") {
        const lowrank::PipelineResult pipe = lowrank::solve_pipeline(inst, batch, prm, cfg);
        out["nuclear_report"] = lowrank::io::report_to_json(pipe.nuclear);
        out["report"] = lowrank::io::report_to_json(pipe.rsaa);
        const auto gap = lowrank::check_initial_gap(
            inst, batch, pipe.nuclear.solution, prm,
            cfg.kkt_tol * inst.x_star.frobenius_norm());
        out["initial_gap"] = {{"passed", gap.passed}, {"gap", gap.gap},
                              {"lhs", gap.lhs},       {"rhs", gap.rhs}};
    } else {
        throw lowrank::InvalidInput("unknown method: " + method);
    }

    const auto er = lowrank::excess_risk(
        inst, lowrank::io::report_from_json(out["report"]).solution);
    out["excess_risk"] = {{"value", er.value}, {"std_error", er.std_error}};
    emit(out, out_path);
    return kExitOk;
}

int run_check(const std::string& report_path) {
    const json doc = lowrank::io::load_json_file(report_path);
    if (!doc.contains("problem") || !doc.contains("batch") || !doc.contains("report"))
        throw lowrank::InvalidInput("report file must contain problem, batch and report");
    const lowrank::ProblemInstance inst = lowrank::io::problem_from_json(doc.at("problem"));
    const lowrank::SampleBatch batch = lowrank::io::batch_from_json(doc.at("batch"), inst);
    const lowrank::SolveReport rep = lowrank::io::report_from_json(doc.at("report"));
    const lowrank::McpParams prm = lowrank::io::mcp_from_json(doc.at("mcp"));

    const double kkt_tol = rep.certificate ? rep.certificate->kkt_tol : 1e-7;
    const auto cert = lowrank::check_s3onc(inst, batch, rep.solution, prm, kkt_tol);
    std::cout << "first_order_residual = " << cert.first_order_residual
              << " (tol " << cert.kkt_tol << ")\n"
              << "band_violations      = " << cert.band_violations.size() << "\n"
              << "certificate          = " << (cert.passed ? "PASS" : "FAIL") << "\n";

    bool ok = cert.passed;
    if (doc.contains("nuclear_report")) {
        const lowrank::SolveReport nuc = lowrank::io::report_from_json(doc.at("nuclear_report"));
        const auto gap = lowrank::check_initial_gap(
            inst, batch, nuc.solution, prm, kkt_tol * inst.x_star.frobenius_norm());
        std::cout << "initial_gap          = " << gap.gap << " ("
                  << (gap.passed ? "PASS" : "FAIL") << ")\n";
        const double at_init = lowrank::penalized_objective(inst, batch, nuc.solution, prm);
        const double at_out = lowrank::penalized_objective(inst, batch, rep.solution, prm);
        const bool descent = at_out <= at_init + 1e-10;
        std::cout << "descent_from_init    = " << (at_out - at_init) << " ("
                  << (descent ? "PASS" : "FAIL") << ")\n";
        ok = ok && gap.passed && descent;
    }
    return ok ? kExitOk : kExitInvalid;
}

int run_experiment_cmd(const std::string& spec_path, const std::string& out_dir, int workers) {
    lowrank::ExperimentSpec spec =
        lowrank::io::experiment_spec_from_json(lowrank::io::load_json_file(spec_path));
    if (const char* env = std::getenv("LOWRANK_RSAA_WORKERS")) {
        try {
            workers = std::stoi(env);
        } catch (...) {
            throw lowrank::InvalidInput("LOWRANK_RSAA_WORKERS is not an integer");
        }
    }
    const lowrank::ExperimentResult result = lowrank::run_experiment(spec, workers);

    std::filesystem::create_directories(out_dir);
    const auto csv_path = std::filesystem::path(out_dir) / "records.csv";
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw lowrank::InvalidInput("cannot write " + csv_path.string());
    lowrank::io::write_records_csv(result.records, csv);
    csv.close();

    std::vector<lowrank::ScalingFit> fits;
    std::vector<int> ps = spec.p_grid, ns = spec.n_grid;
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    if (ps.size() >= 3 && ns.size() >= 4) {
        // Default target: the SAA mean at the smallest p and second-largest n.
        const int p0 = ps.front();
        const int n_ref = ns[ns.size() >= 2 ? ns.size() - 2 : 0];
        const double eps =
            lowrank::mean_excess_risk(result.records, p0, n_ref, lowrank::Method::kSaa);
        if (std::isfinite(eps)) fits = lowrank::fit_scaling(result.records, eps);
    }
    lowrank::io::save_json_file((std::filesystem::path(out_dir) / "summary.json").string(),
                                lowrank::io::summary_to_json(result, fits));
    std::cout << "wrote " << csv_path.string() << " (" << result.records.size()
              << " records)" << std::endl;
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Low-rank regularized SAA toolkit"};
    app.require_subcommand(1);

    std::string inputs_path, out_path;
    auto* theory_cmd = app.add_subcommand("theory", "evaluate the bound calculators");
    theory_cmd->add_option("--inputs", inputs_path, "JSON inputs file")->required();
    theory_cmd->add_option("--out", out_path, "output JSON path (default: stdout)");

    std::string problem_path, batch_path, method = "pipeline";
    double lambda_flag = 0.0, lambda_scale = 1.0;
    bool theory_lambda = false;
    auto* solve_cmd = app.add_subcommand("solve", "solve one instance");
    solve_cmd->add_option("--problem", problem_path, "problem JSON")->required();
    solve_cmd->add_option("--batch", batch_path, "batch JSON")->required();
    solve_cmd->add_option("--method", method, "saa|nuclear|rsaa|pipeline")
        ->check(CLI::IsMember({"saa", "nuclear", "rsaa", "pipeline"}));
    solve_cmd->add_option("--lambda", lambda_flag, "penalty level (default 0)");
    solve_cmd->add_flag("--theory-lambda", theory_lambda,
                        "use the tuned lambda from the problem constants");
    solve_cmd->add_option("--lambda-scale", lambda_scale,
                          "scale factor applied to the theory lambda");
    solve_cmd->add_option("--out", out_path, "output JSON path (default: stdout)");

    std::string report_path;
    auto* check_cmd = app.add_subcommand("check", "re-verify certificates of a stored report");
    check_cmd->add_option("--report", report_path, "report JSON from `solve`")->required();

    std::string spec_path, out_dir = ".";
    int workers = 1;
    auto* exp_cmd = app.add_subcommand("experiment", "run a Monte Carlo sweep");
    exp_cmd->add_option("--spec", spec_path, "experiment spec JSON")->required();
    exp_cmd->add_option("--out", out_dir, "output directory");
    exp_cmd->add_option("--workers", workers, "worker threads (env LOWRANK_RSAA_WORKERS wins)");

    try {
        app.parse(argc, argv);
        if (*theory_cmd) return run_theory(inputs_path, out_path);
        if (*solve_cmd)
            return run_solve(problem_path, batch_path, method, lambda_flag, theory_lambda,
                             lambda_scale, out_path);
        if (*check_cmd) return run_check(report_path);
        if (*exp_cmd) return run_experiment_cmd(spec_path, out_dir, workers);
        return kExitInvalid;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitInvalid;
    } catch (const lowrank::InvalidInput& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << std::endl;
        return kExitInternal;
    }
}
