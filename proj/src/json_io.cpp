#include "lowrank/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "lowrank/errors.hpp"

namespace lowrank::io {

namespace {

std::string fmt_g12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

Family family_from_string(const std::string& s) {
    if (s == "Denoising") return Family::kDenoising;
    if (s == "Sensing") return Family::kSensing;
    throw InvalidInput("unknown family: " + s);
}

NoiseKind noise_from_string(const std::string& s) {
    if (s == "gaussian") return NoiseKind::kGaussian;
    if (s == "exponential") return NoiseKind::kExponential;
    throw InvalidInput("unknown noise kind: " + s);
}

const char* noise_name(NoiseKind k) {
    return k == NoiseKind::kGaussian ? "gaussian" : "exponential";
}

template <class T>
T require(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) throw InvalidInput(std::string("missing JSON key: ") + key);
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw InvalidInput(std::string("malformed JSON value at key: ") + key);
    }
}

template <class T>
T optional_or(const nlohmann::json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw InvalidInput(std::string("malformed JSON value at key: ") + key);
    }
}

} // namespace

json matrix_to_json(const SymMatrix& m) {
    json j;
    j["dim"] = m.dim();
    j["data"] = std::vector<double>(m.data().begin(), m.data().end());
    return j;
}

SymMatrix matrix_from_json(const nlohmann::json& j) {
    const int dim = require<int>(j, "dim");
    const auto data = require<std::vector<double>>(j, "data");
    return SymMatrix::from_rows(dim, data);
}

json constants_to_json(const AssumptionConstants& c) {
    json j;
    j["u_l"] = c.u_l;
    j["k"] = c.k;
    j["k_c"] = c.k_c;
    j["c_mu"] = c.c_mu;
    j["bernstein_c"] = c.bernstein_c;
    return j;
}

AssumptionConstants constants_from_json(const nlohmann::json& j) {
    AssumptionConstants c;
    c.u_l = optional_or(j, "u_l", c.u_l);
    c.k = optional_or(j, "k", c.k);
    c.k_c = optional_or(j, "k_c", c.k_c);
    c.c_mu = optional_or(j, "c_mu", c.c_mu);
    c.bernstein_c = optional_or(j, "bernstein_c", c.bernstein_c);
    c.validate();
    return c;
}

json problem_to_json(const ProblemInstance& inst) {
    json j;
    j["family"] = family_name(inst.family);
    j["p"] = inst.dim;
    j["s"] = inst.rank;
    j["radius"] = inst.radius;
    j["noise_scale"] = inst.noise_scale;
    j["noise_kind"] = noise_name(inst.noise_kind);
    j["seed"] = inst.seed;
    j["constants"] = constants_to_json(inst.constants);
    return j;
}

ProblemInstance problem_from_json(const nlohmann::json& j) {
    const Family family = family_from_string(require<std::string>(j, "family"));
    const int p = require<int>(j, "p");
    const int s = require<int>(j, "s");
    const double radius = require<double>(j, "radius");
    const double noise = require<double>(j, "noise_scale");
    const NoiseKind kind = noise_from_string(optional_or<std::string>(j, "noise_kind", "gaussian"));
    const std::uint64_t seed = require<std::uint64_t>(j, "seed");
    if (j.contains("constants"))
        return make_problem_with_constants(family, p, s, radius, noise, seed,
                                           constants_from_json(j.at("constants")), kind);
    return make_problem(family, p, s, radius, noise, seed, kDefaultPilotSamples, kind);
}

json batch_to_json(const SampleBatch& batch) {
    json j;
    j["family"] = family_name(batch.family);
    j["n"] = batch.size();
    std::vector<double> mats;
    std::vector<double> responses;
    responses.reserve(batch.size());
    for (const Scenario& z : batch.scenarios) {
        mats.insert(mats.end(), z.mat.data().begin(), z.mat.data().end());
        responses.push_back(z.response);
    }
    j["mats"] = std::move(mats);
    j["responses"] = std::move(responses);
    return j;
}

SampleBatch batch_from_json(const nlohmann::json& j, const ProblemInstance& inst) {
    const int n = require<int>(j, "n");
    if (!j.contains("mats")) {
        // Lazy form: regenerate from the problem seed.
        const std::uint64_t seed = require<std::uint64_t>(j, "seed");
        return sample(inst, n, seed);
    }
    const auto mats = require<std::vector<double>>(j, "mats");
    const auto responses = require<std::vector<double>>(j, "responses");
    const std::size_t per = static_cast<std::size_t>(inst.dim) * inst.dim;
    if (mats.size() != per * n || responses.size() != static_cast<std::size_t>(n))
        throw InvalidInput("batch_from_json: array sizes inconsistent with n and p");
    SampleBatch batch;
    batch.family = inst.family;
    batch.scenarios.reserve(n);
    for (int i = 0; i < n; ++i) {
        Scenario z;
        z.mat = SymMatrix::from_rows(
            inst.dim, std::span<const double>(mats.data() + per * i, per));
        z.response = responses[i];
        batch.scenarios.push_back(std::move(z));
    }
    return batch;
}

json mcp_to_json(const McpParams& prm) {
    json j;
    j["a"] = prm.a;
    j["lambda"] = prm.lambda;
    j["u_l"] = prm.u_l;
    return j;
}

McpParams mcp_from_json(const nlohmann::json& j) {
    return McpParams(require<double>(j, "a"), require<double>(j, "lambda"),
                     optional_or(j, "u_l", 1.0));
}

json solver_config_to_json(const SolverConfig& cfg) {
    json j;
    j["max_iters"] = cfg.max_iters;
    j["kkt_tol"] = cfg.kkt_tol;
    j["step_rule"] = "FixedBacktracking";
    j["initial_step"] = cfg.initial_step;
    j["backtrack_factor"] = cfg.backtrack_factor;
    j["armijo_const"] = cfg.armijo_const;
    j["radius"] = cfg.radius;
    return j;
}

SolverConfig solver_config_from_json(const nlohmann::json& j) {
    SolverConfig cfg;
    cfg.max_iters = optional_or(j, "max_iters", cfg.max_iters);
    cfg.kkt_tol = optional_or(j, "kkt_tol", cfg.kkt_tol);
    cfg.initial_step = optional_or(j, "initial_step", cfg.initial_step);
    cfg.backtrack_factor = optional_or(j, "backtrack_factor", cfg.backtrack_factor);
    cfg.armijo_const = optional_or(j, "armijo_const", cfg.armijo_const);
    cfg.radius = optional_or(j, "radius", cfg.radius);
    if (j.contains("step_rule") && j.at("step_rule") != "FixedBacktracking")
        throw InvalidInput("solver_config_from_json: unknown step_rule");
    cfg.validate();
    return cfg;
}

json certificate_to_json(const S3oncCertificate& cert) {
    json j;
    j["passed"] = cert.passed;
    j["first_order_residual"] = cert.first_order_residual;
    j["second_order_ok"] = cert.second_order_ok;
    j["kkt_tol"] = cert.kkt_tol;
    j["tol_zero"] = cert.tol_zero;
    j["tol_band"] = cert.tol_band;
    j["step_used"] = cert.step_used;
    json viols = json::array();
    for (const auto& [idx, w] : cert.band_violations) viols.push_back(json{{"j", idx}, {"sigma", w}});
    j["band_violations"] = std::move(viols);
    return j;
}

S3oncCertificate certificate_from_json(const nlohmann::json& j) {
    S3oncCertificate cert;
    cert.passed = require<bool>(j, "passed");
    cert.first_order_residual = require<double>(j, "first_order_residual");
    cert.second_order_ok = require<bool>(j, "second_order_ok");
    cert.kkt_tol = require<double>(j, "kkt_tol");
    cert.tol_zero = optional_or(j, "tol_zero", 0.0);
    cert.tol_band = optional_or(j, "tol_band", 0.0);
    cert.step_used = optional_or(j, "step_used", 0.0);
    if (j.contains("band_violations"))
        for (const auto& v : j.at("band_violations"))
            cert.band_violations.emplace_back(require<int>(v, "j"), require<double>(v, "sigma"));
    return cert;
}

json report_to_json(const SolveReport& rep) {
    json j;
    j["solution"] = matrix_to_json(rep.solution);
    j["objective_empirical"] = rep.objective_empirical;
    j["objective_penalized"] = rep.objective_penalized;
    j["rank"] = rep.rank;
    j["iterations"] = rep.iterations;
    j["converged"] = rep.converged;
    if (rep.certificate) j["certificate"] = certificate_to_json(*rep.certificate);
    json trace = json::array();
    for (const TracePoint& t : rep.trace) trace.push_back({t.objective, t.step, t.grad_norm});
    j["trace"] = std::move(trace);
    return j;
}

SolveReport report_from_json(const nlohmann::json& j) {
    SolveReport rep;
    rep.solution = matrix_from_json(j.at("solution"));
    rep.objective_empirical = require<double>(j, "objective_empirical");
    rep.objective_penalized = require<double>(j, "objective_penalized");
    rep.rank = require<int>(j, "rank");
    rep.iterations = require<int>(j, "iterations");
    rep.converged = require<bool>(j, "converged");
    if (j.contains("certificate")) rep.certificate = certificate_from_json(j.at("certificate"));
    if (j.contains("trace"))
        for (const auto& t : j.at("trace")) {
            if (!t.is_array() || t.size() != 3)
                throw InvalidInput("report_from_json: malformed trace entry");
            rep.trace.push_back({t[0].get<double>(), t[1].get<double>(), t[2].get<double>()});
        }
    return rep;
}

json theory_inputs_to_json(const theory::TheoryInputs& in) {
    json j;
    j["p"] = in.p;
    j["n"] = in.n;
    j["s"] = in.s;
    j["radius"] = in.radius;
    j["gamma"] = in.gamma;
    j["constants"] = constants_to_json(in.constants);
    j["universal"] = {{"c_tilde", in.universal.c_tilde},
                      {"c1", in.universal.c1},
                      {"c2", in.universal.c2}};
    return j;
}

theory::TheoryInputs theory_inputs_from_json(const nlohmann::json& j) {
    theory::TheoryInputs in;
    in.p = require<int>(j, "p");
    in.n = require<std::int64_t>(j, "n");
    in.s = require<int>(j, "s");
    in.radius = optional_or(j, "radius", 1.0);
    in.gamma = optional_or(j, "gamma", 0.0);
    if (j.contains("constants")) in.constants = constants_from_json(j.at("constants"));
    if (j.contains("universal")) {
        const auto& u = j.at("universal");
        in.universal.c_tilde = optional_or(u, "c_tilde", 1.0);
        in.universal.c1 = optional_or(u, "c1", 1.0);
        in.universal.c2 = optional_or(u, "c2", 1.0);
    }
    in.validate();
    return in;
}

json theory_report(const theory::TheoryInputs& in) {
    json j;
    j["inputs"] = theory_inputs_to_json(in);
    j["delta_tilde"] = theory::delta_tilde(in.constants, in.radius);
    j["log_term"] = theory::log_term(in);
    j["a"] = theory::tuned_a(in);
    j["lambda"] = theory::tuned_lambda(in);
    const auto ci = theory::sample_condition_i(in);
    j["sample_condition_i"] = {{"required_n", ci.required_n}, {"satisfied", ci.satisfied}};
    j["risk_bound_i"] = theory::risk_bound_i(in);
    const auto cii = theory::sample_condition_ii(in);
    j["sample_condition_ii"] = {{"required_n", cii.required_n}, {"satisfied", cii.satisfied}};
    j["risk_bound_ii"] = theory::risk_bound_ii(in);
    j["rank_bound"] = theory::rank_bound(in);
    const auto cover = theory::covering_number(in.s, in.radius,
                                               1.0 / std::cbrt(double(in.n)), in.p);
    j["covering_log_count"] = cover.log_count;
    j["covering_trivial"] = cover.trivial;
    j["saa_classical_bound"] = theory::saa_classical_bound(in.p, in.n, 1.0);
    j["min_n_condition_i"] = theory::min_n_condition_i(in);
    j["min_n_condition_ii"] = theory::min_n_condition_ii(in);
    j["up_to_universal_constants"] = true;
    return j;
}

json experiment_spec_to_json(const ExperimentSpec& spec) {
    json j;
    j["family"] = family_name(spec.family);
    j["p_grid"] = spec.p_grid;
    j["n_grid"] = spec.n_grid;
    j["s"] = spec.s;
    j["radius"] = spec.radius;
    j["noise_scale"] = spec.noise_scale;
    j["noise_kind"] = noise_name(spec.noise_kind);
    j["replications"] = spec.replications;
    j["base_seed"] = spec.base_seed;
    j["solver_cfg"] = solver_config_to_json(spec.solver_cfg);
    j["lambda_source"] = spec.lambda_source == LambdaSource::kTheory ? "theory" : "manual";
    j["lambda_manual"] = spec.lambda_manual;
    j["lambda_scale"] = spec.lambda_scale;
    j["pilot_n"] = spec.pilot_n;
    j["output_path"] = spec.output_path;
    return j;
}

ExperimentSpec experiment_spec_from_json(const nlohmann::json& j) {
    ExperimentSpec spec;
    spec.family = family_from_string(require<std::string>(j, "family"));
    spec.p_grid = require<std::vector<int>>(j, "p_grid");
    spec.n_grid = require<std::vector<int>>(j, "n_grid");
    spec.s = require<int>(j, "s");
    spec.radius = optional_or(j, "radius", 1.0);
    spec.noise_scale = optional_or(j, "noise_scale", 0.5);
    spec.noise_kind = noise_from_string(optional_or<std::string>(j, "noise_kind", "gaussian"));
    spec.replications = optional_or(j, "replications", 20);
    spec.base_seed = optional_or<std::uint64_t>(j, "base_seed", 42);
    if (j.contains("solver_cfg")) spec.solver_cfg = solver_config_from_json(j.at("solver_cfg"));
    const std::string src = optional_or<std::string>(j, "lambda_source", "theory");
    if (src == "theory")
        spec.lambda_source = LambdaSource::kTheory;
    else if (src == "manual")
        spec.lambda_source = LambdaSource::kManual;
    else
        throw InvalidInput("experiment_spec_from_json: unknown lambda_source");
    spec.lambda_manual = optional_or(j, "lambda_manual", 0.0);
    spec.lambda_scale = optional_or(j, "lambda_scale", 1.0);
    spec.pilot_n = optional_or(j, "pilot_n", kDefaultPilotSamples);
    spec.output_path = optional_or<std::string>(j, "output_path", "");
    spec.validate();
    return spec;
}

void write_records_csv(const std::vector<ExperimentRecord>& records, std::ostream& out) {
    out << "family,p,n,s,replication,method,lambda,excess_risk,rank,cert_passed,converged,"
           "wall_time_s\n";
    for (const ExperimentRecord& r : records) {
        out << family_name(r.family) << ',' << r.p << ',' << r.n << ',' << r.s << ','
            << r.replication << ',' << method_name(r.method) << ',' << fmt_g12(r.lambda_used)
            << ',' << fmt_g12(r.excess_risk) << ',' << r.rank << ','
            << (r.cert_passed ? "true" : "false") << ',' << (r.converged ? "true" : "false")
            << ",0\n";
    }
}

std::string records_csv(const std::vector<ExperimentRecord>& records) {
    std::ostringstream ss;
    write_records_csv(records, ss);
    return ss.str();
}

json summary_to_json(const ExperimentResult& result, const std::vector<ScalingFit>& fits) {
    json cells = json::array();
    for (const CellSummary& c : result.summary) {
        cells.push_back({{"p", c.p},
                         {"n", c.n},
                         {"method", method_name(c.method)},
                         {"mean_excess_risk", c.mean_excess_risk},
                         {"std_error", c.std_error},
                         {"included", c.included},
                         {"excluded", c.excluded}});
    }
    json scaling = json::array();
    for (const ScalingFit& f : fits) {
        json pts = json::array();
        for (const auto& [p, nstar] : f.n_star) pts.push_back({{"p", p}, {"n_star", nstar}});
        scaling.push_back({{"method", method_name(f.method)},
                           {"valid", f.valid},
                           {"slope", f.slope},
                           {"slope_std_error", f.slope_std_error},
                           {"points", std::move(pts)},
                           {"extrapolated_p", f.extrapolated_p},
                           {"excluded_p", f.excluded_p}});
    }
    json j;
    j["cells"] = std::move(cells);
    j["scaling"] = std::move(scaling);
    return j;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open file: " + path);
    try {
        return json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput("failed to parse JSON from " + path + ": " + e.what());
    }
}

void save_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot open file for writing: " + path);
    out << j.dump(2) << '\n';
}

} // namespace lowrank::io
