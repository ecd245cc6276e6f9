#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "lowrank/experiments.hpp"
#include "lowrank/penalty.hpp"
#include "lowrank/problems.hpp"
#include "lowrank/solvers.hpp"
#include "lowrank/theory.hpp"

// JSON (de)serialization of the library's value types. Ordered maps keep
// output bytes stable. Malformed documents raise InvalidInput.
namespace lowrank::io {

using json = nlohmann::ordered_json;

json matrix_to_json(const SymMatrix& m); // {"dim": p, "data": flat row-major}
SymMatrix matrix_from_json(const nlohmann::json& j);

json constants_to_json(const AssumptionConstants& c);
AssumptionConstants constants_from_json(const nlohmann::json& j);

// Problems serialize as their construction parameters plus the estimated
// constants; X* is rebuilt deterministically from the seed on load.
json problem_to_json(const ProblemInstance& inst);
ProblemInstance problem_from_json(const nlohmann::json& j);

// Batches serialize either in full (scenario payloads as flat arrays) or
// lazily as {"n", "seed"}, regenerated from the problem seed on load.
json batch_to_json(const SampleBatch& batch);
SampleBatch batch_from_json(const nlohmann::json& j, const ProblemInstance& inst);

json mcp_to_json(const McpParams& prm);
McpParams mcp_from_json(const nlohmann::json& j);

json solver_config_to_json(const SolverConfig& cfg);
SolverConfig solver_config_from_json(const nlohmann::json& j);

json certificate_to_json(const S3oncCertificate& cert);
S3oncCertificate certificate_from_json(const nlohmann::json& j);

json report_to_json(const SolveReport& rep);
SolveReport report_from_json(const nlohmann::json& j);

json theory_inputs_to_json(const theory::TheoryInputs& in);
theory::TheoryInputs theory_inputs_from_json(const nlohmann::json& j);

// Every theory evaluator at the given inputs, plus the universal-constant
// caveat flag.
json theory_report(const theory::TheoryInputs& in);

json experiment_spec_to_json(const ExperimentSpec& spec);
ExperimentSpec experiment_spec_from_json(const nlohmann::json& j);

// CSV contract: fixed header, LF endings, 12 significant digits. The
// wall_time_s column is written as 0 so identical specs produce identical
// bytes (measured times live in the in-memory records only).
void write_records_csv(const std::vector<ExperimentRecord>& records, std::ostream& out);
std::string records_csv(const std::vector<ExperimentRecord>& records);

json summary_to_json(const ExperimentResult& result, const std::vector<ScalingFit>& fits);

json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const json& j);

} // namespace lowrank::io
