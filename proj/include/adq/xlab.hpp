#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace adq {

inline constexpr int kSchemaVersion = 1;

struct ParamSpec {
  std::string key;
  std::string default_value;
  std::string help;
};

struct ExperimentInfo {
  std::string name;
  std::string description;
  std::vector<ParamSpec> params;
};

const std::vector<ExperimentInfo>& experiments();

// Throws UsageError for unknown experiments.
const ExperimentInfo& find_experiment(const std::string& name);

using ParamMap = std::map<std::string, std::string>;

// Defaults, then the config file, then CLI overrides. Unknown keys throw
// UsageError.
ParamMap resolve_params(const std::string& name, const ParamMap& config,
                        const ParamMap& overrides);

// key=value lines; '#' starts a comment, blank lines are skipped.
ParamMap parse_key_values(std::istream& in);

// "k=v" -> {k, v}; throws UsageError when there is no '='.
std::pair<std::string, std::string> split_assignment(const std::string& kv);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string to_csv(const Table& table);

struct ExperimentResult {
  std::string name;
  std::uint64_t seed = 0;
  ParamMap params;  // fully resolved
  Table table;
  nlohmann::ordered_json summary;
};

// Runs with the given overrides merged over the defaults. Invalid values
// throw UsageError.
ExperimentResult run_experiment(const std::string& name, const ParamMap& overrides,
                                std::uint64_t seed);

// schema_version, the manifest (experiment, seed, resolved params, files)
// and the experiment summary.
nlohmann::ordered_json summary_document(const ExperimentResult& result);

// Writes <dir>/<name>.csv and <dir>/<name>.json; returns the CSV path.
std::filesystem::path write_outputs(const ExperimentResult& result,
                                    const std::filesystem::path& dir);

// Entry point of the adq binary. Exit codes: 0 success, 1 runtime failure,
// 2 usage error.
int run_cli(int argc, char** argv);

}  // namespace adq
