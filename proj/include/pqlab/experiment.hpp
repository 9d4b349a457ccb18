#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pqlab/commlab.hpp"
#include "pqlab/learner.hpp"
#include "pqlab/serialize.hpp"
#include "pqlab/speakability.hpp"

namespace pqlab {

const char* version();

enum class ExitStatus : int { kOk = 0, kFailure = 1, kValidation = 2, kCapBreach = 3 };

struct LearnParams {
  int modulus;
  int copies;
  std::int64_t trials;
  QueryPolicy policy;
  std::optional<Concept> target;
  bool exact;
};

struct CoverParams {
  int modulus;
  CoverMode mode;
};

struct AuditParams {
  int modulus;
  CoverMode mode;
};

struct ConvertParams {
  AnswerFamily family;
  SingleInputProblem problem;
  double eps;
  double m;
  ConversionOptions options;
};

struct TransformParams {
  TwoSidedProblem problem;
  double eps;
  double delta;
  TransformOptions options;
};

struct CostParams {
  std::variant<SingleInputProblem, TwoSidedProblem> problem;
  double eps;
};

using ExperimentParams = std::variant<LearnParams, CoverParams, AuditParams, ConvertParams, TransformParams, CostParams>;

struct ExperimentConfig {
  std::string kind;
  std::uint64_t seed = 0;
  ExperimentParams params;
  std::filesystem::path out_dir;
  std::string csv_name = "trials.csv";
  std::string summary_name = "summary.json";
  unsigned threads = 1;
  Json recorded;  // config as embedded in the summary (no output paths)
};

struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out_dir;
  std::optional<unsigned> threads;
};

/// Validates every parameter against the target module's preconditions.
/// Throws ValidationError or CapExceeded.
ExperimentConfig parse_config(const Json& doc, const ConfigOverrides& overrides = {});

struct ExperimentOutput {
  Json summary;
  std::optional<std::string> csv;
};

/// Runs the experiment in memory; no files are touched.
ExperimentOutput execute(const ExperimentConfig& cfg);

/// Parses, runs, and writes CSV/JSON into the output directory. Errors are
/// reported on `log` and mapped to exit statuses.
ExitStatus run_config(const Json& doc, const ConfigOverrides& overrides, std::ostream& log);

/// Serialized summary text exactly as written to disk.
std::string render_summary(const Json& summary);

struct VerifyResult {
  std::vector<std::string> passed;
  std::vector<std::string> failed;
  bool ok() const { return failed.empty(); }
};

/// Re-checks the invariants recorded in a summary.
VerifyResult verify_summary(const Json& summary);

}  // namespace pqlab
