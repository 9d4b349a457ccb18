// pqlab: batch experiment runner.
//
//   pqlab run <config.json|-> [--seed S] [--out DIR]
//   pqlab verify <summary.json>
//
// PQLAB_THREADS sets the worker count for trial simulation.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "pqlab/experiment.hpp"

namespace {

pqlab::Json read_json(const std::string& path) {
  if (path == "-") return pqlab::Json::parse(std::cin);
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return pqlab::Json::parse(in);
}

unsigned threads_from_env() {
  const char* env = std::getenv("PQLAB_THREADS");
  if (env == nullptr) return 1;
  const long v = std::strtol(env, nullptr, 10);
  return v > 0 ? static_cast<unsigned>(v) : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pqlab: predictive quantum learning laboratory"};
  app.set_version_flag("--version", pqlab::version());
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  auto* run = app.add_subcommand("run", "Run an experiment config and write its CSV/JSON outputs");
  run->add_option("config", config_path, "Config JSON path, or - for standard input")->required();
  run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--out", out_dir, "Override the output directory");

  std::string summary_path;
  auto* verify = app.add_subcommand("verify", "Re-check the invariants recorded in a summary");
  verify->add_option("summary", summary_path, "Summary JSON path")->required();

  CLI11_PARSE(app, argc, argv);

  if (*run) {
    pqlab::Json doc;
    try {
      doc = read_json(config_path);
    } catch (const std::exception& e) {
      std::cerr << "validation error: " << e.what() << '\n';
      return static_cast<int>(pqlab::ExitStatus::kValidation);
    }
    pqlab::ConfigOverrides overrides;
    overrides.seed = seed;
    if (out_dir) overrides.out_dir = *out_dir;
    overrides.threads = threads_from_env();
    return static_cast<int>(pqlab::run_config(doc, overrides, std::cerr));
  }

  pqlab::Json summary;
  try {
    summary = read_json(summary_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(pqlab::ExitStatus::kValidation);
  }
  const pqlab::VerifyResult result = pqlab::verify_summary(summary);
  for (const auto& name : result.passed) std::cout << "ok    " << name << '\n';
  for (const auto& name : result.failed) std::cout << "FAIL  " << name << '\n';
  return result.ok() ? 0 : 1;
}
