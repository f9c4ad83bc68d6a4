#pragma once
// Experiment runner: flat key = value configs, one command per run, a manifest
// per output directory and byte-exact replay.

#include "nl/core.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace nl::cli {

struct ExperimentConfig {
  std::string command;
  std::map<std::string, std::string> params;  // raw text, lists kept as "[a, b]"
  std::uint64_t seed = 1;
  std::string output_dir;
};

const std::vector<std::string>& command_names();

/// Lines "key = value"; '#' starts a comment; lists are "[a, b, c]".
ExperimentConfig parse_config(std::istream& is);
ExperimentConfig parse_config_file(const std::string& path);
std::string render_config(const ExperimentConfig& cfg);

/// Reals accept products and quotients of numbers, log(.), sqrt(.) and pi.
double parse_real(const std::string& text);
std::vector<std::string> split_list(const std::string& text);

/// Checks every key of the command's schema. ConfigError on unknown, missing or ill-typed keys.
void validate(const ExperimentConfig& cfg);

struct RunResult {
  int exit_code = 0;
  std::string error;
  std::vector<std::string> files;  // result files, relative to output_dir
};

/// Runs one experiment into cfg.output_dir and writes manifest.json there.
RunResult run(const ExperimentConfig& cfg, std::ostream& log);
/// Reruns a manifest into a scratch directory and compares every result file byte by byte.
int replay(const std::string& manifest_path, std::ostream& log, std::ostream& err);

/// Output directory used when none is given: $NORMLAB_OUT or ./normlab-out.
std::string default_output_dir();

int main_entry(int argc, char** argv);

}  // namespace nl::cli
