#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace dlam::cli {

/// Settings of one command, filled from flags, a config file or a report job.
struct JobConfig {
  std::string command;
  std::string model;
  std::string automorphism;
  std::string basis;
  std::string word;
  int power = 0;
  std::string eps;
  std::size_t depth = 4;
  std::size_t cap = 8;
  int kmax = 40;
  double tol = 1e-9;
  std::vector<std::string> rays;
  std::string rays_file;
  std::optional<std::size_t> prefix_cap;
  std::optional<std::size_t> period_cap;
  std::vector<std::string> leaves;
  std::string leaves_file;
  std::string language;
  std::vector<std::string> files;
  std::filesystem::path cache_dir = ".dlam-cache";
  int jobs = 1;
};

struct Outcome {
  nlohmann::json report;
  std::string table;
  int exit_code = 0;
  std::vector<std::string> warnings;
};

/// Runs one command. Relative paths resolve against `dir`.
Outcome run(const JobConfig& cfg, const std::filesystem::path& dir = {});

/// Overrides fields of `cfg` from a JSON object with flag-style keys ("cache-dir", ...).
void apply_config(JobConfig& cfg, const nlohmann::json& j);

/// Full command line front end. Returns the process exit code.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dlam::cli
