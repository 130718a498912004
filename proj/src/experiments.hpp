#pragma once

// Reproducible experiments behind the command line: each command reads a flat
// key/value configuration and produces a JSON report, optional data files and a
// verdict.

#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace tractlab {

enum class Verdict { None, Pass, Fail };
const char* to_string(Verdict v);

/// Flat configuration. Values are strings; every lookup records the value
/// actually used (including defaults) in `resolved`.
class ExperimentConfig {
 public:
  ExperimentConfig() = default;
  explicit ExperimentConfig(std::map<std::string, std::string> values);
  static ExperimentConfig from_json(const nlohmann::json& object);

  bool has(const std::string& key) const;
  std::string text(const std::string& key, const std::string& fallback);
  std::string text(const std::string& key);  // required
  double number(const std::string& key, double fallback);
  double number(const std::string& key);
  int integer(const std::string& key, int fallback);
  bool flag(const std::string& key, bool fallback);
  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback);
  /// "a:b" pairs such as annuli.
  std::pair<double, double> range(const std::string& key, std::pair<double, double> fallback);

  const nlohmann::json& resolved() const { return resolved_; }
  /// Keys that were supplied but never read.
  std::vector<std::string> unused() const;

 private:
  std::map<std::string, std::string> values_;
  std::map<std::string, bool> read_;
  nlohmann::json resolved_ = nlohmann::json::object();
};

struct OutputFile {
  std::string name;
  std::string content;
};

struct ExperimentResult {
  std::string command;
  nlohmann::json report;  // includes "config", "version" and "verdict"
  Verdict verdict = Verdict::None;
  std::vector<OutputFile> files;
};

const std::vector<std::string>& experiment_commands();

/// Throws Error(Parameter) for unknown commands, missing or malformed keys,
/// and keys the command does not use.
ExperimentResult run_experiment(const std::string& command, ExperimentConfig config);

}  // namespace tractlab
