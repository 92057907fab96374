#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace fhlab {

inline constexpr const char* kSchema = "fhlab-config/1";

/// Experiment configuration. Text form: one `key = value` per line, `#` comments,
/// `schema` must name the supported version.
struct ExperimentConfig {
  std::string schema = kSchema;
  // grid
  int n = 1;
  int N = 256;
  double L = 4.0;
  // flow
  std::string flow = "local";  // local | fractional | master
  std::string init = "phase";  // phase | wave | gaussian
  double s = 0.5;
  double M = 0.9;
  double dt = 0.0;  // 0 selects the largest admissible step
  double T = 0.5;
  double t_start = 0.0;
  int sample_every = 1;
  // batteries
  std::string battery = "battery-v1";
  std::string theorem = "local";  // local | fractional | master (f2 is an alias of master)
  std::string member = "far-negative";
  // verification passes
  std::string passes = "carre,quadrature,scaling,semigroup,normalization";
  // cascade
  double r = 0.5;
  double anchor_x = 0.0;
  double anchor_t = 0.0;
  int levels = 12;
  // tail
  double x0 = 0.0;
  double R = 1.0;
  double t1 = -1.0;
  double t2 = 0.0;
  std::string input;
  // output
  std::string out = "fhlab-out";
};

/// Key/value view in canonical key order.
std::vector<std::pair<std::string, std::string>> to_pairs(const ExperimentConfig& c);
std::string to_text(const ExperimentConfig& c);

/// Applies one key; appends a message to `errors` for unknown keys or unparsable values.
void set_key(ExperimentConfig& c, const std::string& key, const std::string& value, std::vector<std::string>& errors);

ExperimentConfig parse_text(const std::string& text, std::vector<std::string>& errors);
ExperimentConfig load(const std::filesystem::path& path, std::vector<std::string>& errors);

/// Every violated precondition for the given subcommand, one message each.
std::vector<std::string> validate(const ExperimentConfig& c, const std::string& command);

std::vector<std::string> split_list(const std::string& s);
std::string canonical_theorem(const std::string& t);

}  // namespace fhlab
