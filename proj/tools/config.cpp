#include "config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <variant>

namespace fhlab {

namespace {

using Slot = std::variant<int*, double*, std::string*>;

std::vector<std::pair<std::string, Slot>> slots(ExperimentConfig& c) {
  return {{"schema", &c.schema},   {"n", &c.n},
          {"N", &c.N},             {"L", &c.L},
          {"flow", &c.flow},       {"init", &c.init},
          {"s", &c.s},             {"M", &c.M},
          {"dt", &c.dt},           {"T", &c.T},
          {"t_start", &c.t_start}, {"sample_every", &c.sample_every},
          {"battery", &c.battery}, {"theorem", &c.theorem},
          {"member", &c.member},   {"passes", &c.passes},
          {"r", &c.r},             {"anchor_x", &c.anchor_x},
          {"anchor_t", &c.anchor_t}, {"levels", &c.levels},
          {"x0", &c.x0},           {"R", &c.R},
          {"t1", &c.t1},           {"t2", &c.t2},
          {"input", &c.input},     {"out", &c.out}};
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  // Shortest representation that parses back to the same value.
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::vector<std::pair<std::string, std::string>> to_pairs(const ExperimentConfig& c) {
  ExperimentConfig copy = c;
  std::vector<std::pair<std::string, std::string>> out;
  for (auto& [name, slot] : slots(copy)) {
    std::string text = std::visit(
        [](auto* p) -> std::string {
          using T = std::remove_pointer_t<decltype(p)>;
          if constexpr (std::is_same_v<T, std::string>)
            return *p;
          else if constexpr (std::is_same_v<T, int>)
            return std::to_string(*p);
          else
            return format_double(*p);
        },
        slot);
    out.emplace_back(name, std::move(text));
  }
  return out;
}

std::string to_text(const ExperimentConfig& c) {
  std::ostringstream os;
  for (const auto& [k, v] : to_pairs(c)) os << k << " = " << v << '\n';
  return os.str();
}

void set_key(ExperimentConfig& c, const std::string& key, const std::string& value, std::vector<std::string>& errors) {
  for (auto& [name, slot] : slots(c)) {
    if (name != key) continue;
    std::visit(
        [&](auto* p) {
          using T = std::remove_pointer_t<decltype(p)>;
          if constexpr (std::is_same_v<T, std::string>) {
            *p = value;
          } else {
            T parsed{};
            const auto res = std::from_chars(value.data(), value.data() + value.size(), parsed);
            if (res.ec != std::errc() || res.ptr != value.data() + value.size())
              errors.push_back("key '" + key + "': cannot parse '" + value + "'");
            else
              *p = parsed;
          }
        },
        slot);
    return;
  }
  errors.push_back("unknown key '" + key + "'");
}

ExperimentConfig parse_text(const std::string& text, std::vector<std::string>& errors) {
  ExperimentConfig c;
  c.schema.clear();
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back("line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    if (!seen.insert(key).second) errors.push_back("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    set_key(c, key, trim(line.substr(eq + 1)), errors);
  }
  return c;
}

ExperimentConfig load(const std::filesystem::path& path, std::vector<std::string>& errors) {
  std::ifstream in(path);
  if (!in) {
    errors.push_back("cannot read config " + path.string());
    return {};
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str(), errors);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ','))
    if (!trim(item).empty()) out.push_back(trim(item));
  return out;
}

std::string canonical_theorem(const std::string& t) { return t == "f2" ? "master" : t; }

std::vector<std::string> validate(const ExperimentConfig& c, const std::string& command) {
  std::vector<std::string> e;
  auto need = [&e](bool ok, const std::string& msg) {
    if (!ok) e.push_back(msg);
  };
  need(c.schema == kSchema, "schema must be '" + std::string(kSchema) + "' (got '" + c.schema + "')");
  need(c.n == 1 || c.n == 2, "n must be 1 or 2");
  need(c.N >= 8 && c.N % 2 == 0, "N must be even and >= 8");
  need(std::isfinite(c.L) && c.L > 0.0, "L must be positive");
  need(c.flow == "local" || c.flow == "fractional" || c.flow == "master", "flow must be local, fractional or master");
  need(c.init == "phase" || c.init == "wave" || c.init == "gaussian", "init must be phase, wave or gaussian");
  need(c.dt >= 0.0, "dt must be >= 0 (0 selects the largest admissible step)");
  need(std::isfinite(c.T) && c.T > 0.0, "T must be positive");
  need(c.sample_every >= 1, "sample_every must be >= 1");
  need(!c.out.empty(), "out must name a directory");

  const bool sphere = c.flow == "local" && c.init == "phase" && c.M == 1.0;
  if (command == "run-local" || command == "run-fractional" || command == "cascade")
    need(sphere || (c.M > 0.0 && c.M <= 0.99), "M must lie in (0, 0.99] (or equal 1 for sphere-valued phase data of the local flow)");
  const bool uses_s = command == "run-fractional" || command == "verify-extension" ||
                      (command == "cascade" && c.flow == "fractional") ||
                      (command == "harnack" && canonical_theorem(c.theorem) != "local") || command == "tail";
  if (uses_s) need(c.s > 0.0 && c.s < 1.0, "s must lie in (0, 1)");
  if (command == "run-local") need(c.flow == "local", "run-local needs flow = local");
  if (command == "run-fractional") need(c.flow == "fractional", "run-fractional needs flow = fractional");
  if (command == "cascade") {
    need(c.flow == "local" || c.flow == "fractional", "cascade needs flow = local or fractional");
    need(c.r > 0.0 && c.r < 1.0, "r must lie in (0, 1)");
    need(c.levels >= 0, "levels must be >= 0");
  }
  if (command == "harnack" || command == "tail") {
    const std::string t = canonical_theorem(c.theorem);
    need(c.battery == "battery-v1", "battery must be battery-v1");
    if (command == "harnack") need(t == "local" || t == "fractional" || t == "master", "theorem must be local, fractional, master or f2");
  }
  if (command == "tail") {
    need(c.R > 0.0, "R must be positive");
    need(c.t1 < c.t2, "t1 must be below t2");
  }
  if (command == "verify-identities") {
    const std::set<std::string> known{"carre", "quadrature", "scaling", "semigroup", "normalization"};
    const auto list = split_list(c.passes);
    need(!list.empty(), "passes must list at least one pass");
    for (const auto& p : list) need(known.count(p) == 1, "unknown pass '" + p + "'");
  }
  return e;
}

}  // namespace fhlab
