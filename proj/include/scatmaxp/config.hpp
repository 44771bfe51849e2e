#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "scatmaxp/error.hpp"
#include "scatmaxp/filterbank.hpp"
#include "scatmaxp/io.hpp"
#include "scatmaxp/pooling.hpp"
#include "scatmaxp/scattering.hpp"
#include "scatmaxp/verify.hpp"

namespace scatmaxp {

/// Bad key, bad value or unreadable config file.
class UsageError : public Error {
 public:
  using Error::Error;
};

enum class OutputFormat { sgrid, csv };

inline const char* to_string(OutputFormat f) { return f == OutputFormat::sgrid ? "sgrid" : "csv"; }

/// Everything a command needs. Parsed from key=value text, overridable
/// field by field, and echoed verbatim into manifests.
struct RunConfig {
  // Filter bank.
  int J = 2;
  int L = 2;
  BankKind bank = BankKind::morlet;
  MorletParams morlet;

  // Cascade.
  Mode mode = Mode::plain;
  int depth = 2;
  PathPolicy policy = PathPolicy::full;
  ConvolutionEngine engine = ConvolutionEngine::spectral;
  bool decimate = false;
  std::size_t naive_window = 3;

  // Pooling.
  std::size_t window = 2;
  double S = 2.0;
  Admissibility admissibility = Admissibility::warn;

  // I/O.
  std::string input;
  std::string out = "out";
  OutputFormat format = OutputFormat::sgrid;
  std::size_t size = 64;  // synthetic grid side for filterbank and bench
  std::size_t classes = 102;
  std::uint64_t seed = 0;

  // verify.
  std::string suites = "all";
  std::size_t contraction_trials = 2000;
  std::size_t commutation_trials = 200;
  std::size_t equivariance_trials = 50;
  std::size_t energy_inputs = 10;
  std::size_t decay_inputs = 5;
  int verify_depth = 3;
  std::size_t verify_grid = 64;

  // bench.
  std::size_t batch = 8;

  TreeOptions tree_options() const {
    TreeOptions o;
    o.mode = mode;
    o.max_depth = depth;
    o.policy = policy;
    o.pooling = {window, S, admissibility};
    o.decimate_outputs = decimate;
    o.naive_window = naive_window;
    o.engine = engine;
    return o;
  }

  verify::SuiteConfig suite_config() const {
    verify::SuiteConfig c;
    c.seed = seed;
    c.J = J;
    c.L = L;
    c.grid = verify_grid;
    c.depth = verify_depth;
    c.morlet = morlet;
    c.policy = policy;
    c.window = window;
    c.factors = {S};
    c.admissibility = admissibility;
    return c;
  }

  FilterBank make_bank(const GridGeometry& g) const {
    return bank == BankKind::morlet ? build_morlet_bank(J, L, g, morlet) : build_exact_partition_bank(J, L, g);
  }

  void set(const std::string& key, const std::string& value);

  /// Effective configuration as ordered key/value pairs.
  std::vector<std::pair<std::string, std::string>> entries() const;

  std::string to_text() const {
    std::string out;
    for (const auto& [k, v] : entries()) out += k + '=' + v + '\n';
    return out;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream is(value);
  T v{};
  if constexpr (std::is_unsigned_v<T>) {
    if (!value.empty() && value[0] == '-') throw UsageError(key + ": expected a nonnegative integer, got '" + value + "'");
  }
  if (!(is >> v) || !(is >> std::ws).eof()) throw UsageError(key + ": cannot parse '" + value + "'");
  return v;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw UsageError(key + ": expected true or false, got '" + v + "'");
}

template <class E>
E parse_enum(const std::string& key, const std::string& v, std::initializer_list<E> options) {
  std::string names;
  for (E e : options) {
    if (v == to_string(e)) return e;
    names += (names.empty() ? "" : "|") + std::string(to_string(e));
  }
  throw UsageError(key + ": expected one of " + names + ", got '" + v + "'");
}

}  // namespace detail

inline void RunConfig::set(const std::string& key, const std::string& value) {
  using namespace detail;
  if (key == "J") J = parse_number<int>(key, value);
  else if (key == "L") L = parse_number<int>(key, value);
  else if (key == "bank") bank = parse_enum(key, value, {BankKind::morlet, BankKind::exact_partition});
  else if (key == "sigma0") morlet.sigma0 = parse_number<double>(key, value);
  else if (key == "xi0") morlet.xi0 = parse_number<double>(key, value);
  else if (key == "slant") morlet.slant = parse_number<double>(key, value);
  else if (key == "mode") mode = parse_enum(key, value, {Mode::plain, Mode::maxp, Mode::naivep});
  else if (key == "depth") depth = parse_number<int>(key, value);
  else if (key == "policy") policy = parse_enum(key, value, {PathPolicy::full, PathPolicy::frequency_decreasing});
  else if (key == "engine") engine = parse_enum(key, value, {ConvolutionEngine::spectral, ConvolutionEngine::direct});
  else if (key == "decimate") decimate = parse_bool(key, value);
  else if (key == "naive_window") naive_window = parse_number<std::size_t>(key, value);
  else if (key == "window") window = parse_number<std::size_t>(key, value);
  else if (key == "S") S = parse_number<double>(key, value);
  else if (key == "admissibility")
    admissibility = parse_enum(key, value, {Admissibility::off, Admissibility::warn, Admissibility::strict});
  else if (key == "input") input = value;
  else if (key == "out") out = value;
  else if (key == "format") format = parse_enum(key, value, {OutputFormat::sgrid, OutputFormat::csv});
  else if (key == "size") size = parse_number<std::size_t>(key, value);
  else if (key == "classes") classes = parse_number<std::size_t>(key, value);
  else if (key == "seed") seed = parse_number<std::uint64_t>(key, value);
  else if (key == "suites") suites = value;
  else if (key == "contraction_trials") contraction_trials = parse_number<std::size_t>(key, value);
  else if (key == "commutation_trials") commutation_trials = parse_number<std::size_t>(key, value);
  else if (key == "equivariance_trials") equivariance_trials = parse_number<std::size_t>(key, value);
  else if (key == "energy_inputs") energy_inputs = parse_number<std::size_t>(key, value);
  else if (key == "decay_inputs") decay_inputs = parse_number<std::size_t>(key, value);
  else if (key == "verify_depth") verify_depth = parse_number<int>(key, value);
  else if (key == "verify_grid") verify_grid = parse_number<std::size_t>(key, value);
  else if (key == "batch") batch = parse_number<std::size_t>(key, value);
  else throw UsageError("unknown config key '" + key + "'");
}

inline std::vector<std::pair<std::string, std::string>> RunConfig::entries() const {
  using io::format_number;
  return {{"J", std::to_string(J)},
          {"L", std::to_string(L)},
          {"bank", to_string(bank)},
          {"sigma0", format_number(morlet.sigma0)},
          {"xi0", format_number(morlet.xi0)},
          {"slant", format_number(morlet.resolved_slant(L))},
          {"mode", to_string(mode)},
          {"depth", std::to_string(depth)},
          {"policy", to_string(policy)},
          {"engine", to_string(engine)},
          {"decimate", decimate ? "true" : "false"},
          {"naive_window", std::to_string(naive_window)},
          {"window", std::to_string(window)},
          {"S", format_number(S)},
          {"admissibility", to_string(admissibility)},
          {"input", input},
          {"out", out},
          {"format", to_string(format)},
          {"size", std::to_string(size)},
          {"classes", std::to_string(classes)},
          {"seed", std::to_string(seed)},
          {"suites", suites},
          {"contraction_trials", std::to_string(contraction_trials)},
          {"commutation_trials", std::to_string(commutation_trials)},
          {"equivariance_trials", std::to_string(equivariance_trials)},
          {"energy_inputs", std::to_string(energy_inputs)},
          {"decay_inputs", std::to_string(decay_inputs)},
          {"verify_depth", std::to_string(verify_depth)},
          {"verify_grid", std::to_string(verify_grid)},
          {"batch", std::to_string(batch)}};
}

/// Applies `key=value` lines. Blank lines and `#` comments are ignored.
inline void apply_config_text(RunConfig& cfg, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError("line " + std::to_string(lineno) + ": expected key=value");
    try {
      cfg.set(detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    } catch (const UsageError& e) {
      throw UsageError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  RunConfig cfg;
  try {
    apply_config_text(cfg, ss.str());
  } catch (const UsageError& e) {
    throw UsageError(path.string() + ": " + e.what());
  }
  return cfg;
}

}  // namespace scatmaxp
