#ifndef TRQDA_RUNSPEC_HPP
#define TRQDA_RUNSPEC_HPP

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "trqda/config.hpp"
#include "trqda/oracle.hpp"
#include "trqda/problems.hpp"

namespace trqda {

enum class StudyMode { Single, EpsSweep, SeedSweep, Audit };

inline std::string_view to_string(StudyMode m) {
  switch (m) {
    case StudyMode::Single: return "single";
    case StudyMode::EpsSweep: return "eps_sweep";
    case StudyMode::SeedSweep: return "seed_sweep";
    default: return "audit";
  }
}

/// Everything needed to reproduce a run or a study.
struct RunSpec {
  std::string problem = "quadratic";
  ProblemParams params;
  std::optional<Vector> x0;
  TrConfig config = TrConfig::defaults(1, {1e-3});
  CorruptionPolicy policy = CorruptionPolicy::Adversarial;
  std::uint64_t oracle_seed = 0;
  CostModel cost;
  std::string output_dir = ".";
  std::string label;
  StudyMode mode = StudyMode::Single;
  std::vector<double> eps_grid;
  std::vector<std::uint64_t> seeds;
  int workers = 1;
  bool audit = true;
};

/// Input error in a spec file or flag (distinct from a ConfigError).
class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Recognised keys. Flags use the same names with '-' for '_'.
inline const std::vector<std::string>& spec_keys() {
  static const std::vector<std::string> keys = {
      "problem",   "dim",        "condition",  "quartic",   "coupling",     "terms",
      "lambda",    "problem_seed", "x0",       "q",         "eps",          "delta0",
      "delta_max", "vartheta",   "eta1",       "eta2",      "gamma1",       "gamma2",
      "gamma3",    "omega",      "varsigma",   "gamma_zeta", "kappa_zeta",  "zeta0",
      "seed",      "max_iterations", "exact_orders", "f_accuracy_cap", "policy", "cost",
      "cost_exponent", "output",  "label",      "mode",      "eps_grid",     "seeds",
      "workers",   "audit"};
  return keys;
}

namespace detail {

inline std::string trim(std::string s) {
  auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

inline std::string normalize_key(std::string k) {
  k = trim(std::move(k));
  while (!k.empty() && k.front() == '-') k.erase(k.begin());
  for (char& c : k) c = c == '-' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return k;
}

inline double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(trim(v), &pos);
    if (pos != trim(v).size()) throw std::invalid_argument("trailing");
    return d;
  } catch (const std::exception&) {
    throw SpecError("key '" + key + "': cannot parse '" + v + "' as a number");
  }
}

inline long parse_long(const std::string& key, const std::string& v) {
  const double d = parse_double(key, v);
  if (d != std::floor(d)) throw SpecError("key '" + key + "': expected an integer, got '" + v + "'");
  return static_cast<long>(d);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  std::string t = trim(v);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off") return false;
  throw SpecError("key '" + key + "': expected a boolean, got '" + v + "'");
}

}  // namespace detail

/// Comma-separated numbers.
inline std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& t : detail::split(v, ',')) out.push_back(detail::parse_double(key, t));
  if (out.empty()) throw SpecError("key '" + key + "': empty list");
  return out;
}

/// Tolerance grid: a comma list, "a..b" (values 1 and 3 times powers of ten
/// between a and b inclusive, descending) or "a..b:n" (n log-spaced points).
inline std::vector<double> parse_eps_grid(const std::string& v) {
  const auto dots = v.find("..");
  if (dots == std::string::npos) return parse_list("eps_grid", v);
  const double a = detail::parse_double("eps_grid", v.substr(0, dots));
  std::string rest = v.substr(dots + 2);
  std::optional<long> count;
  if (const auto colon = rest.find(':'); colon != std::string::npos) {
    count = detail::parse_long("eps_grid", rest.substr(colon + 1));
    rest = rest.substr(0, colon);
  }
  const double b = detail::parse_double("eps_grid", rest);
  if (!(a > 0.0 && b > 0.0)) throw SpecError("eps_grid: bounds must be positive");
  const double hi = std::max(a, b), lo = std::min(a, b);
  std::vector<double> out;
  if (count) {
    if (*count < 2) throw SpecError("eps_grid: need at least 2 points");
    for (long i = 0; i < *count; ++i)
      out.push_back(hi * std::pow(lo / hi, static_cast<double>(i) / (*count - 1)));
  } else {
    const double tol = 1e-9;
    for (int e = static_cast<int>(std::ceil(std::log10(hi) + tol)); e >= std::floor(std::log10(lo)) - 1; --e) {
      for (double m : {3.0, 1.0}) {
        const double val = m * std::pow(10.0, e);
        if (val <= hi * (1 + tol) && val >= lo * (1 - tol)) out.push_back(val);
      }
    }
  }
  return out;
}

/// Comma-separated seeds or an inclusive range "a..b".
inline std::vector<std::uint64_t> parse_seeds(const std::string& v) {
  std::vector<std::uint64_t> out;
  if (const auto dots = v.find(".."); dots != std::string::npos) {
    const long a = detail::parse_long("seeds", v.substr(0, dots));
    const long b = detail::parse_long("seeds", v.substr(dots + 2));
    if (a < 0 || b < a) throw SpecError("seeds: bad range '" + v + "'");
    for (long s = a; s <= b; ++s) out.push_back(static_cast<std::uint64_t>(s));
    return out;
  }
  for (const auto& t : detail::split(v, ',')) {
    const long s = detail::parse_long("seeds", t);
    if (s < 0) throw SpecError("seeds: negative seed");
    out.push_back(static_cast<std::uint64_t>(s));
  }
  return out;
}

/// Reads "key = value" lines; '#' starts a comment. Later keys win.
inline std::map<std::string, std::string> parse_spec_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw SpecError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    kv[detail::normalize_key(line.substr(0, eq))] = detail::trim(line.substr(eq + 1));
  }
  return kv;
}

inline std::map<std::string, std::string> read_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot read spec file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_spec_text(ss.str());
}

/// Throws ConfigError for algorithm constants and SpecError for the rest.
inline void validate_spec(const RunSpec& spec) {
  spec.config.validate();
  if (std::find(problem_names().begin(), problem_names().end(), spec.problem) ==
      problem_names().end()) {
    throw SpecError("unknown problem '" + spec.problem + "'");
  }
  if (spec.workers < 1) throw SpecError("workers must be at least 1");
  for (double e : spec.eps_grid)
    if (!(e > 0.0 && e < 1.0)) throw SpecError("eps_grid values must lie in (0, 1)");
}

/// Builds a spec from key/value pairs. The order q and eps are applied first so
/// that the remaining algorithm constants default consistently; the result is
/// validated (ConfigError for algorithm constants, SpecError otherwise).
inline RunSpec build_spec(const std::map<std::string, std::string>& raw) {
  std::map<std::string, std::string> kv;
  for (const auto& [k, v] : raw) {
    const std::string key = detail::normalize_key(k);
    if (std::find(spec_keys().begin(), spec_keys().end(), key) == spec_keys().end()) {
      throw SpecError("unknown key '" + k + "'");
    }
    kv[key] = v;
  }
  auto get = [&](const std::string& k) -> std::optional<std::string> {
    auto it = kv.find(k);
    if (it == kv.end()) return std::nullopt;
    return it->second;
  };

  RunSpec spec;
  const int q = get("q") ? static_cast<int>(detail::parse_long("q", *get("q"))) : 1;
  std::vector<double> eps = get("eps") ? parse_list("eps", *get("eps")) : std::vector<double>{1e-3};
  if (eps.size() == 1 && q > 1) eps.assign(q, eps.front());
  if (q < 1 || q > kMaxOrder) throw ConfigError("invalid configuration: q must lie in [1, 3]");
  TrConfig& c = spec.config;
  c = TrConfig::defaults(q, eps);

  if (auto v = get("problem")) spec.problem = *v;
  if (auto v = get("dim")) spec.params.dim = static_cast<int>(detail::parse_long("dim", *v));
  if (auto v = get("condition")) spec.params.condition = detail::parse_double("condition", *v);
  if (auto v = get("quartic")) spec.params.quartic = detail::parse_double("quartic", *v);
  if (auto v = get("coupling")) spec.params.coupling = detail::parse_double("coupling", *v);
  if (auto v = get("terms")) spec.params.terms = static_cast<int>(detail::parse_long("terms", *v));
  if (auto v = get("lambda")) spec.params.lambda = detail::parse_double("lambda", *v);
  if (auto v = get("problem_seed"))
    spec.params.seed = static_cast<std::uint64_t>(detail::parse_long("problem_seed", *v));
  if (auto v = get("x0")) {
    const auto xs = parse_list("x0", *v);
    spec.x0 = Eigen::Map<const Vector>(xs.data(), static_cast<Eigen::Index>(xs.size()));
  }

  auto num = [&](const char* k, double& field) {
    if (auto v = get(k)) field = detail::parse_double(k, *v);
  };
  num("delta0", c.Delta0);
  num("delta_max", c.Delta_max);
  num("vartheta", c.vartheta);
  num("eta1", c.eta1);
  num("eta2", c.eta2);
  num("gamma1", c.gamma1);
  num("gamma2", c.gamma2);
  num("gamma3", c.gamma3);
  num("varsigma", c.varsigma);
  num("gamma_zeta", c.gamma_zeta);
  num("kappa_zeta", c.kappa_zeta);
  num("f_accuracy_cap", c.f_accuracy_cap);
  if (auto v = get("omega")) {
    c.omega = detail::parse_double("omega", *v);
  } else if (get("eta1") || get("eta2")) {
    c.omega = 0.9 * TrConfig::omega_limit(c.eta1, c.eta2);
  }
  if (auto v = get("zeta0")) {
    c.zeta0 = parse_list("zeta0", *v);
    if (c.zeta0.size() == 1 && q > 1) c.zeta0.assign(q, c.zeta0.front());
  } else if (get("kappa_zeta")) {
    c.zeta0.assign(q, c.kappa_zeta);
  }
  if (auto v = get("seed")) {
    c.seed = static_cast<std::uint64_t>(detail::parse_long("seed", *v));
    spec.oracle_seed = c.seed;
  }
  if (auto v = get("max_iterations")) c.max_iterations = detail::parse_long("max_iterations", *v);
  if (auto v = get("exact_orders")) {
    for (double o : parse_list("exact_orders", *v)) c.exact_orders.insert(static_cast<int>(o));
  }

  try {
    if (auto v = get("policy")) spec.policy = parse_policy(*v);
    double exponent = 1.0;
    if (auto v = get("cost_exponent")) exponent = detail::parse_double("cost_exponent", *v);
    if (auto v = get("cost")) spec.cost = parse_cost_model(*v, exponent);
    else spec.cost.exponent = exponent;
  } catch (const SpecError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw SpecError(e.what());
  }
  if (auto v = get("output")) spec.output_dir = *v;
  if (auto v = get("label")) spec.label = *v;
  if (auto v = get("mode")) {
    const std::string m = detail::normalize_key(*v);
    if (m == "single" || m == "run") spec.mode = StudyMode::Single;
    else if (m == "eps_sweep" || m == "sweep") spec.mode = StudyMode::EpsSweep;
    else if (m == "seed_sweep") spec.mode = StudyMode::SeedSweep;
    else if (m == "audit") spec.mode = StudyMode::Audit;
    else throw SpecError("unknown mode '" + *v + "'");
  }
  if (auto v = get("eps_grid")) spec.eps_grid = parse_eps_grid(*v);
  if (auto v = get("seeds")) spec.seeds = parse_seeds(*v);
  if (auto v = get("workers")) spec.workers = static_cast<int>(detail::parse_long("workers", *v));
  if (auto v = get("audit")) spec.audit = detail::parse_bool("audit", *v);

  validate_spec(spec);
  return spec;
}

}  // namespace trqda

#endif  // TRQDA_RUNSPEC_HPP
