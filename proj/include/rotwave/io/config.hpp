#pragma once

// Run configuration: a flat key=value format, fully validated before any
// compute.  Validation collects every error instead of stopping at the
// first, and unknown keys are rejected.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rotwave/specfun.hpp"

namespace rotwave::io {

struct Rational {
  long long num = 0;
  long long den = 1;

  double value() const { return double(num) / double(den); }
  std::string str() const {
    return std::to_string(num) + "/" + std::to_string(den);
  }
};

// A time entry: exact rational (units of the relevant revival time) or a
// plain float.  Rational inputs never pass through a float.
struct TimeEntry {
  bool is_rational = false;
  Rational rat;
  double value = 0.0;  // always filled, rat.value() when rational
};

struct RunConfig {
  std::string task;    // density evolve carpet autocorr decompose clones
                       // top-evolve compare-boson report recipe
  std::string family;  // exponential gaussian-seed linear-exponential
                       // uniform-linear boson top

  double N = 20.0;
  double eta = 1.0;
  double epsilon = 0.0;
  double etaN = 20.0;     // uniform-linear parameter
  double k2 = 39.0;       // boson k^2
  int two_s = 1;
  bool integer_truncated = true;
  double r = 4.0;         // top concentration
  double lambda = 0.5 * specfun::pi;

  double omega0 = 1.0;
  double delta = 0.0;
  std::optional<std::pair<int, int>> delta_rational;  // (p, r), delta = r/p

  std::vector<TimeEntry> times;  // units of T_rev (or T_rev_IK for top clones)
  double theta_fixed = 0.5 * specfun::pi;
  double beta0 = 0.5 * specfun::pi;
  int n_theta = 181, n_phi = 361;
  int n_alpha = 256, n_gamma = 256;
  int n_times = 1024;
  double t_max = 0.5;  // units of T_rev
  bool classical_phases = false;
  bool sin_weighted = false;
  double tail_tol = 1e-12;
  std::string outdir = ".";
  std::string prefix;  // output file name prefix, default from task
};

struct ParseResult {
  RunConfig config;
  std::vector<std::string> errors;
  bool ok() const { return errors.empty(); }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline bool parse_double(const std::string& s, double& out) {
  const char* p = s.c_str();
  char* end = nullptr;
  out = std::strtod(p, &end);
  return end != p && *end == '\0' && std::isfinite(out);
}

inline bool parse_int(const std::string& s, int& out) {
  const char* p = s.c_str();
  char* end = nullptr;
  const long v = std::strtol(p, &end, 10);
  if (end == p || *end != '\0') return false;
  out = static_cast<int>(v);
  return out == v;
}

inline bool parse_bool(const std::string& s, bool& out) {
  if (s == "true" || s == "1" || s == "yes") { out = true; return true; }
  if (s == "false" || s == "0" || s == "no") { out = false; return true; }
  return false;
}

inline bool parse_rational(const std::string& s, Rational& out) {
  const auto slash = s.find('/');
  if (slash == std::string::npos) return false;
  int num, den;
  if (!parse_int(trim(s.substr(0, slash)), num)) return false;
  if (!parse_int(trim(s.substr(slash + 1)), den)) return false;
  if (den == 0) return false;
  out.num = num;
  out.den = den;
  return true;
}

inline bool parse_time_entry(const std::string& s, TimeEntry& out) {
  Rational r;
  if (parse_rational(s, r)) {
    out.is_rational = true;
    out.rat = r;
    out.value = r.value();
    return true;
  }
  double v;
  if (parse_double(s, v)) {
    out.is_rational = false;
    out.value = v;
    return true;
  }
  return false;
}

// Continued-fraction reduction of a float to an exact rational with a
// denominator cap; returns false when no denominator <= cap matches to
// 1e-9.
inline bool float_to_rational(double x, int den_cap, Rational& out) {
  if (!std::isfinite(x)) return false;
  const bool neg = x < 0.0;
  double v = std::abs(x);
  long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double frac = v;
  for (int it = 0; it < 64; ++it) {
    const double a_f = std::floor(frac);
    const long long a = static_cast<long long>(a_f);
    const long long p2 = a * p1 + p0;
    const long long q2 = a * q1 + q0;
    if (q2 > den_cap) break;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    const double rem = frac - a_f;
    if (rem < 1e-12) break;
    frac = 1.0 / rem;
  }
  if (q1 == 0) return false;
  if (std::abs(v - double(p1) / double(q1)) > 1e-9) return false;
  out.num = neg ? -p1 : p1;
  out.den = q1;
  return true;
}

}  // namespace detail

inline const std::vector<std::string>& known_tasks() {
  static const std::vector<std::string> t = {
      "density", "evolve",     "carpet",        "autocorr", "decompose",
      "clones",  "top-evolve", "compare-boson", "report"};
  return t;
}

inline const std::vector<std::string>& known_families() {
  static const std::vector<std::string> f = {
      "exponential", "gaussian-seed", "linear-exponential", "uniform-linear",
      "boson",       "top"};
  return f;
}

inline void validate(RunConfig& c, std::vector<std::string>& errors) {
  auto err = [&](const std::string& m) { errors.push_back(m); };

  const auto& tasks = known_tasks();
  if (c.task.empty())
    err("task: missing (one of density evolve carpet autocorr decompose "
        "clones top-evolve compare-boson report)");
  else if (std::find(tasks.begin(), tasks.end(), c.task) == tasks.end())
    err("task: unknown value '" + c.task + "'");

  const bool top_task = c.task == "top-evolve";
  const bool state_task = c.task == "density" || c.task == "evolve" ||
                          c.task == "carpet" || c.task == "autocorr" ||
                          c.task == "clones" || c.task == "report";
  if (state_task || top_task) {
    if (c.family.empty()) {
      // top-evolve implies the top family.
      if (top_task)
        c.family = "top";
      else
        err("family: missing for task '" + c.task + "'");
    }
    const auto& fams = known_families();
    if (!c.family.empty() &&
        std::find(fams.begin(), fams.end(), c.family) == fams.end())
      err("family: unknown value '" + c.family + "'");
    if (top_task && !c.family.empty() && c.family != "top")
      err("family: task top-evolve requires family=top");
    if (!top_task && c.family == "top")
      err("family: family=top only valid with task=top-evolve");
  }

  if (c.family == "exponential" || c.family == "gaussian-seed" ||
      c.family == "linear-exponential") {
    if (!(c.N > 0.0)) err("N: must be > 0 for family '" + c.family + "'");
  }
  if (c.family == "uniform-linear" && !(c.etaN > 0.0))
    err("etaN: must be > 0 for family uniform-linear");
  if (c.family == "boson") {
    if (!(c.k2 > 0.0)) err("k2: must be > 0 for family boson");
    if (c.two_s <= 0) err("two_s: must be > 0 for family boson");
    if (c.two_s % 2 != 0 && !c.integer_truncated)
      err("integer_truncated: required true for half-integer spin");
  }
  if (c.family == "top") {
    if (!(c.r > 0.0)) err("r: must be > 0 for family top");
    if (c.lambda < 0.0 || c.lambda > specfun::pi)
      err("lambda: outside [0, pi]");
  }
  if (!(c.omega0 > 0.0)) err("omega0: must be > 0");
  if (!(c.delta > -1.0)) err("delta: must be > -1");
  if (c.delta_rational) {
    const auto [p, r] = *c.delta_rational;
    if (p <= 0) err("delta: rational denominator must be positive");
    else if (std::abs(c.delta - double(r) / p) > 1e-12)
      err("delta: float value inconsistent with declared rational");
  }
  if (!(c.tail_tol > 0.0 && c.tail_tol < 1.0)) err("tail_tol: must be in (0, 1)");
  if (c.n_theta < 2) err("n_theta: must be >= 2");
  if (c.n_phi < 2) err("n_phi: must be >= 2");
  if (c.n_alpha < 2) err("n_alpha: must be >= 2");
  if (c.n_gamma < 2) err("n_gamma: must be >= 2");
  if (c.n_times < 2) err("n_times: must be >= 2");
  if (!(c.t_max > 0.0)) err("t_max: must be > 0");

  const bool needs_times = c.task == "evolve" || c.task == "decompose" ||
                           c.task == "clones" || c.task == "top-evolve";
  if (needs_times && c.times.empty())
    err("times: missing (comma-separated list, rationals as m/n)");
  if (c.task == "decompose" || c.task == "clones") {
    for (const auto& t : c.times) {
      TimeEntry e = t;
      if (!e.is_rational &&
          !detail::float_to_rational(e.value, 64, e.rat))
        err("times: task '" + c.task +
            "' needs exact rationals; no denominator <= 64 matches " +
            std::to_string(t.value));
    }
  }
}

inline ParseResult parse_config(const std::string& text) {
  ParseResult res;
  RunConfig& c = res.config;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  auto err = [&](const std::string& m) {
    res.errors.push_back("line " + std::to_string(line_no) + ": " + m);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      err("expected key=value, got '" + line + "'");
      continue;
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));

    // failed parses leave the field at its previous value so one mistake
    // does not cascade into spurious range errors
    auto as_double = [&](double& field) {
      double v;
      if (detail::parse_double(val, v)) field = v;
      else err(key + ": not a number: '" + val + "'");
    };
    auto as_int = [&](int& field) {
      int v;
      if (detail::parse_int(val, v)) field = v;
      else err(key + ": not an integer: '" + val + "'");
    };
    auto as_bool = [&](bool& field) {
      bool v;
      if (detail::parse_bool(val, v)) field = v;
      else err(key + ": not a boolean: '" + val + "'");
    };

    if (key == "task") c.task = val;
    else if (key == "family") c.family = val;
    else if (key == "N") as_double(c.N);
    else if (key == "eta") as_double(c.eta);
    else if (key == "epsilon") as_double(c.epsilon);
    else if (key == "etaN") as_double(c.etaN);
    else if (key == "k2") as_double(c.k2);
    else if (key == "two_s") as_int(c.two_s);
    else if (key == "integer_truncated") as_bool(c.integer_truncated);
    else if (key == "r") as_double(c.r);
    else if (key == "lambda") as_double(c.lambda);
    else if (key == "omega0") as_double(c.omega0);
    else if (key == "delta") {
      Rational rt;
      if (detail::parse_rational(val, rt)) {
        c.delta_rational = {int(rt.den), int(rt.num)};
        c.delta = rt.value();
      } else if (!detail::parse_double(val, c.delta)) {
        err("delta: not a number or rational: '" + val + "'");
      }
    } else if (key == "times") {
      std::istringstream ts(val);
      std::string item;
      while (std::getline(ts, item, ',')) {
        TimeEntry e;
        if (!detail::parse_time_entry(detail::trim(item), e))
          err("times: malformed entry '" + detail::trim(item) + "'");
        else
          c.times.push_back(e);
      }
    }
    else if (key == "theta_fixed") as_double(c.theta_fixed);
    else if (key == "beta0") as_double(c.beta0);
    else if (key == "n_theta") as_int(c.n_theta);
    else if (key == "n_phi") as_int(c.n_phi);
    else if (key == "n_alpha") as_int(c.n_alpha);
    else if (key == "n_gamma") as_int(c.n_gamma);
    else if (key == "n_times") as_int(c.n_times);
    else if (key == "t_max") as_double(c.t_max);
    else if (key == "classical_phases") as_bool(c.classical_phases);
    else if (key == "sin_weighted") as_bool(c.sin_weighted);
    else if (key == "tail_tol") as_double(c.tail_tol);
    else if (key == "outdir") c.outdir = val;
    else if (key == "prefix") c.prefix = val;
    else err("unknown key '" + key + "'");
  }
  validate(c, res.errors);
  return res;
}

}  // namespace rotwave::io
