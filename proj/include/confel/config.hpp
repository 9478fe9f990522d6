#pragma once

#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "confel/parse.hpp"
#include "confel/structures.hpp"

namespace confel {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& message)
      : std::runtime_error("config line " + std::to_string(line) + ": " + message),
        line_(line) {}
  explicit ConfigError(const std::string& message)
      : std::runtime_error("config: " + message), line_(0) {}

  int line() const { return line_; }

 private:
  int line_;
};

// One derivation problem, read from a flat key = value document. Lines that
// are blank or start with '#' are skipped; lists are comma-separated. The
// defaults fill in everything except the structure kind and the lagrangian.
struct ProblemConfig {
  int n = 1;
  Rational a = Rational(1);
  Rational b = Rational(-1);
  StructureKind structure = StructureKind::F;
  Expr lambda;
  Expr lagrangian;
  std::string lambda_text = "0";
  std::string lagrangian_text;
  std::string metric_text = "default";
  double t_end = 0.0;
  bool has_t_end = false;
  double step = 1e-3;
  int output_every = 1;
  std::vector<double> x0;

  int dim() const { return 4 * n; }
};

namespace detail {

inline std::string trim(const std::string& s) {
  size_t first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  size_t last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (pos <= s.size()) {
    size_t comma = s.find(',', pos);
    if (comma == std::string::npos) comma = s.size();
    out.push_back(trim(s.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

inline int parse_int(const std::string& value, int line, const char* key) {
  try {
    size_t used = 0;
    int v = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(line, std::string("expected an integer for '") + key + "', got '" +
                                value + "'");
  }
}

inline double parse_real(const std::string& value, int line, const char* key) {
  try {
    size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(line, std::string("expected a real number for '") + key +
                                "', got '" + value + "'");
  }
}

// Rationals in configs go through the expression grammar so that 3/2, -5/3,
// and 0.25 all land on exact values.
inline Rational parse_rational(const std::string& value, int line, const char* key) {
  try {
    Expr e = parse_expr(value, 0);
    if (!e.is_constant()) throw std::invalid_argument("not constant");
    return e.constant_value();
  } catch (const std::exception&) {
    throw ConfigError(line, std::string("expected a rational constant for '") + key +
                                "', got '" + value + "'");
  }
}

}  // namespace detail

inline ProblemConfig parse_problem_config(std::istream& in) {
  ProblemConfig cfg;
  std::map<std::string, int> seen;
  std::string raw;
  int line_no = 0;
  int lambda_line = 0, lagrangian_line = 0, metric_line = 0, x0_line = 0;
  bool has_structure = false, has_lagrangian = false;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = detail::trim(raw);
    if (line.empty() || line[0] == '#') continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(line_no, "expected 'key = value', got '" + line + "'");
    std::string key = detail::trim(line.substr(0, eq));
    std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(line_no, "missing key before '='");
    if (seen.count(key))
      throw ConfigError(line_no, "duplicate key '" + key + "' (first on line " +
                                     std::to_string(seen[key]) + ")");
    seen[key] = line_no;

    if (key == "n") {
      cfg.n = detail::parse_int(value, line_no, "n");
      if (cfg.n < 1 || cfg.n > 64)
        throw ConfigError(line_no, "block size n must be in [1, 64]");
    } else if (key == "a") {
      cfg.a = detail::parse_rational(value, line_no, "a");
    } else if (key == "b") {
      cfg.b = detail::parse_rational(value, line_no, "b");
    } else if (key == "structure") {
      auto kind = structure_kind_from_string(value);
      if (!kind) throw ConfigError(line_no, "structure must be F, G, or H, got '" + value + "'");
      cfg.structure = *kind;
      has_structure = true;
    } else if (key == "lambda") {
      cfg.lambda_text = value;
      lambda_line = line_no;
    } else if (key == "lagrangian") {
      cfg.lagrangian_text = value;
      lagrangian_line = line_no;
      has_lagrangian = true;
    } else if (key == "metric") {
      cfg.metric_text = value;
      metric_line = line_no;
    } else if (key == "t_end") {
      cfg.t_end = detail::parse_real(value, line_no, "t_end");
      if (cfg.t_end < 0) throw ConfigError(line_no, "t_end must be nonnegative");
      cfg.has_t_end = true;
    } else if (key == "h") {
      cfg.step = detail::parse_real(value, line_no, "h");
      if (!(cfg.step > 0)) throw ConfigError(line_no, "h must be positive");
    } else if (key == "output_every") {
      cfg.output_every = detail::parse_int(value, line_no, "output_every");
      if (cfg.output_every < 1) throw ConfigError(line_no, "output_every must be at least 1");
    } else if (key == "x0") {
      x0_line = line_no;
      for (const std::string& item : detail::split_list(value))
        cfg.x0.push_back(detail::parse_real(item, line_no, "x0"));
    } else {
      throw ConfigError(line_no, "unknown key '" + key + "'");
    }
  }

  if (!has_structure) throw ConfigError("missing required key 'structure'");
  if (!has_lagrangian) throw ConfigError("missing required key 'lagrangian'");
  if (cfg.a.is_zero()) throw ConfigError("parameter a must be nonzero");
  if (cfg.b.is_zero()) throw ConfigError("parameter b must be nonzero");

  try {
    cfg.lambda = parse_expr(cfg.lambda_text, cfg.dim());
  } catch (const ParseError& err) {
    throw ConfigError(lambda_line, std::string("lambda: ") + err.what());
  }
  if (cfg.lambda.depends_on_lambda())
    throw ConfigError(lambda_line, "lambda may not reference the symbol lam");
  try {
    cfg.lagrangian = parse_expr(cfg.lagrangian_text, cfg.dim());
  } catch (const ParseError& err) {
    throw ConfigError(lagrangian_line, std::string("lagrangian: ") + err.what());
  }
  if (!cfg.x0.empty() && static_cast<int>(cfg.x0.size()) != cfg.dim())
    throw ConfigError(x0_line, "x0 must list exactly 4n = " + std::to_string(cfg.dim()) +
                                   " values, got " + std::to_string(cfg.x0.size()));
  (void)metric_line;
  return cfg;
}

inline ProblemConfig parse_problem_config(const std::string& text) {
  std::istringstream in(text);
  return parse_problem_config(in);
}

inline StructureEndo make_structure(const ProblemConfig& cfg) {
  return StructureEndo(cfg.structure, cfg.a, cfg.b, cfg.lambda, cfg.n);
}

inline Metric make_metric(const ProblemConfig& cfg) {
  if (cfg.metric_text == "default") return default_metric(cfg.n);
  std::vector<int> signs;
  for (const std::string& item : detail::split_list(cfg.metric_text)) {
    if (item == "+1" || item == "1")
      signs.push_back(+1);
    else if (item == "-1")
      signs.push_back(-1);
    else
      throw ConfigError("metric entries must be +1 or -1, got '" + item + "'");
  }
  if (static_cast<int>(signs.size()) != cfg.dim())
    throw ConfigError("metric must list exactly 4n = " + std::to_string(cfg.dim()) +
                      " signs, got " + std::to_string(signs.size()));
  return Metric(cfg.dim(), std::move(signs));
}

}  // namespace confel
