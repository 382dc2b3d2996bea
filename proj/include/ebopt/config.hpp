#pragma once

// Run configuration: flat "key = value" lines, '#' comments. Function-valued
// keys take a preset specifier:
//
//   zero
//   const value=<r>
//   sine m=<int> amp=<r>                 amp sin(m pi x / L)
//   sine_xt m=<int> amp=<r> omega=<r>    amp sin(m pi x / L) sin(omega t)
//   poly c0=<r> c1=<r> c2=<r>            c0 + c1 x + c2 x^2
//   file path=<p>                        CSV field, relative to the config

#include <charconv>
#include <cmath>
#include <filesystem>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "ebopt/control.hpp"
#include "ebopt/dynamics.hpp"
#include "ebopt/errors.hpp"
#include "ebopt/field_io.hpp"
#include "ebopt/grid.hpp"

namespace ebopt {

enum class Preset { Zero, Const, Sine, SineXT, Poly, File };

struct FunctionSpec {
  Preset preset = Preset::Zero;
  std::map<std::string, double> params;
  std::string path;  // File preset only

  double param(const std::string& name) const { return params.at(name); }
};

namespace detail {

[[noreturn]] inline void spec_error(std::size_t line, std::size_t col, const std::string& msg) {
  throw Error(ErrorKind::Parse,
              "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + msg);
}

struct PresetInfo {
  Preset preset;
  std::vector<std::string> required;
};

inline const std::map<std::string, PresetInfo, std::less<>>& preset_table() {
  static const std::map<std::string, PresetInfo, std::less<>> table{
      {"zero", {Preset::Zero, {}}},
      {"const", {Preset::Const, {"value"}}},
      {"sine", {Preset::Sine, {"m", "amp"}}},
      {"sine_xt", {Preset::SineXT, {"m", "amp", "omega"}}},
      {"poly", {Preset::Poly, {"c0", "c1", "c2"}}},
      {"file", {Preset::File, {"path"}}},
  };
  return table;
}

}  // namespace detail

/// Parses one specifier. `line` and `col0` locate the text in the config for
/// error messages (col0 is the 1-based column of text[0]).
inline FunctionSpec parse_function_spec(std::string_view text, std::size_t line = 1,
                                        std::size_t col0 = 1) {
  struct Token {
    std::string_view text;
    std::size_t col;
  };
  std::vector<Token> tokens;
  for (std::size_t i = 0; i < text.size();) {
    if (text[i] == ' ' || text[i] == '\t') {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && text[j] != ' ' && text[j] != '\t') ++j;
    tokens.push_back({text.substr(i, j - i), col0 + i});
    i = j;
  }
  if (tokens.empty()) detail::spec_error(line, col0, "empty function specifier");

  const auto& table = detail::preset_table();
  auto it = table.find(tokens[0].text);
  if (it == table.end())
    detail::spec_error(line, tokens[0].col, "unknown preset '" + std::string(tokens[0].text) + "'");

  FunctionSpec spec;
  spec.preset = it->second.preset;
  const auto& required = it->second.required;
  std::set<std::string> seen;
  for (std::size_t t = 1; t < tokens.size(); ++t) {
    const auto tok = tokens[t];
    const std::size_t eq = tok.text.find('=');
    if (eq == std::string_view::npos || eq == 0)
      detail::spec_error(line, tok.col, "expected name=value, got '" + std::string(tok.text) + "'");
    const std::string name(tok.text.substr(0, eq));
    const std::string_view value = tok.text.substr(eq + 1);
    if (std::find(required.begin(), required.end(), name) == required.end())
      detail::spec_error(line, tok.col,
                         "preset '" + std::string(tokens[0].text) + "' has no parameter '" + name + "'");
    if (!seen.insert(name).second)
      detail::spec_error(line, tok.col, "parameter '" + name + "' given twice");
    if (spec.preset == Preset::File) {
      if (value.empty()) detail::spec_error(line, tok.col + eq + 1, "empty path");
      spec.path = std::string(value);
      continue;
    }
    double v = 0.0;
    if (!parse_double(value, v) || !std::isfinite(v))
      detail::spec_error(line, tok.col + eq + 1,
                         "parameter '" + name + "' is not a number: '" + std::string(value) + "'");
    if (name == "m" && v != std::floor(v))
      detail::spec_error(line, tok.col + eq + 1, "parameter 'm' must be an integer");
    spec.params[name] = v;
  }
  for (const auto& r : required)
    if (!seen.count(r))
      detail::spec_error(line, tokens[0].col,
                         "preset '" + std::string(tokens[0].text) + "' is missing parameter '" + r + "'");
  return spec;
}

namespace detail {

inline std::string resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative()) path = base / path;
  return path.string();
}

inline double eval_spatial(const FunctionSpec& s, const Grid& g, double x) {
  switch (s.preset) {
    case Preset::Zero: return 0.0;
    case Preset::Const: return s.param("value");
    case Preset::Sine:
      return s.param("amp") * std::sin(s.param("m") * std::numbers::pi * x / g.length());
    case Preset::Poly: return s.param("c0") + s.param("c1") * x + s.param("c2") * x * x;
    default: return 0.0;
  }
}

}  // namespace detail

inline SpaceField evaluate_space(const FunctionSpec& s, const Grid& g,
                                 const std::filesystem::path& base = ".") {
  if (s.preset == Preset::File) return read_space_field(detail::resolve(base, s.path), g);
  require(s.preset != Preset::SineXT, ErrorKind::InvalidConfig,
          "preset 'sine_xt' depends on t and cannot define a function of x alone");
  return SpaceField::sample(g, [&](double x) { return detail::eval_spatial(s, g, x); });
}

inline SpaceTimeField evaluate_spacetime(const FunctionSpec& s, const Grid& g,
                                         const std::filesystem::path& base = ".") {
  if (s.preset == Preset::File) return read_spacetime_field(detail::resolve(base, s.path), g);
  if (s.preset == Preset::SineXT) {
    const double amp = s.param("amp"), m = s.param("m"), omega = s.param("omega");
    return SpaceTimeField::sample(g, [&](double x, double t) {
      return amp * std::sin(m * std::numbers::pi * x / g.length()) * std::sin(omega * t);
    });
  }
  return SpaceTimeField::sample(g, [&](double x, double) { return detail::eval_spatial(s, g, x); });
}

struct RunConfig {
  double length = 0.0;
  double horizon = 0.0;
  int nx = 0;
  int nt = 0;
  double alpha = 0.0;
  double v_c = 0.0;
  FunctionSpec k, w, load, target, v0;
  OptimizerConfig optimizer;
  std::filesystem::path base_dir = ".";

  // Evaluated on the grid during parsing.
  std::optional<Grid> grid;
  SpaceField k_field, w_field, v0_field;
  SpaceTimeField load_field, target_field;

  BeamProblem problem() const {
    return BeamProblem(*grid, k_field, w_field, load_field, target_field, alpha, v_c);
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] inline void config_error(ErrorKind kind, std::size_t line, const std::string& key,
                                      const std::string& msg) {
  throw Error(kind, "line " + std::to_string(line) + ": " + key + ": " + msg);
}

struct Entry {
  std::string value;
  std::size_t line;
  std::size_t value_col;
};

}  // namespace detail

inline RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = ".") {
  static const std::set<std::string> known{
      "L",   "T",     "Nx",  "Nt",        "alpha",       "v_c",       "k",      "w",
      "F",   "y",     "v0",  "step",      "beta",        "eps",       "max_iters",
      "power_iters", "power_tol", "shrink", "max_backtracks", "seed"};
  static const std::vector<std::string> required{"L", "T", "Nx", "Nt", "alpha", "v_c",
                                                 "k", "w", "F",  "y"};

  std::map<std::string, detail::Entry> entries;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
    std::string_view raw = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    const std::size_t hash = raw.find('#');
    if (hash != std::string_view::npos) raw = raw.substr(0, hash);
    if (detail::trim(raw).empty()) {
      if (nl == std::string_view::npos) break;
      continue;
    }
    const std::size_t eq = raw.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorKind::Parse,
                  "line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key(detail::trim(raw.substr(0, eq)));
    if (!known.count(key))
      throw Error(ErrorKind::Parse,
                  "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (entries.count(key))
      throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": key '" + key +
                                        "' repeats line " + std::to_string(entries[key].line));
    std::string_view value = raw.substr(eq + 1);
    std::size_t col = eq + 2;
    while (!value.empty() && (value.front() == ' ' || value.front() == '\t')) {
      value.remove_prefix(1);
      ++col;
    }
    value = detail::trim(value);
    if (value.empty())
      throw Error(ErrorKind::Parse,
                  "line " + std::to_string(line_no) + ": key '" + key + "' has no value");
    entries[key] = {std::string(value), line_no, col};
    if (nl == std::string_view::npos) break;
  }

  for (const auto& r : required)
    if (!entries.count(r)) throw Error(ErrorKind::Parse, "missing required key '" + r + "'");

  auto number = [&](const std::string& key) {
    const auto& e = entries.at(key);
    double v = 0.0;
    if (!parse_double(e.value, v) || !std::isfinite(v))
      detail::config_error(ErrorKind::Parse, e.line, key, "bad number '" + e.value + "'");
    return v;
  };
  auto integer = [&](const std::string& key) {
    const auto& e = entries.at(key);
    int v = 0;
    auto res = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
    if (res.ec != std::errc() || res.ptr != e.value.data() + e.value.size())
      detail::config_error(ErrorKind::Parse, e.line, key, "bad integer '" + e.value + "'");
    return v;
  };
  auto spec = [&](const std::string& key) {
    const auto& e = entries.at(key);
    return parse_function_spec(e.value, e.line, e.value_col);
  };

  RunConfig cfg;
  cfg.base_dir = base_dir;
  cfg.length = number("L");
  cfg.horizon = number("T");
  cfg.nx = integer("Nx");
  cfg.nt = integer("Nt");
  cfg.alpha = number("alpha");
  cfg.v_c = number("v_c");
  cfg.k = spec("k");
  cfg.w = spec("w");
  cfg.load = spec("F");
  cfg.target = spec("y");
  cfg.v0 = entries.count("v0") ? spec("v0") : FunctionSpec{};

  OptimizerConfig& o = cfg.optimizer;
  if (entries.count("step")) {
    const auto& e = entries.at("step");
    if (e.value == "inverse-lipschitz") o.step_mode = StepMode::InverseLipschitz;
    else if (e.value == "fixed") o.step_mode = StepMode::Fixed;
    else if (e.value == "backtracking") o.step_mode = StepMode::Backtracking;
    else
      detail::config_error(ErrorKind::Parse, e.line, "step",
                           "expected inverse-lipschitz, fixed or backtracking; got '" + e.value + "'");
  }
  if (entries.count("beta")) o.fixed_step = number("beta");
  if (entries.count("eps")) o.eps = number("eps");
  if (entries.count("max_iters")) o.max_iters = integer("max_iters");
  if (entries.count("power_iters")) o.power_iters = integer("power_iters");
  if (entries.count("power_tol")) o.power_tol = number("power_tol");
  if (entries.count("shrink")) o.shrink = number("shrink");
  if (entries.count("max_backtracks")) o.max_backtracks = integer("max_backtracks");
  if (entries.count("seed")) {
    const auto& e = entries.at("seed");
    std::uint64_t s = 0;
    auto res = std::from_chars(e.value.data(), e.value.data() + e.value.size(), s);
    if (res.ec != std::errc() || res.ptr != e.value.data() + e.value.size())
      detail::config_error(ErrorKind::Parse, e.line, "seed", "bad seed '" + e.value + "'");
    o.seed = s;
  }

  // Validation with line-numbered diagnostics.
  auto at_line = [&](const std::string& key, auto&& fn) {
    try {
      fn();
    } catch (const Error& err) {
      detail::config_error(err.kind(), entries.count(key) ? entries.at(key).line : 0, key,
                           err.what());
    }
  };
  at_line("Nx", [&] { cfg.grid.emplace(cfg.length, cfg.horizon, cfg.nx, cfg.nt); });
  at_line("alpha", [&] {
    require(cfg.alpha >= 0.0, ErrorKind::InvalidConfig, "alpha must be >= 0");
  });
  at_line("v_c", [&] { require(cfg.v_c > 0.0, ErrorKind::InvalidConfig, "v_c must be > 0"); });
  at_line("step", [&] { o.validate(); });

  const Grid& g = *cfg.grid;
  at_line("k", [&] {
    cfg.k_field = evaluate_space(cfg.k, g, base_dir);
    check_stiffness(cfg.k_field, g);
  });
  at_line("w", [&] {
    cfg.w_field = evaluate_space(cfg.w, g, base_dir);
    const double tol = 1e-12 * std::max(1.0, max_abs(cfg.w_field.values()));
    require(std::abs(cfg.w_field[0]) <= tol && std::abs(cfg.w_field[g.nx()]) <= tol,
            ErrorKind::InvalidInput, "initial displacement w must vanish at x = 0 and x = L");
  });
  at_line("F", [&] { cfg.load_field = evaluate_spacetime(cfg.load, g, base_dir); });
  at_line("y", [&] { cfg.target_field = evaluate_spacetime(cfg.target, g, base_dir); });
  at_line("v0", [&] { cfg.v0_field = evaluate_space(cfg.v0, g, base_dir); });
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  auto in = open_input(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  try {
    return parse_config(ss.str(), base.empty() ? std::filesystem::path(".") : base);
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

}  // namespace ebopt
