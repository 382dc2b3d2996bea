#pragma once

// CSV serialization of fields.
//   SpaceField:     header "x,value", then Nx+1 rows "x_i,f_i".
//   SpaceTimeField: header "t,x_0,...,x_Nx" (numeric x coordinates), then
//                   Nt+1 rows "t_n,f(x_0,t_n),...,f(x_Nx,t_n)".
// Values are written with 17 significant digits so a write/read round trip is
// exact.

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "ebopt/errors.hpp"
#include "ebopt/grid.hpp"

namespace ebopt {

inline constexpr double kGridMatchTol = 1e-9;

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

/// Parses the whole of s as a double; nullopt-style failure via bool.
inline bool parse_double(std::string_view s, double& out) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

namespace detail {

struct CsvCell {
  std::string_view text;
  std::size_t column;  // 1-based character column
};

inline std::vector<CsvCell> split_csv(std::string_view line) {
  std::vector<CsvCell> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    const std::size_t end = comma == std::string_view::npos ? line.size() : comma;
    cells.push_back({line.substr(start, end - start), start + 1});
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

inline std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

[[noreturn]] inline void csv_error(const std::string& source, std::size_t line, std::size_t col,
                                   const std::string& msg) {
  throw Error(ErrorKind::Parse, source + ":" + std::to_string(line) + ":" + std::to_string(col) +
                                    ": " + msg);
}

inline double cell_number(const CsvCell& c, const std::string& source, std::size_t line) {
  double v = 0.0;
  if (!parse_double(c.text, v) || !std::isfinite(v))
    csv_error(source, line, c.column, "non-numeric cell '" + std::string(c.text) + "'");
  return v;
}

inline void check_coordinate(double got, double want, const std::string& source, std::size_t line,
                             const char* axis) {
  if (std::abs(got - want) > kGridMatchTol)
    throw Error(ErrorKind::GridMismatch, source + ":" + std::to_string(line) + ": " + axis +
                                             " coordinate " + format_double(got) +
                                             " does not match grid value " + format_double(want));
}

}  // namespace detail

inline void write_space_field(std::ostream& out, const SpaceField& f, const Grid& g) {
  check_bound(f, g);
  out << "x,value\n";
  for (std::size_t i = 0; i < f.size(); ++i)
    out << format_double(g.x(i)) << ',' << format_double(f[i]) << '\n';
}

inline void write_spacetime_field(std::ostream& out, const SpaceTimeField& f, const Grid& g) {
  check_bound(f, g);
  out << 't';
  for (std::size_t i = 0; i < f.nodes(); ++i) out << ',' << format_double(g.x(i));
  out << '\n';
  for (std::size_t n = 0; n < f.levels(); ++n) {
    out << format_double(g.t(n));
    for (double v : f.row(n)) out << ',' << format_double(v);
    out << '\n';
  }
}

inline SpaceField read_space_field(std::istream& in, const Grid& g,
                                   const std::string& source = "<input>") {
  const auto lines = detail::read_lines(in);
  if (lines.empty() || lines[0] != "x,value")
    detail::csv_error(source, 1, 1, "expected header 'x,value'");
  const std::size_t rows = lines.size() - 1;
  if (rows != g.space_nodes())
    detail::csv_error(source, lines.size(), 1,
                      "expected " + std::to_string(g.space_nodes()) + " data rows, found " +
                          std::to_string(rows));
  SpaceField f(g.space_nodes());
  for (std::size_t i = 0; i < rows; ++i) {
    const std::size_t ln = i + 2;
    const auto cells = detail::split_csv(lines[i + 1]);
    if (cells.size() != 2)
      detail::csv_error(source, ln, 1, "expected 2 cells, found " + std::to_string(cells.size()));
    detail::check_coordinate(detail::cell_number(cells[0], source, ln), g.x(i), source, ln, "x");
    f[i] = detail::cell_number(cells[1], source, ln);
  }
  return f;
}

inline SpaceTimeField read_spacetime_field(std::istream& in, const Grid& g,
                                           const std::string& source = "<input>") {
  const auto lines = detail::read_lines(in);
  if (lines.empty()) detail::csv_error(source, 1, 1, "empty file");
  const auto header = detail::split_csv(lines[0]);
  if (header.empty() || header[0].text != "t")
    detail::csv_error(source, 1, 1, "expected header starting with 't'");
  if (header.size() != g.space_nodes() + 1)
    detail::csv_error(source, 1, 1,
                      "expected " + std::to_string(g.space_nodes()) + " x columns, found " +
                          std::to_string(header.size() - 1));
  for (std::size_t i = 0; i < g.space_nodes(); ++i)
    detail::check_coordinate(detail::cell_number(header[i + 1], source, 1), g.x(i), source, 1,
                             "x");
  const std::size_t rows = lines.size() - 1;
  if (rows != g.time_levels())
    detail::csv_error(source, lines.size(), 1,
                      "expected " + std::to_string(g.time_levels()) + " data rows, found " +
                          std::to_string(rows));
  SpaceTimeField f = SpaceTimeField::zeros(g);
  for (std::size_t n = 0; n < rows; ++n) {
    const std::size_t ln = n + 2;
    const auto cells = detail::split_csv(lines[n + 1]);
    if (cells.size() != g.space_nodes() + 1)
      detail::csv_error(source, ln, 1,
                        "expected " + std::to_string(g.space_nodes() + 1) + " cells, found " +
                            std::to_string(cells.size()));
    detail::check_coordinate(detail::cell_number(cells[0], source, ln), g.t(n), source, ln, "t");
    for (std::size_t i = 0; i < g.space_nodes(); ++i)
      f(n, i) = detail::cell_number(cells[i + 1], source, ln);
  }
  return f;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidInput, "cannot open '" + path + "' for reading");
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidInput, "cannot open '" + path + "' for writing");
  return out;
}

inline SpaceField read_space_field(const std::string& path, const Grid& g) {
  auto in = open_input(path);
  return read_space_field(in, g, path);
}

inline SpaceTimeField read_spacetime_field(const std::string& path, const Grid& g) {
  auto in = open_input(path);
  return read_spacetime_field(in, g, path);
}

inline void write_space_field(const std::string& path, const SpaceField& f, const Grid& g) {
  auto out = open_output(path);
  write_space_field(out, f, g);
}

inline void write_spacetime_field(const std::string& path, const SpaceTimeField& f,
                                  const Grid& g) {
  auto out = open_output(path);
  write_spacetime_field(out, f, g);
}

}  // namespace ebopt
