#pragma once

#include <charconv>
#include <cmath>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "pcd/error.hpp"
#include "pcd/geometry.hpp"

namespace pcd::io {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// Locale-independent parse of a finite decimal number; the whole token must be consumed.
inline std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

// "a" or "a/b" with decimal a and b.
inline std::optional<double> parse_ratio(std::string_view s) {
  s = trim(s);
  const auto slash = s.find('/');
  if (slash == std::string_view::npos) return parse_number(s);
  const auto num = parse_number(s.substr(0, slash));
  const auto den = parse_number(s.substr(slash + 1));
  if (!num || !den || *den == 0.0) return std::nullopt;
  return *num / *den;
}

// r as a decimal, a fraction such as "11/10", or "inf".
inline RFactor parse_r(std::string_view text) {
  const std::string_view s = trim(text);
  if (s == "inf" || s == "Inf" || s == "INF" || s == "infinity") return RFactor::infinity();
  const auto v = parse_ratio(s);
  if (!v) throw DomainError("cannot parse r from '" + std::string(text) + "'");
  return RFactor(*v);
}

// eps as a decimal, a fraction, or "[k]sqrt3[/d]" such as "sqrt3/8" or "2sqrt3/7".
inline double parse_eps(std::string_view text) {
  std::string_view s = trim(text);
  const auto at = s.find("sqrt3");
  if (at == std::string_view::npos) {
    const auto v = parse_ratio(s);
    if (!v) throw DomainError("cannot parse eps from '" + std::string(text) + "'");
    return *v;
  }
  double coeff = 1.0;
  if (at > 0) {
    std::string_view c = trim(s.substr(0, at));
    if (!c.empty() && c.back() == '*') c.remove_suffix(1);
    const auto v = parse_number(c);
    if (!v) throw DomainError("cannot parse eps from '" + std::string(text) + "'");
    coeff = *v;
  }
  std::string_view rest = trim(s.substr(at + 5));
  double den = 1.0;
  if (!rest.empty()) {
    if (rest.front() != '/') throw DomainError("cannot parse eps from '" + std::string(text) + "'");
    const auto v = parse_number(rest.substr(1));
    if (!v || *v == 0.0) throw DomainError("cannot parse eps from '" + std::string(text) + "'");
    den = *v;
  }
  return coeff * kSqrt3 / den;
}

// Two-column CSV of points with an optional "x,y" header; blank lines are skipped.
inline std::vector<Point> read_points(std::istream& in, const std::string& source = "input") {
  std::vector<Point> pts;
  std::string line;
  std::size_t lineno = 0;
  bool seen_row = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    const auto comma = row.find(',');
    if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos)
      throw DataError(source + ":" + std::to_string(lineno) + ": expected two comma-separated columns");
    const auto x = parse_number(row.substr(0, comma));
    const auto y = parse_number(row.substr(comma + 1));
    if (!x || !y) {
      if (!seen_row && trim(row.substr(0, comma)) == "x" && trim(row.substr(comma + 1)) == "y") {
        seen_row = true;
        continue;
      }
      throw DataError(source + ":" + std::to_string(lineno) + ": expected two finite numbers");
    }
    seen_row = true;
    pts.push_back({*x, *y});
  }
  return pts;
}

// Numbers separated by commas, whitespace or newlines.
inline std::vector<double> read_numbers(std::istream& in, const std::string& source = "input") {
  std::vector<double> out;
  std::string token;
  char ch;
  auto flush = [&] {
    if (token.empty()) return;
    const auto v = parse_number(token);
    if (!v) throw DataError(source + ": cannot parse number '" + token + "'");
    out.push_back(*v);
    token.clear();
  };
  while (in.get(ch)) {
    if (ch == ',' || ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r')
      flush();
    else
      token.push_back(ch);
  }
  flush();
  return out;
}

// Shortest decimal text that reads back to the same double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline std::string format_r(RFactor r) { return r.is_infinite() ? "inf" : format_double(r.value()); }

}  // namespace pcd::io
