#pragma once

// Shared helpers for the line-oriented text formats (docs/formats.md).

#include <charconv>
#include <cstdio>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

namespace gravitom::detail {

// Shortest decimal representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) break;
  }
  return buf;
}

inline std::vector<std::string> split_tokens(const std::string& line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

// Sequential reader that tracks line numbers for error messages of the
// form "name:line: message".
class LineReader {
 public:
  LineReader(std::istream& in, std::string name)
      : in_(in), name_(std::move(name)) {}

  bool next(std::string& line) {
    if (!std::getline(in_, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++lineno_;
    return true;
  }

  // Next line that is neither blank nor a '#' comment.
  bool next_content(std::string& line) {
    while (next(line)) {
      std::size_t i = line.find_first_not_of(" \t");
      if (i == std::string::npos) continue;
      if (line[i] == '#') continue;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::runtime_error(name_ + ":" + std::to_string(lineno_) + ": " +
                             msg);
  }

  int lineno() const { return lineno_; }
  const std::string& name() const { return name_; }

 private:
  std::istream& in_;
  std::string name_;
  int lineno_ = 0;
};

inline double parse_double(const LineReader& r, const std::string& tok,
                           const char* what) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (first != last && *first == '+') ++first;  // from_chars rejects '+'
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last)
    r.fail(std::string("expected a number for ") + what + ", got '" + tok +
           "'");
  return v;
}

inline long long parse_int(const LineReader& r, const std::string& tok,
                           const char* what) {
  long long v = 0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last)
    r.fail(std::string("expected an integer for ") + what + ", got '" + tok +
           "'");
  return v;
}

// Reads and checks the "# gravitom <kind> v1" header line.
inline void expect_header(LineReader& r, const std::string& kind) {
  std::string line;
  if (!r.next(line)) r.fail("empty file (expected '# gravitom " + kind +
                            " v1' header)");
  const auto tok = split_tokens(line);
  if (tok.size() < 4 || tok[0] != "#" || tok[1] != "gravitom" ||
      tok[2] != kind || tok[3] != "v1")
    r.fail("expected '# gravitom " + kind + " v1' header");
}

}  // namespace gravitom::detail
