#include "fdmimo/csvio.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fdmimo {

namespace {

std::string format_with(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

// Trim ASCII whitespace from both ends.
std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string format_double(double v) { return format_with("%.12g", v); }
std::string format_double_exact(double v) { return format_with("%.17g", v); }

void write_csv_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out << ',';
    out << cells[i];
  }
  out << '\n';
}

void write_kv_file(std::ostream& out, const KeyValueMap& kv) {
  for (const auto& [key, value] : kv) out << key << '=' << value << '\n';
}

KeyValueMap parse_kv_text(const std::string& text) {
  KeyValueMap kv;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::invalid_argument("parse_kv_text: line " +
                                  std::to_string(line_no) +
                                  " is not key=value: '" + t + "'");
    kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return kv;
}

KeyValueMap parse_kv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("parse_kv_file: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_kv_text(buf.str());
}

}  // namespace fdmimo
