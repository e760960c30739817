#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace fdmimo {

// Fixed-format numeric printing so output files are byte-stable across runs
// and platforms with the same libc.
std::string format_double(double v);       // %.12g, CSV payloads
std::string format_double_exact(double v); // %.17g, round-trips exactly

// One CSV line from preformatted cells, "\n" line ending.
void write_csv_row(std::ostream& out, const std::vector<std::string>& cells);

// Flat key=value files (run manifests). Keys are written sorted; blank lines
// and '#' comments are ignored on read. parse throws on a malformed line.
using KeyValueMap = std::map<std::string, std::string>;
void write_kv_file(std::ostream& out, const KeyValueMap& kv);
KeyValueMap parse_kv_text(const std::string& text);
KeyValueMap parse_kv_file(const std::string& path);  // throws if unreadable

}  // namespace fdmimo
