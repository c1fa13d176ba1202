#pragma once

#include <string>
#include <vector>

namespace jtag {

std::string read_file(const std::string& path);

// Writes via a sibling temp file plus rename, so interrupted runs never
// leave a truncated artifact at `path`.
void atomic_write_file(const std::string& path, const std::string& content);

std::string lowercase(const std::string& s);
std::vector<std::string> split(const std::string& s, char sep);
std::string join(const std::vector<std::string>& parts, const std::string& sep);

// Fixed six-decimal rendering used for all CSV numbers.
std::string fmt_fixed(double v);
// Shortest exact round-trip rendering (config blocks).
std::string fmt_exact(double v);

}  // namespace jtag
