#pragma once

#include <functional>
#include <string>

namespace mivkit {

std::string trim(const std::string& s);

// Shortest round-trip decimal form (std::to_chars); used everywhere a double
// lands in a text file so reruns are byte-identical.
std::string format_double(double v);

// Full-string strict double parse; calls fail(msg) on bad input.
double parse_number(const std::string& token, const std::function<void(const std::string&)>& fail);

// Write via temp file + rename so failures never leave partial output.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace mivkit
