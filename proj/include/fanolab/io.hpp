// io.hpp — Small filesystem and formatting helpers shared by the CLI and tests

#pragma once

#include <string>
#include <vector>

namespace fanolab::io {

// Round-trip-exact decimal rendering ("%.17g").
std::string format_g17(double x);

// Create parent directories as needed and write the whole file.
void write_text_file(const std::string& path, const std::string& content);

std::string read_text_file(const std::string& path);

std::vector<double> linspace(double lo, double hi, int count);

} // namespace fanolab::io
