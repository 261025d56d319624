#pragma once

#include <string>
#include <vector>

namespace ovq::csv {

// Splits one CSV line on commas and trims surrounding whitespace per field.
// The schemas used here never need quoting.
std::vector<std::string> split(const std::string& line);

// Parses with full error context ("file:line: ..." messages come from callers).
double parse_double(const std::string& field, const std::string& context);
long parse_long(const std::string& field, const std::string& context);

// Shortest decimal representation that round-trips a double.
std::string format_double(double v);

}  // namespace ovq::csv
