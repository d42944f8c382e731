// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace passevo::csv {

// Shortest decimal form that parses back to the same double.
std::string fmt_double(double v);

// strtod with a full-consume check; throws ConfigError on garbage. The
// `where` overloads prefix diagnostics with a "file:line" location.
double parse_double(std::string_view s);
double parse_double(std::string_view s, const std::string& where);

long parse_long(std::string_view s);
long parse_long(std::string_view s, const std::string& where);

unsigned long long parse_u64(std::string_view s);
unsigned long long parse_u64(std::string_view s, const std::string& where);

// Quotes a field if it contains a comma, quote or newline.
std::string quote(std::string_view field);

// Splits one CSV record, honoring double-quoted fields.
std::vector<std::string> split_record(std::string_view line);

std::string join_record(const std::vector<std::string>& fields);

} // namespace passevo::csv
