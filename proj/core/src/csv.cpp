// SPDX-License-Identifier: Apache-2.0
#include "passevo/csv.hpp"

#include "passevo/errors.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace passevo::csv {

std::string fmt_double(double v) {
    char buf[64];
    // Try increasing precision until the value round-trips.
    for (int prec = 9; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v)
            return buf;
    }
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(std::string_view s) {
    std::string tmp(s);
    char* end = nullptr;
    double v = std::strtod(tmp.c_str(), &end);
    if (end == tmp.c_str() || *end != '\0')
        throw ConfigError("not a number: '" + tmp + "'");
    return v;
}

long parse_long(std::string_view s) {
    std::string tmp(s);
    char* end = nullptr;
    errno = 0;
    long v = std::strtol(tmp.c_str(), &end, 10);
    if (end == tmp.c_str() || *end != '\0' || errno == ERANGE)
        throw ConfigError("not an integer: '" + tmp + "'");
    return v;
}

unsigned long long parse_u64(std::string_view s) {
    std::string tmp(s);
    if (!tmp.empty() && tmp[0] == '-')
        throw ConfigError("not an unsigned integer: '" + tmp + "'");
    char* end = nullptr;
    errno = 0;
    unsigned long long v = std::strtoull(tmp.c_str(), &end, 10);
    if (end == tmp.c_str() || *end != '\0' || errno == ERANGE)
        throw ConfigError("not an unsigned integer: '" + tmp + "'");
    return v;
}

double parse_double(std::string_view s, const std::string& where) {
    try {
        return parse_double(s);
    } catch (const ConfigError& e) {
        throw ConfigError(where, e.what());
    }
}

long parse_long(std::string_view s, const std::string& where) {
    try {
        return parse_long(s);
    } catch (const ConfigError& e) {
        throw ConfigError(where, e.what());
    }
}

unsigned long long parse_u64(std::string_view s, const std::string& where) {
    try {
        return parse_u64(s);
    } catch (const ConfigError& e) {
        throw ConfigError(where, e.what());
    }
}

std::string quote(std::string_view field) {
    bool needs = field.find_first_of(",\"\n") != std::string_view::npos;
    if (!needs)
        return std::string(field);
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (char c : field) {
        if (c == '"')
            out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::vector<std::string> split_record(std::string_view line) {
    std::vector<std::string> fields;
    std::string cur;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

std::string join_record(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i)
            out.push_back(',');
        out += quote(fields[i]);
    }
    return out;
}

} // namespace passevo::csv
