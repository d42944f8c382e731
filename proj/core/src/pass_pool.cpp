// SPDX-License-Identifier: Apache-2.0
#include "passevo/pass_pool.hpp"

#include "passevo/errors.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace passevo {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

bool has_whitespace(std::string_view s) {
    return s.find_first_of(" \t") != std::string_view::npos;
}

} // namespace

bool PassPool::contains(std::string_view token) const {
    return std::find(passes.begin(), passes.end(), token) != passes.end();
}

PassPool parse_pass_pool(std::string_view text, const std::string& source_name) {
    PassPool pool;
    std::unordered_set<std::string> seen;
    std::size_t lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view raw = (eol == std::string_view::npos)
                                   ? text.substr(pos)
                                   : text.substr(pos, eol - pos);
        pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
        ++lineno;

        std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#')
            continue;

        std::string where = source_name + ":" + std::to_string(lineno);
        if (line.front() == '!') {
            // "!token reason=why it is out"
            line.remove_prefix(1);
            std::size_t sp = line.find_first_of(" \t");
            std::string_view token = (sp == std::string_view::npos) ? line : line.substr(0, sp);
            if (token.empty())
                throw ConfigError(where, "exclusion with empty token");
            std::string reason;
            if (sp != std::string_view::npos) {
                std::string_view rest = trim(line.substr(sp));
                constexpr std::string_view kPrefix = "reason=";
                if (rest.substr(0, kPrefix.size()) != kPrefix)
                    throw ConfigError(where, "exclusion must carry 'reason=...'");
                reason = std::string(rest.substr(kPrefix.size()));
            } else {
                throw ConfigError(where, "exclusion must carry 'reason=...'");
            }
            if (!seen.insert(std::string(token)).second)
                throw ConfigError(where, "duplicate pass token '" + std::string(token) + "'");
            pool.excluded.push_back({std::string(token), reason});
            continue;
        }

        if (has_whitespace(line))
            throw ConfigError(where, "pass token contains whitespace: '" + std::string(line) + "'");
        if (!seen.insert(std::string(line)).second)
            throw ConfigError(where, "duplicate pass token '" + std::string(line) + "'");
        pool.passes.emplace_back(line);
    }
    if (pool.passes.empty())
        throw ConfigError(source_name, "pass pool is empty");
    return pool;
}

PassPool load_pass_pool(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError(path.string(), "cannot open pass pool file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_pass_pool(buf.str(), path.string());
}

} // namespace passevo
