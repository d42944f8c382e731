// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace passevo {

struct ExcludedPass {
    std::string id;
    std::string reason;
};

// The set of pass tokens the search may draw from. Tokens are opaque to the
// framework; they only need to be non-empty and whitespace-free.
struct PassPool {
    std::vector<std::string> passes;
    std::vector<ExcludedPass> excluded;

    std::size_t size() const { return passes.size(); }
    bool empty() const { return passes.empty(); }
    const std::string& at(std::size_t i) const { return passes[i]; }
    bool contains(std::string_view token) const;
};

// Pool file format: one token per line; '#' starts a comment line;
// '!token reason=...' records an exclusion. Duplicates are rejected.
PassPool parse_pass_pool(std::string_view text, const std::string& source_name);
PassPool load_pass_pool(const std::filesystem::path& path);

} // namespace passevo
