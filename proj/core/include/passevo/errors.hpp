// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace passevo {

// Invalid configuration, config file, pool file or CLI input.
// `where` carries "file:line" when the problem is tied to a source line.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg)
        : std::runtime_error(msg) {}
    ConfigError(const std::string& where, const std::string& msg)
        : std::runtime_error(where + ": " + msg) {}
};

} // namespace passevo
