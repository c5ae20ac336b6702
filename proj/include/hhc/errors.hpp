#ifndef HHC_ERRORS_HPP
#define HHC_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace hhc {

// Unreadable or malformed inputs. CLI maps this to exit code 2.
struct InputError : std::runtime_error {
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// Rank deficiency, degenerate distributions, failed factorizations. Exit code 3.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid or inconsistent run configuration. Exit code 4.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

using Warnings = std::vector<std::string>;

} // namespace hhc

#endif
