#pragma once

#include <stdexcept>
#include <string>

namespace weakfactor {

// Raised when input data make a statistic undefined (e.g. a component with zero
// realized variance). Monte Carlo drivers resample once on this error.
class degenerate_input_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Eigensolver or other numerical failure.
class computation_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or out-of-range configuration. `key()` names the offending entry.
class config_error : public std::invalid_argument {
public:
    config_error(std::string key, const std::string& message)
        : std::invalid_argument(key.empty() ? message : key + ": " + message),
          key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

}  // namespace weakfactor
