#pragma once

// Plain-text key=value run configuration. Blank lines and lines starting with
// '#' are ignored; unknown keys and malformed values are rejected.

#include <stdexcept>
#include <string>
#include <string_view>

#include "pia3c/trainer.hpp"

namespace pia3c {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Every field, one per line, in a fixed order; parse_config inverts it exactly.
std::string serialize_config(const TrainConfig& config);

/// Starts from the defaults and applies each line.
TrainConfig parse_config(std::string_view text);

/// Applies one "key=value" assignment (the form taken by --set).
void apply_setting(TrainConfig& config, std::string_view assignment);

}  // namespace pia3c
