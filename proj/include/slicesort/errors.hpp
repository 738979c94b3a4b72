#pragma once

#include <stdexcept>
#include <string>

namespace slicesort {

// Error categories map to CLI exit codes: config_error -> 2, data_error -> 3,
// anything else -> 4.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

class data_error : public std::runtime_error {
public:
    explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace slicesort
