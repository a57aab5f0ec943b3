#pragma once

#include <stdexcept>
#include <string>

namespace petic {

// Scenario/config problems: carries the config field path ("[agent.2] Phi")
// and, when known, the source line of the offending entry.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string path, const std::string& what, int line = -1)
        : std::runtime_error(line >= 0
              ? path + " (line " + std::to_string(line) + "): " + what
              : path + ": " + what),
          path_(std::move(path)), line_(line) {}

    const std::string& path() const { return path_; }
    int line() const { return line_; }

private:
    std::string path_;
    int line_;
};

// Raised when a trajectory exceeds the divergence threshold or turns
// non-finite. Carries the offending time so callers can report it.
class BlowupError : public std::runtime_error {
public:
    explicit BlowupError(double t)
        : std::runtime_error("state diverged at t = " + std::to_string(t)), t_(t) {}

    BlowupError(double t, const std::string& what) : std::runtime_error(what), t_(t) {}

    double time() const { return t_; }

private:
    double t_;
};

} // namespace petic
