#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace graphflow {

// Base for everything thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A chart was evaluated outside its admissible coordinate range.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

// Invalid run configuration.  Carries the full list of violations so a user
// can fix them all in one pass; what() joins them.
class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> violations)
        : Error(join(violations)), violations_(std::move(violations)) {}

    const std::vector<std::string>& violations() const { return violations_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string s = "configuration invalid:";
        for (const auto& line : v) s += "\n  - " + line;
        return s;
    }
    std::vector<std::string> violations_;
};

// A stencil or interpolation needed a value that cannot be re-expressed in
// the chart where it is consumed (target values straddling opposite caps,
// hyperbolic values leaving the disk, ...).
class ChartEscapeError : public Error {
public:
    explicit ChartEscapeError(const std::string& msg) : Error(msg) {}
};

// Linear algebra gone bad: non-SPD metric, non-finite values.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& msg) : Error(msg) {}
};

// A bug in our own bookkeeping (grid construction promised a neighbor that
// is not there, etc.).  Not a user error.
class InternalError : public Error {
public:
    explicit InternalError(const std::string& msg) : Error(msg) {}
};

} // namespace graphflow
