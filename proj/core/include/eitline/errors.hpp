#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace eitline {

/// Base of all domain errors. `code()` is the stable machine-readable class
/// name ("SingularSystem", "ConfigError", ...) that the CLI prints and maps
/// to exit codes.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

struct SingularSystem : Error {
    explicit SingularSystem(const std::string& m) : Error("SingularSystem", m) {}
};

struct ZeroProbe : Error {
    explicit ZeroProbe(const std::string& m) : Error("ZeroProbe", m) {}
};

struct DegenerateDenominator : Error {
    explicit DegenerateDenominator(const std::string& m) : Error("DegenerateDenominator", m) {}
};

struct StepTooLarge : Error {
    explicit StepTooLarge(const std::string& m) : Error("StepTooLarge", m) {}
};

struct PositivityLost : Error {
    explicit PositivityLost(const std::string& m) : Error("PositivityLost", m) {}
};

struct BadTrace : Error {
    explicit BadTrace(const std::string& m) : Error("BadTrace", m) {}
};

struct GridTooCoarse : Error {
    explicit GridTooCoarse(const std::string& m) : Error("GridTooCoarse", m) {}
};

struct EmptySweep : Error {
    explicit EmptySweep(const std::string& m) : Error("EmptySweep", m) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& m) : Error("ConfigError", m) {}
};

struct IoError : Error {
    explicit IoError(const std::string& m) : Error("IoError", m) {}
};

}  // namespace eitline
