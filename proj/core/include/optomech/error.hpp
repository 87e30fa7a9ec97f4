#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace optomech {

enum class ErrorCode {
    InvalidParameter,
    ConfigError,
    StepSizeUnderflow,
    NonFiniteState,
    ZeroVariance,
    NoDominantPeak,
    NoBracket,
    UnstableDrift,
    IllConditioned,
    UnphysicalSubmatrix,
    NegativeOccupancy,
    AllUnstable,
    IoError,
};

std::string_view to_string(ErrorCode code);

// Every library failure is reported through this type; the code lets sweep
// drivers record failures per cell instead of aborting.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace optomech
