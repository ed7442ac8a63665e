#pragma once

#include <stdexcept>
#include <string>

namespace spillover {

enum class ErrorCode {
    RankDeficient,
    WeakFirstStage,
    InsufficientCompliers,
    DegenerateArm,
    MissingLinks,
    SingularDesign,
    InvalidConfig,
    MalformedData,
};

const char* to_string(ErrorCode code);

class SpilloverError : public std::runtime_error {
public:
    SpilloverError(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace spillover
