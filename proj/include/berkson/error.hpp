#pragma once

#include <stdexcept>
#include <string>

namespace berkson {

enum class ErrorKind {
    InvalidCovariance,
    Shape,
    Domain,
    UnsupportedDimension,
    EmptySample,
    Parse,
    Config,
    DegenerateModel,
    Divergence,
    BracketExhausted,
    Conditioning,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    // Failures that come from the numerics rather than from user input.
    bool is_numeric() const noexcept {
        return kind_ == ErrorKind::DegenerateModel || kind_ == ErrorKind::Divergence ||
               kind_ == ErrorKind::BracketExhausted || kind_ == ErrorKind::Conditioning;
    }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, std::string(to_string(kind)) + ": " + what);
}

}  // namespace berkson
