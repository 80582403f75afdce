#include "berkson/error.hpp"

namespace berkson {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidCovariance: return "invalid covariance";
        case ErrorKind::Shape: return "shape error";
        case ErrorKind::Domain: return "domain error";
        case ErrorKind::UnsupportedDimension: return "unsupported dimension";
        case ErrorKind::EmptySample: return "empty sample";
        case ErrorKind::Parse: return "parse error";
        case ErrorKind::Config: return "config error";
        case ErrorKind::DegenerateModel: return "degenerate model";
        case ErrorKind::Divergence: return "divergence";
        case ErrorKind::BracketExhausted: return "bracket exhausted";
        case ErrorKind::Conditioning: return "conditioning error";
    }
    return "error";
}

}  // namespace berkson
