#include "core/error.hpp"

namespace cevfb {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidParameter: return "invalid parameter";
        case ErrorCode::Domain: return "domain error";
        case ErrorCode::GridSpec: return "invalid grid specification";
        case ErrorCode::ModeMismatch: return "grid mode mismatch";
        case ErrorCode::Singular: return "singular matrix";
        case ErrorCode::BoundaryEscape: return "exercise boundary left its admissible range";
        case ErrorCode::Stagnation: return "step size stagnated at the minimum";
        case ErrorCode::NonConvergence: return "iteration did not converge";
        case ErrorCode::ConfigParse: return "configuration error";
    }
    return "unknown error";
}

}  // namespace cevfb
