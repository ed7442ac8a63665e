#include "spillover/errors.hpp"

namespace spillover {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::RankDeficient: return "RankDeficient";
        case ErrorCode::WeakFirstStage: return "WeakFirstStage";
        case ErrorCode::InsufficientCompliers: return "InsufficientCompliers";
        case ErrorCode::DegenerateArm: return "DegenerateArm";
        case ErrorCode::MissingLinks: return "MissingLinks";
        case ErrorCode::SingularDesign: return "SingularDesign";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::MalformedData: return "MalformedData";
    }
    return "Unknown";
}

}  // namespace spillover
