#include "scaling/error.hpp"

namespace scaling {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_record: return "InvalidRecord";
        case ErrorCode::invalid_spec: return "InvalidSpec";
        case ErrorCode::invalid_model: return "InvalidModel";
        case ErrorCode::duplicate_point: return "DuplicatePoint";
        case ErrorCode::overflow: return "Overflow";
        case ErrorCode::unknown_placeholder: return "UnknownPlaceholder";
        case ErrorCode::unsubstituted_placeholder: return "UnsubstitutedPlaceholder";
        case ErrorCode::ladder_not_increasing: return "LadderNotIncreasing";
        case ErrorCode::parse_error: return "ParseError";
        case ErrorCode::type_mismatch: return "TypeMismatch";
        case ErrorCode::empty_ensemble: return "EmptyEnsemble";
        case ErrorCode::inconsistent_ensemble: return "InconsistentEnsemble";
        case ErrorCode::not_ok: return "NotOk";
        case ErrorCode::empty_series: return "EmptySeries";
        case ErrorCode::missing_point: return "MissingPoint";
        case ErrorCode::out_of_range: return "OutOfRange";
        case ErrorCode::too_few_points: return "TooFewPoints";
        case ErrorCode::non_positive_value: return "NonPositiveValue";
        case ErrorCode::empty_chart: return "EmptyChart";
        case ErrorCode::io_error: return "IoError";
    }
    return "Unknown";
}

}  // namespace scaling
