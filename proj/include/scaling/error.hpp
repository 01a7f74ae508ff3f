#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace scaling {

enum class ErrorCode {
    invalid_record,
    invalid_spec,
    invalid_model,
    duplicate_point,
    overflow,
    unknown_placeholder,
    unsubstituted_placeholder,
    ladder_not_increasing,
    parse_error,
    type_mismatch,
    empty_ensemble,
    inconsistent_ensemble,
    not_ok,
    empty_series,
    missing_point,
    out_of_range,
    too_few_points,
    non_positive_value,
    empty_chart,
    io_error,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the toolkit carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace scaling
