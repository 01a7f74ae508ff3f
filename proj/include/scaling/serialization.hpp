#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "scaling/planner.hpp"
#include "scaling/study_model.hpp"
#include "scaling/synthmodel.hpp"

// JSON and JSON-lines encodings. Field names match the struct members.
// Decoders throw Error(parse_error) on malformed input; decoded records,
// specs and models are not validated here.
namespace scaling {

std::string to_json_line(const RunRecord& r);
RunRecord record_from_json(std::string_view text);

std::string to_json_line(const RunSpec& s);
RunSpec run_spec_from_json(std::string_view text);
std::vector<RunSpec> run_specs_from_json_lines(std::string_view text);

std::string to_json(const StudySpec& spec);
StudySpec study_spec_from_json(std::string_view text);

// Accepts either a top-level array or {"platforms": [...]}.
std::string to_json(const std::vector<PlatformModel>& models);
std::vector<PlatformModel> models_from_json(std::string_view text);

}  // namespace scaling
