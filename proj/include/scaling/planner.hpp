#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scaling/study_model.hpp"

namespace scaling {

enum class StudyKind { strong, weak, strong_weak, throughput };

std::string_view to_string(StudyKind k);
std::optional<StudyKind> parse_study_kind(std::string_view s);

struct PlatformEntry {
    std::string name;
    std::string variant;

    bool operator==(const PlatformEntry&) const = default;
};

// Declarative study definition. Sizes are in elements; dofs_total of a run is
// elements * dofs_per_element.
struct StudySpec {
    std::string study_id;
    StudyKind kind = StudyKind::strong;
    std::string problem;  // defaults to study_id when empty
    std::vector<PlatformEntry> platforms;
    std::int64_t base_nodes = 1;
    int doublings = 0;
    std::int64_t base_elements = 1;
    int refinements = 0;
    int dim = 3;
    std::int64_t dofs_per_element = 1;
    std::int64_t cycles = 1;
    std::vector<std::int64_t> dof_ladder;
    std::string command_template;

    bool operator==(const StudySpec&) const = default;
};

struct RunSpec {
    std::string study_id;
    std::string platform;
    std::int64_t nodes = 1;
    std::optional<std::int64_t> refinement_level;
    std::int64_t dofs_total = 1;
    std::int64_t cycles = 1;
    std::string command;
    SeriesKey expected_series;

    bool operator==(const RunSpec&) const = default;
};

class InvalidSpec : public Error {
public:
    explicit InvalidSpec(std::vector<FieldIssue> issues);
    [[nodiscard]] const std::vector<FieldIssue>& issues() const noexcept { return issues_; }

private:
    std::vector<FieldIssue> issues_;
};

std::vector<FieldIssue> check_spec(const StudySpec& spec);
void validate_spec(const StudySpec& spec);

// base * (2^dim)^levels; throws Error(overflow) past int64.
std::int64_t refine_elements(std::int64_t base, int levels, int dim);

std::vector<RunSpec> plan_strong(const StudySpec& spec);
std::vector<RunSpec> plan_weak(const StudySpec& spec);
std::vector<RunSpec> plan_strong_weak(const StudySpec& spec);
std::vector<RunSpec> plan_throughput(const StudySpec& spec);
// Dispatches on spec.kind.
std::vector<RunSpec> plan(const StudySpec& spec);

using TemplateParams = std::map<std::string, std::string, std::less<>>;

// Placeholder names accepted by expand_template.
const std::vector<std::string_view>& template_placeholders();

// Substitutes {name} placeholders; "{{" and "}}" produce literal braces.
std::string expand_template(std::string_view tmpl, const TemplateParams& params);

}  // namespace scaling
