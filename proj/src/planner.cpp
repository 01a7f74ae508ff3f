#include "scaling/planner.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace scaling {

std::string_view to_string(StudyKind k) {
    switch (k) {
        case StudyKind::strong: return "strong";
        case StudyKind::weak: return "weak";
        case StudyKind::strong_weak: return "strong_weak";
        case StudyKind::throughput: return "throughput";
    }
    return "strong";
}

std::optional<StudyKind> parse_study_kind(std::string_view s) {
    if (s == "strong") return StudyKind::strong;
    if (s == "weak") return StudyKind::weak;
    if (s == "strong_weak" || s == "strong-weak") return StudyKind::strong_weak;
    if (s == "throughput") return StudyKind::throughput;
    return std::nullopt;
}

namespace {

std::string join_issues(const std::vector<FieldIssue>& issues) {
    std::string out;
    for (const auto& i : issues) {
        if (!out.empty()) out += "; ";
        out += i.field + ": " + i.reason;
    }
    return out;
}

constexpr int kMaxDoublings = 30;

std::int64_t checked_mul(std::int64_t a, std::int64_t b, std::string_view what) {
    std::int64_t out = 0;
    if (__builtin_mul_overflow(a, b, &out)) {
        throw Error(ErrorCode::overflow, fmt::format("{} overflows a 64-bit integer", what));
    }
    return out;
}

std::int64_t pow2_factor(int dim, int levels) {
    std::int64_t out = 1;
    const std::int64_t step = std::int64_t{1} << dim;
    for (int i = 0; i < levels; ++i) out = checked_mul(out, step, "refinement factor");
    return out;
}

// Scans a template and reports each placeholder name; throws on malformed
// brace structure.
template <typename OnText, typename OnName>
void scan_template(std::string_view tmpl, OnText on_text, OnName on_name) {
    std::size_t i = 0;
    while (i < tmpl.size()) {
        const char c = tmpl[i];
        if (c == '{') {
            if (i + 1 < tmpl.size() && tmpl[i + 1] == '{') {
                on_text('{');
                i += 2;
                continue;
            }
            const auto close = tmpl.find('}', i + 1);
            if (close == std::string_view::npos) {
                throw Error(ErrorCode::unsubstituted_placeholder,
                            fmt::format("unterminated placeholder at offset {}", i));
            }
            on_name(tmpl.substr(i + 1, close - i - 1));
            i = close + 1;
        } else if (c == '}') {
            if (i + 1 < tmpl.size() && tmpl[i + 1] == '}') {
                on_text('}');
                i += 2;
                continue;
            }
            throw Error(ErrorCode::parse_error, fmt::format("unmatched '}}' at offset {}", i));
        } else {
            on_text(c);
            ++i;
        }
    }
}

bool is_known_placeholder(std::string_view name) {
    const auto& known = template_placeholders();
    return std::find(known.begin(), known.end(), name) != known.end();
}

RunSpec make_run(const StudySpec& spec, const PlatformEntry& platform, std::int64_t nodes,
                 std::optional<std::int64_t> level, std::int64_t dofs, Family family) {
    RunSpec run;
    run.study_id = spec.study_id;
    run.platform = platform.name;
    run.nodes = nodes;
    run.refinement_level = level;
    run.dofs_total = dofs;
    run.cycles = spec.cycles;

    RunRecord probe;
    probe.platform = platform.name;
    probe.variant = platform.variant;
    probe.problem = spec.problem.empty() ? spec.study_id : spec.problem;
    probe.nodes = nodes;
    probe.dofs_total = dofs;
    run.expected_series = series_key(probe, family);

    TemplateParams params{
        {"nodes", std::to_string(nodes)},
        {"dofs_total", std::to_string(dofs)},
        {"cycles", std::to_string(spec.cycles)},
        {"platform", platform.name},
        {"study_id", spec.study_id},
    };
    if (level) params.emplace("refinement_level", std::to_string(*level));
    run.command = expand_template(spec.command_template, params);
    return run;
}

void require_kind(const StudySpec& spec, StudyKind kind) {
    validate_spec(spec);
    if (spec.kind != kind) {
        throw Error(ErrorCode::invalid_spec, fmt::format("study '{}' has kind {}, expected {}", spec.study_id,
                                                         to_string(spec.kind), to_string(kind)));
    }
}

}  // namespace

InvalidSpec::InvalidSpec(std::vector<FieldIssue> issues)
    : Error(ErrorCode::invalid_spec, "invalid study spec: " + join_issues(issues)), issues_(std::move(issues)) {}

const std::vector<std::string_view>& template_placeholders() {
    static const std::vector<std::string_view> names{"nodes",  "dofs_total", "refinement_level",
                                                     "cycles", "platform",   "study_id"};
    return names;
}

std::vector<FieldIssue> check_spec(const StudySpec& spec) {
    std::vector<FieldIssue> issues;
    if (spec.study_id.empty()) issues.push_back({"study_id", "must not be empty"});
    if (spec.platforms.empty()) issues.push_back({"platforms", "must list at least one platform"});
    for (std::size_t i = 0; i < spec.platforms.size(); ++i) {
        if (spec.platforms[i].name.empty()) {
            issues.push_back({fmt::format("platforms[{}].name", i), "must not be empty"});
        }
    }
    if (spec.base_nodes < 1) issues.push_back({"base_nodes", "must be >= 1"});
    if (spec.doublings < 0 || spec.doublings > kMaxDoublings) {
        issues.push_back({"doublings", fmt::format("must be in [0, {}]", kMaxDoublings)});
    }
    if (spec.refinements < 0) issues.push_back({"refinements", "must be >= 0"});
    if (spec.dim != 2 && spec.dim != 3) issues.push_back({"dim", "must be 2 or 3"});
    if (spec.base_elements < 1) issues.push_back({"base_elements", "must be >= 1"});
    if (spec.dofs_per_element < 1) issues.push_back({"dofs_per_element", "must be >= 1"});
    if (spec.cycles < 1) issues.push_back({"cycles", "must be >= 1"});
    for (std::size_t i = 0; i < spec.dof_ladder.size(); ++i) {
        if (spec.dof_ladder[i] < 1) issues.push_back({fmt::format("dof_ladder[{}]", i), "must be >= 1"});
    }
    try {
        scan_template(
            spec.command_template, [](char) {},
            [&](std::string_view name) {
                if (!is_known_placeholder(name)) {
                    issues.push_back({"command_template", fmt::format("unknown placeholder {{{}}}", name)});
                }
            });
    } catch (const Error& e) {
        issues.push_back({"command_template", e.what()});
    }
    return issues;
}

void validate_spec(const StudySpec& spec) {
    auto issues = check_spec(spec);
    if (!issues.empty()) throw InvalidSpec(std::move(issues));
}

std::int64_t refine_elements(std::int64_t base, int levels, int dim) {
    if (dim != 2 && dim != 3) throw Error(ErrorCode::invalid_spec, "dim must be 2 or 3");
    if (levels < 0) throw Error(ErrorCode::invalid_spec, "refinement levels must be >= 0");
    std::int64_t out = base;
    const std::int64_t step = std::int64_t{1} << dim;
    for (int i = 0; i < levels; ++i) out = checked_mul(out, step, "refined element count");
    return out;
}

std::vector<RunSpec> plan_strong(const StudySpec& spec) {
    require_kind(spec, StudyKind::strong);
    const auto dofs = checked_mul(refine_elements(spec.base_elements, spec.refinements, spec.dim),
                                  spec.dofs_per_element, "dofs_total");
    std::vector<RunSpec> runs;
    for (const auto& platform : spec.platforms) {
        for (int i = 0; i <= spec.doublings; ++i) {
            const auto nodes = checked_mul(spec.base_nodes, std::int64_t{1} << i, "nodes");
            runs.push_back(make_run(spec, platform, nodes, spec.refinements, dofs, Family::strong));
        }
    }
    return runs;
}

std::vector<RunSpec> plan_weak(const StudySpec& spec) {
    require_kind(spec, StudyKind::weak);
    std::vector<RunSpec> runs;
    for (const auto& platform : spec.platforms) {
        for (int i = 0; i <= spec.refinements; ++i) {
            const auto factor = pow2_factor(spec.dim, i);
            const auto nodes = checked_mul(spec.base_nodes, factor, "nodes");
            const auto dofs = checked_mul(refine_elements(spec.base_elements, i, spec.dim), spec.dofs_per_element,
                                          "dofs_total");
            runs.push_back(make_run(spec, platform, nodes, i, dofs, Family::weak));
        }
    }
    return runs;
}

std::vector<RunSpec> plan_strong_weak(const StudySpec& spec) {
    require_kind(spec, StudyKind::strong_weak);
    std::vector<RunSpec> runs;
    for (const auto& platform : spec.platforms) {
        for (int r = 0; r <= spec.refinements; ++r) {
            const auto dofs = checked_mul(refine_elements(spec.base_elements, r, spec.dim), spec.dofs_per_element,
                                          "dofs_total");
            for (int j = 0; j <= spec.doublings; ++j) {
                const auto nodes = checked_mul(spec.base_nodes, std::int64_t{1} << j, "nodes");
                runs.push_back(make_run(spec, platform, nodes, r, dofs, Family::strong));
            }
        }
    }
    return runs;
}

std::vector<RunSpec> plan_throughput(const StudySpec& spec) {
    require_kind(spec, StudyKind::throughput);
    if (spec.dof_ladder.empty()) throw Error(ErrorCode::ladder_not_increasing, "dof_ladder: must not be empty");
    for (std::size_t i = 1; i < spec.dof_ladder.size(); ++i) {
        if (spec.dof_ladder[i] <= spec.dof_ladder[i - 1]) {
            throw Error(ErrorCode::ladder_not_increasing,
                        fmt::format("dof_ladder: entry {} ({}) does not exceed entry {} ({})", i,
                                    spec.dof_ladder[i], i - 1, spec.dof_ladder[i - 1]));
        }
    }
    std::vector<RunSpec> runs;
    for (const auto& platform : spec.platforms) {
        for (const auto dofs : spec.dof_ladder) {
            runs.push_back(make_run(spec, platform, 1, std::nullopt, dofs, Family::throughput));
        }
    }
    return runs;
}

std::vector<RunSpec> plan(const StudySpec& spec) {
    switch (spec.kind) {
        case StudyKind::strong: return plan_strong(spec);
        case StudyKind::weak: return plan_weak(spec);
        case StudyKind::strong_weak: return plan_strong_weak(spec);
        case StudyKind::throughput: return plan_throughput(spec);
    }
    return {};
}

std::string expand_template(std::string_view tmpl, const TemplateParams& params) {
    std::string out;
    out.reserve(tmpl.size());
    scan_template(
        tmpl, [&](char c) { out.push_back(c); },
        [&](std::string_view name) {
            if (!is_known_placeholder(name)) {
                throw Error(ErrorCode::unknown_placeholder, fmt::format("unknown placeholder {{{}}}", name));
            }
            auto it = params.find(name);
            if (it == params.end()) {
                throw Error(ErrorCode::unsubstituted_placeholder,
                            fmt::format("no value for placeholder {{{}}}", name));
            }
            out += it->second;
        });
    return out;
}

}  // namespace scaling
