#include "scaling/serialization.hpp"

#include <cmath>
#include <limits>
#include <set>

#include <fmt/format.h>

#include "json.hpp"

namespace scaling {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCode::parse_error, msg); }

json parse_object(std::string_view text, std::string_view what) {
    json j;
    try {
        j = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        fail(fmt::format("{}: malformed JSON ({})", what, e.what()));
    }
    if (!j.is_object()) fail(fmt::format("{}: expected a JSON object", what));
    return j;
}

std::int64_t get_int(const json& v, std::string_view field) {
    if (v.is_number_integer()) {
        if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
            fail(fmt::format("{}: integer out of range", field));
        }
        return v.get<std::int64_t>();
    }
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (std::isfinite(d) && std::trunc(d) == d && std::abs(d) < 9.2e18) return static_cast<std::int64_t>(d);
    }
    fail(fmt::format("{}: expected an integer", field));
}

double get_real(const json& v, std::string_view field) {
    if (!v.is_number()) fail(fmt::format("{}: expected a number", field));
    return v.get<double>();
}

std::string get_string(const json& v, std::string_view field) {
    if (!v.is_string()) fail(fmt::format("{}: expected a string", field));
    return v.get<std::string>();
}

const json& required(const json& j, std::string_view field) {
    auto it = j.find(field);
    if (it == j.end()) fail(fmt::format("{}: missing required field", field));
    return *it;
}

void reject_unknown(const json& j, std::initializer_list<std::string_view> known, std::string_view what) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const auto k : known) ok = ok || it.key() == k;
        if (!ok) fail(fmt::format("{}: unknown field '{}'", what, it.key()));
    }
}

ordered_json key_to_json(const SeriesKey& k) {
    ordered_json j;
    j["platform"] = k.platform;
    j["variant"] = k.variant;
    j["problem"] = k.problem;
    j["family"] = std::string(to_string(k.family));
    j["family_param"] = k.family_param;
    return j;
}

SeriesKey key_from_json(const json& j) {
    if (!j.is_object()) fail("expected_series: expected an object");
    SeriesKey k;
    k.platform = get_string(required(j, "platform"), "expected_series.platform");
    if (j.contains("variant")) k.variant = get_string(j["variant"], "expected_series.variant");
    if (j.contains("problem")) k.problem = get_string(j["problem"], "expected_series.problem");
    const auto fam = get_string(required(j, "family"), "expected_series.family");
    auto f = parse_family(fam);
    if (!f) fail(fmt::format("expected_series.family: unknown family '{}'", fam));
    k.family = *f;
    if (j.contains("family_param")) {
        k.family_param = static_cast<int>(get_int(j["family_param"], "expected_series.family_param"));
    }
    return k;
}

std::string metadata_value(const json& v, const std::string& key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number() || v.is_boolean()) return v.dump();
    fail(fmt::format("metadata.{}: expected a string, number or boolean", key));
}

ordered_json model_to_json(const PlatformModel& m) {
    ordered_json j;
    j["name"] = m.name;
    j["serial_s_per_cycle"] = m.serial_s_per_cycle;
    j["rate_dofs_per_s"] = m.rate_dofs_per_s;
    j["half_saturation_dofs"] = m.half_saturation_dofs;
    j["comm_s_per_cycle"] = m.comm_s_per_cycle;
    j["launch_s_per_cycle"] = m.launch_s_per_cycle;
    j["mem_capacity_dofs_per_node"] = m.mem_capacity_dofs_per_node;
    j["noise_rel"] = m.noise_rel;
    j["seed"] = m.seed;
    return j;
}

PlatformModel model_from_json(const json& j, std::size_t index) {
    const auto where = fmt::format("platforms[{}]", index);
    if (!j.is_object()) fail(where + ": expected an object");
    reject_unknown(j,
                   {"name", "serial_s_per_cycle", "rate_dofs_per_s", "half_saturation_dofs", "comm_s_per_cycle",
                    "launch_s_per_cycle", "mem_capacity_dofs_per_node", "noise_rel", "seed"},
                   where);
    PlatformModel m;
    m.name = get_string(required(j, "name"), where + ".name");
    m.rate_dofs_per_s = get_real(required(j, "rate_dofs_per_s"), where + ".rate_dofs_per_s");
    m.mem_capacity_dofs_per_node =
        get_real(required(j, "mem_capacity_dofs_per_node"), where + ".mem_capacity_dofs_per_node");
    auto opt_real = [&](const char* field, double& dst) {
        if (j.contains(field)) dst = get_real(j[field], where + "." + field);
    };
    opt_real("serial_s_per_cycle", m.serial_s_per_cycle);
    opt_real("half_saturation_dofs", m.half_saturation_dofs);
    opt_real("comm_s_per_cycle", m.comm_s_per_cycle);
    opt_real("launch_s_per_cycle", m.launch_s_per_cycle);
    opt_real("noise_rel", m.noise_rel);
    if (j.contains("seed")) {
        const auto& s = j["seed"];
        if (s.is_number_unsigned()) {
            m.seed = s.get<std::uint64_t>();
        } else {
            m.seed = static_cast<std::uint64_t>(get_int(s, where + ".seed"));
        }
    }
    return m;
}

}  // namespace

std::string to_json_line(const RunRecord& r) {
    ordered_json j;
    j["study_id"] = r.study_id;
    j["platform"] = r.platform;
    j["variant"] = r.variant;
    j["problem"] = r.problem;
    j["nodes"] = r.nodes;
    if (r.ranks_per_node) j["ranks_per_node"] = *r.ranks_per_node;
    j["cycles"] = r.cycles;
    if (r.wall_time_s) j["wall_time_s"] = *r.wall_time_s;
    j["dofs_total"] = r.dofs_total;
    if (r.refinement_level) j["refinement_level"] = *r.refinement_level;
    j["status"] = std::string(to_string(r.status));
    j["repeat_index"] = r.repeat_index;
    j["metadata"] = r.metadata;
    return j.dump();
}

RunRecord record_from_json(std::string_view text) {
    const json j = parse_object(text, "record");
    RunRecord r;
    r.study_id = j.contains("study_id") ? get_string(j["study_id"], "study_id") : std::string{};
    r.platform = get_string(required(j, "platform"), "platform");
    if (j.contains("variant") && !j["variant"].is_null()) r.variant = get_string(j["variant"], "variant");
    r.problem = j.contains("problem") ? get_string(j["problem"], "problem") : std::string{};
    r.nodes = get_int(required(j, "nodes"), "nodes");
    if (j.contains("ranks_per_node") && !j["ranks_per_node"].is_null()) {
        r.ranks_per_node = get_int(j["ranks_per_node"], "ranks_per_node");
    }
    r.cycles = get_int(required(j, "cycles"), "cycles");
    if (j.contains("wall_time_s") && !j["wall_time_s"].is_null()) {
        r.wall_time_s = get_real(j["wall_time_s"], "wall_time_s");
    }
    r.dofs_total = get_int(required(j, "dofs_total"), "dofs_total");
    if (j.contains("refinement_level") && !j["refinement_level"].is_null()) {
        r.refinement_level = get_int(j["refinement_level"], "refinement_level");
    }
    const auto status = get_string(required(j, "status"), "status");
    auto s = parse_status(status);
    if (!s) fail(fmt::format("status: unknown value '{}'", status));
    r.status = *s;
    if (j.contains("repeat_index")) r.repeat_index = get_int(j["repeat_index"], "repeat_index");
    if (j.contains("metadata")) {
        const auto& md = j["metadata"];
        if (!md.is_object()) fail("metadata: expected an object");
        for (auto it = md.begin(); it != md.end(); ++it) r.metadata[it.key()] = metadata_value(it.value(), it.key());
    }
    return r;
}

std::string to_json_line(const RunSpec& s) {
    ordered_json j;
    j["study_id"] = s.study_id;
    j["platform"] = s.platform;
    j["nodes"] = s.nodes;
    if (s.refinement_level) {
        j["refinement_level"] = *s.refinement_level;
    } else {
        j["refinement_level"] = nullptr;
    }
    j["dofs_total"] = s.dofs_total;
    j["cycles"] = s.cycles;
    j["command"] = s.command;
    j["expected_series"] = key_to_json(s.expected_series);
    return j.dump();
}

RunSpec run_spec_from_json(std::string_view text) {
    const json j = parse_object(text, "run spec");
    RunSpec s;
    s.study_id = get_string(required(j, "study_id"), "study_id");
    s.platform = get_string(required(j, "platform"), "platform");
    s.nodes = get_int(required(j, "nodes"), "nodes");
    if (j.contains("refinement_level") && !j["refinement_level"].is_null()) {
        s.refinement_level = get_int(j["refinement_level"], "refinement_level");
    }
    s.dofs_total = get_int(required(j, "dofs_total"), "dofs_total");
    s.cycles = get_int(required(j, "cycles"), "cycles");
    if (j.contains("command")) s.command = get_string(j["command"], "command");
    s.expected_series = key_from_json(required(j, "expected_series"));
    if (s.nodes < 1) fail("nodes: must be >= 1");
    if (s.cycles < 1) fail("cycles: must be >= 1");
    if (s.dofs_total < 1) fail("dofs_total: must be >= 1");
    return s;
}

std::vector<RunSpec> run_specs_from_json_lines(std::string_view text) {
    std::vector<RunSpec> out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(pos, end - pos);
        ++line_no;
        if (line.find_first_not_of(" \t\r") != std::string_view::npos) {
            try {
                out.push_back(run_spec_from_json(line));
            } catch (const Error& e) {
                fail(fmt::format("line {}: {}", line_no, e.what()));
            }
        }
        pos = end + 1;
    }
    return out;
}

std::string to_json(const StudySpec& spec) {
    ordered_json j;
    j["study_id"] = spec.study_id;
    j["kind"] = std::string(to_string(spec.kind));
    j["problem"] = spec.problem;
    ordered_json platforms = ordered_json::array();
    for (const auto& p : spec.platforms) platforms.push_back({{"name", p.name}, {"variant", p.variant}});
    j["platforms"] = platforms;
    j["base_nodes"] = spec.base_nodes;
    j["doublings"] = spec.doublings;
    j["base_elements"] = spec.base_elements;
    j["refinements"] = spec.refinements;
    j["dim"] = spec.dim;
    j["dofs_per_element"] = spec.dofs_per_element;
    j["cycles"] = spec.cycles;
    if (!spec.dof_ladder.empty()) j["dof_ladder"] = spec.dof_ladder;
    j["command_template"] = spec.command_template;
    return j.dump(2);
}

StudySpec study_spec_from_json(std::string_view text) {
    const json j = parse_object(text, "study spec");
    reject_unknown(j,
                   {"study_id", "kind", "problem", "platforms", "base_nodes", "doublings", "base_elements",
                    "refinements", "dim", "dofs_per_element", "cycles", "dof_ladder", "command_template"},
                   "study spec");
    StudySpec spec;
    spec.study_id = get_string(required(j, "study_id"), "study_id");
    const auto kind = get_string(required(j, "kind"), "kind");
    auto k = parse_study_kind(kind);
    if (!k) fail(fmt::format("kind: unknown study kind '{}'", kind));
    spec.kind = *k;
    if (j.contains("problem")) spec.problem = get_string(j["problem"], "problem");
    const auto& platforms = required(j, "platforms");
    if (!platforms.is_array()) fail("platforms: expected an array");
    for (std::size_t i = 0; i < platforms.size(); ++i) {
        const auto& p = platforms[i];
        const auto where = fmt::format("platforms[{}]", i);
        if (p.is_string()) {
            spec.platforms.push_back({p.get<std::string>(), ""});
        } else if (p.is_object()) {
            reject_unknown(p, {"name", "variant"}, where);
            PlatformEntry e;
            e.name = get_string(required(p, "name"), where + ".name");
            if (p.contains("variant")) e.variant = get_string(p["variant"], where + ".variant");
            spec.platforms.push_back(std::move(e));
        } else {
            fail(where + ": expected a string or an object");
        }
    }
    auto opt_int = [&](const char* field, auto& dst) {
        if (!j.contains(field)) return;
        const auto v = get_int(j[field], field);
        using T = std::remove_reference_t<decltype(dst)>;
        if (v < std::numeric_limits<T>::min() || v > std::numeric_limits<T>::max()) {
            fail(fmt::format("{}: value out of range", field));
        }
        dst = static_cast<T>(v);
    };
    opt_int("base_nodes", spec.base_nodes);
    opt_int("doublings", spec.doublings);
    opt_int("base_elements", spec.base_elements);
    opt_int("refinements", spec.refinements);
    opt_int("dim", spec.dim);
    opt_int("dofs_per_element", spec.dofs_per_element);
    spec.cycles = get_int(required(j, "cycles"), "cycles");
    if (j.contains("dof_ladder")) {
        const auto& ladder = j["dof_ladder"];
        if (!ladder.is_array()) fail("dof_ladder: expected an array");
        for (std::size_t i = 0; i < ladder.size(); ++i) {
            spec.dof_ladder.push_back(get_int(ladder[i], fmt::format("dof_ladder[{}]", i)));
        }
    }
    if (j.contains("command_template")) spec.command_template = get_string(j["command_template"], "command_template");
    return spec;
}

std::string to_json(const std::vector<PlatformModel>& models) {
    ordered_json j;
    ordered_json arr = ordered_json::array();
    for (const auto& m : models) arr.push_back(model_to_json(m));
    j["platforms"] = arr;
    return j.dump(2);
}

std::vector<PlatformModel> models_from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        fail(fmt::format("model file: malformed JSON ({})", e.what()));
    }
    const json* arr = &j;
    if (j.is_object()) {
        reject_unknown(j, {"platforms"}, "model file");
        arr = &required(j, "platforms");
    }
    if (!arr->is_array()) fail("model file: expected an array of platform models");
    std::vector<PlatformModel> out;
    std::set<std::string> names;
    for (std::size_t i = 0; i < arr->size(); ++i) {
        auto m = model_from_json((*arr)[i], i);
        if (!names.insert(m.name).second) fail(fmt::format("platforms[{}].name: duplicate model '{}'", i, m.name));
        out.push_back(std::move(m));
    }
    return out;
}

}  // namespace scaling
