#include "s3forge/actions.hpp"

#include <json.hpp>

#include "s3forge/errors.hpp"

namespace s3forge {

using nlohmann::json;

namespace {

struct KindName {
    ActionKind kind;
    const char* name;
};

constexpr KindName kKinds[] = {
    {ActionKind::MoveForward, "move_forward"},
    {ActionKind::MoveLeft, "move_left"},
    {ActionKind::MoveRight, "move_right"},
    {ActionKind::RotateLeft45, "rotate_left_45"},
    {ActionKind::RotateRight45, "rotate_right_45"},
    {ActionKind::ScanForward90, "scan_forward_90"},
    {ActionKind::Sweep360, "sweep_360"},
};

}  // namespace

const char* to_string(ActionKind kind) {
    for (const auto& k : kKinds)
        if (k.kind == kind) return k.name;
    return "?";
}

Action parse_action(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ParseError("action is not valid JSON");
    if (!j.is_object()) throw SchemaError("action must be a JSON object");

    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (key != "action" && key != "distance_m")
            throw SchemaError("unknown key '" + key + "' in action");
    }
    if (!j.contains("action") || !j["action"].is_string())
        throw SchemaError("action requires a string 'action' field");

    const std::string name = j["action"].get<std::string>();
    Action act;
    bool known = false;
    for (const auto& k : kKinds)
        if (name == k.name) {
            act.kind = k.kind;
            known = true;
            break;
        }
    if (!known) throw SchemaError("unknown action kind '" + name + "'");

    if (act.translational()) {
        if (!j.contains("distance_m") || !j["distance_m"].is_number())
            throw SchemaError("'" + name + "' requires numeric distance_m");
        act.distance_m = j["distance_m"].get<double>();
        if (!(act.distance_m > 0.0) || act.distance_m > 5.0)
            throw RangeError("distance_m must be in (0, 5], got " +
                             std::to_string(act.distance_m));
    } else if (j.contains("distance_m")) {
        throw SchemaError("'" + name + "' takes no distance_m");
    }
    return act;
}

std::optional<Action> try_parse_action(const std::string& text) {
    try {
        return parse_action(text);
    } catch (const Error&) {
        return std::nullopt;
    }
}

std::string serialize_action(const Action& action) {
    json j{{"action", to_string(action.kind)}};
    if (action.translational()) j["distance_m"] = action.distance_m;
    return j.dump();
}

}  // namespace s3forge
