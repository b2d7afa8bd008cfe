#pragma once

#include <optional>
#include <string>

namespace s3forge {

enum class ActionKind {
    MoveForward,
    MoveLeft,
    MoveRight,
    RotateLeft45,
    RotateRight45,
    ScanForward90,
    Sweep360,
};

struct Action {
    ActionKind kind = ActionKind::RotateLeft45;
    double distance_m = 0.0;  // translational kinds only, in (0, 5]

    bool translational() const {
        return kind == ActionKind::MoveForward || kind == ActionKind::MoveLeft ||
               kind == ActionKind::MoveRight;
    }
    bool operator==(const Action&) const = default;
};

const char* to_string(ActionKind kind);

// Strict parse of {"action": <kind>, "distance_m": <number>?}: unknown keys
// rejected, distance required exactly for translational kinds.
// Throws ParseError / SchemaError / RangeError.
Action parse_action(const std::string& text);

// non-throwing probe used to tell actions apart from free-text answers
std::optional<Action> try_parse_action(const std::string& text);

std::string serialize_action(const Action& action);

}  // namespace s3forge
