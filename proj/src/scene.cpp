#include "s3forge/scene.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "s3forge/errors.hpp"

namespace s3forge {

OrientedBox3 wall_box(Point2 a, Point2 b, double height) {
    const Point2 mid = (a + b) * 0.5;
    const double len = distance(a, b);
    OrientedBox3 box;
    box.center = {mid.x, mid.y, height / 2.0};
    box.half_extents = {len / 2.0, kWallThickness / 2.0, height / 2.0};
    box.yaw = wrap_angle(std::atan2(b.y - a.y, b.x - a.x));
    return box;
}

std::vector<OrientedBox3> derive_wall_occluders(const std::vector<Room>& rooms) {
    std::vector<OrientedBox3> walls;
    for (const auto& room : rooms) {
        const auto& poly = room.polygon;
        const std::size_t n = poly.size();
        for (std::size_t i = 0, j = n - 1; i < n; j = i++)
            walls.push_back(wall_box(poly[j], poly[i], room.ceiling_height));
    }
    return walls;
}

namespace {

void validate_room(const Room& room) {
    if (room.id.empty()) throw SchemaError("room with empty id");
    if (room.polygon.size() < 3)
        throw GeometryError("room '" + room.id + "' polygon has fewer than 3 vertices");
    for (const auto& p : room.polygon)
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw GeometryError("room '" + room.id + "' polygon has non-finite vertex");
    if (polygon_self_intersects(room.polygon))
        throw GeometryError("room '" + room.id + "' polygon self-intersects");
    if (polygon_area(room.polygon) <= 0.0)
        throw GeometryError("room '" + room.id + "' polygon has zero area");
    if (room.ceiling_height <= 0.0)
        throw GeometryError("room '" + room.id + "' has non-positive ceiling height");
}

void validate_box(const OrientedBox3& box, const std::string& what) {
    for (double h : box.half_extents)
        if (!(h > 0.0) || !std::isfinite(h))
            throw GeometryError(what + " has non-positive half extent");
    if (!std::isfinite(box.center.x) || !std::isfinite(box.center.y) ||
        !std::isfinite(box.center.z) || !std::isfinite(box.yaw))
        throw GeometryError(what + " has non-finite fields");
}

}  // namespace

Scene::Scene(std::string id, std::vector<Room> rooms, std::vector<SceneObject> objects,
             std::vector<OrientedBox3> occluders)
    : id_(std::move(id)),
      rooms_(std::move(rooms)),
      objects_(std::move(objects)),
      occluders_(std::move(occluders)) {
    if (id_.empty()) throw SchemaError("scene with empty id");
    if (rooms_.empty()) throw SchemaError("scene '" + id_ + "' has no rooms");

    std::set<std::string> room_ids;
    for (auto& room : rooms_) {
        validate_room(room);
        // tolerant ingestion: CW polygons are normalized, not rejected
        if (!polygon_is_ccw(room.polygon))
            std::reverse(room.polygon.begin(), room.polygon.end());
        if (!room_ids.insert(room.id).second)
            throw SchemaError("duplicate room id '" + room.id + "'");
    }

    std::set<std::string> object_ids;
    for (const auto& obj : objects_) {
        if (obj.id.empty()) throw SchemaError("object with empty id");
        if (!object_ids.insert(obj.id).second)
            throw SchemaError("duplicate object id '" + obj.id + "'");
        validate_box(obj.box, "object '" + obj.id + "'");
        if (std::abs(wrap_angle(obj.box.yaw) - obj.box.yaw) > 1e-9)
            throw GeometryError("object '" + obj.id + "' yaw outside [-pi, pi)");
        const Room* room = find_room(obj.room_id);
        if (!room)
            throw ReferenceError("object '" + obj.id + "' references unknown room '" +
                                 obj.room_id + "'");
        if (!point_in_polygon(obj.box.center.xy(), room->polygon))
            throw GeometryError("object '" + obj.id + "' center lies outside room '" +
                                obj.room_id + "'");
    }

    for (const auto& occ : occluders_) validate_box(occ, "occluder");

    // a document without occluders gets its walls derived from the polygons
    if (occluders_.empty()) occluders_ = derive_wall_occluders(rooms_);

    bool first = true;
    auto absorb = [&](const Aabb3& ab) {
        if (first) {
            bounds_ = ab;
            first = false;
        } else {
            bounds_.expand(ab.min);
            bounds_.expand(ab.max);
        }
    };
    for (const auto& room : rooms_) {
        for (const auto& p : room.polygon) {
            absorb({{p.x, p.y, 0.0}, {p.x, p.y, room.ceiling_height}});
        }
    }
    for (const auto& occ : occluders_) absorb(occ.aabb());
    for (const auto& obj : objects_) {
        const Aabb3 ab = obj.box.aabb();
        if (!bounds_.contains(ab.min) || !bounds_.contains(ab.max)) absorb(ab);
    }

    for (const auto& occ : occluders_) opaque_.push(occ);
    for (const auto& obj : objects_) opaque_.push(obj.box);
}

const Room* Scene::find_room(const std::string& room_id) const {
    for (const auto& r : rooms_)
        if (r.id == room_id) return &r;
    return nullptr;
}

const SceneObject* Scene::find_object(const std::string& object_id) const {
    for (const auto& o : objects_)
        if (o.id == object_id) return &o;
    return nullptr;
}

std::optional<std::size_t> Scene::object_index(const std::string& object_id) const {
    for (std::size_t i = 0; i < objects_.size(); ++i)
        if (objects_[i].id == object_id) return i;
    return std::nullopt;
}

std::optional<std::string> Scene::locate_room(Point2 p) const {
    const Room* best = nullptr;
    for (const auto& room : rooms_) {
        if (!point_in_polygon(p, room.polygon)) continue;
        if (!best || room.id < best->id) best = &room;
    }
    if (!best) return std::nullopt;
    return best->id;
}

const char* to_string(SegmentLabel label) {
    switch (label) {
        case SegmentLabel::Moving: return "MOVING";
        case SegmentLabel::Sweeping: return "SWEEPING";
        case SegmentLabel::Idle: return "IDLE";
    }
    return "IDLE";
}

SegmentLabel segment_label_from_string(const std::string& s) {
    if (s == "MOVING") return SegmentLabel::Moving;
    if (s == "SWEEPING") return SegmentLabel::Sweeping;
    if (s == "IDLE") return SegmentLabel::Idle;
    throw SchemaError("unknown segment label '" + s + "'");
}

}  // namespace s3forge
