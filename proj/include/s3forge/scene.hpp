#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "s3forge/geom.hpp"
#include "s3forge/kernels.hpp"

namespace s3forge {

// World frame: right-handed, z up, yaw CCW from +x. All lengths meters,
// angles radians.

struct Room {
    std::string id;
    std::string name;
    std::vector<Point2> polygon;  // simple, CCW
    double ceiling_height = 2.8;
};

struct SceneObject {
    std::string id;
    std::string category;
    OrientedBox3 box;
    std::string room_id;
};

inline constexpr double kWallThickness = 0.1;

class Scene {
public:
    // Validates invariants, normalizes winding, derives wall occluders when
    // the document carried none. Throws SchemaError / GeometryError /
    // ReferenceError.
    Scene(std::string id, std::vector<Room> rooms, std::vector<SceneObject> objects,
          std::vector<OrientedBox3> occluders);

    const std::string& id() const { return id_; }
    const std::vector<Room>& rooms() const { return rooms_; }
    const std::vector<SceneObject>& objects() const { return objects_; }
    // walls plus any explicit static occluders (object boxes not included)
    const std::vector<OrientedBox3>& occluders() const { return occluders_; }
    const Aabb3& bounds() const { return bounds_; }

    const Room* find_room(const std::string& room_id) const;
    const SceneObject* find_object(const std::string& object_id) const;
    std::optional<std::size_t> object_index(const std::string& object_id) const;

    // Full opaque set: occluders_ first, then one box per object, in object
    // order. object_occluder_index(i) addresses object i inside it, so
    // visibility queries can exclude a target's own box.
    const kernels::BoxSoA& opaque_set() const { return opaque_; }
    std::size_t object_occluder_index(std::size_t object_idx) const {
        return occluders_.size() + object_idx;
    }

    // id of the room containing p (boundary inside); ties broken by
    // lexicographically smaller room id
    std::optional<std::string> locate_room(Point2 p) const;

private:
    std::string id_;
    std::vector<Room> rooms_;
    std::vector<SceneObject> objects_;
    std::vector<OrientedBox3> occluders_;
    Aabb3 bounds_;
    kernels::BoxSoA opaque_;
};

// Walls of thickness kWallThickness centered on each polygon edge, height =
// ceiling_height; door openings are simply wall segments never emitted.
std::vector<OrientedBox3> derive_wall_occluders(const std::vector<Room>& rooms);

// Wall box for one edge span (helper shared with the toy generator).
OrientedBox3 wall_box(Point2 a, Point2 b, double height);

struct CameraIntrinsics {
    int width_px = 768;
    int height_px = 768;
    double horizontal_fov_deg = 90.0;  // pitch fixed at 0

    double fx() const { return (width_px / 2.0) / std::tan(horizontal_fov_deg * kPi / 360.0); }
    double fy() const { return fx(); }  // square pixels; vertical fov follows
    double cx() const { return width_px / 2.0; }
    double cy() const { return height_px / 2.0; }
    double vertical_fov_deg() const {
        return 2.0 * std::atan((height_px / 2.0) / fy()) * 180.0 / kPi;
    }
};

struct Pose {
    Point3 position;
    double yaw = 0.0;
    double time_s = 0.0;
};

enum class SegmentLabel : std::uint8_t { Moving, Sweeping, Idle };

const char* to_string(SegmentLabel label);
SegmentLabel segment_label_from_string(const std::string& s);

struct Trajectory {
    std::string id;
    std::string scene_id;
    double fps = 24.0;
    std::vector<Pose> poses;                  // pose i at time i/fps
    std::vector<std::size_t> keypoint_marks;  // frame index of each sweep start
    std::vector<SegmentLabel> segment_labels;

    std::size_t frame_count() const { return poses.size(); }
    double duration_s() const { return poses.empty() ? 0.0 : poses.size() / fps; }
    // frame whose timestamp is t (t expected frame-aligned)
    std::size_t frame_at(double t) const {
        auto f = static_cast<std::ptrdiff_t>(std::floor(t * fps + 0.5));
        f = std::max<std::ptrdiff_t>(f, 0);
        return std::min(static_cast<std::size_t>(f), poses.empty() ? 0 : poses.size() - 1);
    }
};

}  // namespace s3forge
