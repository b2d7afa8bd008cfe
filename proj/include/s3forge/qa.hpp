#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "s3forge/occupancy.hpp"
#include "s3forge/rng.hpp"
#include "s3forge/scene.hpp"
#include "s3forge/visibility.hpp"

namespace s3forge {

enum class TaskKind : std::uint8_t {
    CameraDisplacement,
    CurrentRoomArea,
    CamObjDistance,
    IdentificationClosest,
    CameraMotionTarget,
    Attribute,
    SpatialDistance,
    Area,
    Count,
    Sequence,
    SpatialProximity,
    RelativeOrientation,
    SequenceIdentification,
    TemSpatialDistanceRef,
    TemCamObjDistanceRef,
    TemHorizontalDirection,
};

inline constexpr int kTaskKindCount = 16;

enum class AnswerFormat : std::uint8_t { Num, Mc };

const char* to_string(TaskKind kind);
TaskKind task_kind_from_string(const std::string& s);
AnswerFormat format_of(TaskKind kind);

enum class ChainKind : std::uint8_t { Chronological, SpatialSuperlative, CameraMotion };

struct QAPair {
    std::string id;
    std::string scene_id;
    std::string trajectory_id;
    double timestamp_s = 0.0;
    TaskKind task = TaskKind::Count;
    AnswerFormat format = AnswerFormat::Num;
    std::string question;
    std::vector<std::string> choices;  // MC only
    int answer_index = -1;             // MC only
    double answer_value = 0.0;         // NUM only
    std::string answer_unit;           // "m", "m^2" or empty
    std::vector<std::string> refs;     // object ids the pair depends on
    std::string chain_id;              // empty for single-turn
    int turn_idx = 0;                  // 0 single-turn, 1/2 chain turns
    std::uint64_t gen_seed = 0;
    nlohmann::json meta = nlohmann::json::object();  // generation provenance
};

struct GenConfig {
    double area_visit_threshold = 0.3;
    double back_angle_deg = 135.0;
    // displacement window values, all within the 1..3 s band and frame-aligned
    std::vector<double> displacement_windows_s = {1.0, 1.5, 2.0, 2.5, 3.0};
    int n_choices = 4;
    double chain_advance_s = 5.0;
    double min_displacement_m = 0.2;
    double d_visit = 2.0;
    double min_spatial_distance_m = 0.1;
    double closest_margin_m = 0.3;
    double motion_required_delta_m = -0.3;
    double motion_margin_m = 0.2;
    double motion_window_s = 3.0;
    double min_speed_moving = 0.1;  // m/s, the MOVE_TO_NEXT stand-in
    int timestamp_count = 12;
    int quota_per_task = 2;
    std::uint64_t seed = 0;
};

// Everything the generators read, plus the seeded generator they draw from.
struct GenContext {
    const Scene& scene;
    const Trajectory& trajectory;
    const VisibilityTable& table;
    const OccupancyGrid& grid;
    const VisParams& vis;
    const GenConfig& config;
    Rng& rng;

    GenContext(const Scene& scene_, const Trajectory& trajectory_,
               const VisibilityTable& table_, const OccupancyGrid& grid_,
               const VisParams& vis_, const GenConfig& config_, Rng& rng_)
        : scene(scene_), trajectory(trajectory_), table(table_), grid(grid_), vis(vis_),
          config(config_), rng(rng_) {}

    std::size_t frame_of(double t) const { return trajectory.frame_at(t); }
    // object indices with first_appearance strictly before `frame`
    std::vector<std::size_t> seen_before(std::size_t frame) const;
    // earliest frame the camera passed within d_visit of each FREE cell
    const std::vector<std::size_t>& visit_frames() const;
    // FREE cell -> containing room index, -1 when outside all rooms
    const std::vector<int>& cell_room() const;

private:
    mutable std::vector<std::size_t> visit_frames_cache_;
    mutable std::vector<int> cell_room_cache_;
};

// timestamps in [5 s, duration], frame-aligned, stratified across segment
// labels; throws InsufficientDuration when duration <= 5 s
std::vector<double> sample_timestamps(const GenContext& ctx, int n);

std::optional<QAPair> gen_count(const GenContext& ctx, double t);
std::optional<QAPair> gen_attribute(const GenContext& ctx, double t);
std::optional<QAPair> gen_sequence(const GenContext& ctx, double t, bool identification);
std::optional<QAPair> gen_spatial_distance(const GenContext& ctx, double t);
std::optional<QAPair> gen_area_visited(const GenContext& ctx, double t);
std::optional<QAPair> gen_spatial_proximity(const GenContext& ctx, double t);
std::optional<QAPair> gen_relative_orientation(const GenContext& ctx, double t);
std::optional<QAPair> gen_camera_displacement(const GenContext& ctx, double t);
std::optional<QAPair> gen_cam_obj_distance(const GenContext& ctx, double t);
std::optional<QAPair> gen_identification_closest(const GenContext& ctx, double t);
std::optional<QAPair> gen_current_room_area(const GenContext& ctx, double t);
std::optional<QAPair> gen_camera_motion_target(const GenContext& ctx, double t);
std::optional<std::array<QAPair, 2>> gen_chain(const GenContext& ctx, double t, ChainKind kind);

// classifies a relative bearing (radians, wrapped) into the four horizontal
// regions; the +-180 deg boundary belongs to Back-Left
const char* horizontal_direction_class(double bearing_rad);

// Fills per-task quotas best-effort over sampled timestamps, deduplicates,
// shuffles MC answer positions (inside the generators), audits grounding.
std::vector<QAPair> generate_all(const GenContext& ctx,
                                 const std::map<TaskKind, int>& quotas);

// grounding audit: every ref must have first_appearance < the pair's frame;
// throws AuditError on violation
void audit_grounding(const std::vector<QAPair>& pairs, const GenContext& ctx);

nlohmann::json qa_to_json(const QAPair& pair);
QAPair qa_from_json(const nlohmann::json& j);
std::string qa_set_to_jsonl(const std::vector<QAPair>& pairs, const GenConfig& config,
                            const std::string& provenance_json = "");
std::vector<QAPair> qa_set_from_jsonl(const std::string& bytes);

}  // namespace s3forge
