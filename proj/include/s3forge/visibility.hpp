#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "s3forge/scene.hpp"

namespace s3forge {

struct VisParams {
    // 8 corners + 6 face centers + 12 edge midpoints
    int n_surface_samples = 26;
    double tau_vis = 0.2;   // visible-fraction threshold
    int min_px = 100;       // projected-extent threshold
    double max_range = 12.0;
};

struct PixelBox {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // inclusive-exclusive, clipped
    int width() const { return x1 - x0; }
    int height() const { return y1 - y0; }
    int area() const { return width() * height(); }
};

// Perspective projection of the box corners; nullopt when every corner is
// behind the image plane. Box edges crossing the near plane are clipped so
// partially-behind boxes still produce a sane extent.
std::optional<PixelBox> project(const OrientedBox3& box, const Pose& pose,
                                const CameraIntrinsics& intrinsics);

// camera-frame coordinates of a world point: x right, y down, z forward
Point3 to_camera(const Point3& world, const Pose& pose);

// deterministic surface sample points; the first 26 are the canonical
// corner/face-center/edge-midpoint set, extras are low-discrepancy face
// points
std::vector<Point3> surface_samples(const OrientedBox3& box, int n);

// Fraction of surface samples that are in front of the camera, inside the
// image, within max_range, and whose camera ray reaches them without
// crossing an occluder. `skip_occluder` excludes the object's own box.
double visible_fraction(const OrientedBox3& box, const Pose& pose,
                        const CameraIntrinsics& intrinsics,
                        const kernels::BoxSoA& occluders, const VisParams& params,
                        std::size_t skip_occluder = static_cast<std::size_t>(-1));

struct VisibilityRecord {
    std::size_t frame = 0;
    std::string object_id;
    double visible_fraction = 0.0;
    int projected_px = 0;
    double cam_distance = 0.0;
};

class VisibilityTable {
public:
    VisibilityTable() = default;
    VisibilityTable(std::size_t frame_count, std::vector<std::string> object_ids);

    std::size_t frame_count() const { return frame_count_; }
    const std::vector<std::string>& object_ids() const { return object_ids_; }

    void set(std::size_t frame, std::size_t object_idx, double fraction, int px, double dist);
    // recompute the first-appearance index; call after the last set()
    void finalize(const VisParams& params);

    // zero-record when the pair was never stored
    VisibilityRecord at(std::size_t frame, const std::string& object_id) const;
    VisibilityRecord at(std::size_t frame, std::size_t object_idx) const;

    // first frame with fraction >= tau_vis and px >= min_px
    std::optional<std::size_t> first_appearance(const std::string& object_id) const;
    std::optional<std::size_t> first_appearance(std::size_t object_idx) const;

    std::vector<std::string> visible_objects(std::size_t frame, const VisParams& params) const;
    bool visible_at(std::size_t frame, std::size_t object_idx, const VisParams& params) const;

    std::string to_jsonl(const std::string& header_json = "") const;
    static VisibilityTable from_jsonl(const std::string& bytes);

    std::size_t object_idx_of(const std::string& object_id) const;

private:

    std::size_t frame_count_ = 0;
    std::vector<std::string> object_ids_;
    // dense per-object arrays; fraction 0 entries are skipped when serialized
    std::vector<std::vector<float>> fraction_;
    std::vector<std::vector<std::int32_t>> px_;
    std::vector<std::vector<float>> dist_;
    std::vector<std::optional<std::size_t>> first_visible_;
    VisParams index_params_;
};

// Complete per-frame, per-object table. Deterministic; parallel over frames
// with results merged in frame order.
VisibilityTable compute_table(const Scene& scene, const Trajectory& traj,
                              const CameraIntrinsics& intrinsics, const VisParams& params,
                              int n_threads = 1);

}  // namespace s3forge
