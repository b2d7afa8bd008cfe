#include "s3forge/visibility.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "s3forge/errors.hpp"
#include "s3forge/kernels.hpp"

namespace s3forge {

using nlohmann::json;

Point3 to_camera(const Point3& world, const Pose& pose) {
    const double c = std::cos(pose.yaw), s = std::sin(pose.yaw);
    const double dx = world.x - pose.position.x;
    const double dy = world.y - pose.position.y;
    const double dz = world.z - pose.position.z;
    // forward = (cos, sin, 0), right = (sin, -cos, 0), down = (0, 0, -1)
    return {s * dx - c * dy, -dz, c * dx + s * dy};
}

namespace {

constexpr double kNearPlane = 1e-6;

struct Projected {
    double u, v;
};

Projected project_point(const Point3& cam, const CameraIntrinsics& intr) {
    return {intr.cx() + intr.fx() * cam.x / cam.z, intr.cy() + intr.fy() * cam.y / cam.z};
}

}  // namespace

std::optional<PixelBox> project(const OrientedBox3& box, const Pose& pose,
                                const CameraIntrinsics& intrinsics) {
    const auto world = box.corners();
    std::array<Point3, 8> cam;
    bool any_front = false;
    for (int i = 0; i < 8; ++i) {
        cam[i] = to_camera(world[i], pose);
        any_front |= cam[i].z > kNearPlane;
    }
    if (!any_front) return std::nullopt;

    double u0 = 1e300, v0 = 1e300, u1 = -1e300, v1 = -1e300;
    auto take = [&](const Point3& p) {
        const Projected pr = project_point(p, intrinsics);
        u0 = std::min(u0, pr.u);
        v0 = std::min(v0, pr.v);
        u1 = std::max(u1, pr.u);
        v1 = std::max(v1, pr.v);
    };
    for (int i = 0; i < 8; ++i)
        if (cam[i].z > kNearPlane) take(cam[i]);

    // clip box edges crossing the image plane
    static constexpr int kEdges[12][2] = {{0, 1}, {0, 2}, {1, 3}, {2, 3},
                                          {4, 5}, {4, 6}, {5, 7}, {6, 7},
                                          {0, 4}, {1, 5}, {2, 6}, {3, 7}};
    for (const auto& e : kEdges) {
        const Point3& a = cam[e[0]];
        const Point3& b = cam[e[1]];
        if ((a.z > kNearPlane) == (b.z > kNearPlane)) continue;
        const double t = (kNearPlane - a.z) / (b.z - a.z);
        take({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y), kNearPlane});
    }

    PixelBox out;
    out.x0 = std::clamp(static_cast<int>(std::floor(u0)), 0, intrinsics.width_px);
    out.y0 = std::clamp(static_cast<int>(std::floor(v0)), 0, intrinsics.height_px);
    out.x1 = std::clamp(static_cast<int>(std::ceil(u1)), 0, intrinsics.width_px);
    out.y1 = std::clamp(static_cast<int>(std::ceil(v1)), 0, intrinsics.height_px);
    if (out.width() <= 0 || out.height() <= 0) return std::nullopt;
    return out;
}

std::vector<Point3> surface_samples(const OrientedBox3& box, int n) {
    if (n < 8) throw RangeError("n_surface_samples must be >= 8");
    const double c = std::cos(box.yaw), s = std::sin(box.yaw);
    auto to_world = [&](double lx, double ly, double lz) {
        return Point3{box.center.x + c * lx - s * ly, box.center.y + s * lx + c * ly,
                      box.center.z + lz};
    };
    const double hx = box.half_extents[0], hy = box.half_extents[1], hz = box.half_extents[2];

    std::vector<Point3> out;
    out.reserve(n);
    // 8 corners
    for (int ix : {-1, 1})
        for (int iy : {-1, 1})
            for (int iz : {-1, 1}) out.push_back(to_world(ix * hx, iy * hy, iz * hz));
    // 6 face centers
    if (static_cast<int>(out.size()) < n) {
        out.push_back(to_world(hx, 0, 0));
        out.push_back(to_world(-hx, 0, 0));
        out.push_back(to_world(0, hy, 0));
        out.push_back(to_world(0, -hy, 0));
        out.push_back(to_world(0, 0, hz));
        out.push_back(to_world(0, 0, -hz));
    }
    // 12 edge midpoints
    if (static_cast<int>(out.size()) < n) {
        for (int a : {-1, 1})
            for (int b : {-1, 1}) {
                out.push_back(to_world(0, a * hy, b * hz));
                out.push_back(to_world(a * hx, 0, b * hz));
                out.push_back(to_world(a * hx, b * hy, 0));
            }
    }
    if (static_cast<int>(out.size()) > n) {
        out.resize(n);
        return out;
    }

    // extras: radical-inverse points cycled over the 6 faces
    auto radical = [](std::uint32_t i, std::uint32_t base) {
        double inv = 1.0 / base, f = inv, r = 0.0;
        while (i) {
            r += f * (i % base);
            i /= base;
            f *= inv;
        }
        return r;
    };
    std::uint32_t k = 0;
    while (static_cast<int>(out.size()) < n) {
        const int face = static_cast<int>(k % 6);
        const double a = 2.0 * radical(k / 6 + 1, 2) - 1.0;
        const double b = 2.0 * radical(k / 6 + 1, 3) - 1.0;
        switch (face) {
            case 0: out.push_back(to_world(hx, a * hy, b * hz)); break;
            case 1: out.push_back(to_world(-hx, a * hy, b * hz)); break;
            case 2: out.push_back(to_world(a * hx, hy, b * hz)); break;
            case 3: out.push_back(to_world(a * hx, -hy, b * hz)); break;
            case 4: out.push_back(to_world(a * hx, b * hy, hz)); break;
            default: out.push_back(to_world(a * hx, b * hy, -hz)); break;
        }
        ++k;
    }
    return out;
}

double visible_fraction(const OrientedBox3& box, const Pose& pose,
                        const CameraIntrinsics& intrinsics,
                        const kernels::BoxSoA& occluders, const VisParams& params,
                        std::size_t skip_occluder) {
    const auto samples = surface_samples(box, params.n_surface_samples);
    const auto& k = kernels::active();
    const double max_range2 = params.max_range * params.max_range;
    int visible = 0;
    for (const auto& sample : samples) {
        const Point3 cam = to_camera(sample, pose);
        if (cam.z <= kNearPlane) continue;
        const double d2 = cam.x * cam.x + cam.y * cam.y + cam.z * cam.z;
        if (d2 > max_range2) continue;
        const Projected pr = project_point(cam, intrinsics);
        if (pr.u < 0.0 || pr.u > intrinsics.width_px || pr.v < 0.0 ||
            pr.v > intrinsics.height_px)
            continue;
        const kernels::Segment3 seg{pose.position, sample};
        if (k.segment_hit_any(seg, occluders, skip_occluder) != static_cast<std::size_t>(-1))
            continue;
        ++visible;
    }
    return static_cast<double>(visible) / static_cast<double>(samples.size());
}

VisibilityTable::VisibilityTable(std::size_t frame_count, std::vector<std::string> object_ids)
    : frame_count_(frame_count), object_ids_(std::move(object_ids)) {
    fraction_.assign(object_ids_.size(), std::vector<float>(frame_count_, 0.0f));
    px_.assign(object_ids_.size(), std::vector<std::int32_t>(frame_count_, 0));
    dist_.assign(object_ids_.size(), std::vector<float>(frame_count_, 0.0f));
    first_visible_.assign(object_ids_.size(), std::nullopt);
}

void VisibilityTable::set(std::size_t frame, std::size_t object_idx, double fraction,
                          int px, double dist) {
    fraction_[object_idx][frame] = static_cast<float>(fraction);
    px_[object_idx][frame] = px;
    dist_[object_idx][frame] = static_cast<float>(dist);
}

std::size_t VisibilityTable::object_idx_of(const std::string& object_id) const {
    for (std::size_t i = 0; i < object_ids_.size(); ++i)
        if (object_ids_[i] == object_id) return i;
    throw ReferenceError("unknown object id '" + object_id + "' in visibility table");
}

VisibilityRecord VisibilityTable::at(std::size_t frame, std::size_t object_idx) const {
    VisibilityRecord rec;
    rec.frame = frame;
    rec.object_id = object_ids_[object_idx];
    if (frame < frame_count_) {
        rec.visible_fraction = fraction_[object_idx][frame];
        rec.projected_px = px_[object_idx][frame];
        rec.cam_distance = dist_[object_idx][frame];
    }
    return rec;
}

VisibilityRecord VisibilityTable::at(std::size_t frame, const std::string& object_id) const {
    return at(frame, object_idx_of(object_id));
}

void VisibilityTable::finalize(const VisParams& params) {
    index_params_ = params;
    for (std::size_t o = 0; o < object_ids_.size(); ++o) {
        first_visible_[o] = std::nullopt;
        for (std::size_t f = 0; f < frame_count_; ++f) {
            if (fraction_[o][f] >= params.tau_vis && px_[o][f] >= params.min_px) {
                first_visible_[o] = f;
                break;
            }
        }
    }
}

std::optional<std::size_t> VisibilityTable::first_appearance(std::size_t object_idx) const {
    return first_visible_[object_idx];
}

std::optional<std::size_t> VisibilityTable::first_appearance(const std::string& object_id) const {
    return first_appearance(object_idx_of(object_id));
}

bool VisibilityTable::visible_at(std::size_t frame, std::size_t object_idx,
                                 const VisParams& params) const {
    if (frame >= frame_count_) return false;
    return fraction_[object_idx][frame] >= params.tau_vis &&
           px_[object_idx][frame] >= params.min_px;
}

std::vector<std::string> VisibilityTable::visible_objects(std::size_t frame,
                                                          const VisParams& params) const {
    std::vector<std::string> out;
    for (std::size_t o = 0; o < object_ids_.size(); ++o)
        if (visible_at(frame, o, params)) out.push_back(object_ids_[o]);
    return out;
}

std::string VisibilityTable::to_jsonl(const std::string& header_json) const {
    std::ostringstream out;
    json header = header_json.empty() ? json::object() : json::parse(header_json);
    header["kind"] = "visibility_table";
    header["frames"] = frame_count_;
    header["object_ids"] = object_ids_;
    header["tau_vis"] = index_params_.tau_vis;
    header["min_px"] = index_params_.min_px;
    out << header.dump() << "\n";
    for (std::size_t f = 0; f < frame_count_; ++f) {
        for (std::size_t o = 0; o < object_ids_.size(); ++o) {
            if (fraction_[o][f] <= 0.0f) continue;  // omitted pairs read back as 0
            json j{{"frame", f},
                   {"object_id", object_ids_[o]},
                   {"fraction", fraction_[o][f]},
                   {"px", px_[o][f]},
                   {"dist", dist_[o][f]}};
            out << j.dump() << "\n";
        }
    }
    return out.str();
}

VisibilityTable VisibilityTable::from_jsonl(const std::string& bytes) {
    std::istringstream in(bytes);
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("empty visibility table stream");
    json header = json::parse(line);
    if (header.value("kind", "") != "visibility_table")
        throw SchemaError("visibility header line missing kind=visibility_table");
    VisibilityTable table(header.at("frames").get<std::size_t>(),
                          header.at("object_ids").get<std::vector<std::string>>());
    VisParams params;
    params.tau_vis = header.value("tau_vis", params.tau_vis);
    params.min_px = header.value("min_px", params.min_px);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        table.set(j.at("frame").get<std::size_t>(),
                  table.object_idx_of(j.at("object_id").get<std::string>()),
                  j.at("fraction").get<double>(), j.at("px").get<int>(),
                  j.at("dist").get<double>());
    }
    table.finalize(params);
    return table;
}

VisibilityTable compute_table(const Scene& scene, const Trajectory& traj,
                              const CameraIntrinsics& intrinsics, const VisParams& params,
                              int n_threads) {
    std::vector<std::string> ids;
    ids.reserve(scene.objects().size());
    for (const auto& obj : scene.objects()) ids.push_back(obj.id);
    VisibilityTable table(traj.frame_count(), std::move(ids));

    const auto& opaque = scene.opaque_set();
    const double reach = params.max_range;

    auto run_frames = [&](std::size_t begin, std::size_t end) {
        for (std::size_t f = begin; f < end; ++f) {
            const Pose& pose = traj.poses[f];
            for (std::size_t o = 0; o < scene.objects().size(); ++o) {
                const auto& obj = scene.objects()[o];
                const double dist = distance(pose.position, obj.box.center);
                // beyond reach by more than the box circumradius: skip
                const double circum = std::sqrt(obj.box.half_extents[0] * obj.box.half_extents[0] +
                                                obj.box.half_extents[1] * obj.box.half_extents[1] +
                                                obj.box.half_extents[2] * obj.box.half_extents[2]);
                if (dist - circum > reach) continue;
                const auto bbox = project(obj.box, pose, intrinsics);
                if (!bbox) continue;
                const double fraction =
                    visible_fraction(obj.box, pose, intrinsics, opaque, params,
                                     scene.object_occluder_index(o));
                if (fraction <= 0.0) continue;
                table.set(f, o, fraction, std::max(bbox->area(), 1), dist);
            }
        }
    };

    const std::size_t frames = traj.frame_count();
    if (n_threads <= 1 || frames < 64) {
        run_frames(0, frames);
    } else {
        const std::size_t workers = std::min<std::size_t>(n_threads, frames);
        std::vector<std::thread> pool;
        const std::size_t chunk = (frames + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(frames, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(run_frames, begin, end);
        }
        for (auto& th : pool) th.join();
    }

    table.finalize(params);
    return table;
}

}  // namespace s3forge
