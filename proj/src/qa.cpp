#include "s3forge/qa.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "s3forge/errors.hpp"

namespace s3forge {

using nlohmann::json;

namespace {

struct TaskInfo {
    TaskKind kind;
    const char* name;
    AnswerFormat format;
};

constexpr TaskInfo kTasks[] = {
    {TaskKind::CameraDisplacement, "camera_displacement", AnswerFormat::Num},
    {TaskKind::CurrentRoomArea, "current_room_area", AnswerFormat::Num},
    {TaskKind::CamObjDistance, "cam_obj_distance", AnswerFormat::Num},
    {TaskKind::IdentificationClosest, "identification_closest", AnswerFormat::Mc},
    {TaskKind::CameraMotionTarget, "camera_motion_target", AnswerFormat::Mc},
    {TaskKind::Attribute, "attribute", AnswerFormat::Num},
    {TaskKind::SpatialDistance, "spatial_distance", AnswerFormat::Num},
    {TaskKind::Area, "area", AnswerFormat::Num},
    {TaskKind::Count, "count", AnswerFormat::Num},
    {TaskKind::Sequence, "sequence", AnswerFormat::Mc},
    {TaskKind::SpatialProximity, "spatial_proximity", AnswerFormat::Mc},
    {TaskKind::RelativeOrientation, "relative_orientation", AnswerFormat::Mc},
    {TaskKind::SequenceIdentification, "sequence_identification", AnswerFormat::Mc},
    {TaskKind::TemSpatialDistanceRef, "tem_spatial_distance_ref", AnswerFormat::Num},
    {TaskKind::TemCamObjDistanceRef, "tem_cam_obj_distance_ref", AnswerFormat::Num},
    {TaskKind::TemHorizontalDirection, "tem_horizontal_direction", AnswerFormat::Mc},
};

std::string trimmed_number(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

const char* to_string(TaskKind kind) {
    for (const auto& t : kTasks)
        if (t.kind == kind) return t.name;
    return "?";
}

TaskKind task_kind_from_string(const std::string& s) {
    for (const auto& t : kTasks)
        if (s == t.name) return t.kind;
    throw SchemaError("unknown task kind '" + s + "'");
}

AnswerFormat format_of(TaskKind kind) {
    for (const auto& t : kTasks)
        if (t.kind == kind) return t.format;
    return AnswerFormat::Num;
}

std::vector<std::size_t> GenContext::seen_before(std::size_t frame) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < scene.objects().size(); ++i) {
        auto fa = table.first_appearance(i);
        if (fa && *fa < frame) out.push_back(i);
    }
    return out;
}

const std::vector<int>& GenContext::cell_room() const {
    if (!cell_room_cache_.empty()) return cell_room_cache_;
    cell_room_cache_.assign(grid.cell_count(), -1);
    for (std::size_t i = 0; i < grid.cell_count(); ++i) {
        if (!grid.is_free(i)) continue;
        const Point2 c = grid.cell_center(i);
        for (std::size_t r = 0; r < scene.rooms().size(); ++r)
            if (point_in_polygon(c, scene.rooms()[r].polygon)) {
                cell_room_cache_[i] = static_cast<int>(r);
                break;
            }
    }
    return cell_room_cache_;
}

const std::vector<std::size_t>& GenContext::visit_frames() const {
    if (!visit_frames_cache_.empty() || grid.cell_count() == 0) return visit_frames_cache_;
    constexpr std::size_t kNever = static_cast<std::size_t>(-1);
    visit_frames_cache_.assign(grid.cell_count(), kNever);
    const double d2max = config.d_visit * config.d_visit;
    const double cs = grid.cell_size();
    for (std::size_t f = 0; f < trajectory.frame_count(); ++f) {
        const Point2 p = trajectory.poses[f].position.xy();
        const int ix0 = std::max(0, static_cast<int>((p.x - config.d_visit - grid.origin().x) / cs));
        const int ix1 = std::min(grid.width() - 1,
                                 static_cast<int>((p.x + config.d_visit - grid.origin().x) / cs));
        const int iy0 = std::max(0, static_cast<int>((p.y - config.d_visit - grid.origin().y) / cs));
        const int iy1 = std::min(grid.height() - 1,
                                 static_cast<int>((p.y + config.d_visit - grid.origin().y) / cs));
        for (int iy = iy0; iy <= iy1; ++iy)
            for (int ix = ix0; ix <= ix1; ++ix) {
                const std::size_t idx = grid.index(ix, iy);
                if (visit_frames_cache_[idx] != kNever || !grid.is_free(idx)) continue;
                const Point2 c = grid.cell_center(idx);
                const double dx = c.x - p.x, dy = c.y - p.y;
                if (dx * dx + dy * dy <= d2max) visit_frames_cache_[idx] = f;
            }
    }
    return visit_frames_cache_;
}

namespace {

const std::string& category_of(const GenContext& ctx, std::size_t idx) {
    return ctx.scene.objects()[idx].category;
}

const Point3& center_of(const GenContext& ctx, std::size_t idx) {
    return ctx.scene.objects()[idx].box.center;
}

// object indices whose category has exactly one instance among `seen`
std::vector<std::size_t> unique_referents(const GenContext& ctx,
                                          const std::vector<std::size_t>& seen) {
    std::map<std::string, int> counts;
    for (std::size_t i : seen) ++counts[category_of(ctx, i)];
    std::vector<std::size_t> out;
    for (std::size_t i : seen)
        if (counts[category_of(ctx, i)] == 1) out.push_back(i);
    return out;
}

QAPair base_pair(const GenContext& ctx, TaskKind task, double t) {
    QAPair p;
    p.scene_id = ctx.scene.id();
    p.trajectory_id = ctx.trajectory.id;
    p.timestamp_s = t;
    p.task = task;
    p.format = format_of(task);
    p.gen_seed = ctx.config.seed;
    return p;
}

// choices = answer at a uniform position, distractors (pre-ordered) fill the
// rest after a seeded shuffle
void make_mc(QAPair& pair, Rng& rng, const std::string& answer,
             std::vector<std::string> distractors, int max_choices) {
    const int n = std::min<int>(max_choices, 1 + static_cast<int>(distractors.size()));
    rng.shuffle(distractors);
    distractors.resize(n - 1);
    const int pos = static_cast<int>(rng.index(static_cast<std::size_t>(n)));
    pair.choices.clear();
    int di = 0;
    for (int i = 0; i < n; ++i)
        pair.choices.push_back(i == pos ? answer : distractors[di++]);
    pair.answer_index = pos;
}

std::vector<std::size_t> visible_indices(const GenContext& ctx, std::size_t frame) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < ctx.scene.objects().size(); ++i)
        if (ctx.table.visible_at(frame, i, ctx.vis)) out.push_back(i);
    return out;
}

double frame_speed(const GenContext& ctx, std::size_t frame) {
    if (frame == 0) return 0.0;
    return distance(ctx.trajectory.poses[frame].position,
                    ctx.trajectory.poses[frame - 1].position) *
           ctx.trajectory.fps;
}

}  // namespace

std::vector<double> sample_timestamps(const GenContext& ctx, int n) {
    const double duration = ctx.trajectory.duration_s();
    if (duration <= 5.0)
        throw InsufficientDurationError("trajectory duration " + trimmed_number(duration) +
                                        " s is too short for timestamp sampling");
    const double fps = ctx.trajectory.fps;
    const std::size_t first = static_cast<std::size_t>(std::ceil(5.0 * fps - 1e-9));

    // stratify across segment labels
    std::array<std::vector<std::size_t>, 3> strata;
    for (std::size_t f = first; f < ctx.trajectory.frame_count(); ++f)
        strata[static_cast<int>(ctx.trajectory.segment_labels[f])].push_back(f);

    std::vector<int> live;
    for (int s = 0; s < 3; ++s)
        if (!strata[s].empty()) live.push_back(s);
    if (live.empty()) return {};

    std::set<std::size_t> frames;
    int guard = n * 16;
    while (static_cast<int>(frames.size()) < n && guard-- > 0) {
        const int s = live[frames.size() % live.size()];
        auto& bucket = strata[static_cast<std::size_t>(s)];
        frames.insert(bucket[ctx.rng.index(bucket.size())]);
    }
    std::vector<double> out;
    for (std::size_t f : frames) out.push_back(static_cast<double>(f) / fps);
    return out;
}

std::optional<QAPair> gen_count(const GenContext& ctx, double t) {
    const std::size_t frame = ctx.frame_of(t);
    const auto seen = ctx.seen_before(frame);
    if (seen.empty()) return std::nullopt;

    std::map<std::string, std::vector<std::size_t>> by_cat;
    for (std::size_t i : seen) by_cat[category_of(ctx, i)].push_back(i);
    std::vector<std::string> multi, single;
    for (const auto& [cat, ids] : by_cat)
        (ids.size() > 1 ? multi : single).push_back(cat);

    const auto& pool = multi.empty() ? single : multi;
    const std::string cat = pool[ctx.rng.index(pool.size())];
    const auto& instances = by_cat[cat];

    QAPair p = base_pair(ctx, TaskKind::Count, t);
    p.question = "How many " + cat + "s are visible so far?";
    p.answer_value = static_cast<double>(instances.size());
    p.answer_unit = "";
    for (std::size_t i : instances) p.refs.push_back(ctx.scene.objects()[i].id);
    p.meta["category"] = cat;
    return p;
}

std::optional<QAPair> gen_attribute(const GenContext& ctx, double t) {
    const std::size_t frame = ctx.frame_of(t);
    const auto uniques = unique_referents(ctx, ctx.seen_before(frame));
    if (uniques.empty()) return std::nullopt;
    const std::size_t idx = uniques[ctx.rng.index(uniques.size())];
    const auto& obj = ctx.scene.objects()[idx];

    QAPair p = base_pair(ctx, TaskKind::Attribute, t);
    p.question = "What is the length of the " + obj.category + "'s longest edge?";
    p.answer_value = 2.0 * std::max({obj.box.half_extents[0], obj.box.half_extents[1],
                                     obj.box.half_extents[2]});
    p.answer_unit = "m";
    p.refs = {obj.id};
    p.meta["answer_object_id"] = obj.id;
    return p;
}

std::optional<QAPair> gen_sequence(const GenContext& ctx, double t, bool identification) {
    const std::size_t frame = ctx.frame_of(t);
    const auto seen = ctx.seen_before(frame);

    // ties in first_appearance exclude the tied objects
    std::map<std::size_t, int> frame_counts;
    for (std::size_t i : seen) ++frame_counts[*ctx.table.first_appearance(i)];
    std::vector<std::size_t> eligible;
    for (std::size_t i : seen)
        if (frame_counts[*ctx.table.first_appearance(i)] == 1) eligible.push_back(i);

    ctx.rng.shuffle(eligible);
    const std::size_t want = identification ? 4 : 3;
    std::vector<std::size_t> picked;
    std::set<std::string> cats;
    for (std::size_t i : eligible) {
        if (cats.insert(category_of(ctx, i)).second) picked.push_back(i);
        if (picked.size() == want) break;
    }
    if (picked.size() < 3) return std::nullopt;

    std::vector<std::size_t> chrono = picked;
    std::sort(chrono.begin(), chrono.end(), [&](std::size_t a, std::size_t b) {
        return *ctx.table.first_appearance(a) < *ctx.table.first_appearance(b);
    });

    QAPair p = base_pair(ctx,
                         identification ? TaskKind::SequenceIdentification : TaskKind::Sequence,
                         t);
    for (std::size_t i : chrono) p.refs.push_back(ctx.scene.objects()[i].id);
    json listed = json::array();
    for (std::size_t i : picked) listed.push_back(ctx.scene.objects()[i].id);
    p.meta["listed_object_ids"] = listed;
    p.meta["answer_object_id"] = ctx.scene.objects()[chrono.front()].id;

    if (identification) {
        std::string listed_cats;
        for (std::size_t k = 0; k < picked.size(); ++k)
            listed_cats += (k ? ", " : "") + category_of(ctx, picked[k]);
        p.question = "Which of the following objects appeared first? (" + listed_cats + ")";
        std::vector<std::string> distractors;
        for (std::size_t k = 1; k < chrono.size(); ++k)
            distractors.push_back(category_of(ctx, chrono[k]));
        make_mc(p, ctx.rng, category_of(ctx, chrono.front()), std::move(distractors),
                ctx.config.n_choices);
    } else {
        auto order_text = [&](const std::array<int, 3>& perm) {
            std::string s;
            for (int k = 0; k < 3; ++k)
                s += (k ? " -> " : "") + category_of(ctx, chrono[static_cast<std::size_t>(perm[k])]);
            return s;
        };
        std::string listed_cats;
        for (std::size_t k = 0; k < picked.size(); ++k)
            listed_cats += (k ? ", " : "") + category_of(ctx, picked[k]);
        p.question = "Identify the correct chronological order of {" + listed_cats + "}.";
        static constexpr std::array<std::array<int, 3>, 6> kPerms{
            {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
        std::vector<std::string> distractors;
        for (const auto& perm : kPerms)
            if (perm != std::array<int, 3>{0, 1, 2}) distractors.push_back(order_text(perm));
        make_mc(p, ctx.rng, order_text({0, 1, 2}), std::move(distractors), ctx.config.n_choices);
    }
    return p;
}

std::optional<QAPair> gen_spatial_distance(const GenContext& ctx, double t) {
    const std::size_t frame = ctx.frame_of(t);
    const auto uniques = unique_referents(ctx, ctx.seen_before(frame));
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t a = 0; a < uniques.size(); ++a)
        for (std::size_t b = a + 1; b < uniques.size(); ++b) {
            const auto &oa = ctx.scene.objects()[uniques[a]], &ob = ctx.scene.objects()[uniques[b]];
            if (oa.room_id != ob.room_id) continue;
            if (distance(oa.box.center, ob.box.center) < ctx.config.min_spatial_distance_m)
                continue;
            pairs.push_back({uniques[a], uniques[b]});
        }
    if (pairs.empty()) return std::nullopt;
    const auto [a, b] = pairs[ctx.rng.index(pairs.size())];

    QAPair p = base_pair(ctx, TaskKind::SpatialDistance, t);
    p.question = "What is the distance between the " + category_of(ctx, a) + " and the " +
                 category_of(ctx, b) + "?";
    p.answer_value = distance(center_of(ctx, a), center_of(ctx, b));
    p.answer_unit = "m";
    p.refs = {ctx.scene.objects()[a].id, ctx.scene.objects()[b].id};
    return p;
}

std::optional<QAPair> gen_area_visited(const GenContext& ctx, double t) {
    const std::size_t frame = ctx.frame_of(t);
    const auto& visit = ctx.visit_frames();
    const auto& rooms = ctx.cell_room();

    std::vector<std::size_t> free_cells(ctx.scene.rooms().size(), 0);
    std::vector<std::size_t> visited(ctx.scene.rooms().size(), 0);
    for (std::size_t i = 0; i < ctx.grid.cell_count(); ++i) {
        if (rooms[i] < 0) continue;
        ++free_cells[static_cast<std::size_t>(rooms[i])];
        if (visit[i] < frame) ++visited[static_cast<std::size_t>(rooms[i])];
    }

    double total = 0.0;
    json ratios = json::object();
    bool any = false;
    for (std::size_t r = 0; r < ctx.scene.rooms().size(); ++r) {
        if (free_cells[r] == 0) continue;
        const double ratio =
            static_cast<double>(visited[r]) / static_cast<double>(free_cells[r]);
        ratios[ctx.scene.rooms()[r].id] = ratio;
        if (ratio >= ctx.config.area_visit_threshold) {
            total += polygon_area(ctx.scene.rooms()[r].polygon);
            any = true;
        }
    }
    if (!any) return std::nullopt;

    QAPair p = base_pair(ctx, TaskKind::Area, t);
    p.question = "What is the total area of the rooms visited so far?";
    p.answer_value = total;
    p.answer_unit = "m^2";
    p.meta["room_ratios"] = ratios;
    return p;
}

std::optional<QAPair> gen_spatial_proximity(const GenContext& ctx, double t) {
    const std::size_t frame = ctx.frame_of(t);
    const auto seen = ctx.seen_before(frame);
    const auto uniques = unique_referents(ctx, seen);
    if (uniques.empty()) return std::nullopt;
    const std::size_t anchor = uniques[ctx.rng.index(uniques.size())];

    // nearest seen object of another category; ties go to the smaller id
    std::optional<std::size_t> nearest;
    for (std::size_t i : seen) {
        if (i == anchor || category_of(ctx, i) == category_of(ctx, anchor)) continue;
        if (!nearest) {
            nearest = i;
            continue;
        }
        const double di = distance(center_of(ctx, i), center_of(ctx, anchor));
        const double dn = distance(center_of(ctx, *nearest), center_of(ctx, anchor));
        if (di < dn - 1e-12 ||
            (std::abs(di - dn) <= 1e-12 &&
             ctx.scene.objects()[i].id < ctx.scene.objects()[*nearest].id))
            nearest = i;
    }
    if (!nearest) return std::nullopt;
    const std::string answer_cat = category_of(ctx, *nearest);

    // distractors: farthest seen categories first, then unobserved categories
    std::map<std::string, double> cat_min_dist;
    for (std::size_t i : seen) {
        if (i == anchor) continue;
        const std::string& cat = category_of(ctx, i);
        if (cat == answer_cat || cat == category_of(ctx, anchor)) continue;
        const double d = distance(center_of(ctx, i), center_of(ctx, anchor));
        auto it = cat_min_dist.find(cat);
        if (it == cat_min_dist.end() || d < it->second) cat_min_dist[cat] = d;
    }
    std::vector<std::pair<double, std::string>> far;
    for (const auto& [cat, d] : cat_min_dist) far.push_back({d, cat});
    std::sort(far.begin(), far.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });

    std::set<std::string> seen_cats;
    for (std::size_t i : seen) seen_cats.insert(category_of(ctx, i));
    std::set<std::string> unobserved;
    for (const auto& obj : ctx.scene.objects())
        if (!seen_cats.count(obj.category)) unobserved.insert(obj.category);

    std::vector<std::string> distractors;
    for (const auto& [d, cat] : far) distractors.push_back(cat);
    for (const auto& cat : unobserved) distractors.push_back(cat);
    if (distractors.empty()) return std::nullopt;

    QAPair p = base_pair(ctx, TaskKind::SpatialProximity, t);
    p.question =
        "Which object category is spatially closest to the " + category_of(ctx, anchor) + "?";
    make_mc(p, ctx.rng, answer_cat, std::move(distractors), ctx.config.n_choices);
    p.refs = {ctx.scene.objects()[anchor].id, ctx.scene.objects()[*nearest].id};
    p.meta["anchor_id"] = ctx.scene.objects()[anchor].id;
    p.meta["answer_object_id"] = ctx.scene.objects()[*nearest].id;
    return p;
}

const char* horizontal_direction_class(double bearing_rad) {
    double deg = bearing_rad * 180.0 / kPi;
    if (deg <= -180.0 + 1e-12) deg = 180.0;  // +-180 belongs to Back-Left
    if (deg > 0.0 && deg <= 90.0) return "Front-Left";
    if (deg > 90.0) return "Back-Left";
    if (deg > -90.0) return "Front-Right";  // (-90, 0]
    return "Back-Right";                    // (-180, -90]
}

std::optional<QAPair> gen_relative_orientation(const GenContext& ctx, double t) {
    const std::size_t frame = ctx.frame_of(t);
    const auto uniques = unique_referents(ctx, ctx.seen_before(frame));

    std::map<std::string, std::vector<std::size_t>> by_room;
    for (std::size_t i : uniques) by_room[ctx.scene.objects()[i].room_id].push_back(i);
    std::vector<std::string> eligible_rooms;
    for (const auto& [room, ids] : by_room)
        if (ids.size() >= 3) eligible_rooms.push_back(room);
    if (eligible_rooms.empty()) return std::nullopt;

    auto ids = by_room[eligible_rooms[ctx.rng.index(eligible_rooms.size())]];
    for (int attempt = 0; attempt < 8; ++attempt) {
        ctx.rng.shuffle(ids);
        const std::size_t a = ids[0], b = ids[1], c = ids[2];
        const Point2 f = (center_of(ctx, b) - center_of(ctx, a)).xy();
        const Point2 v = (center_of(ctx, c) - center_of(ctx, a)).xy();
        if (norm(f) < 1e-6 || norm(v) < 1e-6) continue;
        const double angle =
            std::acos(std::clamp(dot(normalized(f), normalized(v)), -1.0, 1.0));
        const double cross_z = f.x * v.y - f.y * v.x;
        const char* answer;
        if (angle > ctx.config.back_angle_deg * kPi / 180.0) {
            answer = "Back";
        } else if (cross_z > 1e-9) {
            answer = "Left";
        } else if (cross_z < -1e-9) {
            answer = "Right";
        } else {
            continue;  // degenerate, nearly collinear ahead
        }

        QAPair p = base_pair(ctx, TaskKind::RelativeOrientation, t);
        p.question = "If you stand at the " + category_of(ctx, a) + " and face the " +
                     category_of(ctx, b) + ", in which direction is the " +
                     category_of(ctx, c) + " located?";
        std::vector<std::string> distractors;
        for (const char* opt : {"Left", "Right", "Back"})
            if (std::string(opt) != answer) distractors.push_back(opt);
        make_mc(p, ctx.rng, answer, std::move(distractors), 3);
        p.refs = {ctx.scene.objects()[a].id, ctx.scene.objects()[b].id,
                  ctx.scene.objects()[c].id};
        p.meta["a_id"] = ctx.scene.objects()[a].id;
        p.meta["b_id"] = ctx.scene.objects()[b].id;
        p.meta["c_id"] = ctx.scene.objects()[c].id;
        return p;
    }
    return std::nullopt;
}

std::optional<QAPair> gen_camera_displacement(const GenContext& ctx, double t) {
    const std::size_t frame = ctx.frame_of(t);
    if (ctx.trajectory.segment_labels[frame] != SegmentLabel::Moving) return std::nullopt;
    if (frame_speed(ctx, frame) <= ctx.config.min_speed_moving) return std::nullopt;

    const double w =
        ctx.config.displacement_windows_s[ctx.rng.index(ctx.config.displacement_windows_s.size())];
    const auto wf = static_cast<std::size_t>(std::floor(w * ctx.trajectory.fps + 0.5));
    if (frame < wf) return std::nullopt;

    const double d = distance(ctx.trajectory.poses[frame].position,
                              ctx.trajectory.poses[frame - wf].position);
    if (d < ctx.config.min_displacement_m) return std::nullopt;

    QAPair p = base_pair(ctx, TaskKind::CameraDisplacement, t);
    p.question = "How far did the camera move from the past " + trimmed_number(w) + " seconds?";
    p.answer_value = d;
    p.answer_unit = "m";
    p.meta["window_s"] = w;
    return p;
}

std::optional<QAPair> gen_cam_obj_distance(const GenContext& ctx, double t) {
    const std::size_t frame = ctx.frame_of(t);
    const SegmentLabel label = ctx.trajectory.segment_labels[frame];
    if (label != SegmentLabel::Moving && label != SegmentLabel::Sweeping) return std::nullopt;

    // strict grounding: the referent must have appeared before this frame
    const auto seen = ctx.seen_before(frame);
    const auto uniques = unique_referents(ctx, seen);
    std::vector<std::size_t> candidates;
    for (std::size_t i : uniques)
        if (ctx.table.visible_at(frame, i, ctx.vis)) candidates.push_back(i);
    if (candidates.empty()) return std::nullopt;

    const std::size_t idx = candidates[ctx.rng.index(candidates.size())];
    QAPair p = base_pair(ctx, TaskKind::CamObjDistance, t);
    p.question = "What is the distance between the camera and the " + category_of(ctx, idx) + "?";
    p.answer_value = distance(ctx.trajectory.poses[frame].position, center_of(ctx, idx));
    p.answer_unit = "m";
    p.refs = {ctx.scene.objects()[idx].id};
    p.meta["answer_object_id"] = ctx.scene.objects()[idx].id;
    return p;
}

std::optional<QAPair> gen_identification_closest(const GenContext& ctx, double t) {
    const std::size_t frame = ctx.frame_of(t);
    std::vector<std::size_t> visible;
    for (std::size_t i : visible_indices(ctx, frame)) {
        const auto fa = ctx.table.first_appearance(i);
        if (fa && *fa < frame) visible.push_back(i);  // strict grounding
    }

    // categories with exactly one visible instance keep choices unambiguous
    std::map<std::string, int> cat_counts;
    for (std::size_t i : visible) ++cat_counts[category_of(ctx, i)];
    std::vector<std::size_t> eligible;
    for (std::size_t i : visible)
        if (cat_counts[category_of(ctx, i)] == 1) eligible.push_back(i);
    if (eligible.size() < 2) return std::nullopt;

    ctx.rng.shuffle(eligible);
    const std::size_t k = std::min<std::size_t>(4, eligible.size());
    std::vector<std::size_t> sampled(eligible.begin(), eligible.begin() + k);

    const Point3& cam = ctx.trajectory.poses[frame].position;
    std::sort(sampled.begin(), sampled.end(), [&](std::size_t a, std::size_t b) {
        return distance(cam, center_of(ctx, a)) < distance(cam, center_of(ctx, b));
    });
    const double d0 = distance(cam, center_of(ctx, sampled[0]));
    const double d1 = distance(cam, center_of(ctx, sampled[1]));
    if (d1 - d0 < ctx.config.closest_margin_m) return std::nullopt;

    QAPair p = base_pair(ctx, TaskKind::IdentificationClosest, t);
    p.question = "Which object is currently spatially closest to the camera?";
    std::vector<std::string> distractors;
    for (std::size_t i = 1; i < sampled.size(); ++i)
        distractors.push_back(category_of(ctx, sampled[i]));
    make_mc(p, ctx.rng, category_of(ctx, sampled[0]), std::move(distractors),
            ctx.config.n_choices);
    json cand = json::array();
    for (std::size_t i : sampled) {
        p.refs.push_back(ctx.scene.objects()[i].id);
        cand.push_back(ctx.scene.objects()[i].id);
    }
    p.meta["candidate_ids"] = cand;
    p.meta["answer_object_id"] = ctx.scene.objects()[sampled[0]].id;
    return p;
}

std::optional<QAPair> gen_current_room_area(const GenContext& ctx, double t) {
    const std::size_t frame = ctx.frame_of(t);
    const auto room_id = ctx.scene.locate_room(ctx.trajectory.poses[frame].position.xy());
    if (!room_id) return std::nullopt;
    const Room* room = ctx.scene.find_room(*room_id);

    QAPair p = base_pair(ctx, TaskKind::CurrentRoomArea, t);
    p.question = "What is the total area of the current room?";
    p.answer_value = polygon_area(room->polygon);
    p.answer_unit = "m^2";
    p.meta["room_id"] = *room_id;
    return p;
}

std::optional<QAPair> gen_camera_motion_target(const GenContext& ctx, double t) {
    const std::size_t frame = ctx.frame_of(t);
    const auto wf =
        static_cast<std::size_t>(std::floor(ctx.config.motion_window_s * ctx.trajectory.fps + 0.5));
    if (frame < wf) return std::nullopt;  // the full window is required
    const std::size_t prev = frame - wf;

    const Point3& cam_now = ctx.trajectory.poses[frame].position;
    const Point3& cam_prev = ctx.trajectory.poses[prev].position;

    // one representative (smallest delta) per category, visible at both ends
    std::map<std::string, std::pair<double, std::size_t>> best_by_cat;
    for (std::size_t i = 0; i < ctx.scene.objects().size(); ++i) {
        if (!ctx.table.visible_at(frame, i, ctx.vis) ||
            !ctx.table.visible_at(prev, i, ctx.vis))
            continue;
        const double delta =
            distance(cam_now, center_of(ctx, i)) - distance(cam_prev, center_of(ctx, i));
        auto it = best_by_cat.find(category_of(ctx, i));
        if (it == best_by_cat.end() || delta < it->second.first)
            best_by_cat[category_of(ctx, i)] = {delta, i};
    }
    if (best_by_cat.size() < 2) return std::nullopt;

    std::vector<std::pair<double, std::size_t>> candidates;
    for (const auto& [cat, v] : best_by_cat) candidates.push_back(v);
    std::sort(candidates.begin(), candidates.end());
    if (candidates[0].first >= ctx.config.motion_required_delta_m) return std::nullopt;
    if (candidates[1].first - candidates[0].first < ctx.config.motion_margin_m)
        return std::nullopt;
    if (candidates.size() > 4) candidates.resize(4);

    QAPair p = base_pair(ctx, TaskKind::CameraMotionTarget, t);
    p.question = "Which object did the camera approach the most?";
    std::vector<std::string> distractors;
    for (std::size_t i = 1; i < candidates.size(); ++i)
        distractors.push_back(category_of(ctx, candidates[i].second));
    make_mc(p, ctx.rng, category_of(ctx, candidates[0].second), std::move(distractors),
            ctx.config.n_choices);
    json cand = json::array();
    for (const auto& [delta, idx] : candidates) {
        p.refs.push_back(ctx.scene.objects()[idx].id);
        cand.push_back(ctx.scene.objects()[idx].id);
    }
    p.meta["candidate_ids"] = cand;
    p.meta["answer_object_id"] = ctx.scene.objects()[candidates[0].second].id;
    p.meta["window_s"] = ctx.config.motion_window_s;
    return p;
}

std::optional<std::array<QAPair, 2>> gen_chain(const GenContext& ctx, double t,
                                               ChainKind kind) {
    const double t2 = t + ctx.config.chain_advance_s;
    const std::size_t frame2 = static_cast<std::size_t>(std::floor(t2 * ctx.trajectory.fps + 0.5));
    if (frame2 >= ctx.trajectory.frame_count()) return std::nullopt;

    std::optional<QAPair> q1;
    switch (kind) {
        case ChainKind::Chronological: q1 = gen_sequence(ctx, t, true); break;
        case ChainKind::SpatialSuperlative: q1 = gen_identification_closest(ctx, t); break;
        case ChainKind::CameraMotion: q1 = gen_camera_motion_target(ctx, t); break;
    }
    if (!q1) return std::nullopt;
    const std::string target_id = q1->meta.at("answer_object_id").get<std::string>();
    const auto target_idx = ctx.scene.object_index(target_id);
    const auto& target = ctx.scene.objects()[*target_idx];

    QAPair q2;
    switch (kind) {
        case ChainKind::Chronological: {
            const Pose& pose = ctx.trajectory.poses[frame2];
            const Point2 d = target.box.center.xy() - pose.position.xy();
            if (norm(d) < 1e-9) return std::nullopt;
            const double bearing = angle_delta(pose.yaw, std::atan2(d.y, d.x));
            const char* answer = horizontal_direction_class(bearing);
            q2 = base_pair(ctx, TaskKind::TemHorizontalDirection, t2);
            q2.question =
                "Is that object located to the Front-Left, Front-Right, Back-Left or "
                "Back-Right?";
            std::vector<std::string> distractors;
            for (const char* opt : {"Front-Left", "Front-Right", "Back-Left", "Back-Right"})
                if (std::string(opt) != answer) distractors.push_back(opt);
            make_mc(q2, ctx.rng, answer, std::move(distractors), 4);
            q2.refs = {target_id};
            q2.meta["target_id"] = target_id;
            q2.meta["bearing_deg"] = bearing * 180.0 / kPi;
            break;
        }
        case ChainKind::SpatialSuperlative: {
            const auto uniques = unique_referents(ctx, ctx.seen_before(frame2));
            std::vector<std::size_t> refs_pool;
            for (std::size_t i : uniques) {
                if (ctx.scene.objects()[i].id == target_id) continue;
                if (ctx.scene.objects()[i].room_id != target.room_id) continue;
                if (distance(center_of(ctx, i), target.box.center) <
                    ctx.config.min_spatial_distance_m)
                    continue;
                refs_pool.push_back(i);
            }
            if (refs_pool.empty()) return std::nullopt;
            const std::size_t ref = refs_pool[ctx.rng.index(refs_pool.size())];
            q2 = base_pair(ctx, TaskKind::TemSpatialDistanceRef, t2);
            q2.question =
                "What is the distance from that object to the " + category_of(ctx, ref) + "?";
            q2.answer_value = distance(target.box.center, center_of(ctx, ref));
            q2.answer_unit = "m";
            q2.refs = {target_id, ctx.scene.objects()[ref].id};
            q2.meta["target_id"] = target_id;
            q2.meta["ref_id"] = ctx.scene.objects()[ref].id;
            break;
        }
        case ChainKind::CameraMotion: {
            q2 = base_pair(ctx, TaskKind::TemCamObjDistanceRef, t2);
            q2.question = "How far (in meters) is the camera from it now?";
            q2.answer_value =
                distance(ctx.trajectory.poses[frame2].position, target.box.center);
            q2.answer_unit = "m";
            q2.refs = {target_id};
            q2.meta["target_id"] = target_id;
            break;
        }
    }

    q1->turn_idx = 1;
    q2.turn_idx = 2;
    return std::array<QAPair, 2>{*q1, q2};
}

void audit_grounding(const std::vector<QAPair>& pairs, const GenContext& ctx) {
    for (const auto& p : pairs) {
        const std::size_t frame = ctx.frame_of(p.timestamp_s);
        for (const auto& ref : p.refs) {
            const auto fa = ctx.table.first_appearance(ref);
            if (!fa || *fa >= frame)
                throw AuditError("pair '" + p.id + "' references '" + ref +
                                 "' not seen before its timestamp");
        }
    }
}

std::vector<QAPair> generate_all(const GenContext& ctx,
                                 const std::map<TaskKind, int>& quotas) {
    std::vector<double> timestamps = sample_timestamps(ctx, ctx.config.timestamp_count);
    auto quota_of = [&](TaskKind k) {
        auto it = quotas.find(k);
        return it == quotas.end() ? 0 : it->second;
    };

    std::vector<QAPair> out;
    std::set<std::string> dedup;
    auto key_of = [](const QAPair& p) {
        std::string key = std::string(to_string(p.task)) + "|" + trimmed_number(p.timestamp_s);
        for (const auto& r : p.refs) key += "|" + r;
        return key;
    };
    auto try_add = [&](QAPair&& p) {
        if (!dedup.insert(key_of(p)).second) return false;
        out.push_back(std::move(p));
        return true;
    };

    using SingleGen = std::optional<QAPair> (*)(const GenContext&, double);
    struct SingleTask {
        TaskKind kind;
        SingleGen gen;
    };
    const SingleTask singles[] = {
        {TaskKind::CameraDisplacement, gen_camera_displacement},
        {TaskKind::CurrentRoomArea, gen_current_room_area},
        {TaskKind::CamObjDistance, gen_cam_obj_distance},
        {TaskKind::IdentificationClosest, gen_identification_closest},
        {TaskKind::CameraMotionTarget, gen_camera_motion_target},
        {TaskKind::Attribute, gen_attribute},
        {TaskKind::SpatialDistance, gen_spatial_distance},
        {TaskKind::Area, gen_area_visited},
        {TaskKind::Count, gen_count},
        {TaskKind::SpatialProximity, gen_spatial_proximity},
        {TaskKind::RelativeOrientation, gen_relative_orientation},
    };

    for (const auto& task : singles) {
        int remaining = quota_of(task.kind);
        if (remaining <= 0) continue;
        std::vector<double> order = timestamps;
        ctx.rng.shuffle(order);
        for (double t : order) {
            if (remaining <= 0) break;
            if (auto p = task.gen(ctx, t))
                if (try_add(std::move(*p))) --remaining;
        }
    }
    for (bool ident : {false, true}) {
        const TaskKind kind = ident ? TaskKind::SequenceIdentification : TaskKind::Sequence;
        int remaining = quota_of(kind);
        if (remaining <= 0) continue;
        std::vector<double> order = timestamps;
        ctx.rng.shuffle(order);
        for (double t : order) {
            if (remaining <= 0) break;
            if (auto p = gen_sequence(ctx, t, ident))
                if (try_add(std::move(*p))) --remaining;
        }
    }

    struct ChainTask {
        ChainKind kind;
        TaskKind turn2;
    };
    const ChainTask chains[] = {
        {ChainKind::Chronological, TaskKind::TemHorizontalDirection},
        {ChainKind::SpatialSuperlative, TaskKind::TemSpatialDistanceRef},
        {ChainKind::CameraMotion, TaskKind::TemCamObjDistanceRef},
    };
    int chain_counter = 0;
    for (const auto& chain : chains) {
        int remaining = quota_of(chain.turn2);
        if (remaining <= 0) continue;
        std::vector<double> order = timestamps;
        ctx.rng.shuffle(order);
        for (double t : order) {
            if (remaining <= 0) break;
            auto pair = gen_chain(ctx, t, chain.kind);
            if (!pair) continue;
            const std::string key = key_of((*pair)[1]);
            if (dedup.count(key) || dedup.count(key_of((*pair)[0]))) continue;
            const std::string chain_id =
                ctx.scene.id() + "_chain_" + std::to_string(chain_counter++);
            (*pair)[0].chain_id = chain_id;
            (*pair)[1].chain_id = chain_id;
            dedup.insert(key);
            dedup.insert(key_of((*pair)[0]));
            out.push_back(std::move((*pair)[0]));
            out.push_back(std::move((*pair)[1]));
            --remaining;
        }
    }

    for (std::size_t i = 0; i < out.size(); ++i)
        out[i].id = ctx.scene.id() + "_qa_" + std::to_string(i);

    audit_grounding(out, ctx);
    return out;
}

json qa_to_json(const QAPair& p) {
    json j;
    j["id"] = p.id;
    j["scene_id"] = p.scene_id;
    j["trajectory_id"] = p.trajectory_id;
    j["timestamp_s"] = p.timestamp_s;
    j["task"] = to_string(p.task);
    j["format"] = p.format == AnswerFormat::Mc ? "MC" : "NUM";
    j["question"] = p.question;
    if (p.format == AnswerFormat::Mc) {
        j["choices"] = p.choices;
        j["answer_index"] = p.answer_index;
    } else {
        j["answer_value"] = p.answer_value;
        j["answer_unit"] = p.answer_unit;
    }
    j["refs"] = p.refs;
    j["chain_id"] = p.chain_id;
    j["turn_idx"] = p.turn_idx;
    j["gen_seed"] = p.gen_seed;
    j["meta"] = p.meta;
    return j;
}

QAPair qa_from_json(const json& j) {
    QAPair p;
    p.id = j.at("id").get<std::string>();
    p.scene_id = j.value("scene_id", "");
    p.trajectory_id = j.value("trajectory_id", "");
    p.timestamp_s = j.at("timestamp_s").get<double>();
    p.task = task_kind_from_string(j.at("task").get<std::string>());
    p.format = j.at("format").get<std::string>() == "MC" ? AnswerFormat::Mc : AnswerFormat::Num;
    p.question = j.at("question").get<std::string>();
    if (p.format == AnswerFormat::Mc) {
        p.choices = j.at("choices").get<std::vector<std::string>>();
        p.answer_index = j.at("answer_index").get<int>();
    } else {
        p.answer_value = j.at("answer_value").get<double>();
        p.answer_unit = j.value("answer_unit", "");
    }
    p.refs = j.value("refs", std::vector<std::string>{});
    p.chain_id = j.value("chain_id", "");
    p.turn_idx = j.value("turn_idx", 0);
    p.gen_seed = j.value("gen_seed", std::uint64_t{0});
    p.meta = j.value("meta", json::object());
    return p;
}

std::string qa_set_to_jsonl(const std::vector<QAPair>& pairs, const GenConfig& config,
                            const std::string& provenance_json) {
    std::ostringstream out;
    json header = provenance_json.empty() ? json::object() : json::parse(provenance_json);
    header["kind"] = "qa_set";
    header["config"] = {{"area_visit_threshold", config.area_visit_threshold},
                        {"back_angle_deg", config.back_angle_deg},
                        {"n_choices", config.n_choices},
                        {"chain_advance_s", config.chain_advance_s},
                        {"min_displacement_m", config.min_displacement_m},
                        {"d_visit", config.d_visit},
                        {"seed", config.seed}};
    out << header.dump() << "\n";
    for (const auto& p : pairs) out << qa_to_json(p).dump() << "\n";
    return out.str();
}

std::vector<QAPair> qa_set_from_jsonl(const std::string& bytes) {
    std::istringstream in(bytes);
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("empty qa stream");
    json header = json::parse(line);
    if (header.value("kind", "") != "qa_set")
        throw SchemaError("qa header line missing kind=qa_set");
    std::vector<QAPair> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        out.push_back(qa_from_json(json::parse(line)));
    }
    return out;
}

}  // namespace s3forge
