#include "s3forge/toy_scene.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "s3forge/errors.hpp"
#include "s3forge/rng.hpp"

namespace s3forge {

namespace {

struct CategorySpec {
    const char* name;
    double hx, hy, hz;
};

// base half extents in meters, jittered +-20% at placement
constexpr CategorySpec kCategories[] = {
    {"chair", 0.25, 0.25, 0.45}, {"table", 0.60, 0.40, 0.38},
    {"sofa", 0.90, 0.45, 0.40},  {"lamp", 0.15, 0.15, 0.70},
    {"plant", 0.22, 0.22, 0.50}, {"shelf", 0.45, 0.15, 0.90},
    {"bed", 1.00, 0.80, 0.30},   {"cabinet", 0.50, 0.30, 0.80},
};

constexpr const char* kRoomNames[] = {"living_room", "kitchen",  "bedroom",
                                      "bathroom",    "study",    "hallway",
                                      "dining_room", "storage"};

struct RoomRect {
    double x0, y0, x1, y1;
    double height;
};

struct Door {
    double x;        // shared vertical edge
    double y0, y1;   // opening span
    Point2 center() const { return {x, (y0 + y1) / 2.0}; }
};

// wall boxes for one vertical or horizontal edge with door spans removed
void emit_edge_walls(Point2 a, Point2 b, double height, const std::vector<Door>& doors,
                     std::vector<OrientedBox3>& out) {
    const bool vertical = std::abs(a.x - b.x) < 1e-9;
    std::vector<std::pair<double, double>> spans;
    if (vertical) {
        double lo = std::min(a.y, b.y), hi = std::max(a.y, b.y);
        spans.push_back({lo, hi});
        for (const auto& d : doors) {
            if (std::abs(d.x - a.x) > 1e-9) continue;
            std::vector<std::pair<double, double>> next;
            for (auto [s0, s1] : spans) {
                if (d.y1 <= s0 || d.y0 >= s1) {
                    next.push_back({s0, s1});
                    continue;
                }
                if (d.y0 > s0) next.push_back({s0, d.y0});
                if (d.y1 < s1) next.push_back({d.y1, s1});
            }
            spans = std::move(next);
        }
        for (auto [s0, s1] : spans)
            if (s1 - s0 > 0.01)
                out.push_back(wall_box({a.x, s0}, {a.x, s1}, height));
    } else {
        double lo = std::min(a.x, b.x), hi = std::max(a.x, b.x);
        out.push_back(wall_box({lo, a.y}, {hi, a.y}, height));
    }
}

}  // namespace

Scene gen_toy_scene(std::uint64_t seed, int n_rooms, int n_objects,
                    const ToyParams& params) {
    if (n_rooms < 1 || n_rooms > 8)
        throw RangeError("n_rooms must be in [1, 8]");
    if (n_objects < 1 || n_objects > 64)
        throw RangeError("n_objects must be in [1, 64]");

    Rng rng(derive_seed(seed, "toy_scene"));

    // rooms in a strip along +x, floors at y=0
    std::vector<RoomRect> rects;
    double cursor_x = 0.0;
    for (int i = 0; i < n_rooms; ++i) {
        double w, d;
        if (params.fixed_room_size) {
            w = params.fixed_room_size->x;
            d = params.fixed_room_size->y;
        } else {
            w = rng.uniform(params.min_room_side, params.max_room_side);
            d = rng.uniform(params.min_room_side, params.max_room_side);
        }
        rects.push_back({cursor_x, 0.0, cursor_x + w, d, rng.uniform(2.6, 3.0)});
        cursor_x += w;
    }

    std::vector<Door> doors;
    for (int i = 0; i + 1 < n_rooms; ++i) {
        const double shared_top = std::min(rects[i].y1, rects[i + 1].y1);
        const double margin = 0.6;
        const double half = params.door_width / 2.0;
        double lo = margin + half;
        double hi = shared_top - margin - half;
        double cy = hi <= lo ? shared_top / 2.0 : rng.uniform(lo, hi);
        doors.push_back({rects[i].x1, cy - half, cy + half});
    }

    std::vector<Room> rooms;
    for (int i = 0; i < n_rooms; ++i) {
        Room room;
        room.id = "room_" + std::to_string(i + 1);
        room.name = kRoomNames[i % 8];
        room.ceiling_height = rects[i].height;
        room.polygon = {{rects[i].x0, rects[i].y0},
                        {rects[i].x1, rects[i].y0},
                        {rects[i].x1, rects[i].y1},
                        {rects[i].x0, rects[i].y1}};
        rooms.push_back(std::move(room));
    }

    std::vector<OrientedBox3> walls;
    for (int i = 0; i < n_rooms; ++i) {
        const auto& r = rects[i];
        emit_edge_walls({r.x0, r.y0}, {r.x1, r.y0}, r.height, doors, walls);  // south
        emit_edge_walls({r.x0, r.y1}, {r.x1, r.y1}, r.height, doors, walls);  // north
        // shared vertical edges emitted once, by the left room
        emit_edge_walls({r.x1, r.y0}, {r.x1, r.y1}, r.height, doors, walls);  // east
        if (i == 0)
            emit_edge_walls({r.x0, r.y0}, {r.x0, r.y1}, r.height, doors, walls);  // west
        // taller neighbour: wall the uncovered span of the shared edge
        if (i + 1 < n_rooms && rects[i + 1].y1 > r.y1 + 1e-9)
            emit_edge_walls({r.x1, r.y1}, {r.x1, rects[i + 1].y1}, rects[i + 1].height,
                            doors, walls);
    }

    // Scratch occupancy for navigability: placements that would disconnect
    // the free space (or starve a room) are rejected. The 0.45 m scratch
    // clearance upper-bounds the planning clearances used downstream.
    const double scratch_cell = 0.1;
    const double scratch_clear = 0.45;
    double min_x = rects.front().x0, max_x = rects.back().x1;
    double max_y = 0.0;
    for (const auto& r : rects) max_y = std::max(max_y, r.y1);
    const int gw = static_cast<int>(std::ceil((max_x - min_x) / scratch_cell));
    const int gh = static_cast<int>(std::ceil(max_y / scratch_cell));
    std::vector<std::uint8_t> base_blocked(static_cast<std::size_t>(gw) * gh, 0);

    auto cell_xy = [&](int ix, int iy) {
        return Point2{min_x + (ix + 0.5) * scratch_cell, (iy + 0.5) * scratch_cell};
    };
    {
        std::vector<Rect2> wall_rects;
        for (const auto& w : walls) wall_rects.push_back(footprint_rect(w));
        for (int iy = 0; iy < gh; ++iy)
            for (int ix = 0; ix < gw; ++ix) {
                const Point2 c = cell_xy(ix, iy);
                bool inside = false;
                for (const auto& r : rects)
                    if (c.x >= r.x0 && c.x <= r.x1 && c.y >= r.y0 && c.y <= r.y1)
                        inside = true;
                bool blocked = !inside;
                for (const auto& wr : wall_rects)
                    if (!blocked && point_rect_distance(c, wr) <= scratch_clear)
                        blocked = true;
                base_blocked[static_cast<std::size_t>(iy) * gw + ix] = blocked;
            }
    }
    std::vector<std::uint8_t> blocked = base_blocked;

    auto connected_and_roomy = [&]() {
        std::size_t total_free = 0;
        std::size_t first_free = static_cast<std::size_t>(-1);
        for (std::size_t i = 0; i < blocked.size(); ++i)
            if (!blocked[i]) {
                ++total_free;
                if (first_free == static_cast<std::size_t>(-1)) first_free = i;
            }
        if (total_free == 0) return false;
        std::vector<std::uint8_t> seen(blocked.size(), 0);
        std::vector<std::size_t> stack{first_free};
        seen[first_free] = 1;
        std::size_t reached = 1;
        while (!stack.empty()) {
            const std::size_t cur = stack.back();
            stack.pop_back();
            const int cx = static_cast<int>(cur % gw), cy = static_cast<int>(cur / gw);
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    const int nx = cx + dx, ny = cy + dy;
                    if (nx < 0 || nx >= gw || ny < 0 || ny >= gh) continue;
                    const std::size_t n = static_cast<std::size_t>(ny) * gw + nx;
                    if (blocked[n] || seen[n]) continue;
                    seen[n] = 1;
                    ++reached;
                    stack.push_back(n);
                }
        }
        if (reached != total_free) return false;
        // each room must keep a usable interior
        for (const auto& r : rects) {
            std::size_t room_free = 0;
            const int x0 = std::max(0, static_cast<int>((r.x0 - min_x) / scratch_cell));
            const int x1 = std::min(gw - 1, static_cast<int>((r.x1 - min_x) / scratch_cell));
            const int y0 = std::max(0, static_cast<int>(r.y0 / scratch_cell));
            const int y1 = std::min(gh - 1, static_cast<int>(r.y1 / scratch_cell));
            for (int iy = y0; iy <= y1; ++iy)
                for (int ix = x0; ix <= x1; ++ix)
                    room_free += !blocked[static_cast<std::size_t>(iy) * gw + ix];
            if (room_free < 12) return false;
        }
        return true;
    };

    std::vector<SceneObject> objects;
    std::vector<Rect2> placed_footprints;
    std::vector<int> category_counts(std::size(kCategories), 0);

    auto try_place = [&](int category_idx) -> bool {
        const CategorySpec& spec = kCategories[category_idx];
        for (int attempt = 0; attempt < params.max_retries; ++attempt) {
            const int ri = static_cast<int>(rng.index(rects.size()));
            const auto& r = rects[ri];
            const double jitter = rng.uniform(0.8, 1.2);
            const double hx = spec.hx * jitter;
            const double hy = spec.hy * jitter;
            const double hz = spec.hz * rng.uniform(0.85, 1.15);
            const double yaw = wrap_angle(rng.uniform(-kPi, kPi));
            const double circum = std::hypot(hx, hy);
            const double margin = circum + params.object_wall_margin;
            if (r.x1 - r.x0 < 2.0 * margin || r.y1 - r.y0 < 2.0 * margin) continue;
            const Point2 c{rng.uniform(r.x0 + margin, r.x1 - margin),
                           rng.uniform(r.y0 + margin, r.y1 - margin)};

            bool ok = true;
            for (const auto& d : doors)
                if (distance(c, d.center()) < params.door_keepout + circum) ok = false;
            if (!ok) continue;

            Rect2 fp{c, hx + params.object_gap / 2.0, hy + params.object_gap / 2.0,
                     std::cos(yaw), std::sin(yaw)};
            for (const auto& other : placed_footprints)
                if (rects_overlap(fp, other)) {
                    ok = false;
                    break;
                }
            if (!ok) continue;

            // navigability: stamp the footprint and keep it only if the free
            // space stays one component
            Rect2 stamped{c, hx, hy, std::cos(yaw), std::sin(yaw)};
            std::vector<std::size_t> touched;
            const int x0 = std::max(0, static_cast<int>((c.x - circum - scratch_clear - min_x) /
                                                        scratch_cell));
            const int x1 = std::min(gw - 1, static_cast<int>((c.x + circum + scratch_clear - min_x) /
                                                             scratch_cell) + 1);
            const int y0 = std::max(0, static_cast<int>((c.y - circum - scratch_clear) /
                                                        scratch_cell));
            const int y1 = std::min(gh - 1, static_cast<int>((c.y + circum + scratch_clear) /
                                                             scratch_cell) + 1);
            for (int iy = y0; iy <= y1; ++iy)
                for (int ix = x0; ix <= x1; ++ix) {
                    const std::size_t idx = static_cast<std::size_t>(iy) * gw + ix;
                    if (blocked[idx]) continue;
                    if (point_rect_distance(cell_xy(ix, iy), stamped) <= scratch_clear) {
                        blocked[idx] = 1;
                        touched.push_back(idx);
                    }
                }
            if (!connected_and_roomy()) {
                for (std::size_t idx : touched) blocked[idx] = 0;
                continue;
            }

            SceneObject obj;
            obj.category = spec.name;
            obj.id = std::string(spec.name) + "_" +
                     std::to_string(++category_counts[category_idx]);
            obj.room_id = rooms[ri].id;
            obj.box.center = {c.x, c.y, hz};  // resting on the floor
            obj.box.half_extents = {hx, hy, hz};
            obj.box.yaw = yaw;
            objects.push_back(std::move(obj));
            placed_footprints.push_back(fp);
            return true;
        }
        return false;
    };

    // category indices sorted small-to-large, the fallback order
    std::vector<int> by_size(std::size(kCategories));
    for (std::size_t i = 0; i < by_size.size(); ++i) by_size[i] = static_cast<int>(i);
    std::sort(by_size.begin(), by_size.end(), [](int a, int b) {
        return kCategories[a].hx * kCategories[a].hy < kCategories[b].hx * kCategories[b].hy;
    });

    for (int i = 0; i < n_objects; ++i) {
        // first two objects share a small category so n_objects >= 4 always
        // has a multi-instance category
        const bool forced_pair = i < 2 && n_objects >= 4;
        int cat = forced_pair ? by_size[0]
                              : static_cast<int>(rng.index(std::size(kCategories)));
        bool placed = try_place(cat);
        if (!placed && !forced_pair) {
            // a large item may not fit; fall back through smaller categories
            for (int alt : by_size) {
                if (alt == cat) continue;
                if ((placed = try_place(alt))) break;
            }
        }
        if (!placed)
            throw CapacityError("could not place object " + std::to_string(i + 1) + " of " +
                                std::to_string(n_objects) + " after " +
                                std::to_string(params.max_retries) + " retries");
    }

    return Scene("toy_" + std::to_string(seed) + "_" + std::to_string(n_rooms) + "r" +
                     std::to_string(n_objects) + "o",
                 std::move(rooms), std::move(objects), std::move(walls));
}

}  // namespace s3forge
