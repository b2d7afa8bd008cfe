#include <doctest.h>

#include <map>

#include "s3forge/errors.hpp"
#include "s3forge/rng.hpp"
#include "s3forge/scene_io.hpp"
#include "s3forge/toy_scene.hpp"

using namespace s3forge;

namespace {

const char* kOneRoomDoc = R"({
  "id": "unit",
  "rooms": [
    {"id": "room_1", "name": "study", "ceiling_height": 2.8,
     "polygon": [[0,0],[4,0],[4,4],[0,4]]}
  ],
  "objects": [
    {"id": "chair_1", "category": "chair", "room_id": "room_1",
     "box": {"center": [2.0, 2.0, 0.45], "half_extents": [0.25, 0.25, 0.45], "yaw": 0.0}}
  ]
})";

}  // namespace

TEST_CASE("load_scene: valid 1-room document derives 4 wall occluders") {
    Scene scene = load_scene(kOneRoomDoc);
    CHECK(scene.rooms().size() == 1);
    CHECK(scene.objects().size() == 1);
    CHECK(scene.occluders().size() == 4);
    for (const auto& wall : scene.occluders())
        CHECK(wall.half_extents[2] == doctest::Approx(1.4));
}

TEST_CASE("load_scene error taxonomy") {
    // crossing edges -> GeometryError
    const char* crossing = R"({"id":"x","rooms":[{"id":"r","ceiling_height":2.8,
      "polygon":[[0,0],[2,2],[2,0],[0,2]]}]})";
    CHECK_THROWS_AS(load_scene(crossing), GeometryError);

    // dangling room reference -> ReferenceError
    const char* dangling = R"({"id":"x","rooms":[{"id":"r","ceiling_height":2.8,
      "polygon":[[0,0],[4,0],[4,4],[0,4]]}],
      "objects":[{"id":"o","category":"chair","room_id":"kitchen2",
        "box":{"center":[1,1,0.4],"half_extents":[0.2,0.2,0.4],"yaw":0}}]})";
    CHECK_THROWS_AS(load_scene(dangling), ReferenceError);

    // missing field -> SchemaError
    const char* missing = R"({"id":"x","rooms":[{"id":"r",
      "polygon":[[0,0],[4,0],[4,4],[0,4]]}]})";
    CHECK_THROWS_AS(load_scene(missing), SchemaError);

    CHECK_THROWS_AS(load_scene("not json"), ParseError);
}

TEST_CASE("CW polygons normalize to CCW on load") {
    const char* cw = R"({"id":"x","rooms":[{"id":"r","ceiling_height":2.8,
      "polygon":[[0,0],[0,4],[4,4],[4,0]]}]})";
    Scene scene = load_scene(cw);
    CHECK(polygon_is_ccw(scene.rooms()[0].polygon));
    CHECK(polygon_area(scene.rooms()[0].polygon) == doctest::Approx(16.0));
}

TEST_CASE("save/load round-trip is identity on validated scenes") {
    Scene scene = gen_toy_scene(21, 3, 10);
    const std::string bytes = save_scene(scene);
    Scene reloaded = load_scene(bytes);
    CHECK(save_scene(reloaded) == bytes);
}

TEST_CASE("locate_room: centroid, outside, shared-wall tie-break") {
    Scene scene = gen_toy_scene(5, 2, 4);
    const auto& r0 = scene.rooms()[0];
    const Point2 centroid = polygon_centroid(r0.polygon);
    CHECK(scene.locate_room(centroid) == r0.id);
    CHECK_FALSE(scene.locate_room({-100.0, -100.0}).has_value());

    // point on the shared wall belongs to the lexicographically smaller id
    const double shared_x = r0.polygon[1].x;
    const auto hit = scene.locate_room({shared_x, 1.0});
    REQUIRE(hit.has_value());
    CHECK(*hit == "room_1");
}

TEST_CASE("locate_room finds a room for every interior sample") {
    Scene scene = gen_toy_scene(77, 4, 6);
    Rng rng(3);
    int checked = 0;
    for (int i = 0; i < 10000; ++i) {
        const auto& room = scene.rooms()[rng.index(scene.rooms().size())];
        Aabb2 bb{room.polygon[0], room.polygon[0]};
        for (const auto& p : room.polygon) bb.expand(p);
        const Point2 p{rng.uniform(bb.min.x, bb.max.x), rng.uniform(bb.min.y, bb.max.y)};
        if (!point_in_polygon(p, room.polygon)) continue;
        ++checked;
        CHECK(scene.locate_room(p).has_value());
    }
    CHECK(checked > 5000);
}

TEST_CASE("gen_toy_scene determinism and invariants") {
    Scene a = gen_toy_scene(7, 1, 4);
    Scene b = gen_toy_scene(7, 1, 4);
    CHECK(save_scene(a) == save_scene(b));  // byte-identical

    Scene big = gen_toy_scene(123, 2, 10);
    for (const auto& obj : big.objects()) {
        const Room* room = big.find_room(obj.room_id);
        REQUIRE(room != nullptr);
        CHECK(point_in_polygon(obj.box.center.xy(), room->polygon));
    }

    // >= 2 instances of some category when n_objects >= 4
    std::map<std::string, int> counts;
    for (const auto& obj : a.objects()) ++counts[obj.category];
    bool has_multi = false;
    for (const auto& [cat, n] : counts) has_multi |= n >= 2;
    CHECK(has_multi);
}

TEST_CASE("gen_toy_scene capacity error in a pinned 3x3 room") {
    ToyParams params;
    params.fixed_room_size = Point2{3.0, 3.0};
    CHECK_THROWS_AS(gen_toy_scene(1, 1, 64, params), CapacityError);
}

TEST_CASE("trajectory jsonl round-trip") {
    Trajectory traj;
    traj.id = "t";
    traj.scene_id = "s";
    traj.fps = 24.0;
    for (int i = 0; i < 48; ++i) {
        traj.poses.push_back({{0.1 * i, 0.0, 1.5}, 0.25, i / 24.0});
        traj.segment_labels.push_back(SegmentLabel::Moving);
    }
    traj.keypoint_marks = {0};
    const std::string bytes = save_trajectory(traj);
    Trajectory back = load_trajectory(bytes);
    CHECK(back.poses.size() == traj.poses.size());
    CHECK(back.fps == traj.fps);
    CHECK(back.keypoint_marks == traj.keypoint_marks);
    CHECK(save_trajectory(back) == bytes);
}
