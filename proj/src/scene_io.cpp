#include "s3forge/scene_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "s3forge/errors.hpp"

namespace s3forge {

using nlohmann::json;

namespace {

json require(const json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end())
        throw SchemaError("missing field '" + std::string(key) + "' in " + where);
    return *it;
}

Point3 parse_vec3(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3)
        throw SchemaError(where + " must be an array of 3 numbers");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

OrientedBox3 parse_box(const json& j, const std::string& where) {
    OrientedBox3 box;
    box.center = parse_vec3(require(j, "center", where), where + ".center");
    Point3 he = parse_vec3(require(j, "half_extents", where), where + ".half_extents");
    box.half_extents = {he.x, he.y, he.z};
    box.yaw = require(j, "yaw", where).get<double>();
    return box;
}

json box_to_json(const OrientedBox3& b) {
    return json{{"center", {b.center.x, b.center.y, b.center.z}},
                {"half_extents", {b.half_extents[0], b.half_extents[1], b.half_extents[2]}},
                {"yaw", b.yaw}};
}

}  // namespace

Scene load_scene(const std::string& bytes) {
    json doc;
    try {
        doc = json::parse(bytes);
    } catch (const json::exception& e) {
        throw ParseError(std::string("scene document is not valid JSON: ") + e.what());
    }
    try {
        std::string id = require(doc, "id", "scene").get<std::string>();

        std::vector<Room> rooms;
        for (const auto& jr : require(doc, "rooms", "scene")) {
            Room room;
            room.id = require(jr, "id", "room").get<std::string>();
            room.name = jr.value("name", room.id);
            room.ceiling_height = require(jr, "ceiling_height", "room " + room.id).get<double>();
            for (const auto& jp : require(jr, "polygon", "room " + room.id)) {
                if (!jp.is_array() || jp.size() != 2)
                    throw SchemaError("room '" + room.id + "' polygon vertex must be [x,y]");
                room.polygon.push_back({jp[0].get<double>(), jp[1].get<double>()});
            }
            rooms.push_back(std::move(room));
        }

        std::vector<SceneObject> objects;
        if (doc.contains("objects")) {
            for (const auto& jo : doc["objects"]) {
                SceneObject obj;
                obj.id = require(jo, "id", "object").get<std::string>();
                obj.category = require(jo, "category", "object " + obj.id).get<std::string>();
                obj.room_id = require(jo, "room_id", "object " + obj.id).get<std::string>();
                obj.box = parse_box(require(jo, "box", "object " + obj.id), "object " + obj.id);
                objects.push_back(std::move(obj));
            }
        }

        std::vector<OrientedBox3> occluders;
        if (doc.contains("occluders")) {
            std::size_t k = 0;
            for (const auto& jb : doc["occluders"])
                occluders.push_back(parse_box(jb, "occluder #" + std::to_string(k++)));
        }

        return Scene(std::move(id), std::move(rooms), std::move(objects), std::move(occluders));
    } catch (const json::exception& e) {
        throw SchemaError(std::string("scene document field has wrong type: ") + e.what());
    }
}

std::string save_scene(const Scene& scene) {
    json doc;
    doc["id"] = scene.id();
    doc["rooms"] = json::array();
    for (const auto& room : scene.rooms()) {
        json jr;
        jr["id"] = room.id;
        jr["name"] = room.name;
        jr["ceiling_height"] = room.ceiling_height;
        json poly = json::array();
        for (const auto& p : room.polygon) poly.push_back({p.x, p.y});
        jr["polygon"] = std::move(poly);
        doc["rooms"].push_back(std::move(jr));
    }
    doc["objects"] = json::array();
    for (const auto& obj : scene.objects()) {
        doc["objects"].push_back(json{{"id", obj.id},
                                      {"category", obj.category},
                                      {"room_id", obj.room_id},
                                      {"box", box_to_json(obj.box)}});
    }
    doc["occluders"] = json::array();
    for (const auto& occ : scene.occluders()) doc["occluders"].push_back(box_to_json(occ));
    return doc.dump(2) + "\n";
}

Trajectory load_trajectory(const std::string& bytes) {
    std::istringstream in(bytes);
    std::string line;
    Trajectory traj;
    bool have_header = false;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError("trajectory line " + std::to_string(lineno) +
                             " is not valid JSON: " + e.what());
        }
        if (!have_header) {
            if (j.value("kind", "") != "trajectory")
                throw SchemaError("trajectory header line missing kind=trajectory");
            traj.id = j.value("id", "");
            traj.scene_id = j.value("scene_id", "");
            traj.fps = j.value("fps", 24.0);
            if (j.contains("keypoint_marks"))
                for (const auto& m : j["keypoint_marks"])
                    traj.keypoint_marks.push_back(m.get<std::size_t>());
            have_header = true;
            continue;
        }
        Pose pose;
        pose.time_s = require(j, "t", "pose").get<double>();
        pose.position = {require(j, "x", "pose").get<double>(),
                         require(j, "y", "pose").get<double>(),
                         require(j, "z", "pose").get<double>()};
        pose.yaw = require(j, "yaw", "pose").get<double>();
        traj.segment_labels.push_back(
            segment_label_from_string(require(j, "label", "pose").get<std::string>()));
        traj.poses.push_back(pose);
    }
    if (!have_header) throw SchemaError("trajectory stream has no header line");
    if (traj.poses.size() < 2) throw SchemaError("trajectory has fewer than 2 poses");
    for (std::size_t i = 0; i < traj.poses.size(); ++i) {
        const double expect = static_cast<double>(i) / traj.fps;
        if (std::abs(traj.poses[i].time_s - expect) > 1e-6)
            throw SchemaError("trajectory times must advance by exactly 1/fps");
    }
    return traj;
}

std::string save_trajectory(const Trajectory& traj, const std::string& provenance_json) {
    std::ostringstream out;
    json header;
    if (!provenance_json.empty()) header = json::parse(provenance_json);
    header["kind"] = "trajectory";
    header["id"] = traj.id;
    header["scene_id"] = traj.scene_id;
    header["fps"] = traj.fps;
    header["keypoint_marks"] = traj.keypoint_marks;
    out << header.dump() << "\n";
    for (std::size_t i = 0; i < traj.poses.size(); ++i) {
        const Pose& p = traj.poses[i];
        json j{{"t", p.time_s}, {"x", p.position.x}, {"y", p.position.y},
               {"z", p.position.z}, {"yaw", p.yaw},
               {"label", to_string(traj.segment_labels[i])}};
        out << j.dump() << "\n";
    }
    return out.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw IoError("failed writing '" + path + "'");
}

Scene load_scene_file(const std::string& path) { return load_scene(read_file(path)); }

void save_scene_file(const Scene& scene, const std::string& path) {
    write_file(path, save_scene(scene));
}

Trajectory load_trajectory_file(const std::string& path) {
    return load_trajectory(read_file(path));
}

void save_trajectory_file(const Trajectory& traj, const std::string& path,
                          const std::string& provenance_json) {
    write_file(path, save_trajectory(traj, provenance_json));
}

}  // namespace s3forge
