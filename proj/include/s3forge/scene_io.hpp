#pragma once

#include <string>

#include "s3forge/scene.hpp"

namespace s3forge {

// Scene documents are JSON:
//   {id, rooms:[{id,name,ceiling_height,polygon:[[x,y],...]}],
//    objects:[{id,category,room_id,box:{center:[x,y,z],
//              half_extents:[hx,hy,hz],yaw}}], occluders:[box...]}
// Lengths meters, angles radians.
Scene load_scene(const std::string& bytes);
std::string save_scene(const Scene& scene);

Scene load_scene_file(const std::string& path);
void save_scene_file(const Scene& scene, const std::string& path);

// Trajectories are JSONL: a header line {kind:"trajectory", id, scene_id,
// fps, keypoint_marks, ...provenance}, then one pose per line
// {t, x, y, z, yaw, label}.
Trajectory load_trajectory(const std::string& bytes);
std::string save_trajectory(const Trajectory& traj, const std::string& provenance_json = "");

Trajectory load_trajectory_file(const std::string& path);
void save_trajectory_file(const Trajectory& traj, const std::string& path,
                          const std::string& provenance_json = "");

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace s3forge
