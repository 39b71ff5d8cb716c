#pragma once

// Demo scene: a four-wheeled robot mesh, three wall-mounted cameras pitched
// at the floor, and per-camera drivable regions that exclude a band along the
// far wall. The scene serializes to scene.json with enough precision that
// re-loading reproduces renders bit for bit.

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "groundcast/common.hpp"
#include "groundcast/geometry.hpp"
#include "groundcast/io.hpp"
#include "groundcast/mesh.hpp"

namespace groundcast {

// Image-plane polygon a robot's projection must stay inside for a pose to
// count as safe from this camera.
struct DrivableRegion {
  std::string camera_id;
  Polygon2D polygon;

  void validate() const {
    if (camera_id.empty()) fail(Err::bad_params, "drivable region needs a camera id");
    if (polygon.frame() != PolyFrame::image_pixels)
      fail(Err::frame_mismatch, "drivable region must be in image pixels");
    if (!polygon_is_simple(polygon)) fail(Err::bad_params, "drivable region must be simple");
  }
};

struct SceneCamera {
  std::string id;
  CameraIntrinsics intrinsics;
  Pose3 pose;
  double mount_height = 0.0;  // camera center height above the floor, meters

  Camera camera() const { return Camera{intrinsics, pose}; }

  void validate() const {
    if (id.empty()) fail(Err::bad_params, "camera needs an id");
    intrinsics.validate();
    pose.validate();
    if (!(mount_height > 0.0)) fail(Err::bad_params, "camera mount height must be positive");
  }
};

struct SceneSpec {
  std::string mesh_obj;  // OBJ path relative to the scene file's directory
  double ground_height = 0.0;
  Vec2 spin_zone_min{0, 0}, spin_zone_max{0, 0};  // where spin centers are drawn
  Vec2 floor_min{0, 0}, floor_max{0, 0};          // extent swept by safety grids
  std::vector<SceneCamera> cameras;
  std::vector<DrivableRegion> regions;

  void validate() const {
    if (mesh_obj.empty()) fail(Err::bad_params, "scene needs a mesh path");
    if (!std::isfinite(ground_height)) fail(Err::bad_params, "ground height must be finite");
    if (cameras.empty()) fail(Err::bad_params, "scene needs at least one camera");
    for (const SceneCamera& c : cameras) c.validate();
    if (!(spin_zone_min.x < spin_zone_max.x && spin_zone_min.y < spin_zone_max.y))
      fail(Err::bad_params, "spin zone must have positive extent");
    if (!(floor_min.x < floor_max.x && floor_min.y < floor_max.y))
      fail(Err::bad_params, "floor must have positive extent");
    for (const DrivableRegion& r : regions) {
      r.validate();
      camera_by_id(r.camera_id);
    }
  }

  const SceneCamera& camera_by_id(const std::string& id) const {
    for (const SceneCamera& c : cameras)
      if (c.id == id) return c;
    fail(Err::bad_params, "unknown camera id: " + id);
  }

  const DrivableRegion& region_for(const std::string& camera_id) const {
    for (const DrivableRegion& r : regions)
      if (r.camera_id == camera_id) return r;
    fail(Err::bad_params, "no drivable region for camera: " + camera_id);
  }
};

// Four-wheeled differential-drive robot, roughly half a meter on a side.
// The ground plate is the widest part, so the true footprint is its
// rectangle; the offset mast breaks rotational symmetry so orientation is
// observable in silhouettes.
inline TriMesh make_demo_robot() {
  std::vector<TriMesh> parts;
  parts.push_back(make_box({-0.25, -0.26, 0.0}, {0.25, 0.26, 0.03}));   // plate
  parts.push_back(make_box({-0.24, -0.19, 0.03}, {0.24, 0.19, 0.25}));  // body
  for (double wx : {-0.15, 0.15}) {
    parts.push_back(make_cylinder_y(wx, 0.09, 0.09, -0.255, -0.195, 16));
    parts.push_back(make_cylinder_y(wx, 0.09, 0.09, 0.195, 0.255, 16));
  }
  parts.push_back(make_box({0.10, -0.03, 0.25}, {0.16, 0.03, 0.35}));  // mast
  return merge_meshes(parts);
}

namespace detail {

inline Polygon2D image_rect(double u0, double v0, double u1, double v1) {
  return Polygon2D::from_points({{u0, v0}, {u1, v0}, {u1, v1}, {u0, v1}},
                                PolyFrame::image_pixels);
}

}  // namespace detail

// Three cameras on the room walls at 2.5 m, pitched 30 degrees toward the
// floor. Each drivable region is the image rectangle minus a band across the
// top, which is where the far wall appears from every mount.
inline SceneSpec make_demo_scene() {
  SceneSpec scene;
  scene.mesh_obj = "robot.obj";
  scene.ground_height = 0.0;
  scene.spin_zone_min = {-1.0, -0.6};
  scene.spin_zone_max = {1.0, 0.6};
  scene.floor_min = {-1.2, -1.2};
  scene.floor_max = {1.2, 1.2};

  const CameraIntrinsics intr{200.0, 200.0, 160.0, 120.0, 320, 240};
  const double h = 2.5;
  const double reach = h * std::sqrt(3.0);  // ground distance for a 30-degree pitch
  const struct {
    const char* id;
    Vec2 eye;
    Vec2 toward;
  } mounts[] = {
      {"cam0", {0.0, -3.0}, {0.0, 1.0}},
      {"cam1", {3.0, 0.0}, {-1.0, 0.0}},
      {"cam2", {0.0, 3.0}, {0.0, -1.0}},
  };
  for (const auto& m : mounts) {
    const Vec3 eye{m.eye.x, m.eye.y, h};
    const Vec3 target{m.eye.x + reach * m.toward.x, m.eye.y + reach * m.toward.y, 0.0};
    scene.cameras.push_back({m.id, intr, look_at_pose(eye, target), h});
    scene.regions.push_back({m.id, detail::image_rect(8.0, 122.0, 312.0, 236.0)});
  }
  return scene;
}

// --- JSON round trip -------------------------------------------------------

inline std::string scene_to_json(const SceneSpec& scene) {
  std::ostringstream out;
  const auto vec2 = [](const Vec2& v) {
    return "[" + format_real(v.x) + ", " + format_real(v.y) + "]";
  };
  out << "{\n";
  out << "  \"mesh_obj\": \"" << scene.mesh_obj << "\",\n";
  out << "  \"ground_height\": " << format_real(scene.ground_height) << ",\n";
  out << "  \"spin_zone\": {\"min\": " << vec2(scene.spin_zone_min)
      << ", \"max\": " << vec2(scene.spin_zone_max) << "},\n";
  out << "  \"floor\": {\"min\": " << vec2(scene.floor_min) << ", \"max\": " << vec2(scene.floor_max)
      << "},\n";
  out << "  \"cameras\": [\n";
  for (std::size_t i = 0; i < scene.cameras.size(); ++i) {
    const SceneCamera& c = scene.cameras[i];
    out << "    {\n";
    out << "      \"id\": \"" << c.id << "\",\n";
    out << "      \"intrinsics\": {\"fx\": " << format_real(c.intrinsics.fx)
        << ", \"fy\": " << format_real(c.intrinsics.fy) << ", \"cx\": " << format_real(c.intrinsics.cx)
        << ", \"cy\": " << format_real(c.intrinsics.cy) << ", \"width\": " << c.intrinsics.width
        << ", \"height\": " << c.intrinsics.height << "},\n";
    out << "      \"rotation\": [";
    for (int r = 0; r < 3; ++r)
      for (int cc = 0; cc < 3; ++cc)
        out << (r + cc ? ", " : "") << format_real(c.pose.R.m[r][cc]);
    out << "],\n";
    out << "      \"translation\": [" << format_real(c.pose.t.x) << ", " << format_real(c.pose.t.y)
        << ", " << format_real(c.pose.t.z) << "],\n";
    out << "      \"mount_height\": " << format_real(c.mount_height) << "\n";
    out << "    }" << (i + 1 < scene.cameras.size() ? "," : "") << "\n";
  }
  out << "  ],\n";
  out << "  \"drivable_regions\": [\n";
  for (std::size_t i = 0; i < scene.regions.size(); ++i) {
    const DrivableRegion& r = scene.regions[i];
    out << "    {\"camera_id\": \"" << r.camera_id << "\", \"polygon\": [";
    const auto& verts = r.polygon.vertices();
    for (std::size_t v = 0; v < verts.size(); ++v)
      out << (v ? ", " : "") << vec2(verts[v]);
    out << "]}" << (i + 1 < scene.regions.size() ? "," : "") << "\n";
  }
  out << "  ]\n";
  out << "}\n";
  return out.str();
}

inline SceneSpec scene_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(Err::parse_error, std::string("scene json: ") + e.what());
  }
  try {
    SceneSpec scene;
    scene.mesh_obj = j.at("mesh_obj").get<std::string>();
    scene.ground_height = j.at("ground_height").get<double>();
    const auto vec2 = [](const nlohmann::json& a) {
      return Vec2{a.at(0).get<double>(), a.at(1).get<double>()};
    };
    scene.spin_zone_min = vec2(j.at("spin_zone").at("min"));
    scene.spin_zone_max = vec2(j.at("spin_zone").at("max"));
    scene.floor_min = vec2(j.at("floor").at("min"));
    scene.floor_max = vec2(j.at("floor").at("max"));
    for (const auto& jc : j.at("cameras")) {
      SceneCamera c;
      c.id = jc.at("id").get<std::string>();
      const auto& ji = jc.at("intrinsics");
      c.intrinsics = CameraIntrinsics{ji.at("fx").get<double>(),  ji.at("fy").get<double>(),
                                      ji.at("cx").get<double>(),  ji.at("cy").get<double>(),
                                      ji.at("width").get<int>(),  ji.at("height").get<int>()};
      const auto& jr = jc.at("rotation");
      for (int r = 0; r < 3; ++r)
        for (int cc = 0; cc < 3; ++cc) c.pose.R.m[r][cc] = jr.at(r * 3 + cc).get<double>();
      const auto& jt = jc.at("translation");
      c.pose.t = Vec3{jt.at(0).get<double>(), jt.at(1).get<double>(), jt.at(2).get<double>()};
      c.mount_height = jc.at("mount_height").get<double>();
      scene.cameras.push_back(std::move(c));
    }
    for (const auto& jd : j.at("drivable_regions")) {
      std::vector<Vec2> verts;
      for (const auto& jv : jd.at("polygon")) verts.push_back(vec2(jv));
      scene.regions.push_back({jd.at("camera_id").get<std::string>(),
                               Polygon2D::from_points(verts, PolyFrame::image_pixels)});
    }
    scene.validate();
    return scene;
  } catch (const nlohmann::json::exception& e) {
    fail(Err::schema_error, std::string("scene json: ") + e.what());
  }
}

// Writes robot.obj and scene.json under out_dir and returns the scene.
inline SceneSpec gen_scene(const std::string& out_dir) {
  ensure_dir(out_dir);
  const SceneSpec scene = make_demo_scene();
  write_file(out_dir + "/robot.obj", to_obj(make_demo_robot()));
  write_file(out_dir + "/scene.json", scene_to_json(scene));
  return scene;
}

}  // namespace groundcast
