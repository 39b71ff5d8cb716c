#pragma once

// Triangle meshes in the robot body frame (base resting on z = 0), a small
// Wavefront-OBJ reader covering the subset we emit ourselves, ground-plane
// placement, and procedural builders used by the demo scene and tests.

#include <array>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "groundcast/common.hpp"
#include "groundcast/geometry.hpp"

namespace groundcast {

struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;  // CCW winding seen from outside

  void validate() const {
    if (triangles.empty()) fail(Err::bad_params, "mesh has no triangles");
    for (const auto& t : triangles) {
      for (int idx : t) {
        if (idx < 0 || idx >= static_cast<int>(vertices.size()))
          fail(Err::index_out_of_range, "triangle index out of range");
      }
    }
    for (const Vec3& v : vertices) {
      if (!finite(v)) fail(Err::bad_params, "mesh vertex not finite");
      if (v.z < -1e-9) fail(Err::bad_params, "mesh extends below the ground plane");
    }
  }
};

// Ground placement of the robot: yaw about z, then translate in the plane.
struct RobotPose {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;

  void validate() const {
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(yaw))
      fail(Err::bad_params, "robot pose not finite");
  }

  friend bool operator==(const RobotPose&, const RobotPose&) = default;
};

// Map any angle into (-pi, pi]. Exact multiples of 2*pi come back as 0.
inline double normalize_yaw(double yaw) {
  double y = std::remainder(yaw, 2.0 * M_PI);
  if (y <= -M_PI) y += 2.0 * M_PI;
  return y;
}

inline TriMesh place_robot(const TriMesh& mesh, const RobotPose& pose) {
  pose.validate();
  const double yaw = normalize_yaw(pose.yaw);
  const double c = std::cos(yaw), s = std::sin(yaw);
  TriMesh out;
  out.triangles = mesh.triangles;
  out.vertices.reserve(mesh.vertices.size());
  for (const Vec3& v : mesh.vertices) {
    out.vertices.push_back({c * v.x - s * v.y + pose.x, s * v.x + c * v.y + pose.y, v.z});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Wavefront OBJ subset: "v x y z" and "f i j k ..." with optional /t/n
// suffixes; everything else is ignored. Faces are fan-triangulated from the
// first vertex. Indices are 1-based; negative indices count back from the
// most recent vertex.

inline TriMesh load_obj(const std::string& text) {
  TriMesh mesh;
  std::istringstream stream(text);
  std::string line;
  int line_no = 0;
  const auto bad_line = [&line_no](const std::string& what) {
    fail(Err::parse_error, "line " + std::to_string(line_no) + ": " + what);
  };

  while (std::getline(stream, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;

    if (tag == "v") {
      Vec3 v;
      if (!(ls >> v.x >> v.y >> v.z)) bad_line("vertex needs three coordinates");
      std::string extra;
      if (ls >> extra) bad_line("trailing data after vertex");
      mesh.vertices.push_back(v);
    } else if (tag == "f") {
      std::vector<int> face;
      std::string token;
      while (ls >> token) {
        const std::string head = token.substr(0, token.find('/'));
        std::size_t used = 0;
        int idx = 0;
        try {
          idx = std::stoi(head, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used == 0 || used != head.size()) bad_line("bad face index '" + token + "'");
        if (idx < 0) idx = static_cast<int>(mesh.vertices.size()) + idx + 1;
        if (idx < 1 || idx > static_cast<int>(mesh.vertices.size()))
          fail(Err::index_out_of_range,
               "line " + std::to_string(line_no) + ": face index " + token + " out of range");
        face.push_back(idx - 1);
      }
      if (face.size() < 3) bad_line("face needs at least three vertices");
      for (std::size_t k = 1; k + 1 < face.size(); ++k) {
        mesh.triangles.push_back({face[0], face[k], face[k + 1]});
      }
    }
    // Any other tag (vt, vn, o, g, s, usemtl, ...) is ignored.
  }
  mesh.validate();
  return mesh;
}

inline std::string to_obj(const TriMesh& mesh) {
  std::ostringstream out;
  char buf[128];
  for (const Vec3& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", v.x, v.y, v.z);
    out << buf;
  }
  for (const auto& t : mesh.triangles) {
    out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Procedural builders. All emit CCW-from-outside windings.

namespace detail {

inline void add_quad(TriMesh& m, int a, int b, int c, int d) {
  m.triangles.push_back({a, b, c});
  m.triangles.push_back({a, c, d});
}

}  // namespace detail

inline TriMesh make_box(Vec3 lo, Vec3 hi) {
  if (!(lo.x < hi.x && lo.y < hi.y && lo.z < hi.z)) fail(Err::bad_params, "empty box");
  TriMesh m;
  for (int corner = 0; corner < 8; ++corner) {
    m.vertices.push_back({(corner & 1) ? hi.x : lo.x, (corner & 2) ? hi.y : lo.y,
                          (corner & 4) ? hi.z : lo.z});
  }
  detail::add_quad(m, 0, 2, 3, 1);  // bottom (z = lo.z), normal -z
  detail::add_quad(m, 4, 5, 7, 6);  // top, normal +z
  detail::add_quad(m, 0, 1, 5, 4);  // front (y = lo.y), normal -y
  detail::add_quad(m, 2, 6, 7, 3);  // back, normal +y
  detail::add_quad(m, 0, 4, 6, 2);  // left (x = lo.x), normal -x
  detail::add_quad(m, 1, 3, 7, 5);  // right, normal +x
  m.validate();
  return m;
}

// Cylinder with its axis along y: a circle in the x-z plane centered at
// (center_x, center_z), spanning y in [y0, y1]. Used for wheels.
inline TriMesh make_cylinder_y(double center_x, double center_z, double radius, double y0,
                               double y1, int segments) {
  if (radius <= 0.0 || y0 >= y1 || segments < 3) fail(Err::bad_params, "bad cylinder");
  TriMesh m;
  for (int i = 0; i < segments; ++i) {
    const double a = 2.0 * M_PI * i / segments;
    const double x = center_x + radius * std::cos(a);
    const double z = center_z + radius * std::sin(a);
    m.vertices.push_back({x, y0, z});
    m.vertices.push_back({x, y1, z});
  }
  const int n = segments;
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    // Side quad; outward normal points radially away from the axis.
    detail::add_quad(m, 2 * i, 2 * i + 1, 2 * j + 1, 2 * j);
  }
  // End caps as fans around added center vertices.
  const int c0 = static_cast<int>(m.vertices.size());
  m.vertices.push_back({center_x, y0, center_z});
  const int c1 = static_cast<int>(m.vertices.size());
  m.vertices.push_back({center_x, y1, center_z});
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    m.triangles.push_back({c0, 2 * i, 2 * j});          // -y cap
    m.triangles.push_back({c1, 2 * j + 1, 2 * i + 1});  // +y cap
  }
  m.validate();
  return m;
}

// Latitude/longitude sphere resting on the ground when center_z >= radius.
inline TriMesh make_sphere(Vec3 center, double radius, int slices, int stacks) {
  if (radius <= 0.0 || slices < 3 || stacks < 2) fail(Err::bad_params, "bad sphere");
  TriMesh m;
  m.vertices.push_back(center + Vec3{0, 0, radius});   // north pole
  for (int s = 1; s < stacks; ++s) {
    const double phi = M_PI * s / stacks;  // from +z
    for (int i = 0; i < slices; ++i) {
      const double theta = 2.0 * M_PI * i / slices;
      m.vertices.push_back(center + Vec3{radius * std::sin(phi) * std::cos(theta),
                                         radius * std::sin(phi) * std::sin(theta),
                                         radius * std::cos(phi)});
    }
  }
  const int south = static_cast<int>(m.vertices.size());
  m.vertices.push_back(center - Vec3{0, 0, radius});

  const auto ring = [slices](int s, int i) { return 1 + (s - 1) * slices + (i % slices); };
  for (int i = 0; i < slices; ++i) {
    m.triangles.push_back({0, ring(1, i), ring(1, i + 1)});
    m.triangles.push_back({south, ring(stacks - 1, i + 1), ring(stacks - 1, i)});
  }
  for (int s = 1; s + 1 < stacks; ++s) {
    for (int i = 0; i < slices; ++i) {
      detail::add_quad(m, ring(s, i), ring(s + 1, i), ring(s + 1, i + 1), ring(s, i + 1));
    }
  }
  m.validate();
  return m;
}

inline TriMesh merge_meshes(const std::vector<TriMesh>& parts) {
  TriMesh m;
  for (const TriMesh& p : parts) {
    const int base = static_cast<int>(m.vertices.size());
    m.vertices.insert(m.vertices.end(), p.vertices.begin(), p.vertices.end());
    for (const auto& t : p.triangles) {
      m.triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
    }
  }
  m.validate();
  return m;
}

}  // namespace groundcast
