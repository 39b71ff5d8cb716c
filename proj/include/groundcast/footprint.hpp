#pragma once

// Footprint recovery: synthesize an overhead view of the robot, trace the
// silhouette contour, cast each contour vertex onto the ground plane, and
// keep the resulting polygon in the robot body frame so one footprint serves
// every camera and pose. Reprojection into arbitrary views plus polygon
// rasterization produce per-frame footprint labels.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <queue>
#include <string>
#include <vector>

#include "groundcast/common.hpp"
#include "groundcast/geometry.hpp"
#include "groundcast/mesh.hpp"
#include "groundcast/render.hpp"

namespace groundcast {

enum class FootprintSource { overhead_silhouette, mesh_oracle };

// Ground contact polygon in the robot body frame (meters, z = 0 implied).
struct Footprint {
  Polygon2D polygon;
  FootprintSource source;
};

struct FrameLabel {
  Polygon2D footprint_poly;  // image pixels
  Mask footprint_mask;
  AABB2D bbox;
  std::string frame_id;
};

// Straight-down pinhole at (center, height) whose ground window
// [center ± half_extent] exactly fills a square image. Image +u is world +x,
// image -v is world +y (north up).
inline Camera synth_overhead_camera(Vec2 center, double height, int resolution,
                                    double half_extent) {
  if (!(height > 0.0) || !(half_extent > 0.0) || resolution <= 0)
    fail(Err::bad_params, "overhead camera needs positive height, extent, resolution");
  Camera cam;
  const double f = height * resolution / (2.0 * half_extent);
  cam.intrinsics = {f, f, resolution / 2.0, resolution / 2.0, resolution, resolution};
  cam.pose = look_at_pose({center.x, center.y, height}, {center.x, center.y, 0.0}, {0, 1, 0});
  cam.validate();
  return cam;
}

namespace detail {

// Crack-following contour trace. Boundary edges live on the pixel grid's
// cracks, directed so the component interior is on the left under the
// positive-shoelace convention. Each directed edge has exactly one
// successor; at pinch corners (diagonally touching pixels) the turn toward
// the interior is preferred, which merges an 8-connected component into a
// single outer loop.
struct CrackField {
  int cw = 0, ch = 0;            // corner grid dimensions (W+1, H+1)
  std::vector<std::uint8_t> edge;  // [corner * 4 + dir]

  static constexpr int kDx[4] = {1, 0, -1, 0};  // dirs: +x, +y(down), -x, -y
  static constexpr int kDy[4] = {0, 1, 0, -1};

  int corner(int x, int y) const { return y * cw + x; }
  bool has(int c, int d) const { return edge[c * 4 + d]; }
};

inline double ring_shoelace(const std::vector<Vec2>& ring) {
  double acc = 0.0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    acc += cross(ring[i], ring[(i + 1) % ring.size()]);
  }
  return acc;
}

inline std::vector<Vec2> merge_collinear(const std::vector<Vec2>& ring) {
  std::vector<Vec2> out;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 prev = ring[(i + n - 1) % n];
    const Vec2 cur = ring[i];
    const Vec2 next = ring[(i + 1) % n];
    if (cross(cur - prev, next - cur) != 0.0) out.push_back(cur);
  }
  return out;
}

}  // namespace detail

// Outer boundary of the largest 8-connected foreground component, as a
// closed polygon with vertices on pixel corners. Ties between equally large
// components go to the one seen first in row-major order. Interior holes are
// dropped; the outer loop is the one with the largest absolute area.
inline Polygon2D extract_contour(const Mask& mask) {
  const int w = mask.width, h = mask.height;

  // Largest component by BFS.
  std::vector<int> label(static_cast<std::size_t>(w) * h, -1);
  int best_label = -1;
  std::size_t best_size = 0;
  int next_label = 0;
  for (int sv = 0; sv < h; ++sv) {
    for (int su = 0; su < w; ++su) {
      if (!mask.at(su, sv) || label[sv * w + su] >= 0) continue;
      const int cur = next_label++;
      std::size_t size = 0;
      std::queue<std::pair<int, int>> frontier;
      label[sv * w + su] = cur;
      frontier.push({su, sv});
      while (!frontier.empty()) {
        const auto [u, v] = frontier.front();
        frontier.pop();
        ++size;
        for (int dv = -1; dv <= 1; ++dv) {
          for (int du = -1; du <= 1; ++du) {
            const int uu = u + du, vv = v + dv;
            if (uu < 0 || uu >= w || vv < 0 || vv >= h) continue;
            if (!mask.at(uu, vv) || label[vv * w + uu] >= 0) continue;
            label[vv * w + uu] = cur;
            frontier.push({uu, vv});
          }
        }
      }
      if (size > best_size) {
        best_size = size;
        best_label = cur;
      }
    }
  }
  if (best_label < 0) fail(Err::empty_mask, "contour of an empty mask");

  const auto in_comp = [&](int u, int v) {
    return u >= 0 && u < w && v >= 0 && v < h && label[v * w + u] == best_label;
  };

  // Collect directed boundary edges (interior on the left).
  detail::CrackField field;
  field.cw = w + 1;
  field.ch = h + 1;
  field.edge.assign(static_cast<std::size_t>(field.cw) * field.ch * 4, 0);
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      if (!in_comp(u, v)) continue;
      if (!in_comp(u, v - 1)) field.edge[field.corner(u, v) * 4 + 0] = 1;          // top
      if (!in_comp(u + 1, v)) field.edge[field.corner(u + 1, v) * 4 + 1] = 1;      // right
      if (!in_comp(u, v + 1)) field.edge[field.corner(u + 1, v + 1) * 4 + 2] = 1;  // bottom
      if (!in_comp(u - 1, v)) field.edge[field.corner(u, v + 1) * 4 + 3] = 1;      // left
    }
  }

  // Walk loops; keep the one with the largest absolute area (the outer one).
  std::vector<Vec2> outer;
  double outer_area = -1.0;
  std::vector<std::uint8_t> visited(field.edge.size(), 0);
  for (std::size_t start = 0; start < field.edge.size(); ++start) {
    if (!field.edge[start] || visited[start]) continue;
    std::vector<Vec2> ring;
    int c = static_cast<int>(start / 4);
    int d = static_cast<int>(start % 4);
    while (!visited[c * 4 + d]) {
      visited[c * 4 + d] = 1;
      ring.push_back({static_cast<double>(c % field.cw), static_cast<double>(c / field.cw)});
      c = field.corner(c % field.cw + detail::CrackField::kDx[d],
                       c / field.cw + detail::CrackField::kDy[d]);
      // Successor: prefer the turn into the interior, then straight, then away.
      int nd = -1;
      for (int turn : {3, 0, 1}) {
        if (field.has(c, (d + turn) % 4)) {
          nd = (d + turn) % 4;
          break;
        }
      }
      if (nd < 0) fail(Err::degenerate, "contour walk left the boundary graph");
      d = nd;
    }
    const double area = std::abs(detail::ring_shoelace(ring)) * 0.5;
    if (area > outer_area) {
      outer_area = area;
      outer = std::move(ring);
    }
  }

  return Polygon2D::from_points(detail::merge_collinear(outer), PolyFrame::image_pixels);
}

// Even-odd scanline fill sampled at pixel centers; geometry outside the
// image is cropped away.
inline Mask polygon_to_mask(const Polygon2D& poly, int width, int height) {
  if (poly.frame() != PolyFrame::image_pixels)
    fail(Err::frame_mismatch, "polygon_to_mask expects an image-space polygon");
  Mask out(width, height);
  const auto& verts = poly.vertices();
  const std::size_t n = verts.size();
  std::vector<double> xs;
  for (int v = 0; v < height; ++v) {
    const double y = v + 0.5;
    xs.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 a = verts[i];
      const Vec2 b = verts[(i + 1) % n];
      if ((a.y > y) != (b.y > y)) {
        xs.push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
      }
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
      // Centers u + 0.5 in [xs[i], xs[i+1]).
      const int u_lo = std::max(0, static_cast<int>(std::ceil(xs[i] - 0.5)));
      const int u_hi = std::min(width - 1, static_cast<int>(std::ceil(xs[i + 1] - 0.5)) - 1);
      for (int u = u_lo; u <= u_hi; ++u) out.at(u, v) = 1;
    }
  }
  return out;
}

namespace detail {

// World ground point -> robot body frame for a ground pose.
inline Vec2 world_to_body(Vec2 p, const RobotPose& pose) {
  const double yaw = normalize_yaw(pose.yaw);
  const double c = std::cos(yaw), s = std::sin(yaw);
  const double dx = p.x - pose.x, dy = p.y - pose.y;
  return {c * dx + s * dy, -s * dx + c * dy};
}

inline Vec2 body_to_world(Vec2 p, const RobotPose& pose) {
  const double yaw = normalize_yaw(pose.yaw);
  const double c = std::cos(yaw), s = std::sin(yaw);
  return {c * p.x - s * p.y + pose.x, s * p.x + c * p.y + pose.y};
}

}  // namespace detail

// Silhouette contour -> ground plane -> body frame. The frame must have been
// rendered through `cam` with the robot at frame.robot_pose.
inline Footprint footprint_from_overhead(const RenderedFrame& frame, const Camera& cam,
                                         const GroundPlane& plane, double simplify_eps) {
  const Polygon2D contour = extract_contour(frame.mask);  // throws on empty mask
  std::vector<Vec2> world_ring;
  world_ring.reserve(contour.size());
  for (const Vec2& px : contour.vertices()) {
    const auto hit = ray_plane_intersect(unproject_pixel(px.x, px.y, cam), plane);
    if (!hit) fail(Err::no_hit, "contour ray missed the ground plane");
    world_ring.push_back({hit->x, hit->y});
  }
  std::vector<Vec2> simplified = douglas_peucker_ring(world_ring, simplify_eps);
  for (Vec2& p : simplified) p = detail::world_to_body(p, frame.robot_pose);
  return Footprint{Polygon2D::from_points(std::move(simplified), PolyFrame::world_meters),
                   FootprintSource::overhead_silhouette};
}

// Independent ground-truth construction: the convex hull of every mesh
// vertex dropped onto z = 0, in the body frame.
inline Footprint footprint_oracle_from_mesh(const TriMesh& mesh) {
  std::vector<Vec2> flat;
  flat.reserve(mesh.vertices.size());
  for (const Vec3& v : mesh.vertices) flat.push_back({v.x, v.y});
  return Footprint{convex_hull(flat, PolyFrame::world_meters), FootprintSource::mesh_oracle};
}

inline Polygon2D project_footprint(const Footprint& fp, const RobotPose& pose,
                                   const Camera& cam) {
  std::vector<Vec2> px;
  px.reserve(fp.polygon.size());
  for (const Vec2& b : fp.polygon.vertices()) {
    const Vec2 w = detail::body_to_world(b, pose);
    const auto p = project_point({w.x, w.y, 0.0}, cam);
    if (!p) fail(Err::behind_camera, "footprint vertex behind the camera");
    px.push_back(*p);
  }
  return Polygon2D::from_points(std::move(px), PolyFrame::image_pixels);
}

inline std::string frame_name(std::size_t index, const std::string& camera_id) {
  char id[64];
  std::snprintf(id, sizeof id, "frame_%05zu_%s", index, camera_id.c_str());
  return id;
}

// Labels one rendered frame; `index` only feeds the frame id. Errors carry
// the frame id so batch callers can point at the offending frame.
inline FrameLabel label_frame(const Footprint& fp, const RenderedFrame& frame,
                              const std::map<std::string, Camera>& cams, std::size_t index) {
  const std::string id = frame_name(index, frame.camera_id);
  const auto cam_it = cams.find(frame.camera_id);
  if (cam_it == cams.end()) fail(Err::bad_params, id + ": unknown camera id");
  try {
    Polygon2D poly = project_footprint(fp, frame.robot_pose, cam_it->second);
    Mask mask = polygon_to_mask(poly, frame.mask.width, frame.mask.height);
    return {std::move(poly), std::move(mask), silhouette_bbox(frame), id};
  } catch (const Error& e) {
    fail(e.code(), id + ": " + e.what());
  }
}

inline std::vector<FrameLabel> generate_labels(const Footprint& fp,
                                               const std::vector<RenderedFrame>& frames,
                                               const std::map<std::string, Camera>& cams) {
  std::vector<FrameLabel> labels;
  labels.reserve(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i)
    labels.push_back(label_frame(fp, frames[i], cams, i));
  return labels;
}

}  // namespace groundcast
