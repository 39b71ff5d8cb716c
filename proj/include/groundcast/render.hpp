#pragma once

// Z-buffered triangle rasterization of a mesh into a shaded grayscale image,
// a silhouette mask, and a metric depth buffer.
//
// Sampling is at pixel centers (integer + 0.5) with double-precision edge
// functions and a top-left tie rule, so identical inputs give bit-identical
// frames on any platform. Triangles touching the camera plane are clipped
// against z = 1e-6 before projection. Shading is flat Lambertian under a
// fixed light; face normals come from the CCW winding. No backface culling:
// silhouettes must not depend on winding mistakes in input meshes.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "groundcast/common.hpp"
#include "groundcast/geometry.hpp"
#include "groundcast/mesh.hpp"

namespace groundcast {

struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major grayscale

  Image() = default;
  Image(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, 0) {}

  std::uint8_t& at(int u, int v) { return pixels[static_cast<std::size_t>(v) * width + u]; }
  std::uint8_t at(int u, int v) const { return pixels[static_cast<std::size_t>(v) * width + u]; }

  friend bool operator==(const Image&, const Image&) = default;
};

struct Mask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;  // row-major, 0 or 1

  Mask() = default;
  Mask(int w, int h) : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0) {}

  std::uint8_t& at(int u, int v) { return bits[static_cast<std::size_t>(v) * width + u]; }
  std::uint8_t at(int u, int v) const { return bits[static_cast<std::size_t>(v) * width + u]; }

  std::size_t count() const {
    std::size_t n = 0;
    for (std::uint8_t b : bits) n += b;
    return n;
  }
  bool empty() const { return count() == 0; }

  friend bool operator==(const Mask&, const Mask&) = default;
};

struct RenderedFrame {
  Image image;
  Mask mask;
  std::vector<double> depth;  // camera-space z in meters; +inf where empty
  RobotPose robot_pose;
  std::string camera_id;

  // Invariant: a mask bit is set exactly where depth is finite.
  void validate() const {
    if (image.width != mask.width || image.height != mask.height ||
        depth.size() != mask.bits.size())
      fail(Err::dim_mismatch, "frame buffers disagree on size");
    for (std::size_t i = 0; i < depth.size(); ++i) {
      if ((mask.bits[i] != 0) != std::isfinite(depth[i]))
        fail(Err::bad_params, "mask/depth consistency violated");
    }
  }
};

namespace detail {

constexpr double kNearClip = 1e-6;

struct ClipVert {
  Vec3 p;  // camera space
};

// Sutherland-Hodgman against the z = kNearClip plane; preserves winding.
inline std::vector<ClipVert> clip_near(const std::array<ClipVert, 3>& tri) {
  std::vector<ClipVert> out;
  for (int i = 0; i < 3; ++i) {
    const ClipVert& a = tri[i];
    const ClipVert& b = tri[(i + 1) % 3];
    const bool a_in = a.p.z >= kNearClip;
    const bool b_in = b.p.z >= kNearClip;
    if (a_in) out.push_back(a);
    if (a_in != b_in) {
      const double t = (kNearClip - a.p.z) / (b.p.z - a.p.z);
      out.push_back({a.p + t * (b.p - a.p)});
    }
  }
  return out;
}

// Top-left tie rule in image coordinates (v down), for triangles ordered
// with a positive shoelace sum: a boundary pixel center belongs to the edge
// whose direction points up, or points right when horizontal.
inline bool edge_owns_boundary(Vec2 d) { return d.y < 0.0 || (d.y == 0.0 && d.x > 0.0); }

}  // namespace detail

inline RenderedFrame rasterize(const TriMesh& mesh, const Camera& cam) {
  cam.validate();
  const int w = cam.intrinsics.width, h = cam.intrinsics.height;
  RenderedFrame frame;
  frame.image = Image(w, h);
  frame.mask = Mask(w, h);
  frame.depth.assign(static_cast<std::size_t>(w) * h, std::numeric_limits<double>::infinity());
  if (mesh.triangles.empty()) return frame;
  mesh.validate();

  const Vec3 light = normalized({1.0, -1.0, 2.0});

  for (const auto& tri : mesh.triangles) {
    const Vec3 w0 = mesh.vertices[tri[0]];
    const Vec3 w1 = mesh.vertices[tri[1]];
    const Vec3 w2 = mesh.vertices[tri[2]];

    // Shade from the world-space face normal (CCW winding).
    const Vec3 n = cross(w1 - w0, w2 - w0);
    const double n_len = norm(n);
    if (n_len == 0.0) continue;  // degenerate triangle contributes nothing
    const double lambert = std::max(0.0, dot((1.0 / n_len) * n, light));
    const auto intensity =
        static_cast<std::uint8_t>(std::lround(40.0 + 215.0 * lambert));

    const std::array<detail::ClipVert, 3> cam_tri{
        detail::ClipVert{cam.pose.R * w0 + cam.pose.t},
        detail::ClipVert{cam.pose.R * w1 + cam.pose.t},
        detail::ClipVert{cam.pose.R * w2 + cam.pose.t}};
    const std::vector<detail::ClipVert> clipped = detail::clip_near(cam_tri);
    if (clipped.size() < 3) continue;

    // Project the clipped polygon and rasterize its fan.
    std::vector<Vec2> screen(clipped.size());
    std::vector<double> inv_z(clipped.size());
    for (std::size_t i = 0; i < clipped.size(); ++i) {
      const Vec3& p = clipped[i].p;
      screen[i] = {cam.intrinsics.fx * p.x / p.z + cam.intrinsics.cx,
                   cam.intrinsics.fy * p.y / p.z + cam.intrinsics.cy};
      inv_z[i] = 1.0 / p.z;
    }

    for (std::size_t k = 1; k + 1 < clipped.size(); ++k) {
      Vec2 p0 = screen[0], p1 = screen[k], p2 = screen[k + 1];
      double iz0 = inv_z[0], iz1 = inv_z[k], iz2 = inv_z[k + 1];
      const double area2 = cross(p1 - p0, p2 - p0);
      if (area2 == 0.0) continue;
      if (area2 < 0.0) {
        std::swap(p1, p2);
        std::swap(iz1, iz2);
      }
      const double inv_area2 = 1.0 / std::abs(area2);

      const int u_lo = std::max(0, static_cast<int>(std::floor(
                                       std::min({p0.x, p1.x, p2.x}) - 0.5)));
      const int u_hi = std::min(w - 1, static_cast<int>(std::ceil(
                                           std::max({p0.x, p1.x, p2.x}))));
      const int v_lo = std::max(0, static_cast<int>(std::floor(
                                       std::min({p0.y, p1.y, p2.y}) - 0.5)));
      const int v_hi = std::min(h - 1, static_cast<int>(std::ceil(
                                           std::max({p0.y, p1.y, p2.y}))));

      const bool own01 = detail::edge_owns_boundary(p1 - p0);
      const bool own12 = detail::edge_owns_boundary(p2 - p1);
      const bool own20 = detail::edge_owns_boundary(p0 - p2);

      for (int v = v_lo; v <= v_hi; ++v) {
        for (int u = u_lo; u <= u_hi; ++u) {
          const Vec2 q{u + 0.5, v + 0.5};
          const double e12 = cross(p2 - p1, q - p1);  // barycentric weight of p0
          const double e20 = cross(p0 - p2, q - p2);  // weight of p1
          const double e01 = cross(p1 - p0, q - p0);  // weight of p2
          const bool in = (e12 > 0.0 || (e12 == 0.0 && own12)) &&
                          (e20 > 0.0 || (e20 == 0.0 && own20)) &&
                          (e01 > 0.0 || (e01 == 0.0 && own01));
          if (!in) continue;
          // 1/z is affine in screen space, so screen barycentrics interpolate
          // it exactly (perspective-correct depth).
          const double z =
              1.0 / ((e12 * iz0 + e20 * iz1 + e01 * iz2) * inv_area2);
          const std::size_t idx = static_cast<std::size_t>(v) * w + u;
          if (z < frame.depth[idx]) {
            frame.depth[idx] = z;
            frame.image.pixels[idx] = intensity;
            frame.mask.bits[idx] = 1;
          }
        }
      }
    }
  }
  return frame;
}

inline AABB2D silhouette_bbox(const RenderedFrame& frame) {
  const Mask& m = frame.mask;
  int min_u = m.width, min_v = m.height, max_u = -1, max_v = -1;
  for (int v = 0; v < m.height; ++v) {
    for (int u = 0; u < m.width; ++u) {
      if (!m.at(u, v)) continue;
      min_u = std::min(min_u, u);
      min_v = std::min(min_v, v);
      max_u = std::max(max_u, u);
      max_v = std::max(max_v, v);
    }
  }
  if (max_u < 0) fail(Err::empty_mask, "silhouette bbox of an empty mask");
  return AABB2D{static_cast<double>(min_u), static_cast<double>(min_v),
                static_cast<double>(max_u), static_cast<double>(max_v)};
}

// 8-neighborhood morphological dilation, `rounds` times.
inline Mask dilate(const Mask& m, int rounds = 1) {
  Mask cur = m;
  for (int r = 0; r < rounds; ++r) {
    Mask next = cur;
    for (int v = 0; v < cur.height; ++v) {
      for (int u = 0; u < cur.width; ++u) {
        if (next.at(u, v)) continue;
        for (int dv = -1; dv <= 1 && !next.at(u, v); ++dv) {
          for (int du = -1; du <= 1; ++du) {
            const int uu = u + du, vv = v + dv;
            if (uu >= 0 && uu < cur.width && vv >= 0 && vv < cur.height && cur.at(uu, vv)) {
              next.at(u, v) = 1;
              break;
            }
          }
        }
      }
    }
    cur = std::move(next);
  }
  return cur;
}

}  // namespace groundcast
