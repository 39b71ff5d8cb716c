#pragma once

// Camera model, rays, ground plane and 2D polygon primitives.
//
// Conventions, stated once and inherited everywhere:
//   - World frame is right-handed, z up, ground plane at z = 0.
//   - Pose3 stores world-to-camera: x_cam = R * x_world + t. The camera looks
//     along its +z axis; image origin is top-left, u grows right, v grows down.
//   - Polygon2D is counter-clockwise in the sense of a positive shoelace sum
//     in its stored coordinates (for image polygons, v down, that is visually
//     clockwise; the sign convention is what matters).
//   - Boundary points count as inside for all containment tests.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "groundcast/common.hpp"

namespace groundcast {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::sqrt(dot(a, a)); }

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
  friend Vec3 operator-(Vec3 a) { return {-a.x, -a.y, -a.z}; }
  friend bool operator==(Vec3 a, Vec3 b) { return a.x == b.x && a.y == b.y && a.z == b.z; }
};

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(Vec3 a) {
  const double n = norm(a);
  if (n <= 0.0) fail(Err::degenerate, "cannot normalize zero vector");
  return (1.0 / n) * a;
}
inline bool finite(Vec3 a) {
  return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

// Row-major 3x3 matrix.
struct Mat3 {
  double m[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

  static Mat3 identity() { return {}; }

  static Mat3 rot_x(double a) {
    const double c = std::cos(a), s = std::sin(a);
    return {{{1, 0, 0}, {0, c, -s}, {0, s, c}}};
  }
  static Mat3 rot_y(double a) {
    const double c = std::cos(a), s = std::sin(a);
    return {{{c, 0, s}, {0, 1, 0}, {-s, 0, c}}};
  }
  static Mat3 rot_z(double a) {
    const double c = std::cos(a), s = std::sin(a);
    return {{{c, -s, 0}, {s, c, 0}, {0, 0, 1}}};
  }

  // Rodrigues rotation about a unit axis.
  static Mat3 axis_angle(Vec3 axis, double angle) {
    const Vec3 u = normalized(axis);
    const double c = std::cos(angle), s = std::sin(angle), t = 1.0 - c;
    return {{{t * u.x * u.x + c, t * u.x * u.y - s * u.z, t * u.x * u.z + s * u.y},
             {t * u.x * u.y + s * u.z, t * u.y * u.y + c, t * u.y * u.z - s * u.x},
             {t * u.x * u.z - s * u.y, t * u.y * u.z + s * u.x, t * u.z * u.z + c}}};
  }

  Mat3 transposed() const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r.m[i][j] = m[j][i];
    return r;
  }

  double det() const {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  }

  friend Vec3 operator*(const Mat3& a, Vec3 v) {
    return {a.m[0][0] * v.x + a.m[0][1] * v.y + a.m[0][2] * v.z,
            a.m[1][0] * v.x + a.m[1][1] * v.y + a.m[1][2] * v.z,
            a.m[2][0] * v.x + a.m[2][1] * v.y + a.m[2][2] * v.z};
  }

  friend Mat3 operator*(const Mat3& a, const Mat3& b) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        r.m[i][j] = a.m[i][0] * b.m[0][j] + a.m[i][1] * b.m[1][j] + a.m[i][2] * b.m[2][j];
      }
    return r;
  }
};

// Largest |(R^T R - I)_ij|; zero for an exact rotation.
inline double orthonormality_defect(const Mat3& r) {
  const Mat3 g = r.transposed() * r;
  double worst = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double target = (i == j) ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(g.m[i][j] - target));
    }
  return worst;
}

struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  void validate() const {
    if (!(fx > 0.0) || !(fy > 0.0)) fail(Err::bad_params, "focal lengths must be positive");
    if (width <= 0 || height <= 0) fail(Err::bad_params, "image dimensions must be positive");
    if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height))
      fail(Err::bad_params, "principal point outside image");
  }

  friend bool operator==(const CameraIntrinsics&, const CameraIntrinsics&) = default;
};

// World-to-camera rigid transform: x_cam = R * x_world + t.
struct Pose3 {
  Mat3 R;
  Vec3 t;

  // Camera center in world coordinates.
  Vec3 camera_center() const { return -(R.transposed() * t); }

  void validate() const {
    if (orthonormality_defect(R) > 1e-9 || R.det() <= 0.0)
      fail(Err::bad_params, "pose rotation not orthonormal");
    if (!finite(t)) fail(Err::bad_params, "pose translation not finite");
  }

  friend bool operator==(const Pose3& a, const Pose3& b) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (a.R.m[i][j] != b.R.m[i][j]) return false;
    return a.t == b.t;
  }
};

struct Camera {
  CameraIntrinsics intrinsics;
  Pose3 pose;

  void validate() const {
    intrinsics.validate();
    pose.validate();
  }

  friend bool operator==(const Camera&, const Camera&) = default;
};

struct Ray {
  Vec3 origin;
  Vec3 direction;  // unit norm

  void validate() const {
    if (std::abs(norm(direction) - 1.0) > 1e-9) fail(Err::bad_params, "ray direction not unit");
  }
};

// Horizontal plane z = height.
struct GroundPlane {
  double height = 0.0;
};

enum class PolyFrame { world_meters, image_pixels };

// Simple polygon, counter-clockwise (positive shoelace sum) in its frame.
// Construction normalizes orientation and rejects degenerate input; callers
// are responsible for keeping polygons simple (is_simple below is the
// diagnostic used by the tests).
class Polygon2D {
 public:
  static Polygon2D from_points(std::vector<Vec2> pts, PolyFrame frame) {
    if (pts.size() < 3) fail(Err::degenerate, "polygon needs at least 3 vertices");
    double twice_area = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Vec2 a = pts[i];
      const Vec2 b = pts[(i + 1) % pts.size()];
      if (!std::isfinite(a.x) || !std::isfinite(a.y))
        fail(Err::bad_params, "polygon vertex not finite");
      twice_area += cross(a, b);
    }
    if (twice_area == 0.0) fail(Err::degenerate, "polygon has zero area");
    if (twice_area < 0.0) std::reverse(pts.begin(), pts.end());
    Polygon2D p;
    p.verts_ = std::move(pts);
    p.frame_ = frame;
    return p;
  }

  const std::vector<Vec2>& vertices() const { return verts_; }
  PolyFrame frame() const { return frame_; }
  std::size_t size() const { return verts_.size(); }

 private:
  Polygon2D() = default;
  std::vector<Vec2> verts_;
  PolyFrame frame_ = PolyFrame::world_meters;
};

// Axis-aligned bounding box in pixel coordinates.
struct AABB2D {
  double min_u = 0.0;
  double min_v = 0.0;
  double max_u = 0.0;
  double max_v = 0.0;

  void validate() const {
    if (min_u > max_u || min_v > max_v) fail(Err::bad_params, "inverted AABB");
  }

  friend bool operator==(const AABB2D&, const AABB2D&) = default;
};

// ---------------------------------------------------------------------------
// Projection and rays

// World-to-camera pose looking from eye toward target. up breaks the roll
// ambiguity: its component orthogonal to the view direction maps to image
// "up" (decreasing v). Throws when the view direction is parallel to up.
inline Pose3 look_at_pose(Vec3 eye, Vec3 target, Vec3 up = {0.0, 0.0, 1.0}) {
  const Vec3 f = normalized(target - eye);
  const Vec3 side = cross(f, up);
  if (norm(side) < 1e-9) fail(Err::degenerate, "look direction parallel to up");
  const Vec3 x = normalized(side);
  const Vec3 y = cross(f, x);  // unit because x is orthogonal to f
  const Mat3 R{{{x.x, x.y, x.z}, {y.x, y.y, y.z}, {f.x, f.y, f.z}}};
  return Pose3{R, -(R * eye)};
}

inline std::optional<Vec2> project_point(const Vec3& p, const Camera& cam) {
  const Vec3 pc = cam.pose.R * p + cam.pose.t;
  if (pc.z <= 1e-9) return std::nullopt;  // at or behind the camera plane
  return Vec2{cam.intrinsics.fx * pc.x / pc.z + cam.intrinsics.cx,
              cam.intrinsics.fy * pc.y / pc.z + cam.intrinsics.cy};
}

// Pixel may lie outside the image bounds; that is allowed.
inline Ray unproject_pixel(double u, double v, const Camera& cam) {
  const CameraIntrinsics& k = cam.intrinsics;
  const Vec3 dir_cam = normalized({(u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0});
  return Ray{cam.pose.camera_center(), cam.pose.R.transposed() * dir_cam};
}

inline std::optional<Vec3> ray_plane_intersect(const Ray& r, const GroundPlane& g) {
  if (std::abs(r.direction.z) < 1e-12) return std::nullopt;  // parallel
  const double s = (g.height - r.origin.z) / r.direction.z;
  if (s <= 1e-9) return std::nullopt;  // behind the origin
  // z pinned to the plane height exactly.
  return Vec3{r.origin.x + s * r.direction.x, r.origin.y + s * r.direction.y, g.height};
}

// ---------------------------------------------------------------------------
// Polygon operations

inline double shoelace_sum(std::span<const Vec2> pts) {
  double acc = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    acc += cross(pts[i], pts[(i + 1) % pts.size()]);
  }
  return acc;
}

inline double polygon_area(const Polygon2D& p) {
  return std::abs(shoelace_sum(p.vertices())) * 0.5;
}

inline double orient2d(Vec2 a, Vec2 b, Vec2 c) { return cross(b - a, c - a); }

// Monotone chain; collinear boundary points dropped. Throws degenerate when
// all points are collinear.
inline Polygon2D convex_hull(std::span<const Vec2> points,
                             PolyFrame frame = PolyFrame::world_meters) {
  if (points.size() < 3) fail(Err::degenerate, "hull needs at least 3 points");
  std::vector<Vec2> p(points.begin(), points.end());
  std::sort(p.begin(), p.end(), [](Vec2 a, Vec2 b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  p.erase(std::unique(p.begin(), p.end()), p.end());

  const auto build = [&p](std::vector<Vec2>& out, bool upper) {
    for (std::size_t idx = 0; idx < p.size(); ++idx) {
      const Vec2 q = upper ? p[p.size() - 1 - idx] : p[idx];
      while (out.size() >= 2 && orient2d(out[out.size() - 2], out.back(), q) <= 0.0) {
        out.pop_back();
      }
      out.push_back(q);
    }
  };

  std::vector<Vec2> lower, upper;
  build(lower, false);
  build(upper, true);
  lower.pop_back();
  upper.pop_back();
  lower.insert(lower.end(), upper.begin(), upper.end());
  if (lower.size() < 3) fail(Err::degenerate, "all points collinear");
  return Polygon2D::from_points(std::move(lower), frame);
}

inline bool point_on_segment(Vec2 q, Vec2 a, Vec2 b) {
  if (orient2d(a, b, q) != 0.0) return false;
  return q.x >= std::min(a.x, b.x) && q.x <= std::max(a.x, b.x) &&
         q.y >= std::min(a.y, b.y) && q.y <= std::max(a.y, b.y);
}

// Even-odd rule; boundary points count as inside.
inline bool point_in_polygon(Vec2 q, const Polygon2D& poly) {
  const auto& v = poly.vertices();
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (point_on_segment(q, v[i], v[(i + 1) % n])) return true;
  }
  bool inside = false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = v[i];
    const Vec2 b = v[(i + 1) % n];
    if ((a.y > q.y) != (b.y > q.y)) {
      const double x_int = a.x + (q.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (q.x < x_int) inside = !inside;
    }
  }
  return inside;
}

// True when the open interiors cross at a single point; touching endpoints
// and collinear overlap do not count.
inline bool segments_properly_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const double d1 = orient2d(c, d, a);
  const double d2 = orient2d(c, d, b);
  const double d3 = orient2d(a, b, c);
  const double d4 = orient2d(a, b, d);
  const bool ab_straddles = (d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0);
  const bool cd_straddles = (d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0);
  return ab_straddles && cd_straddles;
}

// True iff every inner vertex lies inside the container and no inner edge
// properly crosses a container edge. Correct for concave containers.
inline bool polygon_contains_polygon(const Polygon2D& inner, const Polygon2D& container) {
  if (inner.frame() != container.frame())
    fail(Err::frame_mismatch, "containment across polygon frames");
  for (const Vec2& v : inner.vertices()) {
    if (!point_in_polygon(v, container)) return false;
  }
  const auto& iv = inner.vertices();
  const auto& cv = container.vertices();
  for (std::size_t i = 0; i < iv.size(); ++i) {
    const Vec2 a = iv[i];
    const Vec2 b = iv[(i + 1) % iv.size()];
    for (std::size_t j = 0; j < cv.size(); ++j) {
      if (segments_properly_intersect(a, b, cv[j], cv[(j + 1) % cv.size()])) return false;
    }
  }
  return true;
}

// O(n^2) diagnostic used by tests and input validation paths.
inline bool polygon_is_simple(const Polygon2D& poly) {
  const auto& v = poly.vertices();
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (segments_properly_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n])) return false;
    }
  }
  return true;
}

namespace detail {

inline double point_segment_distance(Vec2 q, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return norm(q - a);
  const double t = std::clamp(dot(q - a, ab) / len2, 0.0, 1.0);
  return norm(q - (a + t * ab));
}

inline void dp_mark(std::span<const Vec2> pts, std::size_t lo, std::size_t hi, double eps,
                    std::vector<char>& keep) {
  if (hi <= lo + 1) return;
  std::size_t best = lo;
  double best_d = -1.0;
  for (std::size_t i = lo + 1; i < hi; ++i) {
    const double d = point_segment_distance(pts[i], pts[lo], pts[hi]);
    if (d > best_d) {
      best_d = d;
      best = i;
    }
  }
  if (best_d > eps) {
    keep[best] = 1;
    dp_mark(pts, lo, best, eps, keep);
    dp_mark(pts, best, hi, eps, keep);
  }
}

}  // namespace detail

// Douglas-Peucker on a closed ring. Anchors at vertex 0 and the vertex
// farthest from it, chosen independently of eps, which makes the kept set
// shrink monotonically as eps grows. Always returns at least 3 vertices.
inline std::vector<Vec2> douglas_peucker_ring(std::span<const Vec2> ring, double eps) {
  const std::size_t n = ring.size();
  if (n <= 3) return {ring.begin(), ring.end()};

  std::size_t far_idx = 1;
  double far_d = -1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double d = norm(ring[i] - ring[0]);
    if (d > far_d) {
      far_d = d;
      far_idx = i;
    }
  }

  // Unroll the ring into an open chain 0..far..n (index n aliases 0).
  std::vector<Vec2> chain(ring.begin(), ring.end());
  chain.push_back(ring[0]);
  std::vector<char> keep(chain.size(), 0);
  keep[0] = keep[far_idx] = 1;
  detail::dp_mark(chain, 0, far_idx, eps, keep);
  detail::dp_mark(chain, far_idx, chain.size() - 1, eps, keep);

  std::vector<Vec2> out;
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    if (keep[i]) out.push_back(chain[i]);
  }
  if (out.size() < 3) {
    // Keep the point farthest from the anchor chord so the result stays a polygon.
    std::size_t best = 0;
    double best_d = -1.0;
    for (std::size_t i = 1; i < n; ++i) {
      if (i == far_idx) continue;
      const double d = detail::point_segment_distance(ring[i], ring[0], ring[far_idx]);
      if (d > best_d) {
        best_d = d;
        best = i;
      }
    }
    out.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (i == 0 || i == far_idx || i == best) out.push_back(ring[i]);
    }
  }
  return out;
}

}  // namespace groundcast
