#pragma once

// Pose safety against an image-plane drivable region, two ways: the
// conventional whole-silhouette bounding box, and the ground footprint
// projected into the image. The footprint hugs the robot's floor contact, so
// it stays inside regions the taller bounding box pokes out of — sweeping a
// floor grid under both rules quantifies how much operating area the
// footprint check reclaims.

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "groundcast/common.hpp"
#include "groundcast/footprint.hpp"
#include "groundcast/geometry.hpp"
#include "groundcast/mesh.hpp"
#include "groundcast/render.hpp"
#include "groundcast/scene.hpp"

namespace groundcast {

enum class SafetyMode { bbox, footprint };

// Pixel padding applied around the silhouette bounding box before the
// containment test. Covers the half-pixel gap between rasterized mask bounds
// and exactly projected polygon vertices, so the projected footprint of an
// in-view robot lands inside its own padded box.
inline constexpr double kBboxPad = 2.0;

struct Trajectory {
  std::vector<RobotPose> poses;

  void validate() const {
    if (poses.empty()) fail(Err::bad_params, "trajectory must have at least one pose");
    for (const RobotPose& p : poses) p.validate();
  }
};

struct PoseSafety {
  RobotPose pose{0, 0, 0};
  bool out_of_view = false;   // empty silhouette: unsafe under both modes
  bool safe_bbox = false;
  bool safe_footprint = false;
  bool premise_holds = false;  // projected footprint inside the padded bbox
};

struct SafetyReport {
  std::vector<PoseSafety> poses;
  int bbox_safe = 0;
  int footprint_safe = 0;
  int out_of_view = 0;
  bool trajectory_safe_bbox = true;
  bool trajectory_safe_footprint = true;
  // Filled by area_gain sweeps: footprint_safe / bbox_safe over in-view grid
  // poses, with the division-by-zero case carried as a flag.
  double gain = 0.0;
  bool gain_infinite = false;
  bool gain_evaluated = false;
};

namespace detail {

inline Polygon2D padded_bbox_polygon(const AABB2D& box, double pad) {
  // The box is in pixel indices; +1 converts the max corner to pixel-area
  // coordinates so the polygon covers the full extent of the boundary pixels.
  const double u0 = box.min_u - pad, v0 = box.min_v - pad;
  const double u1 = box.max_u + 1.0 + pad, v1 = box.max_v + 1.0 + pad;
  return Polygon2D::from_points({{u0, v0}, {u1, v0}, {u1, v1}, {u0, v1}},
                                PolyFrame::image_pixels);
}

}  // namespace detail

// Evaluates one pose under both modes with a single render. Out-of-view
// poses (empty silhouette) are unsafe under both and carry no premise.
inline PoseSafety evaluate_pose(const RobotPose& pose, const Footprint& fp, const TriMesh& mesh,
                                const Camera& cam, const DrivableRegion& region) {
  region.validate();
  PoseSafety result;
  result.pose = pose;
  const RenderedFrame frame = rasterize(place_robot(mesh, pose), cam);
  if (frame.mask.empty()) {
    result.out_of_view = true;
    return result;
  }
  const Polygon2D bbox_poly = detail::padded_bbox_polygon(silhouette_bbox(frame), kBboxPad);
  result.safe_bbox = polygon_contains_polygon(bbox_poly, region.polygon);
  try {
    const Polygon2D fp_poly = project_footprint(fp, pose, cam);
    result.safe_footprint = polygon_contains_polygon(fp_poly, region.polygon);
    result.premise_holds = polygon_contains_polygon(fp_poly, bbox_poly);
  } catch (const Error&) {
    // Footprint corner behind the camera or degenerate projection: treat as
    // not containable, analogous to out-of-view.
    result.safe_footprint = false;
    result.premise_holds = false;
  }
  return result;
}

inline bool check_pose(const RobotPose& pose, const Footprint& fp, const TriMesh& mesh,
                       const Camera& cam, const DrivableRegion& region, SafetyMode mode) {
  const PoseSafety s = evaluate_pose(pose, fp, mesh, cam, region);
  return mode == SafetyMode::bbox ? s.safe_bbox : s.safe_footprint;
}

// Per-pose verdicts under both modes; the trajectory is safe under a mode
// iff every pose is. Errors are tagged with the offending pose index.
inline SafetyReport check_trajectory(const Trajectory& traj, const Footprint& fp,
                                     const TriMesh& mesh, const Camera& cam,
                                     const DrivableRegion& region) {
  if (traj.poses.empty()) fail(Err::bad_params, "trajectory must have at least one pose");
  SafetyReport report;
  for (std::size_t i = 0; i < traj.poses.size(); ++i) {
    PoseSafety s;
    try {
      traj.poses[i].validate();
      s = evaluate_pose(traj.poses[i], fp, mesh, cam, region);
    } catch (const Error& e) {
      fail(e.code(), "pose " + std::to_string(i) + ": " + e.what());
    }
    report.bbox_safe += s.safe_bbox ? 1 : 0;
    report.footprint_safe += s.safe_footprint ? 1 : 0;
    report.out_of_view += s.out_of_view ? 1 : 0;
    report.trajectory_safe_bbox = report.trajectory_safe_bbox && s.safe_bbox;
    report.trajectory_safe_footprint = report.trajectory_safe_footprint && s.safe_footprint;
    report.poses.push_back(s);
  }
  return report;
}

// Sweeps robot poses over a floor grid crossed with uniformly spaced yaws
// and counts poses each mode accepts. Out-of-view poses are excluded from
// both sides of the ratio.
inline SafetyReport area_gain(const Footprint& fp, const TriMesh& mesh, const Camera& cam,
                              const DrivableRegion& region, double grid_spacing, int yaw_samples,
                              const Vec2& floor_min, const Vec2& floor_max) {
  if (!(grid_spacing > 0.0) || yaw_samples <= 0 || !(floor_min.x < floor_max.x) ||
      !(floor_min.y < floor_max.y))
    fail(Err::bad_params, "area gain needs positive spacing, yaws, and floor extent");
  SafetyReport report;
  constexpr double kPi = 3.14159265358979323846;
  const int nx = static_cast<int>(std::floor((floor_max.x - floor_min.x) / grid_spacing)) + 1;
  const int ny = static_cast<int>(std::floor((floor_max.y - floor_min.y) / grid_spacing)) + 1;
  for (int ix = 0; ix < nx; ++ix) {
    for (int iy = 0; iy < ny; ++iy) {
      for (int k = 0; k < yaw_samples; ++k) {
        const RobotPose pose{floor_min.x + ix * grid_spacing, floor_min.y + iy * grid_spacing,
                             normalize_yaw(2.0 * kPi * k / yaw_samples)};
        const PoseSafety s = evaluate_pose(pose, fp, mesh, cam, region);
        report.bbox_safe += s.safe_bbox ? 1 : 0;
        report.footprint_safe += s.safe_footprint ? 1 : 0;
        report.out_of_view += s.out_of_view ? 1 : 0;
        report.trajectory_safe_bbox = report.trajectory_safe_bbox && s.safe_bbox;
        report.trajectory_safe_footprint = report.trajectory_safe_footprint && s.safe_footprint;
        report.poses.push_back(s);
      }
    }
  }
  report.gain_evaluated = true;
  if (report.bbox_safe == 0) {
    report.gain_infinite = true;
    report.gain = std::numeric_limits<double>::infinity();
  } else {
    report.gain = static_cast<double>(report.footprint_safe) / report.bbox_safe;
  }
  return report;
}

}  // namespace groundcast
