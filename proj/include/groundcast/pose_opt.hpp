#pragma once

// Camera-pose refinement by silhouette alignment. A candidate pose is scored
// by rendering the robot (at its known per-frame ground poses) through the
// candidate camera and comparing silhouettes against the observed masks;
// derivative-free Nelder-Mead then minimizes that loss, either over the full
// 6 DoF or constrained to a known mounting plane (fixed height, zero roll).

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "groundcast/common.hpp"
#include "groundcast/geometry.hpp"
#include "groundcast/mesh.hpp"
#include "groundcast/metrics.hpp"
#include "groundcast/render.hpp"
#include "groundcast/rng.hpp"

namespace groundcast {

enum class RefineMode { six_dof, plane };  // six_dof is the default optimizer

// Camera pose as optimizer variables. Values hold the camera center plus
// Z-Y-X (yaw, pitch, roll) Euler angles applied to a canonical orientation
// that looks along world +x with level image rows; positive pitch tilts the
// view downward. six_dof: (x, y, z, yaw, pitch, roll). plane: (x, y, yaw,
// pitch) with z pinned to the mount height and roll structurally zero.
struct PoseParams {
  RefineMode mode = RefineMode::six_dof;
  std::vector<double> values;
  double plane_height = 0.0;  // used by plane mode only

  std::size_t dim() const { return mode == RefineMode::six_dof ? 6 : 4; }

  void validate() const {
    if (values.size() != dim()) fail(Err::bad_params, "pose parameter count does not match mode");
    for (double v : values) {
      if (!std::isfinite(v)) fail(Err::bad_params, "pose parameter not finite");
    }
  }
};

namespace detail {

// Canonical camera->world axes: looking along +x, image right = -y (world),
// image down = -z (world). Columns are (x_cam, y_cam, z_cam).
inline Mat3 canonical_axes() {
  return Mat3{{{0, 0, 1}, {-1, 0, 0}, {0, -1, 0}}};
}

}  // namespace detail

inline Pose3 params_to_pose(const PoseParams& p) {
  p.validate();
  double x, y, z, yaw, pitch, roll;
  if (p.mode == RefineMode::six_dof) {
    x = p.values[0]; y = p.values[1]; z = p.values[2];
    yaw = p.values[3]; pitch = p.values[4]; roll = p.values[5];
  } else {
    x = p.values[0]; y = p.values[1]; z = p.plane_height;
    yaw = p.values[2]; pitch = p.values[3]; roll = 0.0;
  }
  const Mat3 cam_to_world =
      Mat3::rot_z(yaw) * Mat3::rot_y(pitch) * Mat3::rot_x(roll) * detail::canonical_axes();
  const Mat3 R = cam_to_world.transposed();
  return Pose3{R, -(R * Vec3{x, y, z})};
}

inline PoseParams pose_to_params(const Pose3& pose, RefineMode mode, double plane_height = 0.0) {
  const Vec3 c = pose.camera_center();
  // Strip the canonical axes to get the pure Z-Y-X rotation, then read the
  // angles back from its matrix entries.
  const Mat3 m = pose.R.transposed() * detail::canonical_axes().transposed();
  const double yaw = std::atan2(m.m[1][0], m.m[0][0]);
  const double pitch =
      std::atan2(-m.m[2][0], std::sqrt(m.m[0][0] * m.m[0][0] + m.m[1][0] * m.m[1][0]));
  const double roll = std::atan2(m.m[2][1], m.m[2][2]);
  PoseParams p;
  p.mode = mode;
  if (mode == RefineMode::six_dof) {
    p.values = {c.x, c.y, c.z, yaw, pitch, roll};
  } else {
    p.values = {c.x, c.y, yaw, pitch};
    p.plane_height = plane_height;
  }
  return p;
}

struct RefineConfig {
  int max_iters = 300;
  double simplex_tol = 1e-4;        // stop when max-min loss spread drops below
  double initial_step_trans = 0.02;  // meters
  double initial_step_rot = 0.02;    // radians
  int frames_used = 0;               // 0 = use every frame supplied

  void validate() const {
    if (max_iters <= 0 || !(simplex_tol > 0.0) || !(initial_step_trans > 0.0) ||
        !(initial_step_rot > 0.0) || frames_used < 0)
      fail(Err::bad_config, "refine config values must be positive");
  }
};

struct RefineResult {
  Pose3 refined;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  double position_error_before = -1.0;  // meters; negative when no ground truth
  double position_error_after = -1.0;
  int iterations = 0;
  std::vector<double> loss_trace;  // best-so-far per iteration, non-increasing
};

// One scored frame: the silhouette this camera observed, and where the robot
// stood when it was taken.
using ObservedFrame = std::pair<Mask, RobotPose>;

// Mean over frames of (1 - IoU) between the silhouette rendered through the
// candidate pose and the observed mask. Two empty masks count as agreement.
inline double silhouette_loss(const Pose3& candidate, const CameraIntrinsics& intrinsics,
                              const std::vector<ObservedFrame>& frames, const TriMesh& mesh) {
  if (frames.empty()) fail(Err::bad_config, "silhouette loss needs at least one frame");
  Camera cam{intrinsics, candidate};
  double acc = 0.0;
  for (const auto& [observed, robot_pose] : frames) {
    const RenderedFrame rendered = rasterize(place_robot(mesh, robot_pose), cam);
    acc += 1.0 - mask_iou(rendered.mask, observed);
  }
  return acc / static_cast<double>(frames.size());
}

// Exact-magnitude pose noise: the camera center moves by trans_mag along a
// uniformly random direction and the orientation turns by rot_mag about a
// uniformly random axis.
inline Pose3 perturb_pose(const Pose3& p, double trans_mag, double rot_mag, Rng& rng) {
  if (trans_mag < 0.0 || rot_mag < 0.0) fail(Err::bad_params, "perturbation magnitudes");
  if (trans_mag == 0.0 && rot_mag == 0.0) return p;
  const auto unit_vector = [&rng]() {
    for (;;) {
      const Vec3 v{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
      const double n2 = dot(v, v);
      if (n2 > 1e-12 && n2 <= 1.0) return (1.0 / std::sqrt(n2)) * v;
    }
  };
  const Vec3 center = p.camera_center() + trans_mag * unit_vector();
  const Mat3 R = Mat3::axis_angle(unit_vector(), rot_mag) * p.R;
  return Pose3{R, -(R * center)};
}

namespace detail {

struct SimplexVertex {
  PoseParams params;
  double loss = 0.0;
};

}  // namespace detail

// Nelder-Mead over PoseParams (reflection 1, expansion 2, contraction 0.5,
// shrink 0.5). The initial simplex is the start point plus one vertex per
// parameter offset by the configured step. Terminates on the iteration cap
// or when the simplex loss spread falls below simplex_tol.
//
// initial_loss is the loss of the first simplex vertex; in plane mode that
// is the initial pose projected onto the constraint (z = height, roll = 0),
// which is what the optimizer can actually reach. Position errors are
// reported against `truth` when given, using the unprojected initial pose.
inline RefineResult refine(const Pose3& initial, RefineMode mode, const RefineConfig& cfg,
                           const CameraIntrinsics& intrinsics,
                           const std::vector<ObservedFrame>& all_frames, const TriMesh& mesh,
                           double known_height = 0.0, const Pose3* truth = nullptr) {
  cfg.validate();
  if (all_frames.empty()) fail(Err::bad_config, "refine needs at least one frame");
  const std::vector<ObservedFrame> frames(
      all_frames.begin(),
      all_frames.begin() + (cfg.frames_used > 0 && cfg.frames_used < static_cast<int>(all_frames.size())
                                ? cfg.frames_used
                                : all_frames.size()));

  const auto loss_of = [&](const PoseParams& p) {
    return silhouette_loss(params_to_pose(p), intrinsics, frames, mesh);
  };

  const PoseParams start = pose_to_params(initial, mode, known_height);
  const double start_loss = loss_of(start);
  const std::size_t n = start.dim();
  std::vector<detail::SimplexVertex> simplex;
  simplex.push_back({start, start_loss});
  for (std::size_t i = 0; i < n; ++i) {
    PoseParams p = start;
    const bool angular = (mode == RefineMode::six_dof) ? i >= 3 : i >= 2;
    p.values[i] += angular ? cfg.initial_step_rot : cfg.initial_step_trans;
    simplex.push_back({p, loss_of(p)});
  }

  const auto by_loss = [](const detail::SimplexVertex& a, const detail::SimplexVertex& b) {
    return a.loss < b.loss;
  };
  const auto blend = [&](const std::vector<double>& a, const std::vector<double>& b,
                         double w) {
    PoseParams p = start;
    for (std::size_t i = 0; i < n; ++i) p.values[i] = a[i] + w * (b[i] - a[i]);
    return p;
  };

  RefineResult result;
  std::sort(simplex.begin(), simplex.end(), by_loss);
  result.initial_loss = start_loss;
  result.loss_trace.push_back(simplex.front().loss);

  int iter = 0;
  while (iter < cfg.max_iters && simplex.back().loss - simplex.front().loss >= cfg.simplex_tol) {
    ++iter;
    std::vector<double> centroid(n, 0.0);
    for (std::size_t v = 0; v + 1 < simplex.size(); ++v) {
      for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[v].params.values[i];
    }
    for (double& c : centroid) c /= static_cast<double>(n);

    const std::vector<double>& worst = simplex.back().params.values;
    const PoseParams reflected = blend(centroid, worst, -1.0);
    const double f_r = loss_of(reflected);

    if (f_r < simplex.front().loss) {
      const PoseParams expanded = blend(centroid, worst, -2.0);
      const double f_e = loss_of(expanded);
      simplex.back() = f_e < f_r ? detail::SimplexVertex{expanded, f_e}
                                 : detail::SimplexVertex{reflected, f_r};
    } else if (f_r < simplex[simplex.size() - 2].loss) {
      simplex.back() = {reflected, f_r};
    } else if (f_r < simplex.back().loss) {
      const PoseParams outside = blend(centroid, worst, -0.5);
      const double f_c = loss_of(outside);
      if (f_c <= f_r) {
        simplex.back() = {outside, f_c};
      } else {
        for (std::size_t v = 1; v < simplex.size(); ++v) {
          simplex[v].params = blend(simplex.front().params.values, simplex[v].params.values, 0.5);
          simplex[v].loss = loss_of(simplex[v].params);
        }
      }
    } else {
      const PoseParams inside = blend(centroid, worst, 0.5);
      const double f_c = loss_of(inside);
      if (f_c < simplex.back().loss) {
        simplex.back() = {inside, f_c};
      } else {
        for (std::size_t v = 1; v < simplex.size(); ++v) {
          simplex[v].params = blend(simplex.front().params.values, simplex[v].params.values, 0.5);
          simplex[v].loss = loss_of(simplex[v].params);
        }
      }
    }
    std::sort(simplex.begin(), simplex.end(), by_loss);
    result.loss_trace.push_back(simplex.front().loss);
  }

  result.iterations = iter;
  result.refined = params_to_pose(simplex.front().params);
  result.final_loss = simplex.front().loss;
  if (truth != nullptr) {
    result.position_error_before = norm(initial.camera_center() - truth->camera_center());
    result.position_error_after = norm(result.refined.camera_center() - truth->camera_center());
  }
  return result;
}

}  // namespace groundcast
