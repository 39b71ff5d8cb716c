#pragma once

// The executable surface: dataset rendering, the pose-error ablation grid,
// the end-to-end footprint pipeline, and SVG chart emission. Every stage is
// a pure function of (scene, mesh, options, seed), writes to distinct paths,
// and formats numbers deterministically, so reruns are byte-identical.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "groundcast/common.hpp"
#include "groundcast/footprint.hpp"
#include "groundcast/geometry.hpp"
#include "groundcast/io.hpp"
#include "groundcast/mesh.hpp"
#include "groundcast/metrics.hpp"
#include "groundcast/pose_opt.hpp"
#include "groundcast/render.hpp"
#include "groundcast/rng.hpp"
#include "groundcast/safety.hpp"
#include "groundcast/scene.hpp"

namespace groundcast {

inline const char* mode_name(RefineMode mode) {
  return mode == RefineMode::six_dof ? "default" : "plane";
}

inline RefineMode parse_mode(const std::string& name) {
  if (name == "default") return RefineMode::six_dof;
  if (name == "plane") return RefineMode::plane;
  fail(Err::bad_params, "unknown mode (want default or plane): " + name);
}

// --- Dataset synthesis -----------------------------------------------------

struct DatasetFrame {
  std::string id;
  std::string camera_id;
  RobotPose pose;
};

struct DatasetIndex {
  int spins = 0;
  int frames_per_spin = 0;
  std::vector<RobotPose> robot_poses;  // pose-major: spin-by-spin, then yaw steps
  std::vector<DatasetFrame> frames;    // robot_poses crossed with every camera
};

// Each spin gets its own center drawn from the spin zone; within a spin the
// robot steps through one full revolution at uniform yaw increments.
inline std::vector<RobotPose> sample_spin_poses(const SceneSpec& scene, int spins,
                                                int frames_per_spin, std::uint64_t seed) {
  if (spins <= 0 || frames_per_spin <= 0)
    fail(Err::bad_config, "spins and frames-per-spin must be positive");
  constexpr double kPi = 3.14159265358979323846;
  std::vector<RobotPose> poses;
  poses.reserve(static_cast<std::size_t>(spins) * frames_per_spin);
  for (int s = 0; s < spins; ++s) {
    Rng rng = Rng::stream(seed, 1, static_cast<std::uint64_t>(s));
    const double cx = rng.uniform(scene.spin_zone_min.x, scene.spin_zone_max.x);
    const double cy = rng.uniform(scene.spin_zone_min.y, scene.spin_zone_max.y);
    for (int k = 0; k < frames_per_spin; ++k)
      poses.push_back({cx, cy, normalize_yaw(2.0 * kPi * k / frames_per_spin)});
  }
  return poses;
}

inline DatasetIndex make_dataset_index(const SceneSpec& scene, int spins, int frames_per_spin,
                                       std::uint64_t seed) {
  DatasetIndex index;
  index.spins = spins;
  index.frames_per_spin = frames_per_spin;
  index.robot_poses = sample_spin_poses(scene, spins, frames_per_spin, seed);
  std::size_t i = 0;
  for (const RobotPose& pose : index.robot_poses)
    for (const SceneCamera& cam : scene.cameras)
      index.frames.push_back({frame_name(i++, cam.id), cam.id, pose});
  return index;
}

inline std::string poses_to_json(const DatasetIndex& index) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"spins\": " << index.spins << ",\n";
  out << "  \"frames_per_spin\": " << index.frames_per_spin << ",\n";
  out << "  \"frames\": {\n";
  for (std::size_t i = 0; i < index.frames.size(); ++i) {
    const DatasetFrame& f = index.frames[i];
    out << "    \"" << f.id << "\": {\"camera_id\": \"" << f.camera_id
        << "\", \"x\": " << format_real(f.pose.x) << ", \"y\": " << format_real(f.pose.y)
        << ", \"yaw\": " << format_real(f.pose.yaw) << "}"
        << (i + 1 < index.frames.size() ? "," : "") << "\n";
  }
  out << "  }\n";
  out << "}\n";
  return out.str();
}

// Frame ids are zero-padded, so the JSON object's sorted key order matches
// the original enumeration order. Robot poses are rebuilt assuming the
// standard pose-major, camera-minor layout.
inline DatasetIndex poses_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(Err::parse_error, std::string("poses json: ") + e.what());
  }
  try {
    DatasetIndex index;
    index.spins = j.at("spins").get<int>();
    index.frames_per_spin = j.at("frames_per_spin").get<int>();
    std::vector<std::string> camera_ids;
    for (const auto& [id, jf] : j.at("frames").items()) {
      DatasetFrame f;
      f.id = id;
      f.camera_id = jf.at("camera_id").get<std::string>();
      f.pose = RobotPose{jf.at("x").get<double>(), jf.at("y").get<double>(),
                         jf.at("yaw").get<double>()};
      if (std::find(camera_ids.begin(), camera_ids.end(), f.camera_id) == camera_ids.end())
        camera_ids.push_back(f.camera_id);
      index.frames.push_back(std::move(f));
    }
    if (!camera_ids.empty())
      for (std::size_t i = 0; i < index.frames.size(); i += camera_ids.size())
        index.robot_poses.push_back(index.frames[i].pose);
    return index;
  } catch (const nlohmann::json::exception& e) {
    fail(Err::schema_error, std::string("poses json: ") + e.what());
  }
}

inline RenderedFrame render_dataset_frame(const TriMesh& mesh, const SceneCamera& cam,
                                          const RobotPose& pose) {
  RenderedFrame frame = rasterize(place_robot(mesh, pose), cam.camera());
  frame.robot_pose = pose;
  frame.camera_id = cam.id;
  return frame;
}

// Renders every dataset frame to out_dir/frames (PPM) and out_dir/masks
// (PGM) and writes poses.json alongside.
inline DatasetIndex render_dataset(const SceneSpec& scene, const TriMesh& mesh, int spins,
                                   int frames_per_spin, std::uint64_t seed,
                                   const std::string& out_dir) {
  scene.validate();
  const DatasetIndex index = make_dataset_index(scene, spins, frames_per_spin, seed);
  ensure_dir(out_dir + "/frames");
  ensure_dir(out_dir + "/masks");
  for (const DatasetFrame& f : index.frames) {
    const RenderedFrame frame = render_dataset_frame(mesh, scene.camera_by_id(f.camera_id), f.pose);
    write_ppm(out_dir + "/frames/" + f.id + ".ppm", frame.image);
    write_pgm(out_dir + "/masks/" + f.id + ".pgm", frame.mask);
  }
  write_file(out_dir + "/poses.json", poses_to_json(index));
  return index;
}

// --- Ablation harness ------------------------------------------------------

inline CameraIntrinsics scale_intrinsics(const CameraIntrinsics& intr, int width, int height) {
  const double sx = static_cast<double>(width) / intr.width;
  const double sy = static_cast<double>(height) / intr.height;
  return CameraIntrinsics{intr.fx * sx, intr.fy * sy, intr.cx * sx, intr.cy * sy, width, height};
}

// Seeded 20% hold-out: flags[i] set marks robot pose i as evaluation-only.
inline std::vector<char> holdout_eval(std::size_t n, std::uint64_t seed) {
  if (n < 2) fail(Err::bad_config, "need at least two robot poses to carve out an eval split");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = Rng::stream(seed, 2, 0);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
  const std::size_t n_eval = std::max<std::size_t>(1, n / 5);
  std::vector<char> flags(n, 0);
  for (std::size_t i = 0; i < n_eval; ++i) flags[order[i]] = 1;
  return flags;
}

inline const std::vector<std::string>& ablation_header() {
  static const std::vector<std::string> header = {
      "mode", "error_cm", "trial", "psnr_db", "ssim", "pos_err_before_m", "pos_err_after_m"};
  return header;
}

struct AblationOptions {
  std::vector<double> errors_cm = {1.0, 2.0, 5.0, 10.0};
  std::vector<RefineMode> modes = {RefineMode::six_dof, RefineMode::plane};
  int trials = 3;
  int spins = 1;
  int frames_per_spin = 10;
  std::uint64_t seed = 1;
  int render_width = 128;
  int render_height = 128;
  RefineConfig refine;

  void validate() const {
    if (errors_cm.empty() || modes.empty()) fail(Err::bad_config, "ablation grid is empty");
    for (double e : errors_cm)
      if (!(e >= 0.0)) fail(Err::bad_config, "error magnitudes must be non-negative");
    if (trials <= 0) fail(Err::bad_config, "trials must be positive");
    if (render_width < 16 || render_height < 16)
      fail(Err::bad_config, "ablation render resolution too small");
    refine.validate();
  }
};

// For each (mode, error, trial): perturb every camera by the error magnitude
// (translation-only, one RNG stream per (trial, camera)), refine against the
// training masks, then score renders through the refined pose on the held-out
// poses. Rows come out per trial plus one "avg" row per cell; the same
// perturbation stream is reused across modes and magnitudes so cells are
// paired comparisons.
inline CsvTable run_ablation(const SceneSpec& scene, const TriMesh& mesh,
                             const AblationOptions& opts) {
  scene.validate();
  opts.validate();
  const std::vector<RobotPose> poses =
      sample_spin_poses(scene, opts.spins, opts.frames_per_spin, opts.seed);
  const std::vector<char> is_eval = holdout_eval(poses.size(), opts.seed);

  struct CameraSetup {
    const SceneCamera* cam = nullptr;
    CameraIntrinsics intr{1, 1, 0, 0, 1, 1};
    std::vector<ObservedFrame> train;
    std::vector<RobotPose> eval_poses;
    std::vector<Image> eval_gt;
  };
  std::vector<CameraSetup> setups;
  for (const SceneCamera& cam : scene.cameras) {
    CameraSetup setup;
    setup.cam = &cam;
    setup.intr = scale_intrinsics(cam.intrinsics, opts.render_width, opts.render_height);
    const Camera truth{setup.intr, cam.pose};
    for (std::size_t i = 0; i < poses.size(); ++i) {
      const RenderedFrame frame = rasterize(place_robot(mesh, poses[i]), truth);
      if (is_eval[i]) {
        setup.eval_poses.push_back(poses[i]);
        setup.eval_gt.push_back(frame.image);
      } else {
        setup.train.emplace_back(frame.mask, poses[i]);
      }
    }
    setups.push_back(std::move(setup));
  }

  CsvTable table;
  table.header = ablation_header();
  for (const RefineMode mode : opts.modes) {
    for (const double error_cm : opts.errors_cm) {
      double cell_psnr = 0, cell_ssim = 0, cell_before = 0, cell_after = 0;
      for (int trial = 0; trial < opts.trials; ++trial) {
        double t_psnr = 0, t_ssim = 0, t_before = 0, t_after = 0;
        std::size_t n_scores = 0;
        for (std::size_t ci = 0; ci < setups.size(); ++ci) {
          const CameraSetup& setup = setups[ci];
          Rng rng = Rng::stream(opts.seed, static_cast<std::uint64_t>(trial), ci);
          const Pose3 perturbed =
              perturb_pose(setup.cam->pose, error_cm / 100.0, 0.0, rng);
          const RefineResult res =
              refine(perturbed, mode, opts.refine, setup.intr, setup.train, mesh,
                     setup.cam->mount_height, &setup.cam->pose);
          t_before += res.position_error_before;
          t_after += res.position_error_after;
          const Camera refined_cam{setup.intr, res.refined};
          for (std::size_t e = 0; e < setup.eval_poses.size(); ++e) {
            const RenderedFrame got = rasterize(place_robot(mesh, setup.eval_poses[e]), refined_cam);
            t_psnr += psnr(got.image, setup.eval_gt[e]);
            t_ssim += ssim(got.image, setup.eval_gt[e]);
            ++n_scores;
          }
        }
        t_before /= static_cast<double>(setups.size());
        t_after /= static_cast<double>(setups.size());
        t_psnr /= static_cast<double>(n_scores);
        t_ssim /= static_cast<double>(n_scores);
        table.rows.push_back({mode_name(mode), format_real(error_cm), std::to_string(trial),
                              format_real(t_psnr), format_real(t_ssim), format_real(t_before),
                              format_real(t_after)});
        cell_psnr += t_psnr;
        cell_ssim += t_ssim;
        cell_before += t_before;
        cell_after += t_after;
      }
      const double nt = opts.trials;
      table.rows.push_back({mode_name(mode), format_real(error_cm), "avg",
                            format_real(cell_psnr / nt), format_real(cell_ssim / nt),
                            format_real(cell_before / nt), format_real(cell_after / nt)});
    }
  }
  return table;
}

// --- Full pipeline ---------------------------------------------------------

struct PipelineOptions {
  int spins = 2;
  int frames_per_spin = 50;
  std::uint64_t seed = 1;
  double grid_spacing = 0.05;
  int yaw_samples = 8;
  double overhead_height = 20.0;
  int overhead_resolution = 512;
  double overhead_half_extent = 0.512;
  double simplify_eps = 0.002;
};

struct PipelineSummary {
  int frames = 0;
  int footprint_vertices = 0;
  double footprint_area = 0.0;
  double mean_ccr = 0.0;
  double min_ccr = 1.0;
  double mean_iou = 0.0;
  int empty_labels = 0;
  struct GainRow {
    std::string camera_id;
    double gain = 0.0;
    bool infinite = false;
    int footprint_safe = 0;
    int bbox_safe = 0;
    int out_of_view = 0;
  };
  std::vector<GainRow> gains;
  std::string summary_csv;  // exact bytes written to out_dir/summary.csv
};

inline std::string footprint_to_json(const Footprint& fp) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"source\": \""
      << (fp.source == FootprintSource::overhead_silhouette ? "overhead_silhouette" : "mesh_oracle")
      << "\",\n";
  out << "  \"area_m2\": " << format_real(polygon_area(fp.polygon)) << ",\n";
  out << "  \"vertices\": [";
  const auto& verts = fp.polygon.vertices();
  for (std::size_t i = 0; i < verts.size(); ++i)
    out << (i ? ", " : "") << "[" << format_real(verts[i].x) << ", " << format_real(verts[i].y)
        << "]";
  out << "]\n";
  out << "}\n";
  return out.str();
}

inline Footprint footprint_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(Err::parse_error, std::string("footprint json: ") + e.what());
  }
  try {
    std::vector<Vec2> verts;
    for (const auto& jv : j.at("vertices"))
      verts.push_back({jv.at(0).get<double>(), jv.at(1).get<double>()});
    const std::string source = j.at("source").get<std::string>();
    if (source != "overhead_silhouette" && source != "mesh_oracle")
      fail(Err::schema_error, "footprint json: unknown source " + source);
    return Footprint{Polygon2D::from_points(verts, PolyFrame::world_meters),
                     source == "overhead_silhouette" ? FootprintSource::overhead_silhouette
                                                     : FootprintSource::mesh_oracle};
  } catch (const nlohmann::json::exception& e) {
    fail(Err::schema_error, std::string("footprint json: ") + e.what());
  }
}

// Looks straight down at the robot parked at `pose` and estimates the
// footprint from the silhouette contour.
inline Footprint estimate_footprint_overhead(const TriMesh& mesh, const RobotPose& pose,
                                             double ground_height, const PipelineOptions& opts) {
  const Camera overhead =
      synth_overhead_camera({pose.x, pose.y}, opts.overhead_height, opts.overhead_resolution,
                            opts.overhead_half_extent);
  RenderedFrame frame = rasterize(place_robot(mesh, pose), overhead);
  frame.robot_pose = pose;
  frame.camera_id = "overhead";
  return footprint_from_overhead(frame, overhead, GroundPlane{ground_height}, opts.simplify_eps);
}

// Dataset -> overhead footprint estimate -> per-frame labels scored against
// the mesh-derived oracle -> per-camera safety sweeps -> summary.csv.
inline PipelineSummary run_full_pipeline(const SceneSpec& scene, const TriMesh& mesh,
                                         const PipelineOptions& opts, const std::string& out_dir) {
  scene.validate();
  if (!(opts.grid_spacing > 0.0) || opts.yaw_samples <= 0)
    fail(Err::bad_config, "grid spacing and yaw samples must be positive");

  const DatasetIndex index =
      make_dataset_index(scene, opts.spins, opts.frames_per_spin, opts.seed);
  ensure_dir(out_dir + "/frames");
  ensure_dir(out_dir + "/masks");
  ensure_dir(out_dir + "/labels");
  write_file(out_dir + "/poses.json", poses_to_json(index));

  const Footprint fp =
      estimate_footprint_overhead(mesh, index.robot_poses.front(), scene.ground_height, opts);
  write_file(out_dir + "/footprint.json", footprint_to_json(fp));
  const Footprint oracle = footprint_oracle_from_mesh(mesh);

  std::map<std::string, Camera> cams;
  for (const SceneCamera& c : scene.cameras) cams.emplace(c.id, c.camera());

  PipelineSummary summary;
  std::vector<std::vector<std::string>> label_rows;
  double sum_ccr = 0, sum_iou = 0;
  for (std::size_t i = 0; i < index.frames.size(); ++i) {
    const DatasetFrame& f = index.frames[i];
    const SceneCamera& cam = scene.camera_by_id(f.camera_id);
    const RenderedFrame frame = render_dataset_frame(mesh, cam, f.pose);
    write_ppm(out_dir + "/frames/" + f.id + ".ppm", frame.image);
    write_pgm(out_dir + "/masks/" + f.id + ".pgm", frame.mask);

    const FrameLabel label = label_frame(fp, frame, cams, i);
    write_pgm(out_dir + "/labels/" + f.id + ".pgm", label.footprint_mask);
    const Mask oracle_mask =
        polygon_to_mask(project_footprint(oracle, f.pose, cam.camera()), frame.mask.width,
                        frame.mask.height);
    const double c = ccr(label.footprint_mask, oracle_mask);
    const double j = mask_iou(label.footprint_mask, oracle_mask);
    label_rows.push_back({f.id, format_real(c), format_real(j)});
    sum_ccr += c;
    sum_iou += j;
    summary.min_ccr = std::min(summary.min_ccr, c);
    summary.empty_labels += label.footprint_mask.empty() ? 1 : 0;
  }
  summary.frames = static_cast<int>(index.frames.size());
  summary.mean_ccr = sum_ccr / summary.frames;
  summary.mean_iou = sum_iou / summary.frames;
  summary.footprint_vertices = static_cast<int>(fp.polygon.size());
  summary.footprint_area = polygon_area(fp.polygon);
  write_file(out_dir + "/labels.csv", encode_csv({"frame_id", "ccr", "iou"}, label_rows));

  for (const SceneCamera& cam : scene.cameras) {
    const SafetyReport report =
        area_gain(fp, mesh, cam.camera(), scene.region_for(cam.id), opts.grid_spacing,
                  opts.yaw_samples, scene.floor_min, scene.floor_max);
    summary.gains.push_back({cam.id, report.gain, report.gain_infinite, report.footprint_safe,
                             report.bbox_safe, report.out_of_view});
  }

  std::vector<std::vector<std::string>> rows;
  rows.push_back({"dataset", "frames", std::to_string(summary.frames)});
  rows.push_back({"dataset", "spins", std::to_string(opts.spins)});
  rows.push_back({"dataset", "frames_per_spin", std::to_string(opts.frames_per_spin)});
  rows.push_back({"footprint", "source", "overhead_silhouette"});
  rows.push_back({"footprint", "vertices", std::to_string(summary.footprint_vertices)});
  rows.push_back({"footprint", "area_m2", format_real(summary.footprint_area)});
  rows.push_back({"labels", "mean_ccr", format_real(summary.mean_ccr)});
  rows.push_back({"labels", "min_ccr", format_real(summary.min_ccr)});
  rows.push_back({"labels", "mean_iou", format_real(summary.mean_iou)});
  rows.push_back({"labels", "empty_masks", std::to_string(summary.empty_labels)});
  for (const auto& g : summary.gains) {
    rows.push_back({"safety", "area_gain_" + g.camera_id, format_real(g.gain)});
    rows.push_back({"safety", "footprint_safe_" + g.camera_id, std::to_string(g.footprint_safe)});
    rows.push_back({"safety", "bbox_safe_" + g.camera_id, std::to_string(g.bbox_safe)});
  }
  summary.summary_csv = encode_csv({"stage", "key", "value"}, rows);
  write_file(out_dir + "/summary.csv", summary.summary_csv);
  return summary;
}

// --- Plot emission ---------------------------------------------------------

struct PlotSeries {
  std::string name;
  std::string color;
  std::vector<Vec2> points;  // already sorted by x
};

inline std::string svg_line_chart(const std::string& title, const std::string& x_label,
                                  const std::string& y_label,
                                  const std::vector<PlotSeries>& series) {
  const double W = 640, H = 480, x0 = 70, y0 = 50, x1 = 610, y1 = 420;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const PlotSeries& s : series) {
    for (const Vec2& p : s.points) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
  }
  if (xmin > xmax) fail(Err::schema_error, "chart has no points");
  if (xmax - xmin < 1e-12) { xmin -= 1.0; xmax += 1.0; }
  if (ymax - ymin < 1e-12) { ymin -= 1.0; ymax += 1.0; }
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;
  const auto px = [&](double x) { return x0 + (x - xmin) / (xmax - xmin) * (x1 - x0); };
  const auto py = [&](double y) { return y1 - (y - ymin) / (ymax - ymin) * (y1 - y0); };
  const auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return std::string(buf);
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  out << "  <rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  out << "  <text x=\"" << W / 2 << "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"17\">" << title << "</text>\n";
  out << "  <line x1=\"" << x0 << "\" y1=\"" << y1 << "\" x2=\"" << x1 << "\" y2=\"" << y1
      << "\" stroke=\"black\"/>\n";
  out << "  <line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1
      << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double fx = xmin + (xmax - xmin) * t / 4.0;
    const double fy = ymin + (ymax - ymin) * t / 4.0;
    out << "  <line x1=\"" << num(px(fx)) << "\" y1=\"" << y1 << "\" x2=\"" << num(px(fx))
        << "\" y2=\"" << y1 + 5 << "\" stroke=\"black\"/>\n";
    out << "  <text x=\"" << num(px(fx)) << "\" y=\"" << y1 + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << num(fx)
        << "</text>\n";
    out << "  <line x1=\"" << x0 - 5 << "\" y1=\"" << num(py(fy)) << "\" x2=\"" << x0 << "\" y2=\""
        << num(py(fy)) << "\" stroke=\"black\"/>\n";
    out << "  <text x=\"" << x0 - 8 << "\" y=\"" << num(py(fy) + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" << num(fy)
        << "</text>\n";
  }
  out << "  <text x=\"" << (x0 + x1) / 2 << "\" y=\"" << H - 10
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" << x_label
      << "</text>\n";
  out << "  <text x=\"18\" y=\"" << (y0 + y1) / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" "
         "transform=\"rotate(-90 18 " << (y0 + y1) / 2 << ")\">" << y_label << "</text>\n";
  for (std::size_t si = 0; si < series.size(); ++si) {
    const PlotSeries& s = series[si];
    out << "  <polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < s.points.size(); ++i)
      out << (i ? " " : "") << num(px(s.points[i].x)) << "," << num(py(s.points[i].y));
    out << "\"/>\n";
    for (const Vec2& p : s.points)
      out << "  <circle cx=\"" << num(px(p.x)) << "\" cy=\"" << num(py(p.y)) << "\" r=\"3\" fill=\""
          << s.color << "\"/>\n";
    const double ly = y0 + 16.0 + 18.0 * static_cast<double>(si);
    out << "  <line x1=\"" << x1 - 120 << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << x1 - 96
        << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
    out << "  <text x=\"" << x1 - 90 << "\" y=\"" << num(ly)
        << "\" font-family=\"sans-serif\" font-size=\"13\">" << s.name << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

// Turns an ablation table into two charts: PSNR vs error magnitude and final
// position error vs error magnitude, one series per mode. Prefers the "avg"
// rows; falls back to averaging trial rows when a table has none.
inline std::vector<std::string> emit_plots(const CsvTable& table, const std::string& out_dir) {
  if (table.header != ablation_header())
    fail(Err::schema_error, "ablation csv header does not match the documented schema");
  if (table.rows.empty()) fail(Err::schema_error, "ablation csv has no data rows");

  const auto cell = [](const std::string& text) {
    try {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return v;
    } catch (const std::exception&) {
      fail(Err::schema_error, "ablation csv: bad number: " + text);
    }
  };

  struct Acc {
    double psnr = 0, pos = 0;
    int n = 0;
  };
  std::map<std::string, std::map<double, Acc>> grouped;
  for (int pass = 0; pass < 2; ++pass) {
    const bool want_avg = pass == 0;
    for (const auto& row : table.rows) {
      if ((row[2] == "avg") != want_avg) continue;
      Acc& acc = grouped[row[0]][cell(row[1])];
      acc.psnr += cell(row[3]);
      acc.pos += cell(row[6]);
      ++acc.n;
    }
    if (!grouped.empty()) break;  // had avg rows; trial rows not needed
  }
  if (grouped.empty()) fail(Err::schema_error, "ablation csv has no usable rows");

  const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  std::vector<PlotSeries> psnr_series, pos_series;
  std::size_t color = 0;
  for (const auto& [mode, by_error] : grouped) {
    PlotSeries ps{mode, palette[color % 4], {}};
    PlotSeries es{mode, palette[color % 4], {}};
    for (const auto& [err, acc] : by_error) {
      ps.points.push_back({err, acc.psnr / acc.n});
      es.points.push_back({err, acc.pos / acc.n});
    }
    psnr_series.push_back(std::move(ps));
    pos_series.push_back(std::move(es));
    ++color;
  }

  ensure_dir(out_dir);
  const std::string psnr_path = out_dir + "/psnr_vs_error.svg";
  const std::string pos_path = out_dir + "/pos_error_vs_error.svg";
  write_file(psnr_path, svg_line_chart("Render quality vs. pose error", "pose error (cm)",
                                       "PSNR (dB)", psnr_series));
  write_file(pos_path, svg_line_chart("Refined position error vs. pose error", "pose error (cm)",
                                      "final position error (m)", pos_series));
  return {psnr_path, pos_path};
}

}  // namespace groundcast
