// Command-line frontend. Every verb is a thin wrapper over the library: load
// the scene, run one stage, write files under --out. Exit codes: 0 success,
// 1 usage error, 2 pipeline/runtime failure.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "groundcast/footprint.hpp"
#include "groundcast/io.hpp"
#include "groundcast/mesh.hpp"
#include "groundcast/metrics.hpp"
#include "groundcast/pipeline.hpp"
#include "groundcast/pose_opt.hpp"
#include "groundcast/safety.hpp"
#include "groundcast/scene.hpp"

namespace {

using namespace groundcast;

struct SceneBundle {
  SceneSpec scene;
  TriMesh mesh;
};

SceneBundle load_scene(const std::string& scene_path) {
  SceneBundle bundle;
  bundle.scene = scene_from_json(read_file(scene_path));
  const std::filesystem::path dir = std::filesystem::path(scene_path).parent_path();
  bundle.mesh = load_obj(read_file((dir / bundle.scene.mesh_obj).string()));
  return bundle;
}

std::vector<RefineMode> modes_from_flag(const std::string& mode) {
  if (mode == "both") return {RefineMode::six_dof, RefineMode::plane};
  return {parse_mode(mode)};
}

RobotPose default_footprint_pose(const SceneSpec& scene) {
  return {0.5 * (scene.spin_zone_min.x + scene.spin_zone_max.x),
          0.5 * (scene.spin_zone_min.y + scene.spin_zone_max.y), 0.0};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"robot footprint estimation, pose refinement, and safety analysis"};
  app.require_subcommand(1);

  std::string scene_path;
  std::string out_dir = "out";
  std::string mode = "both";
  std::string camera_id = "cam0";
  std::uint64_t seed = 1;
  int spins = 1;
  int frames_per_spin = 10;
  int trials = 3;
  int yaw_samples = 8;
  double grid_spacing = 0.05;
  std::vector<double> errors = {1.0, 2.0, 5.0, 10.0};
  double pose_x = 0.0, pose_y = 0.0, pose_yaw = 0.0;
  std::vector<std::string> files;

  const auto add_scene = [&](CLI::App* cmd) {
    cmd->add_option("--scene", scene_path, "path to scene.json")->required();
  };
  const auto add_out = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_dir, "output directory");
  };

  CLI::App* gen = app.add_subcommand("gen-scene", "write the demo scene and robot mesh");
  add_out(gen);

  CLI::App* render = app.add_subcommand("render-dataset", "render spin frames and masks");
  add_scene(render);
  add_out(render);
  render->add_option("--spins", spins, "number of spins");
  render->add_option("--frames-per-spin", frames_per_spin, "yaw samples per spin");
  render->add_option("--seed", seed, "master seed");

  CLI::App* estimate =
      app.add_subcommand("estimate-footprint", "estimate the footprint from an overhead view");
  add_scene(estimate);
  add_out(estimate);

  CLI::App* labels = app.add_subcommand(
      "gen-labels", "label a rendered dataset with footprint masks and score them");
  add_scene(labels);
  add_out(labels);

  CLI::App* refine_cmd = app.add_subcommand("refine-poses", "perturb and re-refine camera poses");
  add_scene(refine_cmd);
  add_out(refine_cmd);
  refine_cmd->add_option("--errors", errors, "perturbation magnitude cm (first value used)")
      ->delimiter(',');
  refine_cmd->add_option("--mode", mode, "default, plane, or both");
  refine_cmd->add_option("--spins", spins, "spins for the refinement dataset");
  refine_cmd->add_option("--frames-per-spin", frames_per_spin, "frames per spin");
  refine_cmd->add_option("--seed", seed, "master seed");

  CLI::App* ablate = app.add_subcommand("ablate", "sweep error magnitudes and optimizer modes");
  add_scene(ablate);
  add_out(ablate);
  ablate->add_option("--errors", errors, "error magnitudes in cm")->delimiter(',');
  ablate->add_option("--mode", mode, "default, plane, or both");
  ablate->add_option("--trials", trials, "trials per cell");
  ablate->add_option("--spins", spins, "spins for the refinement dataset");
  ablate->add_option("--frames-per-spin", frames_per_spin, "frames per spin");
  ablate->add_option("--seed", seed, "master seed");

  CLI::App* metrics_cmd =
      app.add_subcommand("metrics", "compare two PPM images (PSNR/SSIM) or PGM masks (IoU/CCR)");
  metrics_cmd->add_option("files", files, "two image or mask files")->expected(2);

  CLI::App* safety_cmd = app.add_subcommand("safety", "check one robot pose against a camera");
  add_scene(safety_cmd);
  safety_cmd->add_option("--camera", camera_id, "camera id");
  safety_cmd->add_option("--x", pose_x, "robot x, meters");
  safety_cmd->add_option("--y", pose_y, "robot y, meters");
  safety_cmd->add_option("--yaw", pose_yaw, "robot yaw, radians");

  CLI::App* gain_cmd = app.add_subcommand("area-gain", "sweep the floor grid under both modes");
  add_scene(gain_cmd);
  add_out(gain_cmd);
  gain_cmd->add_option("--grid-spacing", grid_spacing, "grid spacing, meters");
  gain_cmd->add_option("--yaw-samples", yaw_samples, "yaw samples per grid cell");

  CLI::App* full = app.add_subcommand("full-pipeline", "dataset, footprint, labels, safety, summary");
  add_scene(full);
  add_out(full);
  full->add_option("--spins", spins, "number of spins");
  full->add_option("--frames-per-spin", frames_per_spin, "yaw samples per spin");
  full->add_option("--seed", seed, "master seed");
  full->add_option("--grid-spacing", grid_spacing, "safety grid spacing, meters");
  full->add_option("--yaw-samples", yaw_samples, "safety yaw samples");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) {
      gen_scene(out_dir);
      std::cout << "wrote " << out_dir << "/scene.json and " << out_dir << "/robot.obj\n";
    } else if (render->parsed()) {
      const SceneBundle b = load_scene(scene_path);
      const DatasetIndex index =
          render_dataset(b.scene, b.mesh, spins, frames_per_spin, seed, out_dir);
      std::cout << "wrote " << index.frames.size() << " frames under " << out_dir << "\n";
    } else if (estimate->parsed()) {
      const SceneBundle b = load_scene(scene_path);
      const Footprint fp = estimate_footprint_overhead(
          b.mesh, default_footprint_pose(b.scene), b.scene.ground_height, PipelineOptions{});
      ensure_dir(out_dir);
      write_file(out_dir + "/footprint.json", footprint_to_json(fp));
      std::cout << "footprint: " << fp.polygon.size() << " vertices, area "
                << format_real(polygon_area(fp.polygon)) << " m^2 -> " << out_dir
                << "/footprint.json\n";
    } else if (labels->parsed()) {
      const SceneBundle b = load_scene(scene_path);
      const DatasetIndex index = poses_from_json(read_file(out_dir + "/poses.json"));
      const Footprint fp = footprint_from_json(read_file(out_dir + "/footprint.json"));
      const Footprint oracle = footprint_oracle_from_mesh(b.mesh);
      std::map<std::string, Camera> cams;
      for (const SceneCamera& c : b.scene.cameras) cams.emplace(c.id, c.camera());
      ensure_dir(out_dir + "/labels");
      std::vector<std::vector<std::string>> rows;
      for (std::size_t i = 0; i < index.frames.size(); ++i) {
        const DatasetFrame& f = index.frames[i];
        RenderedFrame frame;
        frame.mask = read_pgm(out_dir + "/masks/" + f.id + ".pgm");
        frame.image = Image(frame.mask.width, frame.mask.height);
        frame.robot_pose = f.pose;
        frame.camera_id = f.camera_id;
        const FrameLabel label = label_frame(fp, frame, cams, i);
        write_pgm(out_dir + "/labels/" + f.id + ".pgm", label.footprint_mask);
        const Camera cam = b.scene.camera_by_id(f.camera_id).camera();
        const Mask oracle_mask = polygon_to_mask(project_footprint(oracle, f.pose, cam),
                                                 frame.mask.width, frame.mask.height);
        rows.push_back({f.id, format_real(ccr(label.footprint_mask, oracle_mask)),
                        format_real(mask_iou(label.footprint_mask, oracle_mask))});
      }
      write_file(out_dir + "/labels.csv", encode_csv({"frame_id", "ccr", "iou"}, rows));
      std::cout << "labeled " << rows.size() << " frames -> " << out_dir << "/labels.csv\n";
    } else if (refine_cmd->parsed()) {
      const SceneBundle b = load_scene(scene_path);
      if (errors.empty()) fail(Err::bad_config, "need an error magnitude");
      const double error_cm = errors.front();
      const RefineMode refine_mode =
          mode == "both" ? RefineMode::plane : parse_mode(mode);
      const std::vector<RobotPose> poses =
          sample_spin_poses(b.scene, spins, frames_per_spin, seed);
      ensure_dir(out_dir);
      std::ostringstream json;
      json << "{\n";
      for (std::size_t ci = 0; ci < b.scene.cameras.size(); ++ci) {
        const SceneCamera& cam = b.scene.cameras[ci];
        const CameraIntrinsics intr = scale_intrinsics(cam.intrinsics, 128, 128);
        std::vector<ObservedFrame> frames;
        for (const RobotPose& p : poses)
          frames.emplace_back(rasterize(place_robot(b.mesh, p), Camera{intr, cam.pose}).mask, p);
        Rng rng = Rng::stream(seed, 0, ci);
        const Pose3 start = perturb_pose(cam.pose, error_cm / 100.0, 0.0, rng);
        const RefineResult res = refine(start, refine_mode, RefineConfig{}, intr, frames, b.mesh,
                                        cam.mount_height, &cam.pose);
        json << "  \"" << cam.id << "\": {\"rotation\": [";
        for (int r = 0; r < 3; ++r)
          for (int c = 0; c < 3; ++c)
            json << (r + c ? ", " : "") << format_real(res.refined.R.m[r][c]);
        json << "], \"translation\": [" << format_real(res.refined.t.x) << ", "
             << format_real(res.refined.t.y) << ", " << format_real(res.refined.t.z)
             << "], \"pos_err_before_m\": " << format_real(res.position_error_before)
             << ", \"pos_err_after_m\": " << format_real(res.position_error_after)
             << ", \"final_loss\": " << format_real(res.final_loss) << "}"
             << (ci + 1 < b.scene.cameras.size() ? "," : "") << "\n";
        std::cout << cam.id << ": position error " << format_real(res.position_error_before)
                  << " -> " << format_real(res.position_error_after) << " m\n";
      }
      json << "}\n";
      write_file(out_dir + "/refined_poses.json", json.str());
    } else if (ablate->parsed()) {
      const SceneBundle b = load_scene(scene_path);
      AblationOptions opts;
      opts.errors_cm = errors;
      opts.modes = modes_from_flag(mode);
      opts.trials = trials;
      opts.spins = spins;
      opts.frames_per_spin = frames_per_spin;
      opts.seed = seed;
      const CsvTable table = run_ablation(b.scene, b.mesh, opts);
      ensure_dir(out_dir);
      write_file(out_dir + "/ablation.csv", encode_csv(table.header, table.rows));
      for (const std::string& path : emit_plots(table, out_dir))
        std::cout << "wrote " << path << "\n";
      std::cout << "wrote " << out_dir << "/ablation.csv (" << table.rows.size() << " rows)\n";
    } else if (metrics_cmd->parsed()) {
      const std::string a = read_file(files[0]);
      const std::string bbytes = read_file(files[1]);
      if (a.size() >= 2 && a[0] == 'P' && a[1] == '5') {
        const Mask ma = decode_pgm(a, files[0]);
        const Mask mb = decode_pgm(bbytes, files[1]);
        std::cout << "iou=" << format_real(mask_iou(ma, mb))
                  << " ccr=" << format_real(ccr(ma, mb)) << "\n";
      } else {
        const Image ia = decode_ppm(a, files[0]);
        const Image ib = decode_ppm(bbytes, files[1]);
        std::cout << "psnr_db=" << format_real(psnr(ia, ib))
                  << " ssim=" << format_real(ssim(ia, ib)) << "\n";
      }
    } else if (safety_cmd->parsed()) {
      const SceneBundle b = load_scene(scene_path);
      const SceneCamera& cam = b.scene.camera_by_id(camera_id);
      const RobotPose pose{pose_x, pose_y, pose_yaw};
      pose.validate();
      const Footprint fp = estimate_footprint_overhead(b.mesh, pose, b.scene.ground_height,
                                                       PipelineOptions{});
      const PoseSafety s =
          evaluate_pose(pose, fp, b.mesh, cam.camera(), b.scene.region_for(camera_id));
      std::cout << "camera=" << camera_id << " safe_bbox=" << (s.safe_bbox ? "true" : "false")
                << " safe_footprint=" << (s.safe_footprint ? "true" : "false")
                << " out_of_view=" << (s.out_of_view ? "true" : "false") << "\n";
    } else if (gain_cmd->parsed()) {
      const SceneBundle b = load_scene(scene_path);
      const Footprint fp = estimate_footprint_overhead(
          b.mesh, default_footprint_pose(b.scene), b.scene.ground_height, PipelineOptions{});
      ensure_dir(out_dir);
      std::vector<std::vector<std::string>> rows;
      for (const SceneCamera& cam : b.scene.cameras) {
        const SafetyReport report =
            area_gain(fp, b.mesh, cam.camera(), b.scene.region_for(cam.id), grid_spacing,
                      yaw_samples, b.scene.floor_min, b.scene.floor_max);
        rows.push_back({cam.id, format_real(report.gain), std::to_string(report.footprint_safe),
                        std::to_string(report.bbox_safe), std::to_string(report.out_of_view)});
        std::cout << cam.id << ": area gain " << format_real(report.gain) << " ("
                  << report.footprint_safe << " footprint-safe vs " << report.bbox_safe
                  << " bbox-safe poses)\n";
      }
      write_file(out_dir + "/safety.csv",
                 encode_csv({"camera_id", "area_gain", "footprint_safe", "bbox_safe",
                             "out_of_view"},
                            rows));
    } else if (full->parsed()) {
      const SceneBundle b = load_scene(scene_path);
      PipelineOptions opts;
      opts.spins = spins;
      opts.frames_per_spin = frames_per_spin;
      opts.seed = seed;
      opts.grid_spacing = grid_spacing;
      opts.yaw_samples = yaw_samples;
      const PipelineSummary summary = run_full_pipeline(b.scene, b.mesh, opts, out_dir);
      std::cout << "frames=" << summary.frames << " mean_ccr=" << format_real(summary.mean_ccr)
                << " mean_iou=" << format_real(summary.mean_iou);
      for (const auto& g : summary.gains)
        std::cout << " area_gain_" << g.camera_id << "=" << format_real(g.gain);
      std::cout << "\nwrote " << out_dir << "/summary.csv\n";
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
