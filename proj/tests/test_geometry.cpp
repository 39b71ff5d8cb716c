#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "groundcast/geometry.hpp"
#include "groundcast/rng.hpp"
#include "oracles.hpp"

using namespace groundcast;
using Catch::Approx;

namespace {

Polygon2D poly(std::initializer_list<Vec2> pts, PolyFrame f = PolyFrame::world_meters) {
  return Polygon2D::from_points(std::vector<Vec2>(pts), f);
}

Err code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a groundcast::Error");
  return Err::bad_params;
}

// Simple star polygon around a center: random radii at sorted angles.
std::vector<Vec2> random_star(Rng& rng, int n, double r_lo, double r_hi) {
  std::vector<double> angles(n);
  for (auto& a : angles) a = rng.uniform(0.0, 2.0 * M_PI);
  std::sort(angles.begin(), angles.end());
  std::vector<Vec2> out;
  for (double a : angles) {
    const double r = rng.uniform(r_lo, r_hi);
    out.push_back({r * std::cos(a), r * std::sin(a)});
  }
  return out;
}

}  // namespace

TEST_CASE("Mat3 rotation algebra") {
  const double a = 0.7321;
  SECTION("axis-angle about coordinate axes matches the closed forms") {
    const Mat3 rx = Mat3::axis_angle({1, 0, 0}, a);
    const Mat3 ry = Mat3::axis_angle({0, 1, 0}, a);
    const Mat3 rz = Mat3::axis_angle({0, 0, 1}, a);
    const Mat3 ex = Mat3::rot_x(a), ey = Mat3::rot_y(a), ez = Mat3::rot_z(a);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        REQUIRE(rx.m[i][j] == Approx(ex.m[i][j]).margin(1e-15));
        REQUIRE(ry.m[i][j] == Approx(ey.m[i][j]).margin(1e-15));
        REQUIRE(rz.m[i][j] == Approx(ez.m[i][j]).margin(1e-15));
      }
  }
  SECTION("rotations are orthonormal with unit determinant") {
    const Mat3 r = Mat3::rot_z(0.3) * Mat3::rot_y(-1.1) * Mat3::rot_x(2.2);
    REQUIRE(orthonormality_defect(r) < 1e-14);
    REQUIRE(r.det() == Approx(1.0).margin(1e-14));
  }
  SECTION("transpose reverses products") {
    const Mat3 p = Mat3::rot_x(0.4) * Mat3::rot_z(1.9);
    const Mat3 q = Mat3::rot_z(1.9).transposed() * Mat3::rot_x(0.4).transposed();
    const Mat3 pt = p.transposed();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) REQUIRE(pt.m[i][j] == Approx(q.m[i][j]).margin(1e-15));
  }
}

TEST_CASE("Pose3 basics") {
  SECTION("camera_center inverts the transform") {
    const Pose3 pose = look_at_pose({1.5, -2.0, 2.5}, {0.0, 0.0, 0.0});
    const Vec3 c = pose.camera_center();
    REQUIRE(c.x == Approx(1.5).margin(1e-12));
    REQUIRE(c.y == Approx(-2.0).margin(1e-12));
    REQUIRE(c.z == Approx(2.5).margin(1e-12));
    // The center maps to the camera origin.
    const Vec3 at_origin = pose.R * c + pose.t;
    REQUIRE(norm(at_origin) < 1e-12);
  }
  SECTION("validate rejects a scaled rotation") {
    Pose3 p = look_at_pose({0, 0, 1}, {1, 0, 0});
    for (int j = 0; j < 3; ++j) p.R.m[0][j] *= 1.001;
    REQUIRE(code_of([&] { p.validate(); }) == Err::bad_params);
  }
}

TEST_CASE("look_at_pose orientation") {
  SECTION("straight-down pose with +y-as-north hint is the canonical overhead matrix") {
    const Pose3 p = look_at_pose({0, 0, 20}, {0, 0, 0}, {0, 1, 0});
    const double want[3][3] = {{1, 0, 0}, {0, -1, 0}, {0, 0, -1}};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) REQUIRE(p.R.m[i][j] == Approx(want[i][j]).margin(1e-15));
    REQUIRE(p.t.z == Approx(20.0).margin(1e-12));
  }
  SECTION("view parallel to up is rejected") {
    REQUIRE(code_of([] { look_at_pose({0, 0, 3}, {0, 0, 0}); }) == Err::degenerate);
  }
  SECTION("level view keeps the horizon level: world up maps to decreasing v") {
    const Pose3 p = look_at_pose({0, 0, 1}, {5, 0, 1});
    const Vec3 up_cam = p.R * Vec3{0, 0, 1};  // direction only; rotation part
    REQUIRE(up_cam.y == Approx(-1.0).margin(1e-12));
  }
}

TEST_CASE("project_point worked examples") {
  Camera overhead;
  overhead.intrinsics = {10000, 10000, 256, 256, 512, 512};
  overhead.pose = look_at_pose({0, 0, 20}, {0, 0, 0}, {0, 1, 0});
  overhead.validate();

  SECTION("world origin lands on the principal point") {
    const auto px = project_point({0, 0, 0}, overhead);
    REQUIRE(px);
    REQUIRE(px->x == Approx(256.0).margin(1e-9));
    REQUIRE(px->y == Approx(256.0).margin(1e-9));
  }
  SECTION("half-extent east lands on the right image border") {
    const auto px = project_point({0.512, 0, 0}, overhead);
    REQUIRE(px);
    REQUIRE(px->x == Approx(512.0).margin(1e-9));
    REQUIRE(px->y == Approx(256.0).margin(1e-9));
  }
  SECTION("north maps to decreasing v") {
    const auto px = project_point({0, 0.512, 0}, overhead);
    REQUIRE(px);
    REQUIRE(px->y == Approx(0.0).margin(1e-9));
  }
  SECTION("points at or behind the camera plane do not project") {
    REQUIRE_FALSE(project_point({0, 0, 25}, overhead));
    REQUIRE_FALSE(project_point({0, 0, 20}, overhead));
  }
  SECTION("the epsilon boundary itself counts as behind") {
    Camera ident;
    ident.intrinsics = {100, 100, 64, 64, 128, 128};
    ident.pose = Pose3{Mat3::identity(), {0, 0, 0}};  // camera depth == world z
    REQUIRE_FALSE(project_point({0, 0, 1e-9}, ident));
    REQUIRE(project_point({0, 0, 2e-9}, ident));
  }
}

TEST_CASE("unproject_pixel geometry") {
  Camera cam;
  cam.intrinsics = {100, 100, 64, 64, 128, 128};
  cam.pose = look_at_pose({0, 0, 1}, {0, 0, 0}, {0, 1, 0});

  SECTION("principal point unprojects along the optical axis") {
    const Ray r = unproject_pixel(64, 64, cam);
    r.validate();
    REQUIRE(norm(r.origin - Vec3{0, 0, 1}) < 1e-12);
    REQUIRE(norm(r.direction - Vec3{0, 0, -1}) < 1e-12);
  }
  SECTION("directions are unit for off-center and out-of-bounds pixels") {
    for (const auto [u, v] : {std::pair{0.0, 0.0}, {127.0, 3.0}, {-40.0, 500.0}}) {
      REQUIRE(norm(unproject_pixel(u, v, cam).direction) == Approx(1.0).margin(1e-12));
    }
  }
}

TEST_CASE("ray_plane_intersect edge behavior") {
  const GroundPlane ground{0.0};
  SECTION("oblique hit pins z to the plane height exactly") {
    const Ray r{{0, 0, 2}, normalized({1, 0, -1})};
    const auto hit = ray_plane_intersect(r, ground);
    REQUIRE(hit);
    REQUIRE(hit->x == Approx(2.0).margin(1e-12));
    REQUIRE(hit->y == Approx(0.0).margin(1e-12));
    REQUIRE(hit->z == 0.0);  // exact, not approximate
  }
  SECTION("parallel rays miss") {
    REQUIRE_FALSE(ray_plane_intersect({{0, 0, 2}, {1, 0, 0}}, ground));
  }
  SECTION("plane behind the origin misses") {
    REQUIRE_FALSE(ray_plane_intersect({{0, 0, 2}, normalized({0, 0, 1})}, ground));
  }
  SECTION("origin on the plane yields no forward hit") {
    REQUIRE_FALSE(ray_plane_intersect({{0, 0, 0}, normalized({1, 0, 1})}, ground));
  }
  SECTION("nonzero plane height") {
    const auto hit = ray_plane_intersect({{0, 0, 2}, normalized({0, 1, -1})}, GroundPlane{0.5});
    REQUIRE(hit);
    REQUIRE(hit->y == Approx(1.5).margin(1e-12));
    REQUIRE(hit->z == 0.5);
  }
}

TEST_CASE("camera slightly above the ground sees it just below the horizon") {
  Camera cam;
  cam.intrinsics = {100, 100, 64, 64, 128, 128};
  cam.pose = look_at_pose({0, 0, 0.5}, {10, 0, 0.5});  // level view along +x

  const auto near_px = project_point({10, 0, 0}, cam);
  const auto far_px = project_point({1000, 0, 0}, cam);
  REQUIRE(near_px);
  REQUIRE(far_px);
  // Ground points sit below the horizon row v = cy, converging to it with distance.
  REQUIRE(near_px->y > far_px->y);
  REQUIRE(far_px->y > 64.0);

  // A ray through the horizon row itself is level and never reaches the ground.
  const Ray horizon = unproject_pixel(30, 64, cam);
  REQUIRE(std::abs(horizon.direction.z) < 1e-12);
  REQUIRE_FALSE(ray_plane_intersect(horizon, GroundPlane{0.0}));
}

TEST_CASE("project/unproject/intersect round trip recovers ground points") {
  Rng rng(20260822);
  const GroundPlane ground{0.0};
  int tried = 0, hit = 0;
  for (int iter = 0; iter < 2000; ++iter) {
    const Vec3 eye{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(0.4, 3.0)};
    const Vec3 target{rng.uniform(-1, 1), rng.uniform(-1, 1), 0.0};
    if (norm(Vec3{target.x - eye.x, target.y - eye.y, 0.0}) < 0.05) continue;
    Camera cam;
    cam.intrinsics = {rng.uniform(80, 400), rng.uniform(80, 400), rng.uniform(50, 78),
                      rng.uniform(50, 78), 128, 128};
    cam.pose = look_at_pose(eye, target);
    cam.validate();

    const Vec3 p{target.x + rng.uniform(-1.5, 1.5), target.y + rng.uniform(-1.5, 1.5), 0.0};
    const auto px = project_point(p, cam);
    ++tried;
    if (!px) continue;  // behind the camera; skipped by design
    ++hit;
    const auto back = ray_plane_intersect(unproject_pixel(px->x, px->y, cam), ground);
    REQUIRE(back);
    REQUIRE(norm(*back - p) < 1e-6);
  }
  REQUIRE(tried > 1500);
  REQUIRE(hit > tried * 9 / 10);
}

TEST_CASE("Polygon2D construction") {
  SECTION("clockwise input is normalized to a positive shoelace sum") {
    const Polygon2D p = poly({{0, 0}, {0, 1}, {1, 1}, {1, 0}});  // negative as given
    REQUIRE(shoelace_sum(p.vertices()) > 0.0);
    REQUIRE(polygon_area(p) == Approx(1.0));
  }
  SECTION("counter-clockwise input is kept as is") {
    const std::vector<Vec2> src{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    const Polygon2D p = Polygon2D::from_points(src, PolyFrame::image_pixels);
    REQUIRE(p.vertices() == src);
    REQUIRE(p.frame() == PolyFrame::image_pixels);
  }
  SECTION("fewer than three vertices is degenerate") {
    REQUIRE(code_of([] { poly({{0, 0}, {1, 1}}); }) == Err::degenerate);
  }
  SECTION("collinear vertices have zero area and are degenerate") {
    REQUIRE(code_of([] { poly({{0, 0}, {1, 1}, {2, 2}}); }) == Err::degenerate);
  }
  SECTION("non-finite vertices are rejected") {
    const double inf = std::numeric_limits<double>::infinity();
    REQUIRE(code_of([&] { poly({{0, 0}, {1, 0}, {inf, 1}}); }) == Err::bad_params);
  }
}

TEST_CASE("polygon_area matches closed forms and Monte-Carlo") {
  REQUIRE(polygon_area(poly({{0, 0}, {1, 0}, {1, 1}, {0, 1}})) == Approx(1.0));
  REQUIRE(polygon_area(poly({{0, 0}, {4, 0}, {0, 3}})) == Approx(6.0));

  Rng rng(7);
  for (int round = 0; round < 5; ++round) {
    std::vector<Vec2> pts;
    for (int i = 0; i < 20; ++i) pts.push_back({rng.uniform(-2, 2), rng.uniform(-2, 2)});
    const Polygon2D hull = convex_hull(pts);
    Rng mc = Rng::stream(99, round, 0);
    const double est = oracle::mc_area(hull.vertices(), mc, 200000);
    REQUIRE(polygon_area(hull) == Approx(est).epsilon(0.02));
  }
}

TEST_CASE("convex_hull agrees with the brute-force extreme-point oracle") {
  Rng rng(31337);
  for (int round = 0; round < 10; ++round) {
    std::vector<Vec2> pts;
    for (int i = 0; i < 30; ++i) pts.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1)});
    const Polygon2D hull = convex_hull(pts);
    REQUIRE(shoelace_sum(hull.vertices()) > 0.0);

    std::vector<Vec2> got = hull.vertices();
    std::sort(got.begin(), got.end(),
              [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    const std::vector<Vec2> want = oracle::brute_hull_vertices(pts);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) REQUIRE(got[i] == want[i]);
  }
}

TEST_CASE("convex_hull drops collinear and interior points") {
  // Square corners plus edge midpoints plus center.
  const std::vector<Vec2> pts{{0, 0}, {2, 0}, {2, 2}, {0, 2}, {1, 0},
                              {2, 1}, {1, 2}, {0, 1}, {1, 1}};
  const Polygon2D hull = convex_hull(pts);
  REQUIRE(hull.size() == 4);
  REQUIRE(polygon_area(hull) == Approx(4.0));
}

TEST_CASE("convex_hull degenerate inputs") {
  REQUIRE(code_of([] { convex_hull(std::vector<Vec2>{{0, 0}, {1, 1}}); }) == Err::degenerate);
  REQUIRE(code_of([] {
            convex_hull(std::vector<Vec2>{{0, 0}, {1, 1}, {2, 2}, {3, 3}});
          }) == Err::degenerate);
}

TEST_CASE("point_in_polygon boundary and interior") {
  const Polygon2D square = poly({{0, 0}, {2, 0}, {2, 2}, {0, 2}});
  SECTION("boundary points count as inside") {
    REQUIRE(point_in_polygon({0, 0}, square));    // vertex
    REQUIRE(point_in_polygon({1, 0}, square));    // edge midpoint
    REQUIRE(point_in_polygon({2, 1.5}, square));  // right edge
  }
  SECTION("interior and exterior basics") {
    REQUIRE(point_in_polygon({1, 1}, square));
    REQUIRE_FALSE(point_in_polygon({-0.001, 1}, square));
    REQUIRE_FALSE(point_in_polygon({1, 2.001}, square));
  }
  SECTION("concave notch") {
    const Polygon2D u = poly({{0, 0}, {3, 0}, {3, 3}, {2, 3}, {2, 1}, {1, 1}, {1, 3}, {0, 3}});
    REQUIRE(point_in_polygon({0.5, 2.5}, u));
    REQUIRE_FALSE(point_in_polygon({1.5, 2.5}, u));  // inside the notch
    REQUIRE(point_in_polygon({1.5, 0.5}, u));
  }
}

TEST_CASE("point_in_polygon agrees with the winding-number oracle") {
  Rng rng(4242);
  for (int round = 0; round < 8; ++round) {
    const std::vector<Vec2> ring = random_star(rng, 12, 0.3, 1.0);
    const Polygon2D p = Polygon2D::from_points(ring, PolyFrame::world_meters);
    for (int q = 0; q < 500; ++q) {
      const Vec2 query{rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2)};
      REQUIRE(point_in_polygon(query, p) == oracle::point_inside(query, p.vertices()));
    }
  }
}

TEST_CASE("segments_properly_intersect") {
  REQUIRE(segments_properly_intersect({0, 0}, {2, 2}, {0, 2}, {2, 0}));
  // Shared endpoint: not a proper crossing.
  REQUIRE_FALSE(segments_properly_intersect({0, 0}, {2, 2}, {2, 2}, {3, 0}));
  // T-junction: one endpoint interior to the other segment.
  REQUIRE_FALSE(segments_properly_intersect({0, 0}, {2, 0}, {1, 0}, {1, 2}));
  // Collinear overlap.
  REQUIRE_FALSE(segments_properly_intersect({0, 0}, {2, 0}, {1, 0}, {3, 0}));
  // Disjoint.
  REQUIRE_FALSE(segments_properly_intersect({0, 0}, {1, 0}, {0, 1}, {1, 1}));
}

TEST_CASE("polygon_contains_polygon") {
  const Polygon2D outer = poly({{0, 0}, {4, 0}, {4, 4}, {0, 4}});
  SECTION("nested polygon is contained") {
    REQUIRE(polygon_contains_polygon(poly({{1, 1}, {3, 1}, {3, 3}, {1, 3}}), outer));
  }
  SECTION("touching the boundary from inside still counts") {
    REQUIRE(polygon_contains_polygon(poly({{0, 0}, {4, 0}, {2, 2}}), outer));
  }
  SECTION("any vertex outside fails") {
    REQUIRE_FALSE(polygon_contains_polygon(poly({{1, 1}, {5, 1}, {3, 3}}), outer));
  }
  SECTION("vertices inside but an edge crossing out of a concave container fails") {
    const Polygon2D u = poly({{0, 0}, {5, 0}, {5, 5}, {4, 5}, {4, 1}, {1, 1}, {1, 5}, {0, 5}});
    // Both endpoints inside the U arms, but the edge spans the notch.
    const Polygon2D bridge = poly({{0.5, 4}, {4.5, 4}, {4.5, 4.5}, {0.5, 4.5}});
    for (const Vec2& v : bridge.vertices()) REQUIRE(point_in_polygon(v, u));
    REQUIRE_FALSE(polygon_contains_polygon(bridge, u));
  }
  SECTION("mismatched frames are an error") {
    const Polygon2D img = poly({{1, 1}, {2, 1}, {2, 2}}, PolyFrame::image_pixels);
    REQUIRE(code_of([&] { polygon_contains_polygon(img, outer); }) == Err::frame_mismatch);
  }
}

TEST_CASE("polygon_contains_polygon agrees with dense edge sampling on convex containers") {
  Rng rng(555);
  const Polygon2D outer = poly({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}});
  for (int round = 0; round < 20; ++round) {
    std::vector<Vec2> ring = random_star(rng, 8, 0.2, 1.4);
    const Polygon2D inner = Polygon2D::from_points(ring, PolyFrame::world_meters);
    // For a convex container, containment == every densely sampled boundary
    // point of the inner polygon lies inside.
    bool sampled_inside = true;
    const auto& v = inner.vertices();
    for (std::size_t i = 0; i < v.size() && sampled_inside; ++i) {
      const Vec2 a = v[i], b = v[(i + 1) % v.size()];
      for (int s = 0; s <= 64; ++s) {
        const double t = s / 64.0;
        if (!oracle::point_inside(a + t * (b - a), outer.vertices())) {
          sampled_inside = false;
          break;
        }
      }
    }
    REQUIRE(polygon_contains_polygon(inner, outer) == sampled_inside);
  }
}

TEST_CASE("polygon_is_simple") {
  REQUIRE(polygon_is_simple(poly({{0, 0}, {1, 0}, {1, 1}, {0, 1}})));
  // Figure-eight with unequal lobes (nonzero signed area so it constructs).
  REQUIRE_FALSE(polygon_is_simple(poly({{0, 0}, {2, 2}, {2, 0}, {0, 1}})));
}

TEST_CASE("douglas_peucker_ring") {
  SECTION("collinear edge midpoints vanish at any tolerance") {
    const std::vector<Vec2> ring{{0, 0}, {1, 0}, {2, 0}, {2, 1}, {2, 2},
                                 {1, 2}, {0, 2}, {0, 1}};
    const auto out = douglas_peucker_ring(ring, 1e-9);
    REQUIRE(out.size() == 4);
    REQUIRE(polygon_area(Polygon2D::from_points(out, PolyFrame::world_meters)) == Approx(4.0));
  }
  SECTION("three or fewer vertices pass through untouched") {
    const std::vector<Vec2> tri{{0, 0}, {1, 0}, {0, 1}};
    REQUIRE(douglas_peucker_ring(tri, 100.0) == tri);
  }
  SECTION("a huge tolerance still leaves a polygon") {
    Rng rng(9);
    const auto ring = random_star(rng, 24, 0.5, 1.0);
    const auto out = douglas_peucker_ring(ring, 1e9);
    REQUIRE(out.size() == 3);
  }
  SECTION("vertex count is monotone non-increasing in the tolerance") {
    Rng rng(1234);
    for (int round = 0; round < 6; ++round) {
      const auto ring = random_star(rng, 40, 0.3, 1.0);
      std::size_t prev = ring.size() + 1;
      for (double eps : {0.0, 0.001, 0.01, 0.05, 0.1, 0.3, 1.0, 5.0}) {
        const auto out = douglas_peucker_ring(ring, eps);
        REQUIRE(out.size() <= prev);
        REQUIRE(out.size() >= 3);
        prev = out.size();
      }
    }
  }
  SECTION("kept vertices approximate the ring within the tolerance") {
    Rng rng(77);
    const auto ring = random_star(rng, 60, 0.8, 1.0);
    const double eps = 0.05;
    const auto out = douglas_peucker_ring(ring, eps);
    // Every dropped vertex lies within eps of the simplified boundary.
    for (const Vec2& q : ring) {
      double best = 1e18;
      for (std::size_t i = 0; i < out.size(); ++i) {
        best = std::min(best, groundcast::detail::point_segment_distance(
                                  q, out[i], out[(i + 1) % out.size()]));
      }
      REQUIRE(best <= eps + 1e-12);
    }
  }
}

TEST_CASE("validation helpers") {
  SECTION("intrinsics") {
    CameraIntrinsics k{100, 100, 64, 64, 128, 128};
    REQUIRE_NOTHROW(k.validate());
    k.fx = 0;
    REQUIRE(code_of([&] { k.validate(); }) == Err::bad_params);
    k = {100, 100, 128, 64, 128, 128};  // principal point off the right edge
    REQUIRE(code_of([&] { k.validate(); }) == Err::bad_params);
  }
  SECTION("AABB") {
    REQUIRE_NOTHROW(AABB2D{0, 0, 5, 5}.validate());
    REQUIRE(code_of([] { AABB2D{5, 0, 0, 5}.validate(); }) == Err::bad_params);
  }
  SECTION("rays must be unit") {
    REQUIRE(code_of([] { Ray{{0, 0, 0}, {1, 1, 0}}.validate(); }) == Err::bad_params);
  }
}
