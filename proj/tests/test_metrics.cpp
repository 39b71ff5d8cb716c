#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>

#include "groundcast/metrics.hpp"
#include "groundcast/render.hpp"
#include "groundcast/rng.hpp"
#include "oracles.hpp"

using namespace groundcast;
using Catch::Approx;

namespace {

Err code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a groundcast::Error");
  return Err::bad_params;
}

Image random_image(Rng& rng, int w, int h) {
  Image img(w, h);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng.below(256));
  return img;
}

Image constant_image(int w, int h, std::uint8_t value) {
  Image img(w, h);
  for (auto& p : img.pixels) p = value;
  return img;
}

Mask random_mask(Rng& rng, int w, int h, double fill) {
  Mask m(w, h);
  for (auto& b : m.bits) b = rng.uniform() < fill ? 1 : 0;
  return m;
}

}  // namespace

TEST_CASE("psnr analytic cases") {
  SECTION("identical images cap at 99 dB") {
    Rng rng(1);
    const Image a = random_image(rng, 16, 16);
    REQUIRE(psnr(a, a) == 99.0);
  }
  SECTION("constant offset of 10 gives the closed-form value") {
    const Image a = constant_image(24, 24, 0);
    const Image b = constant_image(24, 24, 10);
    REQUIRE(psnr(a, b) == Approx(28.1308).margin(1e-4));
  }
  SECTION("a single off-by-one pixel in a large image still caps at 99") {
    Image a = constant_image(400, 400, 128);
    Image b = a;
    b.pixels[0] = 129;  // raw PSNR would be over 100 dB
    REQUIRE(psnr(a, b) == 99.0);
  }
  SECTION("size mismatch is an error") {
    REQUIRE(code_of([] { psnr(Image(4, 4), Image(4, 5)); }) == Err::dim_mismatch);
  }
}

TEST_CASE("psnr matches the direct-MSE oracle on seeded pairs") {
  Rng rng(20260101);
  for (int round = 0; round < 20; ++round) {
    const Image a = random_image(rng, 32, 32);
    const Image b = random_image(rng, 32, 32);
    REQUIRE(psnr(a, b) == Approx(oracle::direct_psnr(a, b)).margin(1e-9));
    REQUIRE(psnr(a, b) == Approx(psnr(b, a)).margin(1e-12));
  }
}

TEST_CASE("ssim analytic cases") {
  SECTION("identical images score exactly 1") {
    Rng rng(2);
    const Image a = random_image(rng, 20, 20);
    REQUIRE(ssim(a, a) == Approx(1.0).margin(1e-12));
  }
  SECTION("constant 100 vs 110: variance terms vanish, luminance term remains") {
    const Image a = constant_image(16, 16, 100);
    const Image b = constant_image(16, 16, 110);
    // (2*100*110 + 6.5025) / (100^2 + 110^2 + 6.5025)
    REQUIRE(ssim(a, b) == Approx(0.995477).margin(1e-6));
  }
  SECTION("images below 11x11 are rejected") {
    REQUIRE(code_of([] { ssim(Image(10, 11), Image(10, 11)); }) == Err::too_small);
  }
  SECTION("size mismatch is an error") {
    REQUIRE(code_of([] { ssim(Image(16, 16), Image(16, 17)); }) == Err::dim_mismatch);
  }
}

TEST_CASE("ssim matches the naive windowed oracle on seeded pairs") {
  Rng rng(424242);
  for (int round = 0; round < 20; ++round) {
    const Image a = random_image(rng, 32, 32);
    const Image b = random_image(rng, 32, 32);
    const double got = ssim(a, b);
    REQUIRE(got == Approx(oracle::naive_ssim(a, b)).margin(1e-9));
    REQUIRE(got == Approx(ssim(b, a)).margin(1e-12));
    REQUIRE(std::abs(got) <= 1.0);
  }
}

TEST_CASE("ssim on a barely large enough image uses its single valid window") {
  Rng rng(3);
  const Image a = random_image(rng, 11, 11);
  const Image b = random_image(rng, 11, 11);
  REQUIRE(ssim(a, b) == Approx(oracle::naive_ssim(a, b)).margin(1e-9));
}

TEST_CASE("mask_iou") {
  Rng rng(7);
  const Mask a = random_mask(rng, 24, 24, 0.4);
  SECTION("identical masks score 1") { REQUIRE(mask_iou(a, a) == 1.0); }
  SECTION("disjoint masks score 0") {
    Mask left(8, 8), right(8, 8);
    for (int v = 0; v < 8; ++v) {
      left.at(0, v) = 1;
      right.at(7, v) = 1;
    }
    REQUIRE(mask_iou(left, right) == 0.0);
  }
  SECTION("two empty masks agree perfectly") {
    REQUIRE(mask_iou(Mask(8, 8), Mask(8, 8)) == 1.0);
  }
  SECTION("random pairs match the bit-count oracle") {
    for (int round = 0; round < 20; ++round) {
      const Mask x = random_mask(rng, 32, 32, 0.5);
      const Mask y = random_mask(rng, 32, 32, 0.3);
      REQUIRE(mask_iou(x, y) == Approx(oracle::bitcount_iou(x, y)).margin(1e-12));
    }
  }
  SECTION("size mismatch is an error") {
    REQUIRE(code_of([] { mask_iou(Mask(4, 4), Mask(5, 4)); }) == Err::dim_mismatch);
  }
}

TEST_CASE("ccr") {
  Rng rng(11);
  SECTION("perfect prediction covers everything") {
    const Mask gt = random_mask(rng, 16, 16, 0.5);
    REQUIRE(ccr(gt, gt) == 1.0);
  }
  SECTION("covering half the ground truth scores one half") {
    Mask gt(4, 4), pred(4, 4);
    gt.at(0, 0) = gt.at(1, 0) = gt.at(2, 0) = gt.at(3, 0) = 1;
    pred.at(0, 0) = pred.at(1, 0) = 1;
    REQUIRE(ccr(pred, gt) == 0.5);
  }
  SECTION("empty ground truth is an error") {
    REQUIRE(code_of([] { ccr(Mask(4, 4), Mask(4, 4)); }) == Err::empty_gt);
  }
  SECTION("random pairs match the bit-count oracle and bound IoU") {
    for (int round = 0; round < 20; ++round) {
      Mask pred = random_mask(rng, 32, 32, 0.4);
      Mask gt = random_mask(rng, 32, 32, 0.4);
      gt.at(0, 0) = 1;  // keep gt non-empty
      REQUIRE(ccr(pred, gt) == Approx(oracle::bitcount_ccr(pred, gt)).margin(1e-12));
      REQUIRE(mask_iou(pred, gt) <= ccr(pred, gt) + 1e-12);
    }
  }
}

TEST_CASE("any dilation of the ground truth covers it fully") {
  // Over-segmented ("blobbier") predictions are conservative by the CCR
  // definition: a superset always scores exactly 1.
  Rng rng(90210);
  for (int round = 0; round < 10; ++round) {
    Mask gt = random_mask(rng, 48, 48, 0.15);
    gt.at(24, 24) = 1;
    for (int k = 1; k <= 3; ++k) {
      REQUIRE(ccr(dilate(gt, k), gt) == 1.0);
    }
  }
}
