#pragma once

// Image- and mask-quality metrics: PSNR, windowed SSIM, mask IoU, and CCR
// (coverage of ground truth). All accumulation in double precision.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "groundcast/common.hpp"
#include "groundcast/render.hpp"

namespace groundcast {

// PSNR in dB against an 8-bit peak. Identical images (and anything above the
// cap) report 99.0 so CSV output never carries infinities.
inline double psnr(const Image& a, const Image& b) {
  if (a.width != b.width || a.height != b.height)
    fail(Err::dim_mismatch, "psnr inputs differ in size");
  double se = 0.0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    const double d = static_cast<double>(a.pixels[i]) - static_cast<double>(b.pixels[i]);
    se += d * d;
  }
  const double mse = se / static_cast<double>(a.pixels.size());
  if (mse == 0.0) return 99.0;
  return std::min(99.0, 10.0 * std::log10(255.0 * 255.0 / mse));
}

namespace detail {

inline const std::array<double, 11>& ssim_kernel() {
  static const std::array<double, 11> kernel = [] {
    std::array<double, 11> k;
    double sum = 0.0;
    for (int i = 0; i < 11; ++i) {
      const double d = i - 5;
      k[i] = std::exp(-d * d / (2.0 * 1.5 * 1.5));
      sum += k[i];
    }
    for (double& v : k) v /= sum;
    return k;
  }();
  return kernel;
}

// Separable 11x11 Gaussian blur; only pixels where the window fits fully
// ([5, w-6] x [5, h-6]) are meaningful in the result.
inline std::vector<double> blur_valid(const std::vector<double>& src, int w, int h) {
  const auto& k = ssim_kernel();
  std::vector<double> tmp(src.size(), 0.0), out(src.size(), 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 5; x < w - 5; ++x) {
      double acc = 0.0;
      for (int i = 0; i < 11; ++i) acc += k[i] * src[y * w + x + i - 5];
      tmp[y * w + x] = acc;
    }
  }
  for (int y = 5; y < h - 5; ++y) {
    for (int x = 5; x < w - 5; ++x) {
      double acc = 0.0;
      for (int i = 0; i < 11; ++i) acc += k[i] * tmp[(y + i - 5) * w + x];
      out[y * w + x] = acc;
    }
  }
  return out;
}

}  // namespace detail

// Mean SSIM with an 11x11 Gaussian window (sigma 1.5), no padding: computed
// over the pixels where the window fits fully, per the usual convention.
inline double ssim(const Image& a, const Image& b) {
  if (a.width != b.width || a.height != b.height)
    fail(Err::dim_mismatch, "ssim inputs differ in size");
  const int w = a.width, h = a.height;
  if (w < 11 || h < 11) fail(Err::too_small, "ssim needs at least 11x11 images");

  const std::size_t n = a.pixels.size();
  std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = a.pixels[i];
    y[i] = b.pixels[i];
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const std::vector<double> mu_x = detail::blur_valid(x, w, h);
  const std::vector<double> mu_y = detail::blur_valid(y, w, h);
  const std::vector<double> e_xx = detail::blur_valid(xx, w, h);
  const std::vector<double> e_yy = detail::blur_valid(yy, w, h);
  const std::vector<double> e_xy = detail::blur_valid(xy, w, h);

  const double c1 = (0.01 * 255.0) * (0.01 * 255.0);
  const double c2 = (0.03 * 255.0) * (0.03 * 255.0);
  double acc = 0.0;
  std::size_t count = 0;
  for (int yy_i = 5; yy_i < h - 5; ++yy_i) {
    for (int xx_i = 5; xx_i < w - 5; ++xx_i) {
      const std::size_t i = static_cast<std::size_t>(yy_i) * w + xx_i;
      const double mx = mu_x[i], my = mu_y[i];
      const double var_x = e_xx[i] - mx * mx;
      const double var_y = e_yy[i] - my * my;
      const double cov = e_xy[i] - mx * my;
      acc += ((2.0 * mx * my + c1) * (2.0 * cov + c2)) /
             ((mx * mx + my * my + c1) * (var_x + var_y + c2));
      ++count;
    }
  }
  return acc / static_cast<double>(count);
}

inline double mask_iou(const Mask& a, const Mask& b) {
  if (a.width != b.width || a.height != b.height)
    fail(Err::dim_mismatch, "mask_iou inputs differ in size");
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.bits.size(); ++i) {
    inter += a.bits[i] & b.bits[i];
    uni += a.bits[i] | b.bits[i];
  }
  if (uni == 0) return 1.0;  // two empty masks agree perfectly
  return static_cast<double>(inter) / static_cast<double>(uni);
}

// Coverage of the ground truth: |pred ∩ gt| / |gt|. Over-segmentation is
// rewarded (a superset scores 1), which is the conservative direction for
// safety checks downstream.
inline double ccr(const Mask& pred, const Mask& gt) {
  if (pred.width != gt.width || pred.height != gt.height)
    fail(Err::dim_mismatch, "ccr inputs differ in size");
  std::size_t inter = 0, gt_count = 0;
  for (std::size_t i = 0; i < gt.bits.size(); ++i) {
    inter += pred.bits[i] & gt.bits[i];
    gt_count += gt.bits[i];
  }
  if (gt_count == 0) fail(Err::empty_gt, "ccr against an empty ground truth");
  return static_cast<double>(inter) / static_cast<double>(gt_count);
}

// One row of metric output plus the experiment coordinates it belongs to.
struct MetricsRecord {
  double psnr_db = 0.0;
  double ssim_val = 0.0;
  std::optional<double> ccr_val;
  std::optional<double> iou_val;
  int spins = 0;
  int frames_per_spin = 0;
  double error_cm = 0.0;
  std::string mode;
};

}  // namespace groundcast
