#include "core/preprocess.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "core/errors.hpp"

namespace lrcset {

namespace {

void require_single_channel(const Raster& img, const char* op) {
  if (img.channels != 1)
    throw InvalidInput(std::string(op) + ": expected a single-channel raster, got " +
                       std::to_string(img.channels) + " channels");
}

int clamp_level(double v) {
  return static_cast<int>(std::lround(std::clamp(v, 0.0, 255.0)));
}

}  // namespace

Raster to_grayscale(const Raster& img) {
  if (img.channels == 1) return img;
  if (img.channels != 3)
    throw InvalidInput("to_grayscale: expected 1 or 3 channels, got " +
                       std::to_string(img.channels));
  Raster out;
  out.width = img.width;
  out.height = img.height;
  out.channels = 1;
  out.data.resize(static_cast<std::size_t>(img.width) * img.height);
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      const double y = 0.299 * img.at(r, c, 0) + 0.587 * img.at(r, c, 1) + 0.114 * img.at(r, c, 2);
      out.at(r, c) = std::clamp(static_cast<double>(std::lround(y)), 0.0, 255.0);
    }
  }
  return out;
}

Raster downsample(const Raster& img, int rows, int cols) {
  require_single_channel(img, "downsample");
  if (rows < 1 || cols < 1)
    throw InvalidInput("downsample: target dimensions must be positive");
  if (rows > img.height || cols > img.width)
    throw InvalidInput("downsample: target " + std::to_string(rows) + "x" + std::to_string(cols) +
                       " exceeds source " + std::to_string(img.height) + "x" +
                       std::to_string(img.width) + " (upsampling is not supported)");

  Raster out;
  out.width = cols;
  out.height = rows;
  out.channels = 1;
  out.data.resize(static_cast<std::size_t>(rows) * cols);

  const double sy = static_cast<double>(img.height) / rows;
  const double sx = static_cast<double>(img.width) / cols;
  for (int i = 0; i < rows; ++i) {
    const double r0 = i * sy;
    const double r1 = (i + 1) * sy;
    for (int j = 0; j < cols; ++j) {
      const double c0 = j * sx;
      const double c1 = (j + 1) * sx;
      double acc = 0.0;
      double area = 0.0;
      for (int sr = static_cast<int>(r0); sr < img.height && sr < r1; ++sr) {
        const double hr = std::min(r1, sr + 1.0) - std::max(r0, static_cast<double>(sr));
        if (hr <= 0.0) continue;
        for (int sc = static_cast<int>(c0); sc < img.width && sc < c1; ++sc) {
          const double wc = std::min(c1, sc + 1.0) - std::max(c0, static_cast<double>(sc));
          if (wc <= 0.0) continue;
          acc += img.at(sr, sc) * hr * wc;
          area += hr * wc;
        }
      }
      out.at(i, j) = acc / area;
    }
  }
  return out;
}

Raster equalize_histogram(const Raster& img) {
  require_single_channel(img, "equalize_histogram");

  std::array<std::size_t, 256> hist{};
  for (double v : img.data) hist[static_cast<std::size_t>(clamp_level(v))]++;

  std::array<std::size_t, 256> cdf{};
  std::size_t running = 0;
  std::size_t cdf_min = 0;
  for (int level = 0; level < 256; ++level) {
    running += hist[level];
    cdf[level] = running;
    if (cdf_min == 0 && hist[level] > 0) cdf_min = cdf[level];
  }

  const std::size_t pixels = img.data.size();
  Raster out = img;
  if (pixels == cdf_min) {
    // Single occupied level: the usual formula degenerates, map to zero.
    std::fill(out.data.begin(), out.data.end(), 0.0);
    return out;
  }
  const double denom = static_cast<double>(pixels - cdf_min);
  for (std::size_t i = 0; i < pixels; ++i) {
    const std::size_t level = static_cast<std::size_t>(clamp_level(img.data[i]));
    out.data[i] =
        static_cast<double>(std::lround((cdf[level] - cdf_min) / denom * 255.0));
  }
  return out;
}

ImageVector vectorize(const Raster& img) {
  require_single_channel(img, "vectorize");
  ImageVector out;
  out.rows = img.height;
  out.cols = img.width;
  out.values.resize(static_cast<Eigen::Index>(img.height) * img.width);
  for (int c = 0; c < img.width; ++c)
    for (int r = 0; r < img.height; ++r)
      out.values[static_cast<Eigen::Index>(c) * img.height + r] = img.at(r, c);
  return out;
}

ImageVector standardize(const ImageVector& v, bool* degenerate) {
  if (v.values.size() < 2)
    throw InvalidInput("standardize: need at least 2 elements, got " +
                       std::to_string(v.values.size()));
  if (degenerate) *degenerate = false;

  const double mean = v.values.mean();
  const Eigen::VectorXd centered = v.values.array() - mean;
  const double stddev = std::sqrt(centered.squaredNorm() / static_cast<double>(v.values.size()));

  ImageVector out = v;
  if (stddev < 1e-12 * std::max(1.0, std::abs(mean))) {
    out.values.setZero();
    if (degenerate) *degenerate = true;
    return out;
  }
  out.values = centered / stddev;
  return out;
}

ImageVector preprocess_pixel_vector(const Raster& img, const PreprocessConfig& cfg) {
  if (cfg.rows < 1 || cfg.cols < 1)
    throw InvalidConfig("preprocess: target dimensions must be positive");
  Raster gray = to_grayscale(img);
  Raster small = downsample(gray, cfg.rows, cfg.cols);
  if (cfg.equalize) small = equalize_histogram(small);
  return vectorize(small);
}

ImageVector preprocess_pipeline(const Raster& img, const PreprocessConfig& cfg) {
  ImageVector v = preprocess_pixel_vector(img, cfg);
  if (cfg.standardize) v = standardize(v);
  return v;
}

}  // namespace lrcset
