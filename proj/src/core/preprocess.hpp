#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <vector>

namespace lrcset {

/// In-memory raster image. Intensities are doubles on the 0..255 scale,
/// channels interleaved, rows stored top to bottom.
struct Raster {
  int width = 0;
  int height = 0;
  int channels = 1;  // 1 (grayscale) or 3 (RGB)
  std::vector<double> data;  // row-major, size = width * height * channels

  double at(int row, int col, int channel = 0) const {
    return data[(static_cast<std::size_t>(row) * width + col) * channels + channel];
  }
  double& at(int row, int col, int channel = 0) {
    return data[(static_cast<std::size_t>(row) * width + col) * channels + channel];
  }
};

/// A raster flattened column by column into a vector of length rows * cols.
struct ImageVector {
  Eigen::VectorXd values;
  int rows = 0;
  int cols = 0;
};

struct PreprocessConfig {
  int rows = 0;  // target height a
  int cols = 0;  // target width b
  bool equalize = false;     // histogram equalization after downsampling
  bool standardize = false;  // per-image zero mean / unit deviation
};

/// RGB to grayscale with the 0.299/0.587/0.114 luma weights, rounded.
/// Single-channel input is returned unchanged.
Raster to_grayscale(const Raster& img);

/// Area-weighted box average down to rows x cols. Upsampling is rejected.
Raster downsample(const Raster& img, int rows, int cols);

/// Classic 256-bin CDF equalization. Fractional intensities are binned to the
/// nearest level; a single-level image maps to all zeros.
Raster equalize_histogram(const Raster& img);

/// Column concatenation: element (r, c) lands at index c * rows + r.
ImageVector vectorize(const Raster& img);

/// Zero mean, unit population deviation. A constant vector becomes the zero
/// vector; `degenerate` (when given) reports that case.
ImageVector standardize(const ImageVector& v, bool* degenerate = nullptr);

/// grayscale -> downsample -> optional equalization -> vectorize.
/// Values stay on the 0..255 pixel scale.
ImageVector preprocess_pixel_vector(const Raster& img, const PreprocessConfig& cfg);

/// Full pipeline: the pixel stage followed by standardization when configured.
ImageVector preprocess_pipeline(const Raster& img, const PreprocessConfig& cfg);

}  // namespace lrcset
