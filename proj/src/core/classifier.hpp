#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "core/preprocess.hpp"
#include "core/regressor.hpp"
#include "core/voting.hpp"

namespace lrcset {

/// How a rank-deficient regressor is repaired at gallery formation.
/// perturb: seeded uniform +-0.5 noise on the pixel-scale matrix.
/// qr: leave the matrix alone; the rank-tolerant solvers handle it.
enum class Remedy { perturb, qr };

/// fast: cached pseudoinverse, two matrix products per class.
/// naive: per-vector normal-equation solves; baseline for timing comparisons.
enum class SolverPath { fast, naive };

struct GalleryConfig {
  PreprocessConfig preprocess;
  int gallery_size = 0;  // images sampled per class; 0 = use everything supplied
  Remedy remedy = Remedy::perturb;
  std::uint64_t seed = 0;
};

/// One regressor per class, all sharing the preprocessing they were built
/// with. Immutable after formation; safe to share across threads.
struct Gallery {
  std::vector<Regressor> regressors;  // class_id equals position
  std::vector<std::string> labels;
  PreprocessConfig preprocess;

  int class_count() const { return static_cast<int>(regressors.size()); }
  Eigen::Index dim() const { return regressors.empty() ? 0 : regressors.front().dim(); }
};

struct TestSet {
  Eigen::MatrixXd X;  // T x M, one preprocessed image vector per column
  std::string set_id;
};

struct ClassificationResult {
  Eigen::MatrixXd distances;  // C x M reconstruction errors
  Eigen::MatrixXd theta;      // C x M weights (exponential strategy only)
  Eigen::VectorXd Theta;      // accumulated score per class
  int predicted = -1;
  bool tie = false;
};

using LabeledRasterSet = std::pair<std::string, std::vector<Raster>>;

/// Samples gallery images per class, preprocesses them, assembles the
/// regressors, repairs rank deficiencies per the configured remedy and caches
/// each pseudoinverse.
Gallery form_gallery(const std::vector<LabeledRasterSet>& classes, const GalleryConfig& cfg);

/// Reconstructs the test matrix from every class subspace, turns the
/// residual distances into votes and decides the set's class.
ClassificationResult classify_set(const Gallery& gallery, const TestSet& test,
                                  const VoteConfig& vote, SolverPath path = SolverPath::fast);

/// Running accumulator for one-image-at-a-time classification.
struct StreamState {
  Eigen::VectorXd Theta;
  Eigen::Index images_seen = 0;
};

/// Processes a single image, folds its votes into the state and re-decides.
/// After M calls the decision matches classify_set on the same images for the
/// exponential and majority strategies; knn is rejected because its global
/// top-k needs all distances at once.
ClassificationResult classify_stream(const Gallery& gallery, StreamState& state,
                                     const ImageVector& image, const VoteConfig& vote);

/// Preprocesses rasters with the gallery's configuration into a test matrix.
TestSet make_test_set(const Gallery& gallery, const std::vector<Raster>& images,
                      std::string set_id);

}  // namespace lrcset
