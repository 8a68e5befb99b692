#include "core/classifier.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <random>
#include <set>
#include <string>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace lrcset {

namespace {

Eigen::MatrixXd standardize_columns(const Eigen::MatrixXd& px, int rows, int cols) {
  Eigen::MatrixXd out(px.rows(), px.cols());
  for (Eigen::Index j = 0; j < px.cols(); ++j)
    out.col(j) = standardize(ImageVector{px.col(j), rows, cols}).values;
  return out;
}

void require_compatible(const Gallery& gallery, Eigen::Index rows, const char* op) {
  if (gallery.class_count() == 0) throw InvalidInput(std::string(op) + ": empty gallery");
  if (rows != gallery.dim())
    throw InvalidInput(std::string(op) + ": image vectors have length " + std::to_string(rows) +
                       ", gallery expects " + std::to_string(gallery.dim()));
}

}  // namespace

Gallery form_gallery(const std::vector<LabeledRasterSet>& classes, const GalleryConfig& cfg) {
  if (classes.empty()) throw InvalidInput("form_gallery: no classes given");
  if (cfg.preprocess.rows < 1 || cfg.preprocess.cols < 1)
    throw InvalidConfig("form_gallery: preprocessing dimensions must be positive");

  const Eigen::Index t = static_cast<Eigen::Index>(cfg.preprocess.rows) * cfg.preprocess.cols;
  if (cfg.gallery_size > t)
    throw ConditionViolation("form_gallery: gallery size " + std::to_string(cfg.gallery_size) +
                             " exceeds the image vector length " + std::to_string(t));

  std::set<std::string> seen;
  for (const auto& [label, rasters] : classes) {
    if (!seen.insert(label).second)
      throw InvalidInput("form_gallery: duplicate class label '" + label + "'");
    if (rasters.empty()) throw InvalidInput("form_gallery: class '" + label + "' has no images");
  }

  Gallery gallery;
  gallery.preprocess = cfg.preprocess;
  gallery.regressors.reserve(classes.size());
  gallery.labels.reserve(classes.size());

  for (std::size_t ci = 0; ci < classes.size(); ++ci) {
    const auto& [label, rasters] = classes[ci];
    std::mt19937_64 gen(rng::derive_seed(cfg.seed, ci));
    const std::size_t take =
        cfg.gallery_size == 0 ? rasters.size()
                              : std::min<std::size_t>(rasters.size(), cfg.gallery_size);
    const auto picked = rng::sample_without_replacement(rasters.size(), take, gen);

    // Pixel-scale matrix first (0..255 values); standardization, when
    // configured, is applied per column afterwards so a perturbation remedy
    // can act on raw intensity values.
    Eigen::MatrixXd q_px(t, static_cast<Eigen::Index>(take));
    for (std::size_t j = 0; j < picked.size(); ++j)
      q_px.col(static_cast<Eigen::Index>(j)) =
          preprocess_pixel_vector(rasters[picked[j]], cfg.preprocess).values;

    const int class_id = static_cast<int>(ci);
    auto finalize = [&](const Eigen::MatrixXd& px) {
      return cfg.preprocess.standardize
                 ? standardize_columns(px, cfg.preprocess.rows, cfg.preprocess.cols)
                 : px;
    };

    Regressor reg = build_regressor(finalize(q_px), class_id);
    if (!reg.full_column_rank() && cfg.remedy == Remedy::perturb) {
      Regressor raw = build_regressor(q_px, class_id);
      raw = perturb(raw, rng::derive_seed(cfg.seed, 0x7065727475ULL + ci));
      reg = build_regressor(finalize(raw.Q), class_id);
      reg.perturbed = true;
      reg.perturb_seed = raw.perturb_seed;
    }
    gallery.regressors.push_back(precompute_pinv(std::move(reg)));
    gallery.labels.push_back(label);
  }
  return gallery;
}

ClassificationResult classify_set(const Gallery& gallery, const TestSet& test,
                                  const VoteConfig& vote, SolverPath path) {
  require_compatible(gallery, test.X.rows(), "classify_set");
  if (test.X.cols() < 1) throw InvalidInput("classify_set: test set has no images");

  const int c_count = gallery.class_count();
  const Eigen::Index m_count = test.X.cols();
  Eigen::MatrixXd distances(c_count, m_count);

  if (path == SolverPath::fast) {
    for (int c = 0; c < c_count; ++c)
      distances.row(c) = reconstruct(gallery.regressors[c], test.X).distances.transpose();
  } else {
    // Per-vector normal-equation baseline. The normal matrix is factored
    // once per class per call; only the solves run column by column.
    for (int c = 0; c < c_count; ++c) {
      const Regressor& reg = gallery.regressors[c];
      if (!reg.full_column_rank())
        throw SingularRegressor("classify_set: naive path needs full-rank regressors; class " +
                                std::to_string(reg.class_id) + " has rank " +
                                std::to_string(reg.rank) + " of " + std::to_string(reg.columns()));
      Eigen::LLT<Eigen::MatrixXd> llt(reg.Q.transpose() * reg.Q);
      if (llt.info() != Eigen::Success)
        throw SingularRegressor("classify_set: normal matrix is numerically singular for class " +
                                std::to_string(reg.class_id));
      for (Eigen::Index m = 0; m < m_count; ++m) {
        const Eigen::VectorXd gamma = llt.solve(reg.Q.transpose() * test.X.col(m));
        distances(c, m) = (test.X.col(m) - reg.Q * gamma).norm();
      }
    }
  }

  VoteOutcome votes = apply_votes(distances, vote);
  auto [predicted, tie] = decide(votes.Theta);
  return {std::move(distances), std::move(votes.theta), std::move(votes.Theta), predicted, tie};
}

ClassificationResult classify_stream(const Gallery& gallery, StreamState& state,
                                     const ImageVector& image, const VoteConfig& vote) {
  if (vote.strategy == VoteStrategy::knn)
    throw UnsupportedOperation(
        "classify_stream: knn voting needs the full distance pool and cannot run online");
  require_compatible(gallery, image.values.size(), "classify_stream");

  const int c_count = gallery.class_count();
  if (state.Theta.size() == 0) state.Theta = Eigen::VectorXd::Zero(c_count);
  if (state.Theta.size() != c_count)
    throw InvalidInput("classify_stream: state was initialized for " +
                       std::to_string(state.Theta.size()) + " classes, gallery has " +
                       std::to_string(c_count));

  Eigen::MatrixXd x(image.values.size(), 1);
  x.col(0) = image.values;
  Eigen::MatrixXd distances(c_count, 1);
  for (int c = 0; c < c_count; ++c)
    distances(c, 0) = reconstruct(gallery.regressors[c], x).distances(0);

  VoteOutcome votes = apply_votes(distances, vote);
  state.Theta += votes.Theta;
  state.images_seen += 1;

  auto [predicted, tie] = decide(state.Theta);
  ClassificationResult result;
  result.distances = std::move(distances);
  result.theta = std::move(votes.theta);
  result.Theta = state.Theta;
  result.predicted = predicted;
  result.tie = tie;
  return result;
}

TestSet make_test_set(const Gallery& gallery, const std::vector<Raster>& images,
                      std::string set_id) {
  if (images.empty()) throw InvalidInput("make_test_set: no images in set '" + set_id + "'");
  const Eigen::Index t = gallery.dim();
  TestSet ts;
  ts.set_id = std::move(set_id);
  ts.X.resize(t, static_cast<Eigen::Index>(images.size()));
  for (std::size_t m = 0; m < images.size(); ++m) {
    const ImageVector v = preprocess_pipeline(images[m], gallery.preprocess);
    if (v.values.size() != t)
      throw InvalidInput("make_test_set: preprocessed image length " +
                         std::to_string(v.values.size()) + " does not match gallery dimension " +
                         std::to_string(t));
    ts.X.col(static_cast<Eigen::Index>(m)) = v.values;
  }
  return ts;
}

}  // namespace lrcset
