#include "core/regressor.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <limits>
#include <random>
#include <string>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace lrcset {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double rank_tolerance(const Eigen::MatrixXd& m, double sigma_max) {
  return static_cast<double>(std::max(m.rows(), m.cols())) * kEps * sigma_max;
}

void require_rows(const Regressor& reg, const Eigen::MatrixXd& X, const char* op) {
  if (X.rows() != reg.dim())
    throw InvalidInput(std::string(op) + ": test matrix has " + std::to_string(X.rows()) +
                       " rows, regressor expects " + std::to_string(reg.dim()));
}

}  // namespace

Eigen::Index numerical_rank(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  const double tol = rank_tolerance(m, s(0));
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > tol) ++rank;
  return rank;
}

Eigen::MatrixXd pseudoinverse(const Eigen::MatrixXd& m) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
  if (s.size() > 0 && s(0) > 0.0) {
    const double tol = rank_tolerance(m, s(0));
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s(i) > tol) inv(i) = 1.0 / s(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Regressor build_regressor(Eigen::MatrixXd columns, int class_id) {
  if (columns.cols() < 1) throw InvalidInput("build_regressor: no gallery images given");
  if (columns.rows() < columns.cols())
    throw ConditionViolation("build_regressor: image vector length (" +
                             std::to_string(columns.rows()) +
                             ") must be at least the gallery image count (" +
                             std::to_string(columns.cols()) + ")");
  Regressor reg;
  reg.class_id = class_id;
  reg.Q = std::move(columns);
  reg.rank = numerical_rank(reg.Q);
  return reg;
}

Regressor build_regressor(const std::vector<ImageVector>& images, int class_id) {
  if (images.empty()) throw InvalidInput("build_regressor: no gallery images given");
  const Eigen::Index t = images.front().values.size();
  Eigen::MatrixXd q(t, static_cast<Eigen::Index>(images.size()));
  for (std::size_t n = 0; n < images.size(); ++n) {
    if (images[n].values.size() != t)
      throw InvalidInput("build_regressor: image vectors differ in length (" +
                         std::to_string(images[n].values.size()) + " vs " + std::to_string(t) +
                         ")");
    q.col(static_cast<Eigen::Index>(n)) = images[n].values;
  }
  return build_regressor(std::move(q), class_id);
}

Regressor perturb(const Regressor& reg, std::uint64_t seed) {
  Regressor out = reg;
  std::mt19937_64 gen(seed);
  // Column-major order over the storage keeps the draw sequence well defined.
  for (Eigen::Index i = 0; i < out.Q.size(); ++i)
    out.Q.data()[i] += rng::uniform(gen, -0.5, 0.5);
  out.rank = numerical_rank(out.Q);
  out.perturbed = true;
  out.perturb_seed = seed;
  out.pinv.reset();  // stale after the entries moved
  return out;
}

Eigen::MatrixXd solve_gamma_normal(const Regressor& reg, const Eigen::MatrixXd& X) {
  require_rows(reg, X, "solve_gamma_normal");
  if (!reg.full_column_rank())
    throw SingularRegressor("solve_gamma_normal: regressor for class " +
                            std::to_string(reg.class_id) + " is rank deficient (rank " +
                            std::to_string(reg.rank) + " of " + std::to_string(reg.columns()) +
                            "); perturb it or use the QR solver");
  const Eigen::MatrixXd qtq = reg.Q.transpose() * reg.Q;
  Eigen::LLT<Eigen::MatrixXd> llt(qtq);
  if (llt.info() != Eigen::Success)
    throw SingularRegressor("solve_gamma_normal: normal matrix is numerically singular for class " +
                            std::to_string(reg.class_id));
  return llt.solve(reg.Q.transpose() * X);
}

Eigen::MatrixXd solve_gamma_qr(const Regressor& reg, const Eigen::MatrixXd& X) {
  require_rows(reg, X, "solve_gamma_qr");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(reg.Q);
  // Align the factorization's rank decision with the singular-value rule.
  qr.setThreshold(static_cast<double>(std::max(reg.Q.rows(), reg.Q.cols())) * kEps);
  return qr.solve(X);
}

Regressor precompute_pinv(Regressor reg) {
  reg.pinv = pseudoinverse(reg.Q);
  return reg;
}

Reconstruction reconstruct(const Regressor& reg, const Eigen::MatrixXd& X) {
  require_rows(reg, X, "reconstruct");
  Reconstruction rec;
  if (reg.pinv) {
    rec.reconstructed = reg.Q * (*reg.pinv * X);
  } else {
    rec.reconstructed = reg.Q * solve_gamma_qr(reg, X);
  }
  rec.distances = residual_distances(X, rec.reconstructed);
  return rec;
}

Eigen::VectorXd residual_distances(const Eigen::MatrixXd& X, const Eigen::MatrixXd& X_hat) {
  if (X.rows() != X_hat.rows() || X.cols() != X_hat.cols())
    throw InvalidInput("residual_distances: shapes differ (" + std::to_string(X.rows()) + "x" +
                       std::to_string(X.cols()) + " vs " + std::to_string(X_hat.rows()) + "x" +
                       std::to_string(X_hat.cols()) + ")");
  return (X - X_hat).colwise().norm().transpose();
}

}  // namespace lrcset
