#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

#include "core/preprocess.hpp"

namespace lrcset {

/// Class-specific subspace model: a T x N matrix whose columns are the
/// gallery image vectors of one class. T >= N is enforced at construction
/// so the least-squares problem stays overdetermined.
struct Regressor {
  int class_id = 0;
  Eigen::MatrixXd Q;                    // T x N
  Eigen::Index rank = 0;                // numerical rank of Q
  std::optional<Eigen::MatrixXd> pinv;  // N x T cached Moore-Penrose pseudoinverse
  bool perturbed = false;
  std::uint64_t perturb_seed = 0;

  Eigen::Index dim() const { return Q.rows(); }
  Eigen::Index columns() const { return Q.cols(); }
  bool full_column_rank() const { return rank == Q.cols(); }
};

/// Reconstruction of a test matrix from one class subspace, with the
/// per-column residual norms.
struct Reconstruction {
  Eigen::MatrixXd reconstructed;  // T x M
  Eigen::VectorXd distances;      // length M, Euclidean residual per column
};

/// Singular values below max(T, N) * eps * sigma_max count as zero.
Eigen::Index numerical_rank(const Eigen::MatrixXd& m);

/// SVD-based Moore-Penrose pseudoinverse with the same rank tolerance.
Eigen::MatrixXd pseudoinverse(const Eigen::MatrixXd& m);

Regressor build_regressor(const std::vector<ImageVector>& images, int class_id);
Regressor build_regressor(Eigen::MatrixXd columns, int class_id);

/// Adds seeded uniform noise in [-0.5, 0.5] to every entry and recomputes the
/// rank. Meant for pixel-scale (0..255) matrices, where the distortion is at
/// most half an intensity level. Any cached pseudoinverse is dropped.
Regressor perturb(const Regressor& reg, std::uint64_t seed);

/// Normal-equation estimate (Q'Q)^{-1} Q'X. Requires full column rank.
Eigen::MatrixXd solve_gamma_normal(const Regressor& reg, const Eigen::MatrixXd& X);

/// Basic least-squares solution from a column-pivoting QR factorization;
/// at most rank-many nonzero coefficients per column, works for any rank.
Eigen::MatrixXd solve_gamma_qr(const Regressor& reg, const Eigen::MatrixXd& X);

/// Computes and caches the pseudoinverse used by the fast reconstruction path.
Regressor precompute_pinv(Regressor reg);

/// Projects the columns of X onto the regressor's column space. Uses the
/// cached pseudoinverse (two matrix products) when present, the QR path
/// otherwise.
Reconstruction reconstruct(const Regressor& reg, const Eigen::MatrixXd& X);

/// Column-wise Euclidean distances between two equally shaped matrices.
Eigen::VectorXd residual_distances(const Eigen::MatrixXd& X, const Eigen::MatrixXd& X_hat);

}  // namespace lrcset
