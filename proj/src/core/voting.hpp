#pragma once

#include <Eigen/Core>
#include <utility>

namespace lrcset {

enum class VoteStrategy { exponential, majority, knn };

struct VoteConfig {
  VoteStrategy strategy = VoteStrategy::exponential;
  double alpha = 0.2;  // decay rate of the exponential weight
  int k = 1;           // neighbour count for knn, odd
};

struct VoteOutcome {
  Eigen::MatrixXd theta;  // C x M per-image weights; empty unless exponential
  Eigen::VectorXd Theta;  // accumulated score per class
};

/// theta = exp(-alpha * d) per entry, Theta = row sums.
VoteOutcome vote_exponential(const Eigen::MatrixXd& distances, double alpha);

/// Each image casts one vote for its minimum-distance class (ties go to the
/// lowest class index).
Eigen::VectorXd vote_majority(const Eigen::MatrixXd& distances);

/// Pools all (class, distance) pairs, takes the k globally smallest and
/// counts class occurrences.
Eigen::VectorXd vote_knn(const Eigen::MatrixXd& distances, int k);

/// Argmax with deterministic tie handling: smallest index wins, flag set on
/// an exact tie.
std::pair<int, bool> decide(const Eigen::VectorXd& Theta);

/// Dispatch on the configured strategy.
VoteOutcome apply_votes(const Eigen::MatrixXd& distances, const VoteConfig& cfg);

}  // namespace lrcset
