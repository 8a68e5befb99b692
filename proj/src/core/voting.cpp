#include "core/voting.hpp"

#include <algorithm>
#include <string>
#include <tuple>
#include <vector>

#include "core/errors.hpp"

namespace lrcset {

VoteOutcome vote_exponential(const Eigen::MatrixXd& distances, double alpha) {
  if (alpha <= 0.0)
    throw InvalidConfig("vote_exponential: alpha must be positive, got " + std::to_string(alpha));
  VoteOutcome out;
  out.theta = (-alpha * distances.array()).exp();
  out.Theta = out.theta.rowwise().sum();
  return out;
}

Eigen::VectorXd vote_majority(const Eigen::MatrixXd& distances) {
  if (distances.rows() < 1) throw InvalidInput("vote_majority: no classes");
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(distances.rows());
  for (Eigen::Index m = 0; m < distances.cols(); ++m) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < distances.rows(); ++c)
      if (distances(c, m) < distances(best, m)) best = c;  // strict: ties keep the lowest index
    counts(best) += 1.0;
  }
  return counts;
}

Eigen::VectorXd vote_knn(const Eigen::MatrixXd& distances, int k) {
  const Eigen::Index pool = distances.size();
  if (k < 1 || k % 2 == 0)
    throw InvalidConfig("vote_knn: k must be a positive odd integer, got " + std::to_string(k));
  if (k > pool)
    throw InvalidConfig("vote_knn: k = " + std::to_string(k) + " exceeds the " +
                        std::to_string(pool) + " pooled (class, distance) pairs");

  std::vector<std::tuple<double, Eigen::Index, Eigen::Index>> pairs;  // (d, class, image)
  pairs.reserve(static_cast<std::size_t>(pool));
  for (Eigen::Index c = 0; c < distances.rows(); ++c)
    for (Eigen::Index m = 0; m < distances.cols(); ++m)
      pairs.emplace_back(distances(c, m), c, m);
  std::sort(pairs.begin(), pairs.end());  // distance, then class, then image: deterministic on ties

  Eigen::VectorXd counts = Eigen::VectorXd::Zero(distances.rows());
  for (int i = 0; i < k; ++i) counts(std::get<1>(pairs[static_cast<std::size_t>(i)])) += 1.0;
  return counts;
}

std::pair<int, bool> decide(const Eigen::VectorXd& Theta) {
  if (Theta.size() < 1) throw InvalidInput("decide: empty score vector");
  Eigen::Index best = 0;
  for (Eigen::Index c = 1; c < Theta.size(); ++c)
    if (Theta(c) > Theta(best)) best = c;
  bool tie = false;
  for (Eigen::Index c = 0; c < Theta.size(); ++c)
    if (c != best && Theta(c) == Theta(best)) tie = true;
  return {static_cast<int>(best), tie};
}

VoteOutcome apply_votes(const Eigen::MatrixXd& distances, const VoteConfig& cfg) {
  switch (cfg.strategy) {
    case VoteStrategy::exponential:
      return vote_exponential(distances, cfg.alpha);
    case VoteStrategy::majority:
      return {Eigen::MatrixXd(), vote_majority(distances)};
    case VoteStrategy::knn:
      return {Eigen::MatrixXd(), vote_knn(distances, cfg.k)};
  }
  throw InvalidConfig("apply_votes: unknown strategy");
}

}  // namespace lrcset
