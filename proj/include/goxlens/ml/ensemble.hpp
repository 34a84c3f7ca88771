#pragma once

#include <cstdint>
#include <vector>

#include "goxlens/ml/lagged.hpp"
#include "goxlens/ml/tree.hpp"

namespace goxlens::ml {

struct TreeModel {
  Tree tree;
  VecXd importance;

  VecXd predict(const MatXd& X) const { return tree.predict(X); }
};

struct ForestModel {
  std::vector<Tree> trees;
  VecXd importance;  ///< gain averaged over trees

  VecXd predict(const MatXd& X) const;
};

enum class BoostMode { gradient_second_order, adaboost_regression };

struct BoostModel {
  BoostMode mode = BoostMode::gradient_second_order;
  double base = 0;
  double learning_rate = 0.3;
  std::vector<Tree> trees;
  std::vector<double> tree_weights;  ///< AdaBoost: ln(1 / beta)
  VecXd importance;                  ///< gain summed over rounds

  VecXd predict(const MatXd& X) const;
};

struct BoostParams {
  int n_rounds = 100;
  int max_depth = 3;
  double learning_rate = 0.3;
  double lambda = 1.0;
};

/// Minimum number of training rows accepted by the tree learners.
inline constexpr Eigen::Index kMinTreeRows = 50;

TreeModel train_tree(const LaggedDataset& ds, int max_depth = 3);
TreeModel train_tree(const MatXd& X, const VecXd& y, int max_depth = 3);

ForestModel train_forest(const LaggedDataset& ds, int n_trees, int max_depth, std::uint64_t seed);
ForestModel train_forest(const MatXd& X, const VecXd& y, int n_trees, int max_depth, std::uint64_t seed);

BoostModel train_boost(const LaggedDataset& ds, BoostMode mode, int n_rounds, int max_depth, std::uint64_t seed);
BoostModel train_boost(const MatXd& X, const VecXd& y, BoostMode mode, const BoostParams& params, std::uint64_t seed);

}  // namespace goxlens::ml
