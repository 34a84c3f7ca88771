#pragma once

#include <cstdint>
#include <vector>

#include "goxlens/types.hpp"

namespace goxlens::ml {

struct TreeNode {
  int feature = -1;  ///< -1 marks a leaf
  double threshold = 0;
  int left = -1;
  int right = -1;
  double value = 0;
};

/// Binary regression tree; rows with x[feature] <= threshold go left.
struct Tree {
  std::vector<TreeNode> nodes;

  template <typename Row>
  double predict_row(const Row& x) const {
    int i = 0;
    while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
      const TreeNode& n = nodes[static_cast<std::size_t>(i)];
      i = x(n.feature) <= n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(i)].value;
  }
  VecXd predict(const MatXd& X) const;
  int depth() const;
};

/// Feature columns sorted once and shared by every tree grown on X.
struct SortedColumns {
  explicit SortedColumns(const MatXd& X);
  std::vector<std::vector<Eigen::Index>> order;
};

struct TreeParams {
  int max_depth = 3;
  double lambda = 0;
  int features_per_split = 0;  ///< 0 = all features
  std::uint64_t seed = 0;      ///< feature subsampling stream
};

/// Grows a tree level by level from first- and second-order statistics:
/// a node with sums (G, H) has weight -G / (H + lambda) and score
/// G^2 / (H + lambda); a split's gain is the children's score minus the
/// parent's. Rows with h = 0 take no part. `gain` accumulates per feature.
Tree grow_tree(const MatXd& X, const SortedColumns& sorted, const VecXd& g, const VecXd& h, const TreeParams& params,
               VecXd& gain);

/// Squared-error regression tree (weights default to 1).
Tree fit_regression_tree(const MatXd& X, const SortedColumns& sorted, const VecXd& y, const VecXd& w,
                         const TreeParams& params, VecXd& gain);

}  // namespace goxlens::ml
