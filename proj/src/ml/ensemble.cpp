#include "goxlens/ml/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "goxlens/error.hpp"
#include "goxlens/ml/parallel.hpp"
#include "goxlens/rng.hpp"

namespace goxlens::ml {

namespace {

void check_rows(const MatXd& X, const VecXd& y) {
  if (X.rows() != y.size()) throw DataError("feature and target row counts differ");
  if (X.rows() < kMinTreeRows)
    throw InsufficientDataError("tree learners need at least " + std::to_string(kMinTreeRows) + " training rows, got " +
                                std::to_string(X.rows()));
}

bool constant(const VecXd& y) { return y.size() == 0 || (y.array() == y(0)).all(); }

Tree leaf(double value) {
  Tree t;
  t.nodes.push_back({});
  t.nodes.back().value = value;
  return t;
}

}  // namespace

VecXd ForestModel::predict(const MatXd& X) const {
  VecXd out = VecXd::Zero(X.rows());
  for (const Tree& t : trees) out += t.predict(X);
  return out / static_cast<double>(trees.size());
}

VecXd BoostModel::predict(const MatXd& X) const {
  if (mode == BoostMode::gradient_second_order) {
    VecXd out = VecXd::Constant(X.rows(), base);
    for (const Tree& t : trees) out += learning_rate * t.predict(X);
    return out;
  }
  if (trees.empty()) return VecXd::Constant(X.rows(), base);
  // Weighted median over the estimators.
  const double total = std::accumulate(tree_weights.begin(), tree_weights.end(), 0.0);
  VecXd out(X.rows());
  std::vector<std::pair<double, double>> preds(trees.size());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (std::size_t m = 0; m < trees.size(); ++m) preds[m] = {trees[m].predict_row(X.row(i)), tree_weights[m]};
    std::stable_sort(preds.begin(), preds.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    double acc = 0;
    out(i) = preds.back().first;
    for (const auto& [p, w] : preds) {
      acc += w;
      if (acc >= 0.5 * total) {
        out(i) = p;
        break;
      }
    }
  }
  return out;
}

TreeModel train_tree(const MatXd& X, const VecXd& y, int max_depth) {
  check_rows(X, y);
  TreeModel m;
  m.importance = VecXd::Zero(X.cols());
  if (constant(y)) {
    m.tree = leaf(y(0));
    return m;
  }
  const SortedColumns sorted(X);
  TreeParams p;
  p.max_depth = max_depth;
  m.tree = fit_regression_tree(X, sorted, y, VecXd::Ones(y.size()), p, m.importance);
  return m;
}

TreeModel train_tree(const LaggedDataset& ds, int max_depth) { return train_tree(MatXd(ds.train_X()), VecXd(ds.train_y()), max_depth); }

ForestModel train_forest(const MatXd& X, const VecXd& y, int n_trees, int max_depth, std::uint64_t seed) {
  check_rows(X, y);
  if (n_trees < 1) throw DataError("forest needs at least one tree");
  ForestModel m;
  m.importance = VecXd::Zero(X.cols());
  if (constant(y)) {
    m.trees.assign(static_cast<std::size_t>(n_trees), leaf(y(0)));
    return m;
  }
  const SortedColumns sorted(X);
  const auto n = static_cast<std::uint64_t>(X.rows());
  m.trees.resize(static_cast<std::size_t>(n_trees));
  std::vector<VecXd> gains(static_cast<std::size_t>(n_trees), VecXd::Zero(X.cols()));
  parallel_for(static_cast<std::size_t>(n_trees), [&](std::size_t t) {
    CounterRng rng(seed, 0x666f72657374ULL + t);
    VecXd w = VecXd::Zero(X.rows());
    for (std::uint64_t k = 0; k < n; ++k) w(static_cast<Eigen::Index>(rng.below(n))) += 1.0;
    TreeParams p;
    p.max_depth = max_depth;
    p.features_per_split = std::max<int>(1, static_cast<int>(X.cols()) / 3);
    p.seed = rng.next();
    m.trees[t] = fit_regression_tree(X, sorted, y, w, p, gains[t]);
  });
  for (const VecXd& g : gains) m.importance += g;
  m.importance /= static_cast<double>(n_trees);
  return m;
}

ForestModel train_forest(const LaggedDataset& ds, int n_trees, int max_depth, std::uint64_t seed) {
  return train_forest(MatXd(ds.train_X()), VecXd(ds.train_y()), n_trees, max_depth, seed);
}

BoostModel train_boost(const MatXd& X, const VecXd& y, BoostMode mode, const BoostParams& params, std::uint64_t seed) {
  check_rows(X, y);
  BoostModel m;
  m.mode = mode;
  m.learning_rate = params.learning_rate;
  m.importance = VecXd::Zero(X.cols());
  m.base = y.mean();
  if (constant(y)) {
    m.base = y(0);
    return m;
  }
  const SortedColumns sorted(X);
  TreeParams p;
  p.max_depth = params.max_depth;
  p.seed = seed;

  if (mode == BoostMode::gradient_second_order) {
    p.lambda = params.lambda;
    VecXd F = VecXd::Constant(y.size(), m.base);
    const VecXd h = VecXd::Ones(y.size());
    for (int r = 0; r < params.n_rounds; ++r) {
      const VecXd g = F - y;
      Tree t = grow_tree(X, sorted, g, h, p, m.importance);
      F += m.learning_rate * t.predict(X);
      m.trees.push_back(std::move(t));
    }
    return m;
  }

  // AdaBoost.R2 with squared relative loss; sample weights enter the tree fit.
  VecXd w = VecXd::Constant(y.size(), 1.0 / static_cast<double>(y.size()));
  for (int r = 0; r < params.n_rounds; ++r) {
    VecXd gain = VecXd::Zero(X.cols());
    Tree t = fit_regression_tree(X, sorted, y, w, p, gain);
    const VecXd err = (t.predict(X) - y).cwiseAbs();
    const double dmax = err.maxCoeff();
    if (!(dmax > 0)) {
      m.trees.push_back(std::move(t));
      m.tree_weights.push_back(1.0);
      m.importance += gain;
      break;
    }
    const VecXd loss = (err / dmax).array().square().matrix();
    const double avg = w.dot(loss);
    if (avg >= 0.5) {
      if (m.trees.empty()) {
        m.trees.push_back(std::move(t));
        m.tree_weights.push_back(1.0);
        m.importance += gain;
      }
      break;
    }
    const double beta = avg / (1.0 - avg);
    m.trees.push_back(std::move(t));
    m.tree_weights.push_back(std::log(1.0 / beta));
    m.importance += gain;
    w = (w.array() * (1.0 - loss.array()).unaryExpr([beta](double e) { return std::pow(beta, e); })).matrix();
    const double s = w.sum();
    if (!(s > 0)) break;
    w /= s;
  }
  return m;
}

BoostModel train_boost(const LaggedDataset& ds, BoostMode mode, int n_rounds, int max_depth, std::uint64_t seed) {
  BoostParams p;
  p.n_rounds = n_rounds;
  p.max_depth = max_depth;
  return train_boost(MatXd(ds.train_X()), VecXd(ds.train_y()), mode, p, seed);
}

}  // namespace goxlens::ml
