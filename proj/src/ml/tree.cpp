#include "goxlens/ml/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "goxlens/rng.hpp"

namespace goxlens::ml {

VecXd Tree::predict(const MatXd& X) const {
  VecXd out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) out(i) = predict_row(X.row(i));
  return out;
}

int Tree::depth() const {
  std::vector<int> d(nodes.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    best = std::max(best, d[i]);
    if (nodes[i].feature >= 0) {
      d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
    }
  }
  return best;
}

SortedColumns::SortedColumns(const MatXd& X) : order(static_cast<std::size_t>(X.cols())) {
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    auto& o = order[static_cast<std::size_t>(j)];
    o.resize(static_cast<std::size_t>(X.rows()));
    std::iota(o.begin(), o.end(), Eigen::Index{0});
    std::stable_sort(o.begin(), o.end(), [&](Eigen::Index a, Eigen::Index b) { return X(a, j) < X(b, j); });
  }
}

namespace {

struct Candidate {
  double gain = 0;
  int feature = -1;
  double threshold = 0;
};

struct Frontier {
  int node;
  double G;
  double H;
};

}  // namespace

Tree grow_tree(const MatXd& X, const SortedColumns& sorted, const VecXd& g, const VecXd& h, const TreeParams& params,
               VecXd& gain) {
  const Eigen::Index n = X.rows();
  const auto nf = static_cast<int>(X.cols());
  const double lambda = params.lambda;
  auto score = [lambda](double G, double H) { return H + lambda > 0 ? G * G / (H + lambda) : 0.0; };

  Tree tree;
  std::vector<int> where(static_cast<std::size_t>(n), -1);  // frontier slot of each row, -1 = settled
  double G0 = 0, H0 = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (h(i) > 0) {
      where[static_cast<std::size_t>(i)] = 0;
      G0 += g(i);
      H0 += h(i);
    }
  tree.nodes.push_back({});
  std::vector<Frontier> frontier{{0, G0, H0}};
  CounterRng rng(params.seed, 0x74726565ULL);

  for (int depth = 0; depth < params.max_depth && !frontier.empty(); ++depth) {
    const std::size_t m = frontier.size();
    // Every frontier node draws its own feature subset.
    std::vector<std::vector<char>> allowed(m, std::vector<char>(static_cast<std::size_t>(nf), 1));
    if (params.features_per_split > 0 && params.features_per_split < nf) {
      for (std::size_t s = 0; s < m; ++s) {
        std::vector<int> idx(static_cast<std::size_t>(nf));
        std::iota(idx.begin(), idx.end(), 0);
        for (int k = 0; k < params.features_per_split; ++k) {
          const auto r = static_cast<int>(k + static_cast<int>(rng.below(static_cast<std::uint64_t>(nf - k))));
          std::swap(idx[static_cast<std::size_t>(k)], idx[static_cast<std::size_t>(r)]);
        }
        std::fill(allowed[s].begin(), allowed[s].end(), 0);
        for (int k = 0; k < params.features_per_split; ++k) allowed[s][static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])] = 1;
      }
    }
    std::vector<Candidate> best(m);
    std::vector<double> GL(m), HL(m);
    std::vector<double> last_x(m);
    std::vector<char> seen(m);
    for (int j = 0; j < nf; ++j) {
      std::fill(GL.begin(), GL.end(), 0.0);
      std::fill(HL.begin(), HL.end(), 0.0);
      std::fill(seen.begin(), seen.end(), 0);
      for (const Eigen::Index i : sorted.order[static_cast<std::size_t>(j)]) {
        const int s = where[static_cast<std::size_t>(i)];
        if (s < 0 || !allowed[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)]) continue;
        const auto su = static_cast<std::size_t>(s);
        const double x = X(i, j);
        if (seen[su] && x > last_x[su]) {
          const Frontier& f = frontier[su];
          const double gr = f.G - GL[su], hr = f.H - HL[su];
          if (HL[su] > 0 && hr > 0) {
            const double gn = score(GL[su], HL[su]) + score(gr, hr) - score(f.G, f.H);
            if (gn > best[su].gain) best[su] = {gn, j, last_x[su] + (x - last_x[su]) / 2};
          }
        }
        GL[su] += g(i);
        HL[su] += h(i);
        last_x[su] = x;
        seen[su] = 1;
      }
    }

    std::vector<Frontier> next;
    std::vector<int> slot_left(m, -1);
    for (std::size_t s = 0; s < m; ++s) {
      const Frontier& f = frontier[s];
      const Candidate& c = best[s];
      // Ignore gains at rounding level of the parent's score.
      if (c.feature < 0 || !(c.gain > 1e-10 * std::abs(score(f.G, f.H)))) continue;
      const int left = static_cast<int>(tree.nodes.size());
      tree.nodes.push_back({});
      tree.nodes.push_back({});
      TreeNode& node = tree.nodes[static_cast<std::size_t>(f.node)];
      node.feature = c.feature;
      node.threshold = c.threshold;
      node.left = left;
      node.right = left + 1;
      gain(c.feature) += c.gain;
      slot_left[s] = static_cast<int>(next.size());
      next.push_back({left, 0, 0});
      next.push_back({left + 1, 0, 0});
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      int& s = where[static_cast<std::size_t>(i)];
      if (s < 0) continue;
      const auto su = static_cast<std::size_t>(s);
      if (slot_left[su] < 0) {
        s = -1;
        continue;
      }
      const TreeNode& node = tree.nodes[static_cast<std::size_t>(frontier[su].node)];
      s = slot_left[su] + (X(i, node.feature) <= node.threshold ? 0 : 1);
      next[static_cast<std::size_t>(s)].G += g(i);
      next[static_cast<std::size_t>(s)].H += h(i);
    }
    // Leaf values for nodes that stopped splitting at this level.
    for (std::size_t s = 0; s < m; ++s)
      if (slot_left[s] < 0) {
        const Frontier& f = frontier[s];
        tree.nodes[static_cast<std::size_t>(f.node)].value = f.H + lambda > 0 ? -f.G / (f.H + lambda) : 0.0;
      }
    frontier = std::move(next);
  }
  for (const Frontier& f : frontier)
    tree.nodes[static_cast<std::size_t>(f.node)].value = f.H + lambda > 0 ? -f.G / (f.H + lambda) : 0.0;
  return tree;
}

Tree fit_regression_tree(const MatXd& X, const SortedColumns& sorted, const VecXd& y, const VecXd& w,
                         const TreeParams& params, VecXd& gain) {
  const VecXd g = -(w.array() * y.array()).matrix();
  return grow_tree(X, sorted, g, w, params, gain);
}

}  // namespace goxlens::ml
