#include "goxlens/ml/importance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "goxlens/error.hpp"

namespace goxlens::ml {

const FamilyImportance& ImportanceReport::family(const std::string& name) const {
  for (const auto& f : families)
    if (f.family == name) return f;
  throw DataError("no importance family '" + name + "'");
}

std::vector<int> rank_descending(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  std::vector<int> ranks(values.size());
  for (std::size_t r = 0; r < order.size(); ++r) ranks[order[r]] = static_cast<int>(r + 1);
  return ranks;
}

ImportanceReport importance_report(const std::vector<std::pair<std::string, VecXd>>& families,
                                   const std::vector<std::string>& features, const std::string& placebo) {
  const auto it = std::find(features.begin(), features.end(), placebo);
  if (it == features.end()) throw DataError("placebo feature '" + placebo + "' is not among the features");
  const auto p = static_cast<std::size_t>(it - features.begin());
  ImportanceReport out;
  out.features = features;
  out.placebo = placebo;
  for (const auto& [name, v] : families) {
    if (static_cast<std::size_t>(v.size()) != features.size())
      throw DataError("importance vector for '" + name + "' has the wrong length");
    FamilyImportance f;
    f.family = name;
    f.values.assign(v.data(), v.data() + v.size());
    for (double& x : f.values)
      if (!std::isfinite(x)) throw AnalysisError("non-finite importance in family '" + name + "'");
    f.ranks = rank_descending(f.values);
    f.placebo_rank = f.ranks[p];
    for (std::size_t j = 0; j < features.size(); ++j)
      if (j != p && f.values[j] < f.values[p]) f.below_placebo.push_back(features[j]);
    out.families.push_back(std::move(f));
  }
  return out;
}

}  // namespace goxlens::ml
