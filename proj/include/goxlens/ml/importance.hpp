#pragma once

#include <string>
#include <utility>
#include <vector>

#include "goxlens/types.hpp"

namespace goxlens::ml {

struct FamilyImportance {
  std::string family;
  std::vector<double> values;
  std::vector<int> ranks;  ///< 1 = most important; a permutation of 1..n
  int placebo_rank = 0;
  std::vector<std::string> below_placebo;
};

struct ImportanceReport {
  std::vector<std::string> features;
  std::string placebo;
  std::vector<FamilyImportance> families;

  const FamilyImportance& family(const std::string& name) const;
};

/// Descending ranks; equal values are ordered by column position.
std::vector<int> rank_descending(const std::vector<double>& values);

/// Ranks each family's importances and lists the features scoring strictly
/// below the placebo.
ImportanceReport importance_report(const std::vector<std::pair<std::string, VecXd>>& families,
                                   const std::vector<std::string>& features, const std::string& placebo = "placebo");

}  // namespace goxlens::ml
