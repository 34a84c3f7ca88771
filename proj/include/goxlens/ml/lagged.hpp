#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "goxlens/types.hpp"

namespace goxlens::ml {

/// Ordered (name, values) pairs; all series share one time grid.
using SeriesMap = std::vector<std::pair<std::string, VecXd>>;

inline const std::vector<int> kDefaultLags = {1, 2, 3, 4, 24};

struct LaggedDataset {
  MatXd X;
  VecXd y;
  std::vector<std::string> names;
  std::string target;
  Eigen::Index placebo = -1;    ///< column of the placebo feature
  Eigen::Index split = 0;       ///< rows [0, split) train, [split, rows) test
  Eigen::Index first_time = 0;  ///< grid index of row 0

  Eigen::Index rows() const { return X.rows(); }
  Eigen::Index features() const { return X.cols(); }
  auto train_X() const { return X.topRows(split); }
  auto train_y() const { return y.head(split); }
  auto test_X() const { return X.bottomRows(X.rows() - split); }
  auto test_y() const { return y.tail(y.size() - split); }
};

std::string lag_name(std::string_view series, int lag);

/// Columns are "<series>_{t-l}" for each feature series and lag, in that
/// order, followed by "placebo" (U(0,1) drawn from `seed`). The target is the
/// unlagged `target` series. Rows lacking the largest lag are dropped.
LaggedDataset build_lagged(const SeriesMap& series, const std::vector<std::string>& features,
                           std::string_view target, const std::vector<int>& lags, std::uint64_t seed,
                           double train_fraction = 0.7);

}  // namespace goxlens::ml
