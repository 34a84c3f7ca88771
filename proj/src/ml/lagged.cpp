#include "goxlens/ml/lagged.hpp"

#include <algorithm>
#include <cmath>

#include "goxlens/error.hpp"
#include "goxlens/rng.hpp"

namespace goxlens::ml {

namespace {

const VecXd& find_series(const SeriesMap& series, std::string_view name) {
  for (const auto& [n, v] : series)
    if (n == name) return v;
  throw DataError("unknown series '" + std::string(name) + "'");
}

}  // namespace

std::string lag_name(std::string_view series, int lag) {
  return std::string(series) + "_{t-" + std::to_string(lag) + "}";
}

LaggedDataset build_lagged(const SeriesMap& series, const std::vector<std::string>& features,
                           std::string_view target, const std::vector<int>& lags, std::uint64_t seed,
                           double train_fraction) {
  if (lags.empty()) throw DataError("lag set is empty");
  for (int l : lags)
    if (l < 1) throw DataError("lags must be >= 1");
  const VecXd& y = find_series(series, target);
  const Eigen::Index T = y.size();
  std::vector<const VecXd*> cols;
  for (const auto& f : features) {
    cols.push_back(&find_series(series, f));
    if (cols.back()->size() != T) throw DataError("series '" + f + "' has a different length");
  }
  const int max_lag = *std::max_element(lags.begin(), lags.end());
  if (2 * max_lag >= T)
    throw InsufficientDataError("largest lag " + std::to_string(max_lag) + " needs more than " +
                                std::to_string(2 * max_lag) + " points, got " + std::to_string(T));

  LaggedDataset ds;
  ds.target = std::string(target);
  ds.first_time = max_lag;
  const Eigen::Index n = T - max_lag;
  const auto k = static_cast<Eigen::Index>(features.size() * lags.size() + 1);
  ds.X.resize(n, k);
  Eigen::Index c = 0;
  for (std::size_t f = 0; f < features.size(); ++f)
    for (int l : lags) {
      ds.X.col(c++) = cols[f]->segment(max_lag - l, n);
      ds.names.push_back(lag_name(features[f], l));
    }
  CounterRng rng(seed, 0x706c616365626fULL);
  for (Eigen::Index i = 0; i < n; ++i) ds.X(i, c) = rng.uniform();
  ds.placebo = c;
  ds.names.push_back("placebo");
  ds.y = y.tail(n);
  ds.split = static_cast<Eigen::Index>(std::floor(train_fraction * static_cast<double>(n)));
  return ds;
}

}  // namespace goxlens::ml
