#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "goxlens/error.hpp"
#include "goxlens/features.hpp"
#include "goxlens/ingest.hpp"
#include "goxlens/ml.hpp"
#include "goxlens/report.hpp"

namespace goxlens::studies {

/// The five bar series in the order used by every multivariate study.
inline const std::vector<std::string> kFiveSeries = {"wash", "nonwash", "total", "liq", "vol"};

struct AdfRow {
  std::string series;
  double statistic = 0;
  double p_value = 1;
  long lag = 0;
  double critical_5pct = 0;
  bool stationary = false;
  std::string status;  ///< "ok" or "degenerate"
};

/// Raised when the stationarity gate fails and the study is not forced.
struct StationarityAbort : AnalysisError {
  StationarityAbort(std::string what, std::vector<AdfRow> rows) : AnalysisError(std::move(what)), series(std::move(rows)) {}
  std::vector<AdfRow> series;
};

std::vector<AdfRow> stationarity_checks(const BarSeries& bars, const std::vector<std::string>& names = kFiveSeries);

struct ImportanceConfig {
  std::vector<int> lags = ml::kDefaultLags;
  std::uint64_t seed = 0;
  int n_trees = 100;
  int n_rounds = 100;
  int max_depth = 3;
  ml::RnnParams rnn;
  bool recurrent = true;  ///< include the GRU and LSTM families
};

/// Lagged liq, vol, nonwash, total (plus placebo) predicting wash; one
/// importance vector per model family.
ml::ImportanceReport timing_importance(const BarSeries& bars, const ImportanceConfig& cfg);

/// One row per feature: value and rank for every family.
Table importance_table(const ml::ImportanceReport& report);
/// Same content laid out as "value (rank)" strings per family.
Table importance_rank_table(const ml::ImportanceReport& report);
nlohmann::ordered_json importance_json(const ml::ImportanceReport& report);

struct TimingConfig {
  ImportanceConfig importance;
  bool force = false;
  int johansen_diff_lags = 3;
  int var_lags = 4;
  int horizon = 10;
  std::vector<int> granger_lags = {1, 2};
};

StudyReport study_timing(const BarSeries& bars, const TimingConfig& cfg);

/// `onchain` is aligned to the bar grid.
StudyReport study_onchain(const BarSeries& bars, const VecXd& onchain, const std::vector<QuartileLabel>& labels);

StudyReport study_market(const BarSeries& bars, const AuxSeries& market_daily, const std::vector<QuartileLabel>& labels);

StudyReport study_cross_asset(const BarSeries& bars, const std::vector<AssetBarSeries>& assets, int p_max = 4,
                              int horizon = 10);

StudyReport study_media(const BarSeries& bars, const AuxSeries& trends, int var_lags = 1, int horizon = 10);

struct EventConfig {
  Timestamp event = 0;  ///< defaults to 2012-04-20 00:00:00 UTC
  int pre_days = 14;
  int post_days = 14;
  int var_lags = 4;
  int horizon = 10;

  EventConfig();
};

StudyReport study_event(const BarSeries& bars, const EventConfig& cfg);

/// Minimum observations for a quartile regression and for a media split.
inline constexpr Eigen::Index kMinQuartileBars = 30;
inline constexpr Eigen::Index kMinSplitWeeks = 20;

}  // namespace goxlens::studies
