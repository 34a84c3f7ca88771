#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "goxlens/detect.hpp"
#include "goxlens/fixed_point.hpp"
#include "goxlens/ingest.hpp"
#include "goxlens/time.hpp"
#include "goxlens/types.hpp"

namespace goxlens {

struct Bar {
  Timestamp start = 0;
  Btc wash_volume;
  Btc nonwash_volume;
  Btc total_volume;
  Money dollar_volume;
  std::optional<double> vwap;
  double amihud = 0;
  double rvol = 0;
  std::size_t priced_trades = 0;

  friend bool operator==(const Bar&, const Bar&) = default;
};

/// Names accepted by BarSeries::series().
inline constexpr std::string_view kBarSeriesNames[] = {"wash", "nonwash", "total", "liq", "vol"};

/// Dense 30-minute grid; empty buckets are present as zero-volume bars.
struct BarSeries {
  std::vector<Bar> bars;
  std::string label;

  std::size_t size() const { return bars.size(); }
  bool empty() const { return bars.empty(); }
  /// wash, nonwash, total, liq (amihud), vol (rvol), dollar or vwap (0 when
  /// absent). Unknown names throw DataError.
  VecXd series(std::string_view name) const;
  MatXd matrix(const std::vector<std::string>& names) const;
  /// Bars in [from, to).
  BarSeries slice(Timestamp from, Timestamp to) const;
};

BarSeries build_bars(const FlaggedLedger& flagged, std::string label = "mtgox");

/// |ln(vwap / prev_vwap)| / dollar_volume, or 0 when either price is absent
/// or there is no dollar volume.
double amihud(std::optional<double> prev_vwap, std::optional<double> vwap, double dollar_volume);

/// Sum of squared log returns between consecutive prices.
double realized_vol(std::span<const double> prices);

/// 100 (x_t - x_{t-1}) / x_{t-1}; the first element and any step from a zero
/// level are 0.
std::vector<double> pct_change(std::span<const double> x);
VecXd pct_change(const VecXd& x);

struct SupplyCurve {
  std::vector<Day> days;
  std::vector<double> supply;

  /// Linear interpolation; dates outside the anchors are clamped and flagged.
  double at(Day d, bool* clamped = nullptr) const;
};

/// Requires at least two anchors with non-decreasing supply.
SupplyCurve interpolate_supply(std::vector<std::pair<Day, double>> points);
SupplyCurve interpolate_supply(const AuxSeries& supply);

struct MarketcapShare {
  double mean_percent = 0;
  std::size_t wash_trades = 0;
  std::size_t clamped = 0;
  std::vector<std::string> warnings;
};

/// Mean over wash trades of 100 * bitcoins / circulating supply on the day.
MarketcapShare marketcap_share(const FlaggedLedger& flagged, const SupplyCurve& curve);

enum class Quartile { Q1 = 1, Q2 = 2, Q3 = 3, Q4 = 4 };

struct QuartileLabel {
  Day date = 0;
  Quartile quartile = Quartile::Q1;
  double wash_volume = 0;
};

struct DailyTotals {
  Day date = 0;
  double wash = 0;
  double nonwash = 0;
  double total = 0;
};

std::vector<DailyTotals> daily_totals(const BarSeries& bars);

/// Days ranked by wash volume (ties by date), cut into four near-equal groups.
/// Returned in date order.
std::vector<QuartileLabel> daily_quartiles(const BarSeries& bars);

struct WeekBucket {
  Day week_start = 0;
  std::size_t first_bar = 0;
  std::size_t bar_count = 0;
  double wash = 0;
  double nonwash = 0;
  double total = 0;
  double dollar = 0;
  double amihud = 0;  ///< mean over the week's bars
  double rvol = 0;    ///< sum over the week's bars
};

/// ISO (Monday) weeks.
std::vector<WeekBucket> weekly_rollup(const BarSeries& bars);

struct DroppedWeek {
  Day week_start = 0;
  std::string reason;
};

struct WeekFilter {
  std::vector<WeekBucket> kept;
  std::vector<DroppedWeek> dropped;
};

/// Keeps weeks where each of wash, nonwash, total, liq and vol rejects a unit
/// root at 5% on the week's bars.
WeekFilter filter_stationary_weeks(const std::vector<WeekBucket>& weeks, const BarSeries& bars);

/// wash, nonwash, total, liq, vol columns of the weekly buckets.
MatXd weekly_matrix(const std::vector<WeekBucket>& weeks);

/// Percent-change bars of one asset on the trading grid, zero where closed.
struct AssetBarSeries {
  std::string name;
  std::string activity;  ///< "tick" or "volume"
  VecXd pct_close;
  VecXd pct_liq;
  VecXd pct_vol;
  VecXd pct_activity;
  std::vector<bool> open;

  std::vector<std::string> column_names() const;
  MatXd matrix() const;
};

/// Buckets one-minute asset bars onto the grid of `bars`.
AssetBarSeries build_asset_bars(const AuxSeries& minute, const BarSeries& bars, std::string name,
                                std::string activity = "tick");

/// Sums `column` of a timestamped series into the bar grid.
VecXd aggregate_to_grid(const AuxSeries& series, std::string_view column, const BarSeries& bars);

void write_bars_csv(std::ostream& out, const BarSeries& bars);
BarSeries read_bars_csv(std::istream& in, std::string label = "bars");

}  // namespace goxlens
