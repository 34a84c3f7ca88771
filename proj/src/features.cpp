#include "goxlens/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>

#include "goxlens/csv.hpp"
#include "goxlens/econometrics/adf.hpp"
#include "goxlens/error.hpp"

namespace goxlens {

VecXd BarSeries::series(std::string_view name) const {
  const auto n = static_cast<Eigen::Index>(bars.size());
  VecXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Bar& b = bars[static_cast<std::size_t>(i)];
    if (name == "wash") out(i) = b.wash_volume.to_double();
    else if (name == "nonwash") out(i) = b.nonwash_volume.to_double();
    else if (name == "total") out(i) = b.total_volume.to_double();
    else if (name == "liq") out(i) = b.amihud;
    else if (name == "vol") out(i) = b.rvol;
    else if (name == "dollar") out(i) = b.dollar_volume.to_double();
    else if (name == "vwap") out(i) = b.vwap.value_or(0.0);
    else throw DataError("unknown bar series '" + std::string(name) + "'");
  }
  return out;
}

MatXd BarSeries::matrix(const std::vector<std::string>& names) const {
  MatXd out(static_cast<Eigen::Index>(bars.size()), static_cast<Eigen::Index>(names.size()));
  for (std::size_t j = 0; j < names.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = series(names[j]);
  return out;
}

BarSeries BarSeries::slice(Timestamp from, Timestamp to) const {
  BarSeries out;
  out.label = label;
  for (const Bar& b : bars)
    if (b.start >= from && b.start < to) out.bars.push_back(b);
  return out;
}

double amihud(std::optional<double> prev_vwap, std::optional<double> vwap, double dollar_volume) {
  if (!prev_vwap || !vwap || !(dollar_volume > 0) || !(*prev_vwap > 0) || !(*vwap > 0)) return 0.0;
  return std::abs(std::log(*vwap / *prev_vwap)) / dollar_volume;
}

double realized_vol(std::span<const double> prices) {
  double s = 0;
  for (std::size_t i = 1; i < prices.size(); ++i) {
    const double r = std::log(prices[i] / prices[i - 1]);
    s += r * r;
  }
  return s;
}

std::vector<double> pct_change(std::span<const double> x) {
  std::vector<double> out(x.size(), 0.0);
  for (std::size_t t = 1; t < x.size(); ++t)
    if (x[t - 1] != 0) out[t] = 100.0 * (x[t] - x[t - 1]) / x[t - 1];
  return out;
}

VecXd pct_change(const VecXd& x) {
  const auto v = pct_change(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
  return Eigen::Map<const VecXd>(v.data(), x.size());
}

BarSeries build_bars(const FlaggedLedger& flagged, std::string label) {
  if (flagged.window.empty()) throw DataError("build_bars: empty window");
  const Timestamp first = floor_to_bar(flagged.window.start);
  const Timestamp last = floor_to_bar(flagged.window.end);
  const auto n = static_cast<std::size_t>((last - first) / kBarSeconds + 1);

  BarSeries out;
  out.label = std::move(label);
  out.bars.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.bars[i].start = first + static_cast<Timestamp>(i) * kBarSeconds;

  // Trades arrive sorted by timestamp; collect each bar's prices in order.
  std::vector<std::vector<double>> prices(n);
  std::vector<double> btc_priced(n, 0.0), money_priced(n, 0.0);
  for (const FlaggedTrade& ft : flagged.trades) {
    const PairedTrade& t = ft.trade;
    if (t.timestamp < first || t.timestamp > flagged.window.end) continue;
    const auto i = static_cast<std::size_t>((floor_to_bar(t.timestamp) - first) / kBarSeconds);
    Bar& b = out.bars[i];
    (ft.wash ? b.wash_volume : b.nonwash_volume) += t.bitcoins;
    b.total_volume += t.bitcoins;
    b.dollar_volume += t.money;
    if (t.priced()) {
      ++b.priced_trades;
      prices[i].push_back(t.price());
      btc_priced[i] += t.bitcoins.to_double();
      money_priced[i] += t.money.to_double();
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (out.bars[i].priced_trades > 0) out.bars[i].vwap = money_priced[i] / btc_priced[i];
  for (std::size_t i = 0; i < n; ++i) {
    Bar& b = out.bars[i];
    if (b.priced_trades < 2) continue;
    b.rvol = realized_vol(prices[i]);
    if (i > 0) b.amihud = amihud(out.bars[i - 1].vwap, b.vwap, b.dollar_volume.to_double());
  }
  return out;
}

SupplyCurve interpolate_supply(std::vector<std::pair<Day, double>> points) {
  if (points.size() < 2) throw DataError("supply curve needs at least two anchor points");
  std::stable_sort(points.begin(), points.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  SupplyCurve c;
  for (const auto& [d, s] : points) {
    if (!c.days.empty() && d == c.days.back()) {
      c.supply.back() = s;
      continue;
    }
    c.days.push_back(d);
    c.supply.push_back(s);
  }
  if (c.days.size() < 2) throw DataError("supply curve needs at least two distinct anchor dates");
  for (std::size_t i = 1; i < c.supply.size(); ++i)
    if (c.supply[i] < c.supply[i - 1])
      throw DataError("circulating supply decreases at " + format_date(c.days[i]));
  return c;
}

SupplyCurve interpolate_supply(const AuxSeries& supply) {
  const auto& v = supply.column("circulating_supply");
  std::vector<std::pair<Day, double>> pts;
  for (std::size_t i = 0; i < supply.size(); ++i) pts.emplace_back(day_of(supply.times[i]), v[i]);
  return interpolate_supply(std::move(pts));
}

double SupplyCurve::at(Day d, bool* clamped) const {
  if (clamped) *clamped = false;
  if (d <= days.front() || d >= days.back()) {
    if (clamped) *clamped = d < days.front() || d > days.back();
    return d <= days.front() ? supply.front() : supply.back();
  }
  const auto it = std::upper_bound(days.begin(), days.end(), d);
  const auto hi = static_cast<std::size_t>(it - days.begin());
  const std::size_t lo = hi - 1;
  const double w = static_cast<double>(d - days[lo]) / static_cast<double>(days[hi] - days[lo]);
  return supply[lo] + w * (supply[hi] - supply[lo]);
}

MarketcapShare marketcap_share(const FlaggedLedger& flagged, const SupplyCurve& curve) {
  MarketcapShare out;
  double sum = 0;
  for (const FlaggedTrade& ft : flagged.trades) {
    if (!ft.wash) continue;
    bool clamped = false;
    const Day d = day_of(ft.trade.timestamp);
    const double s = curve.at(d, &clamped);
    if (clamped) ++out.clamped;
    if (s > 0) sum += 100.0 * ft.trade.bitcoins.to_double() / s;
    ++out.wash_trades;
  }
  if (out.wash_trades > 0) out.mean_percent = sum / static_cast<double>(out.wash_trades);
  if (out.clamped > 0)
    out.warnings.push_back(std::to_string(out.clamped) + " wash trades fall outside the supply anchors; clamped");
  return out;
}

std::vector<DailyTotals> daily_totals(const BarSeries& bars) {
  std::vector<DailyTotals> out;
  for (const Bar& b : bars.bars) {
    const Day d = day_of(b.start);
    if (out.empty() || out.back().date != d) out.push_back({d, 0, 0, 0});
    out.back().wash += b.wash_volume.to_double();
    out.back().nonwash += b.nonwash_volume.to_double();
    out.back().total += b.total_volume.to_double();
  }
  return out;
}

std::vector<QuartileLabel> daily_quartiles(const BarSeries& bars) {
  // Sum in fixed point so that ties are exact.
  std::vector<std::pair<Day, Btc>> days;
  for (const Bar& b : bars.bars) {
    const Day d = day_of(b.start);
    if (days.empty() || days.back().first != d) days.emplace_back(d, Btc{});
    days.back().second += b.wash_volume;
  }
  if (days.size() < 4) throw InsufficientDataError("daily_quartiles: need at least 4 days, got " + std::to_string(days.size()));
  std::vector<std::size_t> order(days.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return days[a].second < days[b].second; });
  std::vector<QuartileLabel> out(days.size());
  const std::size_t n = days.size();
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t i = order[r];
    out[i] = {days[i].first, static_cast<Quartile>(4 * r / n + 1), days[i].second.to_double()};
  }
  return out;
}

std::vector<WeekBucket> weekly_rollup(const BarSeries& bars) {
  std::vector<WeekBucket> out;
  for (std::size_t i = 0; i < bars.bars.size(); ++i) {
    const Bar& b = bars.bars[i];
    const Day w = iso_week_start(day_of(b.start));
    if (out.empty() || out.back().week_start != w) {
      WeekBucket wb;
      wb.week_start = w;
      wb.first_bar = i;
      out.push_back(wb);
    }
    WeekBucket& wb = out.back();
    ++wb.bar_count;
    wb.wash += b.wash_volume.to_double();
    wb.nonwash += b.nonwash_volume.to_double();
    wb.total += b.total_volume.to_double();
    wb.dollar += b.dollar_volume.to_double();
    wb.amihud += b.amihud;
    wb.rvol += b.rvol;
  }
  for (WeekBucket& wb : out) wb.amihud /= static_cast<double>(wb.bar_count);
  return out;
}

WeekFilter filter_stationary_weeks(const std::vector<WeekBucket>& weeks, const BarSeries& bars) {
  WeekFilter out;
  const MatXd all = bars.matrix({"wash", "nonwash", "total", "liq", "vol"});
  for (const WeekBucket& wb : weeks) {
    const auto n = static_cast<Eigen::Index>(wb.bar_count);
    const Eigen::Index max_lag = schwert_max_lag(n);
    std::string reason;
    if (wb.first_bar + wb.bar_count > bars.size() || n < max_lag + 25) {
      reason = "insufficient";
    } else {
      for (Eigen::Index j = 0; j < all.cols() && reason.empty(); ++j) {
        const VecXd seg = all.col(j).segment(static_cast<Eigen::Index>(wb.first_bar), n);
        try {
          if (!adf(seg, max_lag, LagRule::aic).reject_at_5pct)
            reason = "nonstationary:" + std::string(kBarSeriesNames[j]);
        } catch (const DegenerateInputError&) {
          reason = "degenerate";
        } catch (const InsufficientDataError&) {
          reason = "insufficient";
        }
      }
    }
    if (reason.empty()) out.kept.push_back(wb);
    else out.dropped.push_back({wb.week_start, reason});
  }
  return out;
}

MatXd weekly_matrix(const std::vector<WeekBucket>& weeks) {
  MatXd out(static_cast<Eigen::Index>(weeks.size()), 5);
  for (std::size_t i = 0; i < weeks.size(); ++i) {
    const WeekBucket& w = weeks[i];
    out.row(static_cast<Eigen::Index>(i)) << w.wash, w.nonwash, w.total, w.amihud, w.rvol;
  }
  return out;
}

std::vector<std::string> AssetBarSeries::column_names() const {
  return {name + "-close", name + "-liq", name + "-vol", name + "-" + activity};
}

MatXd AssetBarSeries::matrix() const {
  MatXd out(pct_close.size(), 4);
  out << pct_close, pct_liq, pct_vol, pct_activity;
  return out;
}

AssetBarSeries build_asset_bars(const AuxSeries& minute, const BarSeries& bars, std::string name, std::string activity) {
  AssetBarSeries out;
  out.name = std::move(name);
  out.activity = std::move(activity);
  const std::size_t n = bars.size();
  std::vector<double> close(n, 0.0), liq(n, 0.0), vol(n, 0.0), act(n, 0.0);
  out.open.assign(n, false);
  if (n > 0) {
    const Timestamp first = bars.bars.front().start;
    const auto& c = minute.column("close");
    const auto& a = minute.column("tick_or_volume");
    std::vector<std::vector<double>> closes(n);
    std::vector<double> notional(n, 0.0);
    for (std::size_t k = 0; k < minute.size(); ++k) {
      const Timestamp t = minute.times[k];
      if (t < first || !(c[k] > 0)) continue;
      const auto i = static_cast<std::size_t>((floor_to_bar(t) - first) / kBarSeconds);
      if (i >= n) continue;
      closes[i].push_back(c[k]);
      act[i] += a[k];
      notional[i] += c[k] * a[k];
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (closes[i].empty()) continue;
      out.open[i] = true;
      close[i] = closes[i].back();
      vol[i] = realized_vol(closes[i]);
      if (notional[i] > 0) liq[i] = std::abs(std::log(closes[i].back() / closes[i].front())) / notional[i];
    }
  }
  auto pct = [&](const std::vector<double>& level) {
    VecXd p = pct_change(VecXd(Eigen::Map<const VecXd>(level.data(), static_cast<Eigen::Index>(n))));
    for (std::size_t i = 0; i < n; ++i)
      if (!out.open[i]) p(static_cast<Eigen::Index>(i)) = 0.0;
    return p;
  };
  out.pct_close = pct(close);
  out.pct_liq = pct(liq);
  out.pct_vol = pct(vol);
  out.pct_activity = pct(act);
  return out;
}

VecXd aggregate_to_grid(const AuxSeries& series, std::string_view column, const BarSeries& bars) {
  VecXd out = VecXd::Zero(static_cast<Eigen::Index>(bars.size()));
  if (bars.empty()) return out;
  const Timestamp first = bars.bars.front().start;
  const auto& v = series.column(column);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const Timestamp t = series.times[k];
    if (t < first) continue;
    const auto i = static_cast<Eigen::Index>((floor_to_bar(t) - first) / kBarSeconds);
    if (i < out.size()) out(i) += v[k];
  }
  return out;
}

void write_bars_csv(std::ostream& out, const BarSeries& bars) {
  csv::write_row(out, {"start", "wash", "nonwash", "total", "dollar", "vwap", "amihud", "rvol"});
  for (const Bar& b : bars.bars)
    csv::write_row(out, {format_timestamp(b.start), b.wash_volume.to_string(), b.nonwash_volume.to_string(),
                         b.total_volume.to_string(), b.dollar_volume.to_string(),
                         b.vwap ? csv::format_double(*b.vwap) : std::string(), csv::format_double(b.amihud),
                         csv::format_double(b.rvol)});
}

namespace {

double parse_real(const std::string& s, std::size_t line) {
  double v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw DataError("bars line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

}  // namespace

BarSeries read_bars_csv(std::istream& in, std::string label) {
  csv::Reader reader(in);
  const auto head = reader.next();
  if (!head) throw SchemaError("bars file is empty");
  const csv::Header header(*head);
  std::vector<std::size_t> idx;
  for (const char* name : {"start", "wash", "nonwash", "total", "dollar", "vwap", "amihud", "rvol"}) {
    const auto i = header.find(name);
    if (!i) throw SchemaError(std::string("bars file lacks column '") + name + "'");
    idx.push_back(*i);
  }
  BarSeries out;
  out.label = std::move(label);
  while (auto row = reader.next()) {
    const std::size_t line = reader.line();
    auto field = [&](std::size_t k) -> const std::string& {
      if (idx[k] >= row->size()) throw DataError("bars line " + std::to_string(line) + ": too few fields");
      return (*row)[idx[k]];
    };
    Bar b;
    const auto ts = parse_timestamp(field(0));
    if (!ts) throw DataError("bars line " + std::to_string(line) + ": bad timestamp");
    b.start = *ts;
    auto btc = [&](std::size_t k) {
      const auto v = Btc::parse(field(k));
      if (!v) throw DataError("bars line " + std::to_string(line) + ": bad volume");
      return *v;
    };
    b.wash_volume = btc(1);
    b.nonwash_volume = btc(2);
    b.total_volume = btc(3);
    const auto dollar = Money::parse(field(4));
    if (!dollar) throw DataError("bars line " + std::to_string(line) + ": bad dollar volume");
    b.dollar_volume = *dollar;
    if (!field(5).empty()) b.vwap = parse_real(field(5), line);
    b.amihud = parse_real(field(6), line);
    b.rvol = parse_real(field(7), line);
    if (!out.bars.empty() && b.start != out.bars.back().start + kBarSeconds)
      throw DataError("bars line " + std::to_string(line) + ": bars are not on a contiguous 30-minute grid");
    out.bars.push_back(b);
  }
  return out;
}

}  // namespace goxlens
