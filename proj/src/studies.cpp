#include "goxlens/studies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "goxlens/csv.hpp"
#include "goxlens/econometrics.hpp"

namespace goxlens::studies {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::int64_t as_int(Eigen::Index v) { return static_cast<std::int64_t>(v); }

std::string short_number(double v) {
  if (!std::isfinite(v)) return csv::format_double(v);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Digest bars_digest(const BarSeries& bars) {
  Digest d;
  d.update(std::string_view("bars"));
  for (const Bar& b : bars.bars) {
    d.update(static_cast<std::int64_t>(b.start));
    d.update(b.wash_volume.raw());
    d.update(b.nonwash_volume.raw());
    d.update(b.total_volume.raw());
    d.update(b.dollar_volume.raw());
    d.update(b.vwap.value_or(-1.0));
    d.update(b.amihud);
    d.update(b.rvol);
  }
  return d;
}

void digest_aux(Digest& d, const AuxSeries& s) {
  d.update(to_string(s.kind));
  for (std::size_t i = 0; i < s.size(); ++i) {
    d.update(static_cast<std::int64_t>(s.times[i]));
    for (const auto& col : s.values) d.update(col[i]);
  }
}

nlohmann::ordered_json window_json(const BarSeries& bars) {
  if (bars.empty()) return nullptr;
  return format_timestamp(bars.bars.front().start) + ".." + format_timestamp(bars.bars.back().start + kBarSeconds - 1);
}

struct IrfColumn {
  std::string label;
  Eigen::Index response;
  Eigen::Index shock;
};

/// The four response/shock pairs shown for the wash-trade VARs.
std::vector<IrfColumn> wash_columns(const std::vector<std::string>& names, bool timing_order) {
  auto idx = [&](const std::string& n) {
    const auto it = std::find(names.begin(), names.end(), n);
    return it == names.end() ? Eigen::Index{-1} : static_cast<Eigen::Index>(it - names.begin());
  };
  const Eigen::Index w = idx("wash"), n = idx("nonwash"), t = idx("total");
  std::vector<IrfColumn> cols;
  if (timing_order) {
    cols = {{"nonwash_to_wash", n, w}, {"wash_to_nonwash", w, n}, {"total_to_wash", t, w}, {"wash_to_total", w, t}};
  } else {
    cols = {{"total_to_wash", t, w}, {"nonwash_to_wash", n, w}, {"wash_to_total", w, t}, {"wash_to_nonwash", w, n}};
  }
  cols.erase(std::remove_if(cols.begin(), cols.end(), [](const IrfColumn& c) { return c.response < 0 || c.shock < 0; }),
             cols.end());
  return cols;
}

/// Rows h = 0..H and a sum over h = 1..H, raw and percent per column.
/// Column labels read "<response>_to_<shock>": the response of the first
/// variable to a shock in the second.
void append_irf_columns(Table& t, const IrfMatrix<double>& irf, const std::vector<IrfColumn>& cols, const std::string& prefix,
                        std::vector<std::vector<Cell>>& rows) {
  const Eigen::Index H = irf.horizon();
  for (const auto& c : cols) {
    t.columns.push_back(prefix + c.label);
    t.columns.push_back(prefix + c.label + "_pct");
  }
  for (Eigen::Index h = 0; h <= H + 1; ++h) {
    auto& row = rows[static_cast<std::size_t>(h)];
    for (const auto& c : cols) {
      if (h <= H) {
        row.emplace_back(irf(h, c.response, c.shock));
        row.emplace_back(irf.percent(h, c.response, c.shock));
      } else {
        double raw = 0, pct = 0;
        for (Eigen::Index k = 1; k <= H; ++k) {
          raw += irf(k, c.response, c.shock);
          pct += irf.percent(k, c.response, c.shock);
        }
        row.emplace_back(raw);
        row.emplace_back(pct);
      }
    }
  }
}

std::vector<std::vector<Cell>> horizon_rows(Eigen::Index H) {
  std::vector<std::vector<Cell>> rows(static_cast<std::size_t>(H + 2));
  for (Eigen::Index h = 0; h <= H; ++h) rows[static_cast<std::size_t>(h)].emplace_back(std::to_string(h));
  rows.back().emplace_back(std::string("sum"));
  return rows;
}

void note_impact_zeros(StudyReport& r, const IrfMatrix<double>& irf, const std::vector<IrfColumn>& cols,
                       const std::vector<std::string>& names, const std::string& prefix) {
  std::vector<Eigen::Index> pos(irf.ordering.size());
  for (std::size_t k = 0; k < irf.ordering.size(); ++k) pos[static_cast<std::size_t>(irf.ordering[k])] = static_cast<Eigen::Index>(k);
  for (const auto& c : cols)
    if (pos[static_cast<std::size_t>(c.shock)] > pos[static_cast<std::size_t>(c.response)])
      r.notes.push_back(prefix + c.label + ": impact (h=0) response is zero by the Cholesky ordering (" +
                        names[static_cast<std::size_t>(c.response)] + " is ordered before " +
                        names[static_cast<std::size_t>(c.shock)] + ")");
}

void note_var(StudyReport& r, const VarModel<double>& m, const IrfMatrix<double>& irf, const std::string& what) {
  if (m.rank_deficient) r.notes.push_back(what + ": VAR design is rank deficient; minimum-norm coefficients used");
  if (irf.ridge > 0) r.notes.push_back(what + ": residual covariance is singular; ridge " + csv::format_double(irf.ridge) + " added");
  if (!irf.stable())
    r.notes.push_back(what + ": VAR is not stable (spectral radius " + csv::format_double(irf.spectral_radius) + ")");
}

Table quartile_ols_table() {
  Table t;
  t.name = "ols";
  t.columns = {"quartile", "n", "intercept", "coefficient", "std_error", "t_stat", "p_value", "adj_r2", "status"};
  return t;
}

void add_quartile_ols(Table& t, int q, const VecXd& y, const VecXd& x) {
  const std::string name = "Q" + std::to_string(q);
  if (y.size() < kMinQuartileBars) {
    t.add({name, as_int(y.size()), kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, std::string("insufficient")});
    return;
  }
  try {
    const auto fit = ols(y, MatXd(x), true);
    t.add({name, as_int(y.size()), fit.coefficients(0), fit.slope(0), fit.std_errors(1), fit.t_stats(1), fit.p_values(1),
           fit.adj_r_squared, std::string(fit.rank_deficient ? "rank_deficient" : "ok")});
  } catch (const AnalysisError&) {
    t.add({name, as_int(y.size()), kNaN, kNaN, kNaN, kNaN, kNaN, kNaN, std::string("degenerate")});
  }
}

std::map<Day, Quartile> label_map(const std::vector<QuartileLabel>& labels) {
  std::map<Day, Quartile> m;
  for (const auto& l : labels) m[l.date] = l.quartile;
  return m;
}

}  // namespace

std::vector<AdfRow> stationarity_checks(const BarSeries& bars, const std::vector<std::string>& names) {
  std::vector<AdfRow> rows;
  for (const auto& n : names) {
    AdfRow r;
    r.series = n;
    const VecXd y = bars.series(n);
    try {
      const auto a = adf(y, schwert_max_lag(y.size()), LagRule::aic);
      r.statistic = a.statistic;
      r.p_value = a.p_value;
      r.lag = static_cast<long>(a.lag);
      r.critical_5pct = a.critical_5pct;
      r.stationary = a.reject_at_5pct;
      r.status = "ok";
    } catch (const DegenerateInputError&) {
      r.statistic = kNaN;
      r.p_value = kNaN;
      r.status = "degenerate";
    }
    rows.push_back(r);
  }
  return rows;
}

ml::ImportanceReport timing_importance(const BarSeries& bars, const ImportanceConfig& cfg) {
  ml::SeriesMap series;
  for (const auto& n : kFiveSeries) series.emplace_back(n, bars.series(n));
  const auto ds = ml::build_lagged(series, {"liq", "vol", "nonwash", "total"}, "wash", cfg.lags, cfg.seed);
  std::vector<std::pair<std::string, VecXd>> fam;
  fam.emplace_back("cart", ml::train_tree(ds, cfg.max_depth).importance);
  fam.emplace_back("random_forest", ml::train_forest(ds, cfg.n_trees, cfg.max_depth, cfg.seed).importance);
  fam.emplace_back("adaboost",
                   ml::train_boost(ds, ml::BoostMode::adaboost_regression, cfg.n_rounds, cfg.max_depth, cfg.seed).importance);
  fam.emplace_back("gradient_boost",
                   ml::train_boost(ds, ml::BoostMode::gradient_second_order, cfg.n_rounds, cfg.max_depth, cfg.seed).importance);
  if (cfg.recurrent) {
    for (auto cell : {ml::Cell::gru, ml::Cell::lstm}) {
      ml::RnnParams p = cfg.rnn;
      p.cell = cell;
      fam.emplace_back(cell == ml::Cell::gru ? "gru" : "lstm", ml::train_rnn(ds, p, cfg.seed).importance);
    }
  }
  return ml::importance_report(fam, ds.names, "placebo");
}

Table importance_table(const ml::ImportanceReport& report) {
  Table t;
  t.name = "importance";
  t.columns = {"feature"};
  for (const auto& f : report.families) {
    t.columns.push_back(f.family);
    t.columns.push_back(f.family + "_rank");
  }
  for (std::size_t j = 0; j < report.features.size(); ++j) {
    std::vector<Cell> row{report.features[j]};
    for (const auto& f : report.families) {
      row.emplace_back(f.values[j]);
      row.emplace_back(static_cast<std::int64_t>(f.ranks[j]));
    }
    t.add(std::move(row));
  }
  return t;
}

Table importance_rank_table(const ml::ImportanceReport& report) {
  Table t;
  t.name = "importance_ranks";
  t.columns = {"feature"};
  for (const auto& f : report.families) t.columns.push_back(f.family);
  for (std::size_t j = 0; j < report.features.size(); ++j) {
    std::vector<Cell> row{report.features[j]};
    for (const auto& f : report.families) row.emplace_back(short_number(f.values[j]) + " (" + std::to_string(f.ranks[j]) + ")");
    t.add(std::move(row));
  }
  return t;
}

nlohmann::ordered_json importance_json(const ml::ImportanceReport& report) {
  nlohmann::ordered_json j;
  j["features"] = report.features;
  j["placebo"] = report.placebo;
  j["families"] = nlohmann::ordered_json::array();
  for (const auto& f : report.families) {
    nlohmann::ordered_json fj;
    fj["family"] = f.family;
    fj["importance"] = nlohmann::ordered_json::object();
    for (std::size_t k = 0; k < report.features.size(); ++k)
      fj["importance"][report.features[k]] = {{"value", json_number(f.values[k])}, {"rank", f.ranks[k]}};
    fj["placebo_rank"] = f.placebo_rank;
    fj["features_below_placebo"] = f.below_placebo;
    j["families"].push_back(std::move(fj));
  }
  return j;
}

StudyReport study_timing(const BarSeries& bars, const TimingConfig& cfg) {
  StudyReport r;
  r.study = "timing";
  r.inputs_digest = bars_digest(bars).hex();
  r.parameters["window"] = window_json(bars);
  r.parameters["bars"] = bars.size();
  r.parameters["lags"] = cfg.importance.lags;
  r.parameters["seed"] = cfg.importance.seed;
  r.parameters["max_depth"] = cfg.importance.max_depth;
  r.parameters["n_trees"] = cfg.importance.n_trees;
  r.parameters["n_rounds"] = cfg.importance.n_rounds;
  r.parameters["rnn"] = {{"hidden", cfg.importance.rnn.hidden},
                         {"epochs", cfg.importance.rnn.epochs},
                         {"batch", cfg.importance.rnn.batch},
                         {"learning_rate", cfg.importance.rnn.learning_rate},
                         {"seq_len", cfg.importance.rnn.seq_len}};
  r.parameters["johansen_diff_lags"] = cfg.johansen_diff_lags;
  r.parameters["var_lags"] = cfg.var_lags;
  r.parameters["horizon"] = cfg.horizon;
  r.parameters["granger_lags"] = cfg.granger_lags;
  r.parameters["force"] = cfg.force;

  // Stationarity gate.
  const auto adf_rows = stationarity_checks(bars);
  Table st;
  st.name = "stationarity";
  st.columns = {"series", "adf_statistic", "p_value", "lag", "critical_5pct", "stationary", "status"};
  std::vector<std::string> failing;
  for (const auto& a : adf_rows) {
    st.add({a.series, a.statistic, a.p_value, static_cast<std::int64_t>(a.lag), a.critical_5pct,
            std::string(a.stationary ? "yes" : "no"), a.status});
    if (!a.stationary) failing.push_back(a.series);
  }
  if (!failing.empty()) {
    std::ostringstream msg;
    msg << "unit root not rejected at 5% for:";
    for (const auto& a : adf_rows)
      if (!a.stationary) msg << ' ' << a.series << " (ADF " << short_number(a.statistic) << ", p " << short_number(a.p_value) << ")";
    if (!cfg.force) throw StationarityAbort(msg.str(), adf_rows);
    r.notes.push_back("forced past stationarity gate: " + msg.str());
  }
  r.tables.push_back(std::move(st));

  // (a) feature importance
  const auto imp = timing_importance(bars, cfg.importance);
  r.tables.push_back(importance_table(imp));
  Table ps;
  ps.name = "placebo";
  ps.columns = {"family", "placebo_rank", "features_below_placebo"};
  for (const auto& f : imp.families) {
    std::string below;
    for (const auto& b : f.below_placebo) below += (below.empty() ? "" : ";") + b;
    ps.add({f.family, static_cast<std::int64_t>(f.placebo_rank), below});
  }
  r.tables.push_back(std::move(ps));
  if (cfg.importance.recurrent)
    r.notes.push_back("gru/lstm importance is the mean absolute gradient of the prediction with respect to each standardized input over the test windows");

  const MatXd Y = bars.matrix(kFiveSeries);

  // (b) Johansen, dropping exactly collinear columns.
  {
    std::vector<std::string> names = kFiveSeries;
    MatXd D = Y;
    JohansenResult<double> jr;
    for (;;) {
      try {
        jr = johansen(D, cfg.johansen_diff_lags, names);
        break;
      } catch (const SingularMatrixError& e) {
        if (e.collinear.empty() || names.size() <= 1) throw;
        std::vector<std::string> dropped;
        std::vector<std::size_t> drop = e.collinear;
        std::sort(drop.rbegin(), drop.rend());
        for (std::size_t c : drop) {
          dropped.push_back(names[c]);
          names.erase(names.begin() + static_cast<std::ptrdiff_t>(c));
          MatXd next(D.rows(), D.cols() - 1);
          next << D.leftCols(static_cast<Eigen::Index>(c)), D.rightCols(D.cols() - 1 - static_cast<Eigen::Index>(c));
          D = std::move(next);
        }
        for (const auto& d : dropped) r.notes.push_back("johansen: dropped '" + d + "', an exact linear combination of the other series");
      }
    }
    Table jt;
    jt.name = "johansen";
    jt.columns = {"hypothesis", "eigenvalue", "trace", "trace_critical_95", "max_eigen", "max_eigen_critical_95", "result"};
    for (Eigen::Index q = 0; q < jr.trace.size(); ++q)
      jt.add({"at most " + std::to_string(q), jr.eigenvalues(q), jr.trace(q), jr.trace_critical_95(q), jr.max_eigen(q),
              jr.max_eigen_critical_95(q), std::string(jr.trace(q) > jr.trace_critical_95(q) ? "pass" : "fail")});
    r.tables.push_back(std::move(jt));
    r.extra["johansen"] = {{"variables", names}, {"rank", jr.rank}, {"nobs", jr.nobs}};
  }

  // (c) Granger grid, both directions between wash and each other series.
  {
    Table gt;
    gt.name = "granger";
    gt.columns = {"cause", "effect", "lag", "f_statistic", "p_value", "df_num", "df_den", "result"};
    for (std::size_t other = 1; other < kFiveSeries.size(); ++other)
      for (const auto& [cause, effect] : {std::pair<std::size_t, std::size_t>{0, other}, {other, 0}})
        for (int lag : cfg.granger_lags) {
          try {
            const auto g = granger(Y, static_cast<Eigen::Index>(cause), static_cast<Eigen::Index>(effect), lag);
            gt.add({kFiveSeries[cause], kFiveSeries[effect], static_cast<std::int64_t>(lag), g.f_statistic, g.p_value,
                    as_int(g.df_num), as_int(g.df_den), std::string(g.pass ? "pass" : "fail")});
          } catch (const AnalysisError&) {
            gt.add({kFiveSeries[cause], kFiveSeries[effect], static_cast<std::int64_t>(lag), kNaN, kNaN, std::int64_t{0},
                    std::int64_t{0}, std::string("degenerate")});
          }
        }
    r.tables.push_back(std::move(gt));
  }

  // (d) VAR + orthogonalized IRF, ordering wash, nonwash, total, liq, vol.
  {
    const auto m = var_fit(Y, cfg.var_lags, kFiveSeries);
    const auto ir = irf(m, cfg.horizon);
    const auto cols = wash_columns(kFiveSeries, true);
    Table t;
    t.name = "irf";
    t.columns = {"h"};
    auto rows = horizon_rows(cfg.horizon);
    append_irf_columns(t, ir, cols, "", rows);
    for (auto& row : rows) t.add(std::move(row));
    r.tables.push_back(std::move(t));
    note_impact_zeros(r, ir, cols, kFiveSeries, "");
    note_var(r, m, ir, "irf");
    r.extra["var"] = {{"lags", cfg.var_lags}, {"nobs", m.nobs}, {"spectral_radius", json_number(ir.spectral_radius)}};
  }
  return r;
}

StudyReport study_onchain(const BarSeries& bars, const VecXd& onchain, const std::vector<QuartileLabel>& labels) {
  if (onchain.size() != static_cast<Eigen::Index>(bars.size())) throw DataError("onchain series is not aligned to the bars");
  StudyReport r;
  r.study = "onchain";
  Digest d = bars_digest(bars);
  d.update(onchain);
  for (const auto& l : labels) {
    d.update(static_cast<std::int64_t>(l.date));
    d.update(static_cast<std::int64_t>(l.quartile));
  }
  r.inputs_digest = d.hex();
  r.parameters["window"] = window_json(bars);
  r.parameters["bars"] = bars.size();
  r.parameters["min_quartile_bars"] = kMinQuartileBars;

  const auto lm = label_map(labels);
  const VecXd nonwash = bars.series("nonwash");
  Table ot = quartile_ols_table();
  Table et;
  et.name = "engle_granger";
  et.columns = {"quartile", "n", "adf_statistic", "p_value", "lag", "beta", "status"};
  Table days;
  days.name = "quartile_days";
  days.columns = {"date", "quartile", "wash_volume"};
  for (const auto& l : labels) days.add({format_date(l.date), std::string("Q") + std::to_string(static_cast<int>(l.quartile)), l.wash_volume});

  for (int q = 1; q <= 4; ++q) {
    std::vector<Eigen::Index> idx;
    for (std::size_t i = 0; i < bars.size(); ++i) {
      const auto it = lm.find(day_of(bars.bars[i].start));
      if (it != lm.end() && static_cast<int>(it->second) == q) idx.push_back(static_cast<Eigen::Index>(i));
    }
    VecXd y(static_cast<Eigen::Index>(idx.size())), x(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) {
      y(static_cast<Eigen::Index>(k)) = onchain(idx[k]);
      x(static_cast<Eigen::Index>(k)) = nonwash(idx[k]);
    }
    add_quartile_ols(ot, q, y, x);
    const std::string name = "Q" + std::to_string(q);
    if (y.size() < kMinQuartileBars) {
      et.add({name, as_int(y.size()), kNaN, kNaN, std::int64_t{0}, kNaN, std::string("insufficient")});
      continue;
    }
    try {
      const auto eg = engle_granger(y, x);
      et.add({name, as_int(y.size()), eg.adf_statistic, eg.p_value, as_int(eg.lag), eg.beta,
              std::string(eg.collinear ? "collinear" : "ok")});
    } catch (const InsufficientDataError&) {
      et.add({name, as_int(y.size()), kNaN, kNaN, std::int64_t{0}, kNaN, std::string("insufficient")});
    } catch (const AnalysisError&) {
      et.add({name, as_int(y.size()), kNaN, kNaN, std::int64_t{0}, kNaN, std::string("degenerate")});
    }
  }
  r.tables.push_back(std::move(ot));
  r.tables.push_back(std::move(et));
  r.tables.push_back(std::move(days));
  r.notes.push_back("OLS regresses onchain_t on nonwash_t within each quartile of days ranked by daily wash volume (Q4 highest)");
  return r;
}

StudyReport study_market(const BarSeries& bars, const AuxSeries& market_daily, const std::vector<QuartileLabel>& labels) {
  StudyReport r;
  r.study = "market";
  Digest d = bars_digest(bars);
  digest_aux(d, market_daily);
  r.inputs_digest = d.hex();
  r.parameters["window"] = window_json(bars);
  r.parameters["min_quartile_days"] = kMinQuartileBars;

  const auto lm = label_map(labels);
  std::map<Day, double> market;
  const auto& vol = market_daily.column("volume_btc");
  for (std::size_t i = 0; i < market_daily.size(); ++i) market[day_of(market_daily.times[i])] = vol[i];

  const auto totals = daily_totals(bars);
  std::vector<std::vector<double>> ys(4), xs(4);
  double share_sum = 0;
  std::int64_t share_days = 0, matched = 0;
  for (const auto& dt : totals) {
    const auto m = market.find(dt.date);
    if (m == market.end()) continue;
    ++matched;
    if (dt.total + m->second > 0) {
      share_sum += 100.0 * dt.total / (dt.total + m->second);
      ++share_days;
    }
    const auto l = lm.find(dt.date);
    if (l == lm.end()) continue;
    const auto q = static_cast<std::size_t>(static_cast<int>(l->second) - 1);
    ys[q].push_back(m->second);
    xs[q].push_back(dt.nonwash);
  }
  Table ot = quartile_ols_table();
  for (int q = 1; q <= 4; ++q) {
    const auto& y = ys[static_cast<std::size_t>(q - 1)];
    const auto& x = xs[static_cast<std::size_t>(q - 1)];
    add_quartile_ols(ot, q, Eigen::Map<const VecXd>(y.data(), static_cast<Eigen::Index>(y.size())),
                     Eigen::Map<const VecXd>(x.data(), static_cast<Eigen::Index>(x.size())));
  }
  r.tables.push_back(std::move(ot));
  Table sh;
  sh.name = "exchange_share";
  sh.columns = {"days", "mean_share_percent"};
  sh.add({share_days, share_days > 0 ? share_sum / static_cast<double>(share_days) : kNaN});
  r.tables.push_back(std::move(sh));
  r.parameters["matched_days"] = matched;
  r.notes.push_back("OLS regresses daily market volume on daily nonwash volume within each wash-volume quartile");
  r.notes.push_back("exchange share is the mean over days of 100 * exchange total / (exchange total + market volume)");
  return r;
}

StudyReport study_cross_asset(const BarSeries& bars, const std::vector<AssetBarSeries>& assets, int p_max, int horizon) {
  StudyReport r;
  r.study = "cross-asset";
  Digest d = bars_digest(bars);
  for (const auto& a : assets) {
    d.update(a.name);
    d.update(a.matrix());
  }
  r.inputs_digest = d.hex();
  r.parameters["window"] = window_json(bars);
  r.parameters["p_max"] = p_max;
  r.parameters["horizon"] = horizon;
  r.parameters["ordering"] = {"wash", "asset"};

  const VecXd wash = bars.series("wash");
  Table t;
  t.name = "irf";
  t.columns = {"h"};
  auto rows = horizon_rows(horizon);
  Table lags;
  lags.name = "var_lags";
  lags.columns = {"variable", "lag_order", "nobs", "spectral_radius"};
  for (const auto& a : assets) {
    if (a.pct_close.size() != wash.size()) throw DataError("asset '" + a.name + "' is not aligned to the bars");
    const auto names = a.column_names();
    const MatXd M = a.matrix();
    for (Eigen::Index c = 0; c < M.cols(); ++c) {
      const std::string& var = names[static_cast<std::size_t>(c)];
      if ((M.col(c).array() == 0).all()) {
        r.notes.push_back("skipped '" + var + "': series is zero throughout");
        continue;
      }
      MatXd Y(wash.size(), 2);
      Y << wash, M.col(c);
      const Eigen::Index p = select_lag_aic(Y, p_max);
      const auto m = var_fit(Y, p, {"wash", var});
      const auto ir = irf(m, horizon);
      t.columns.push_back("wash_to_" + var + "_pct");
      for (Eigen::Index h = 0; h <= horizon; ++h) rows[static_cast<std::size_t>(h)].emplace_back(ir.percent(h, 0, 1));
      double sum = 0;
      for (Eigen::Index h = 1; h <= horizon; ++h) sum += ir.percent(h, 0, 1);
      rows.back().emplace_back(sum);
      lags.add({var, as_int(p), as_int(m.nobs), ir.spectral_radius});
      note_var(r, m, ir, var);
    }
  }
  for (auto& row : rows) t.add(std::move(row));
  r.tables.push_back(std::move(t));
  r.tables.push_back(std::move(lags));
  r.notes.push_back("columns give the percent response of wash to a one-standard-deviation shock in the asset variable; wash is ordered first, so h=0 is zero");
  return r;
}

StudyReport study_media(const BarSeries& bars, const AuxSeries& trends, int var_lags, int horizon) {
  StudyReport r;
  r.study = "media";
  Digest d = bars_digest(bars);
  digest_aux(d, trends);
  r.inputs_digest = d.hex();
  r.parameters["window"] = window_json(bars);
  r.parameters["var_lags"] = var_lags;
  r.parameters["horizon"] = horizon;
  r.parameters["min_split_weeks"] = kMinSplitWeeks;

  std::map<Day, double> score;
  const auto& sc = trends.column("score");
  for (std::size_t i = 0; i < trends.size(); ++i) score[iso_week_start(day_of(trends.times[i]))] = sc[i];

  const auto weeks = weekly_rollup(bars);
  const auto filt = filter_stationary_weeks(weeks, bars);
  Table wt;
  wt.name = "weeks";
  wt.columns = {"week_start", "bars", "status", "score", "split"};
  std::vector<WeekBucket> kept;
  std::vector<double> kept_score;
  for (const auto& dw : filt.dropped) wt.add({format_date(dw.week_start), std::int64_t{0}, dw.reason, kNaN, std::string()});
  for (const auto& w : filt.kept) {
    const auto it = score.find(w.week_start);
    if (it == score.end()) {
      wt.add({format_date(w.week_start), static_cast<std::int64_t>(w.bar_count), std::string("no_trends_score"), kNaN, std::string()});
      continue;
    }
    kept.push_back(w);
    kept_score.push_back(it->second);
  }
  if (kept.empty()) throw InsufficientDataError("media: no stationary weeks with a trends score");
  std::vector<double> sorted = kept_score;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const double median = n % 2 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2;
  if (sorted.front() == sorted.back()) throw DegenerateInputError("media: trends score is constant; the median split is degenerate");

  std::vector<WeekBucket> below, above;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const bool hi = kept_score[i] > median;
    (hi ? above : below).push_back(kept[i]);
    wt.add({format_date(kept[i].week_start), static_cast<std::int64_t>(kept[i].bar_count), std::string("kept"), kept_score[i],
            std::string(hi ? "above" : "below")});
  }
  std::sort(wt.rows.begin(), wt.rows.end(), [](const auto& a, const auto& b) { return std::get<std::string>(a[0]) < std::get<std::string>(b[0]); });
  r.tables.push_back(std::move(wt));
  r.parameters["median_score"] = median;
  r.extra["weeks"] = {{"total", weeks.size()}, {"retained", kept.size()}, {"below", below.size()}, {"above", above.size()}};

  Table t;
  t.name = "irf";
  t.columns = {"h"};
  auto rows = horizon_rows(horizon);
  Table counts;
  counts.name = "splits";
  counts.columns = {"split", "n", "status"};
  for (const auto& [label, split] : {std::pair<std::string, const std::vector<WeekBucket>*>{"below", &below}, {"above", &above}}) {
    const auto cols = wash_columns(kFiveSeries, false);
    const auto nweeks = static_cast<Eigen::Index>(split->size());
    if (nweeks < kMinSplitWeeks) {
      counts.add({label, as_int(nweeks), std::string("aborted: fewer than ") + std::to_string(kMinSplitWeeks) + " weeks"});
      for (const auto& c : cols) {
        t.columns.push_back(label + "_" + c.label);
        t.columns.push_back(label + "_" + c.label + "_pct");
      }
      for (auto& row : rows)
        for (std::size_t k = 0; k < 2 * cols.size(); ++k) row.emplace_back(kNaN);
      r.notes.push_back(label + "-median split aborted: " + std::to_string(nweeks) + " weeks");
      continue;
    }
    try {
      const auto m = var_fit(weekly_matrix(*split), var_lags, kFiveSeries);
      const auto ir = irf(m, horizon);
      append_irf_columns(t, ir, cols, label + "_", rows);
      note_impact_zeros(r, ir, cols, kFiveSeries, label + "_");
      note_var(r, m, ir, label);
      counts.add({label, as_int(nweeks), std::string("ok")});
    } catch (const InsufficientDataError& e) {
      counts.add({label, as_int(nweeks), std::string("aborted: ") + e.what()});
      for (const auto& c : cols) {
        t.columns.push_back(label + "_" + c.label);
        t.columns.push_back(label + "_" + c.label + "_pct");
      }
      for (auto& row : rows)
        for (std::size_t k = 0; k < 2 * cols.size(); ++k) row.emplace_back(kNaN);
    }
  }
  for (auto& row : rows) t.add(std::move(row));
  r.tables.push_back(std::move(t));
  r.tables.push_back(std::move(counts));
  r.notes.push_back("weeks with a score equal to the median fall in the below split");
  return r;
}

EventConfig::EventConfig() : event(days_from_civil({2012, 4, 20}) * kSecondsPerDay) {}

StudyReport study_event(const BarSeries& bars, const EventConfig& cfg) {
  if (cfg.pre_days < 1 || cfg.post_days < 1) throw DataError("event windows must be non-empty");
  StudyReport r;
  r.study = "event";
  r.inputs_digest = bars_digest(bars).hex();
  r.parameters["event"] = format_timestamp(cfg.event);
  r.parameters["pre_days"] = cfg.pre_days;
  r.parameters["post_days"] = cfg.post_days;
  r.parameters["var_lags"] = cfg.var_lags;
  r.parameters["horizon"] = cfg.horizon;

  const Timestamp pre_start = cfg.event - static_cast<Timestamp>(cfg.pre_days) * kSecondsPerDay;
  const Timestamp post_end = cfg.event + static_cast<Timestamp>(cfg.post_days) * kSecondsPerDay;
  struct Win {
    std::string name;
    Timestamp from, to;
    int days;
  };
  const std::vector<Win> wins = {{"pre", pre_start, cfg.event, cfg.pre_days}, {"post", cfg.event, post_end, cfg.post_days}};

  Table wt;
  wt.name = "windows";
  wt.columns = {"window", "start", "end", "bars"};
  Table t;
  t.name = "irf";
  t.columns = {"h"};
  auto rows = horizon_rows(cfg.horizon);
  for (const auto& w : wins) {
    const BarSeries s = bars.slice(w.from, w.to);
    const auto expected = static_cast<std::size_t>(w.days) * kBarsPerDay;
    if (s.size() != expected)
      throw InsufficientDataError(w.name + "-event window " + format_timestamp(w.from) + ".." + format_timestamp(w.to - 1) +
                                  " has " + std::to_string(s.size()) + " bars, expected " + std::to_string(expected));
    wt.add({w.name, format_timestamp(w.from), format_timestamp(w.to - 1), static_cast<std::int64_t>(s.size())});
    const MatXd Y = s.matrix(kFiveSeries);
    for (Eigen::Index j = 0; j < Y.cols(); ++j)
      if (Y.col(j).maxCoeff() == Y.col(j).minCoeff())
        throw DegenerateInputError(w.name + "-event window: series '" + kFiveSeries[static_cast<std::size_t>(j)] +
                                   "' is constant");
    const auto m = var_fit(Y, cfg.var_lags, kFiveSeries);
    const auto ir = irf(m, cfg.horizon);
    const auto cols = wash_columns(kFiveSeries, false);
    append_irf_columns(t, ir, cols, w.name + "_", rows);
    note_impact_zeros(r, ir, cols, kFiveSeries, w.name + "_");
    note_var(r, m, ir, w.name);
  }
  for (auto& row : rows) t.add(std::move(row));
  r.tables.push_back(std::move(wt));
  r.tables.push_back(std::move(t));
  return r;
}

}  // namespace goxlens::studies
