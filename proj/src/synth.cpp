#include "goxlens/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <tuple>

#include "goxlens/csv.hpp"
#include "goxlens/econometrics/var.hpp"
#include "goxlens/error.hpp"
#include "goxlens/rng.hpp"

namespace goxlens::synth {

namespace {

constexpr std::uint64_t kStreamTimes = 1;
constexpr std::uint64_t kStreamTrades = 2;
constexpr std::uint64_t kStreamDuplicates = 3;
constexpr std::uint64_t kStreamPrices = 4;
constexpr std::uint64_t kStreamNonUsd = 5;
constexpr std::uint64_t kStreamVar = 6;
constexpr std::uint64_t kStreamCoint = 7;
constexpr std::uint64_t kStreamOnchain = 8;
constexpr std::uint64_t kStreamMarket = 9;
constexpr std::uint64_t kStreamTrends = 10;
constexpr std::uint64_t kStreamAsset = 11;

std::uint64_t name_stream(const std::string& name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) h = (h ^ c) * 0x100000001b3ULL;
  return h;
}

std::string padded_id(std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%010zu", n);
  return buf;
}

std::string trader_id(std::uint64_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "u%05llu", static_cast<unsigned long long>(n));
  return buf;
}

Btc btc_from(double v) { return Btc::from_raw(std::max<std::int64_t>(0, std::llround(v * static_cast<double>(Btc::kScale)))); }
Money money_from(double v) {
  return Money::from_raw(std::max<std::int64_t>(0, std::llround(v * static_cast<double>(Money::kScale))));
}

MatXd factor(const MatXd& sigma) {
  const Eigen::Index k = sigma.rows();
  if (sigma.cwiseAbs().maxCoeff() == 0) return MatXd::Zero(k, k);
  Eigen::LLT<MatXd> llt(sigma);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  const Eigen::SelfAdjointEigenSolver<MatXd> es(sigma);
  if (es.eigenvalues().minCoeff() < -1e-10 * sigma.trace()) throw DataError("shock covariance is not positive semidefinite");
  return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

Day parse_day(const nlohmann::json& v, const char* what) {
  const auto d = parse_date(v.get<std::string>());
  if (!d) throw DataError(std::string("spec: bad date for ") + what);
  return *d;
}

MatXd matrix_from(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw DataError(std::string("spec: ") + what + " must be a non-empty matrix");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  MatXd M(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(j[static_cast<std::size_t>(r)].size()) != cols)
      throw DataError(std::string("spec: ragged matrix ") + what);
    for (Eigen::Index c = 0; c < cols; ++c) M(r, c) = j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
  }
  return M;
}

nlohmann::ordered_json matrix_json(const MatXd& M) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    out.push_back(row);
  }
  return out;
}

void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed, const char* where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return it.key() == a; }) == allowed.end())
      throw DataError(std::string("spec: unknown key '") + it.key() + "' in " + where);
  }
}

VarTruth var_from(const nlohmann::json& j) {
  check_keys(j, {"c", "A", "sigma", "T"}, "var");
  VarTruth v;
  const auto& c = j.at("c");
  v.c.resize(static_cast<Eigen::Index>(c.size()));
  for (std::size_t i = 0; i < c.size(); ++i) v.c(static_cast<Eigen::Index>(i)) = c[i].get<double>();
  for (const auto& a : j.at("A")) v.A.push_back(matrix_from(a, "A"));
  v.sigma = j.contains("sigma") ? matrix_from(j.at("sigma"), "sigma") : MatXd::Identity(v.c.size(), v.c.size());
  if (j.contains("T")) v.T = j.at("T").get<Eigen::Index>();
  for (const auto& a : v.A)
    if (a.rows() != v.c.size() || a.cols() != v.c.size()) throw DataError("spec: VAR coefficient shape mismatch");
  if (v.sigma.rows() != v.c.size() || v.sigma.cols() != v.c.size()) throw DataError("spec: VAR sigma shape mismatch");
  return v;
}

nlohmann::ordered_json var_json(const VarTruth& v) {
  nlohmann::ordered_json j;
  j["c"] = std::vector<double>(v.c.data(), v.c.data() + v.c.size());
  j["A"] = nlohmann::ordered_json::array();
  for (const auto& a : v.A) j["A"].push_back(matrix_json(a));
  j["sigma"] = matrix_json(v.sigma);
  j["T"] = v.T;
  return j;
}

}  // namespace

SynthSpec::SynthSpec() : start_date(days_from_civil({2011, 6, 26})) {}

TimeWindow SynthSpec::window() const {
  const Timestamp s = start_date * kSecondsPerDay;
  return {s, s + static_cast<Timestamp>(n_days) * kSecondsPerDay - 1};
}

SynthSpec spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DataError("spec must be a JSON object");
  check_keys(j,
             {"seed", "start_date", "n_days", "n_traders", "n_trades", "wash_rate", "surges", "duplicate_rate",
              "non_usd_rate", "start_price", "daily_vol", "size_log_mean", "size_log_sd", "var", "cointegration",
              "trend_weeks", "aux"},
             "spec");
  SynthSpec s;
  try {
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("start_date")) s.start_date = parse_day(j.at("start_date"), "start_date");
    if (j.contains("n_days")) s.n_days = j.at("n_days").get<int>();
    if (j.contains("n_traders")) s.n_traders = j.at("n_traders").get<int>();
    if (j.contains("n_trades")) s.n_trades = j.at("n_trades").get<std::size_t>();
    if (j.contains("wash_rate")) s.wash_rate = j.at("wash_rate").get<double>();
    if (j.contains("duplicate_rate")) s.duplicate_rate = j.at("duplicate_rate").get<double>();
    if (j.contains("non_usd_rate")) s.non_usd_rate = j.at("non_usd_rate").get<double>();
    if (j.contains("start_price")) s.start_price = j.at("start_price").get<double>();
    if (j.contains("daily_vol")) s.daily_vol = j.at("daily_vol").get<double>();
    if (j.contains("size_log_mean")) s.size_log_mean = j.at("size_log_mean").get<double>();
    if (j.contains("size_log_sd")) s.size_log_sd = j.at("size_log_sd").get<double>();
    if (j.contains("surges"))
      for (const auto& sw : j.at("surges")) {
        check_keys(sw, {"window", "wash_rate"}, "surges");
        const auto w = parse_window(sw.at("window").get<std::string>());
        if (!w) throw DataError("spec: bad surge window");
        s.surges.push_back({*w, sw.at("wash_rate").get<double>()});
      }
    if (j.contains("var")) s.var = var_from(j.at("var"));
    if (j.contains("cointegration")) {
      const auto& c = j.at("cointegration");
      check_keys(c, {"T", "beta", "noise_scale"}, "cointegration");
      CointegrationConfig cc;
      if (c.contains("T")) cc.T = c.at("T").get<Eigen::Index>();
      if (c.contains("beta")) cc.beta = c.at("beta").get<double>();
      if (c.contains("noise_scale")) cc.noise_scale = c.at("noise_scale").get<double>();
      s.cointegration = cc;
    }
    if (j.contains("trend_weeks")) s.trend_weeks = j.at("trend_weeks").get<std::vector<int>>();
    if (j.contains("aux")) {
      const auto& a = j.at("aux");
      check_keys(a, {"onchain_beta", "onchain_noise", "market_multiple", "supply_start", "supply_per_day", "assets"}, "aux");
      if (a.contains("onchain_beta")) s.aux.onchain_beta = a.at("onchain_beta").get<double>();
      if (a.contains("onchain_noise")) s.aux.onchain_noise = a.at("onchain_noise").get<double>();
      if (a.contains("market_multiple")) s.aux.market_multiple = a.at("market_multiple").get<double>();
      if (a.contains("supply_start")) s.aux.supply_start = a.at("supply_start").get<double>();
      if (a.contains("supply_per_day")) s.aux.supply_per_day = a.at("supply_per_day").get<double>();
      if (a.contains("assets")) s.aux.assets = a.at("assets").get<std::vector<std::string>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("spec: ") + e.what());
  }
  if (s.n_days < 1 || s.n_traders < 2) throw DataError("spec: need n_days >= 1 and n_traders >= 2");
  for (double r : {s.wash_rate, s.duplicate_rate, s.non_usd_rate})
    if (r < 0 || r > 1) throw DataError("spec: rates must lie in [0, 1]");
  for (const auto& sw : s.surges)
    if (sw.wash_rate < 0 || sw.wash_rate > 1) throw DataError("spec: rates must lie in [0, 1]");
  return s;
}

nlohmann::ordered_json spec_to_json(const SynthSpec& s) {
  nlohmann::ordered_json j;
  j["seed"] = s.seed;
  j["start_date"] = format_date(s.start_date);
  j["n_days"] = s.n_days;
  j["n_traders"] = s.n_traders;
  j["n_trades"] = s.n_trades;
  j["wash_rate"] = s.wash_rate;
  j["surges"] = nlohmann::ordered_json::array();
  for (const auto& sw : s.surges)
    j["surges"].push_back({{"window", format_timestamp(sw.window.start) + ".." + format_timestamp(sw.window.end)},
                           {"wash_rate", sw.wash_rate}});
  j["duplicate_rate"] = s.duplicate_rate;
  j["non_usd_rate"] = s.non_usd_rate;
  j["start_price"] = s.start_price;
  j["daily_vol"] = s.daily_vol;
  j["size_log_mean"] = s.size_log_mean;
  j["size_log_sd"] = s.size_log_sd;
  if (s.var) j["var"] = var_json(*s.var);
  if (s.cointegration)
    j["cointegration"] = {{"T", s.cointegration->T}, {"beta", s.cointegration->beta}, {"noise_scale", s.cointegration->noise_scale}};
  j["trend_weeks"] = s.trend_weeks;
  j["aux"] = {{"onchain_beta", s.aux.onchain_beta},     {"onchain_noise", s.aux.onchain_noise},
              {"market_multiple", s.aux.market_multiple}, {"supply_start", s.aux.supply_start},
              {"supply_per_day", s.aux.supply_per_day},   {"assets", s.aux.assets}};
  return j;
}

ExchangeLog gen_exchange_log(const SynthSpec& spec) {
  const TimeWindow w = spec.window();
  const auto span = static_cast<std::uint64_t>(w.end - w.start + 1);
  ExchangeLog log;

  std::vector<Timestamp> times(spec.n_trades);
  CounterRng trng(spec.seed, kStreamTimes);
  for (auto& t : times) t = w.start + static_cast<Timestamp>(trng.below(span));
  std::sort(times.begin(), times.end());

  // Daily log-price random walk.
  std::vector<double> day_price(static_cast<std::size_t>(spec.n_days));
  CounterRng prng(spec.seed, kStreamPrices);
  double lp = std::log(spec.start_price);
  for (auto& p : day_price) {
    p = std::exp(lp);
    lp += spec.daily_vol * prng.normal();
  }

  CounterRng rng(spec.seed, kStreamTrades);
  auto rate_at = [&](Timestamp t) {
    for (const auto& s : spec.surges)
      if (s.window.contains(t)) return s.wash_rate;
    return spec.wash_rate;
  };
  const auto nt = static_cast<std::uint64_t>(spec.n_traders);
  std::set<std::tuple<Timestamp, std::string, std::string, std::int64_t, std::int64_t>> keys;
  for (std::size_t i = 0; i < times.size(); ++i) {
    PairedTrade t;
    t.timestamp = times[i];
    t.trade_id = padded_id(i + 1);
    const bool wash = rng.bernoulli(rate_at(t.timestamp));
    const double price = day_price[static_cast<std::size_t>(day_of(t.timestamp) - spec.start_date)] * std::exp(0.002 * rng.normal());
    for (;;) {
      const std::uint64_t b = rng.below(nt);
      std::uint64_t s = b;
      if (!wash) {
        s = rng.below(nt - 1);
        if (s >= b) ++s;
      }
      t.buyer = trader_id(b);
      t.seller = trader_id(s);
      const double size = std::min(1e4, std::exp(spec.size_log_mean + spec.size_log_sd * rng.normal()));
      t.bitcoins = btc_from(std::max(size, 1e-6));
      t.money = money_from(t.bitcoins.to_double() * price);
      if (keys.emplace(t.timestamp, t.buyer, t.seller, t.bitcoins.raw(), t.money.raw()).second) break;
    }
    if (wash) log.planted_wash_ids.insert(t.trade_id);
    log.trades.push_back(t);
  }
  log.n_trades = log.trades.size();

  std::vector<std::pair<PairedTrade, std::string>> rows;  // trade and currency
  for (const auto& t : log.trades) rows.emplace_back(t, "USD");
  std::size_t next_id = log.n_trades + 1;
  CounterRng nrng(spec.seed, kStreamNonUsd);
  if (spec.non_usd_rate > 0)
    for (const auto& t : log.trades)
      if (nrng.bernoulli(spec.non_usd_rate)) {
        PairedTrade e = t;
        e.trade_id = padded_id(next_id++);
        rows.emplace_back(e, "EUR");
        ++log.n_non_usd;
      }
  CounterRng drng(spec.seed, kStreamDuplicates);
  if (spec.duplicate_rate > 0)
    for (const auto& t : log.trades)
      if (drng.bernoulli(spec.duplicate_rate)) {
        PairedTrade d = t;
        d.trade_id = padded_id(next_id++);
        rows.emplace_back(d, "USD");
        ++log.n_duplicates;
      }
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return std::tie(a.first.timestamp, a.first.trade_id) < std::tie(b.first.timestamp, b.first.trade_id);
  });
  for (const auto& [t, cur] : rows) {
    log.records.push_back({t.buyer, t.trade_id, t.timestamp, cur, t.bitcoins, t.money, Side::buy});
    log.records.push_back({t.seller, t.trade_id, t.timestamp, cur, t.bitcoins, t.money, Side::sell});
  }
  return log;
}

void write_exchange_log(std::ostream& out, const ExchangeLog& log) {
  csv::write_row(out, {"user_id", "trade_id", "timestamp", "currency", "bitcoins", "money", "side"});
  for (const auto& r : log.records)
    csv::write_row(out, {r.user_id, r.trade_id, format_timestamp(r.timestamp), r.currency, r.bitcoins.to_string(),
                         r.money.to_string(), r.side == Side::buy ? "buy" : "sell"});
}

nlohmann::ordered_json truth_json(const SynthSpec& spec, const ExchangeLog& log) {
  nlohmann::ordered_json j;
  j["n_trades"] = log.n_trades;
  j["n_duplicates"] = log.n_duplicates;
  j["n_non_usd"] = log.n_non_usd;
  j["n_wash"] = log.planted_wash_ids.size();
  j["n_rows"] = log.records.size();
  j["window"] = format_timestamp(spec.window().start) + ".." + format_timestamp(spec.window().end);
  j["planted_wash_ids"] = std::vector<std::string>(log.planted_wash_ids.begin(), log.planted_wash_ids.end());
  j["spec"] = spec_to_json(spec);
  return j;
}

MatXd gen_var_process(const VecXd& c, const std::vector<MatXd>& A, const MatXd& sigma, Eigen::Index T, std::uint64_t seed) {
  const Eigen::Index k = c.size();
  VarModel<double> m;
  m.intercept = c;
  m.coefficients = A;
  const double radius = m.spectral_radius();
  if (!(radius < 1.0))
    throw UnstableModelError("VAR coefficients are not stable: spectral radius " + csv::format_double(radius), radius);
  const MatXd L = factor(sigma);
  const auto p = static_cast<Eigen::Index>(A.size());
  const Eigen::Index burn = 500;
  MatXd Y = MatXd::Zero(burn + T, k);
  CounterRng rng(seed, kStreamVar);
  VecXd e(k);
  for (Eigen::Index t = 0; t < burn + T; ++t) {
    VecXd y = c;
    for (Eigen::Index i = 1; i <= p && t - i >= 0; ++i) y += A[static_cast<std::size_t>(i - 1)] * Y.row(t - i).transpose();
    for (Eigen::Index j = 0; j < k; ++j) e(j) = rng.normal();
    y += L * e;
    Y.row(t) = y.transpose();
  }
  return Y.bottomRows(T);
}

CointegratedPair gen_cointegrated_pair(Eigen::Index T, double noise_scale, std::uint64_t seed, double beta) {
  if (T < 100) throw InsufficientDataError("cointegrated pair needs T >= 100");
  CointegratedPair out;
  out.beta = beta;
  out.x.resize(T);
  out.y.resize(T);
  CounterRng rng(seed, kStreamCoint);
  double x = 0, u = 0;
  for (Eigen::Index t = 0; t < T; ++t) {
    x += rng.normal();
    u = 0.5 * u + rng.normal();
    out.x(t) = x;
    out.y(t) = beta * x + noise_scale * u;
  }
  return out;
}

BarSeries gen_bar_series(const BarProcess& process, Timestamp start, std::uint64_t seed, std::string label) {
  const VarTruth& v = process.var;
  if (v.c.size() != 4) throw DataError("bar process VAR must have 4 variables (wash, nonwash, liq, vol)");
  const MatXd Y = gen_var_process(v.c, v.A, v.sigma, v.T, seed);
  BarSeries out;
  out.label = std::move(label);
  const Timestamp first = floor_to_bar(start);
  const Eigen::Index week = 7 * kBarsPerDay;
  for (Eigen::Index t = 0; t < v.T; ++t) {
    double ramp = 0;
    for (int w : process.trend_weeks)
      if (t >= w * week && t < (w + 1) * week) ramp = process.trend_size * static_cast<double>(t - w * week) / static_cast<double>(week);
    Bar b;
    b.start = first + t * kBarSeconds;
    b.wash_volume = btc_from(std::max(0.0, process.level(0) + Y(t, 0) + ramp));
    b.nonwash_volume = btc_from(std::max(0.0, process.level(1) + Y(t, 1) + ramp));
    b.total_volume = b.wash_volume + b.nonwash_volume;
    b.dollar_volume = money_from(10.0 * b.total_volume.to_double());
    if (b.total_volume.raw() > 0) b.vwap = 10.0;
    b.amihud = std::max(0.0, process.level(2) + Y(t, 2));
    b.rvol = std::max(0.0, process.level(3) + Y(t, 3));
    out.bars.push_back(b);
  }
  return out;
}

void write_onchain_csv(std::ostream& out, const SynthSpec& spec, const BarSeries& bars) {
  csv::write_row(out, {"timestamp", "type", "amount", "transaction_id", "address"});
  CounterRng rng(spec.seed, kStreamOnchain);
  std::size_t tx = 0;
  for (const Bar& b : bars.bars) {
    const double output = std::max(0.0, spec.aux.onchain_beta * b.nonwash_volume.to_double() + spec.aux.onchain_noise * rng.normal());
    const std::string ts = format_timestamp(b.start + 60);
    const std::string id = "tx" + padded_id(++tx);
    csv::write_row(out, {ts, "input", btc_from(output).to_string(), id, "addr_in"});
    csv::write_row(out, {ts, "output", btc_from(output).to_string(), id, "addr_out"});
  }
}

void write_market_daily_csv(std::ostream& out, const SynthSpec& spec, const BarSeries& bars) {
  csv::write_row(out, {"date", "volume_btc"});
  CounterRng rng(spec.seed, kStreamMarket);
  for (const DailyTotals& d : daily_totals(bars)) {
    const double v = std::max(0.0, spec.aux.market_multiple * d.total * (1.0 + 0.1 * rng.normal()));
    csv::write_row(out, {format_date(d.date), csv::format_double(v)});
  }
}

void write_supply_csv(std::ostream& out, const SynthSpec& spec) {
  csv::write_row(out, {"date", "circulating_supply"});
  for (Day d = spec.start_date - 7; d <= spec.start_date + spec.n_days + 7; d += 7)
    csv::write_row(out, {format_date(d), csv::format_double(spec.aux.supply_start +
                                                            spec.aux.supply_per_day * static_cast<double>(d - spec.start_date))});
}

void write_trends_csv(std::ostream& out, const SynthSpec& spec) {
  csv::write_row(out, {"week_start", "score"});
  CounterRng rng(spec.seed, kStreamTrends);
  for (Day w = iso_week_start(spec.start_date); w < spec.start_date + spec.n_days; w += 7)
    csv::write_row(out, {format_date(w), std::to_string(20 + rng.below(61))});
}

void write_asset_csv(std::ostream& out, const SynthSpec& spec, const std::string& name) {
  csv::write_row(out, {"timestamp", "close", "tick", "volume"});
  CounterRng rng(spec.seed, kStreamAsset ^ name_stream(name));
  double lp = std::log(100.0);
  for (Day d = spec.start_date; d < spec.start_date + spec.n_days; ++d) {
    if (weekday_of(d) >= 5) continue;
    // Trading hours 13:30 to 20:00 UTC.
    for (Timestamp m = 13 * 60 + 30; m < 20 * 60; ++m) {
      lp += 0.0005 * rng.normal();
      const auto ticks = 1 + rng.below(50);
      csv::write_row(out, {format_timestamp(d * kSecondsPerDay + m * 60), csv::format_double(std::exp(lp)),
                           std::to_string(ticks), std::to_string(ticks * 100)});
    }
  }
}

}  // namespace goxlens::synth
