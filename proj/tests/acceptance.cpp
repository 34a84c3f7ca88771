#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "goxlens/detect.hpp"
#include "goxlens/econometrics.hpp"
#include "goxlens/features.hpp"
#include "goxlens/ingest.hpp"
#include "goxlens/ml.hpp"
#include "goxlens/rng.hpp"
#include "goxlens/studies.hpp"
#include "goxlens/synth.hpp"
#include "test_support.hpp"

using namespace goxlens;
namespace fs = std::filesystem;

namespace {

enum class Verdict { pass, fail, skip };

struct Outcome {
  Verdict verdict;
  std::string detail;
};

Outcome check(bool ok, std::string detail) { return {ok ? Verdict::pass : Verdict::fail, std::move(detail)}; }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// 1 and 2 share the generated logs.
struct DetectionRun {
  bool exact = true;
  bool conserved = true;
  double worst_precision = 1, worst_recall = 1;
};

DetectionRun detection_runs() {
  DetectionRun out;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    synth::SynthSpec s;
    s.seed = seed;
    s.n_trades = 10000;
    s.wash_rate = 0.03;
    s.duplicate_rate = 0.05;
    const auto log = synth::gen_exchange_log(s);
    const auto ledger = pair_and_dedup(log.records);
    const auto f = flag_wash(ledger, s.window());
    std::size_t tp = 0, flagged = 0;
    for (const auto& t : f.trades)
      if (t.wash) {
        ++flagged;
        tp += log.planted_wash_ids.count(t.trade.trade_id);
      }
    const double precision = flagged ? static_cast<double>(tp) / flagged : 1.0;
    const double recall = log.planted_wash_ids.empty() ? 1.0 : static_cast<double>(tp) / log.planted_wash_ids.size();
    out.worst_precision = std::min(out.worst_precision, precision);
    out.worst_recall = std::min(out.worst_recall, recall);
    out.exact = out.exact && precision == 1.0 && recall == 1.0;
    out.conserved = out.conserved && ledger.dedup_stats.deduplicated == log.n_trades;
  }
  return out;
}

Outcome c3_adf() {
  int noise_rejected = 0, walk_kept = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    noise_rejected += adf(testing::white_noise(1000, seed), schwert_max_lag(1000)).reject_at_5pct;
    walk_kept += !adf(testing::random_walk(1000, 1000 + seed), schwert_max_lag(1000)).reject_at_5pct;
  }
  return check(noise_rejected >= 95 && walk_kept >= 90, "white noise rejected " + std::to_string(noise_rejected) +
                                                            "/100, random walk kept " + std::to_string(walk_kept) + "/100");
}

Outcome c4_var() {
  MatXd A(2, 2);
  A << 0.5, 0.1, 0.0, 0.3;
  const MatXd Y = testing::simulate_var(VecXd::Zero(2), {A}, MatXd::Identity(2, 2), 5000, 4);
  const double err = (var_fit(Y, 1).coefficients[0] - A).cwiseAbs().maxCoeff();

  MatXd A1(2, 2), A2(2, 2);
  A1 << 0.4, 0.1, 0.0, 0.3;
  A2 << -0.5, 0.0, 0.1, -0.4;
  int picked = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const MatXd Z = testing::simulate_var(VecXd::Zero(2), {A1, A2}, MatXd::Identity(2, 2), 500, 200 + seed);
    picked += select_lag_aic(Z, 8) == 2;
  }
  return check(err <= 0.05 && picked >= 90,
               "VAR(1) max coefficient error " + fmt("%.4f", err) + ", AIC picked order 2 in " + std::to_string(picked) + "/100");
}

Outcome c5_granger() {
  const int n = 1000;
  MatXd D(n, 2);
  D.col(0) = testing::white_noise(n, 5);
  D.col(1) = testing::white_noise(n, 6);
  for (int t = 1; t < n; ++t) D(t, 1) += 0.8 * D(t - 1, 0);
  const double p = granger(D, 0, 1, 1).p_value;
  int rejected = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    MatXd E(500, 2);
    E.col(0) = testing::ar1(500, 0.5, 3000 + seed);
    E.col(1) = testing::ar1(500, 0.5, 4000 + seed);
    rejected += granger(E, 0, 1, 2).p_value < 0.05;
  }
  const double rate = rejected / 200.0;
  return check(p < 0.01 && std::abs(rate - 0.05) <= 0.03,
               "lead-lag p " + fmt("%.3g", p) + ", independent rejection rate " + fmt("%.3f", rate));
}

Outcome c6_johansen() {
  int coint = 0, walks = 0;
  double identity = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto pair = synth::gen_cointegrated_pair(500, 1.0, seed, 1.0);
    MatXd Y(500, 2);
    Y << pair.x, pair.y;
    const auto r = johansen(Y, 1);
    coint += r.rank >= 1;
    for (Eigen::Index q = 0; q < 2; ++q) {
      double s = 0;
      for (Eigen::Index i = q; i < 2; ++i) s += std::log(1 - r.eigenvalues(i));
      identity = std::max(identity, std::abs(-static_cast<double>(r.nobs) * s - r.trace(q)));
    }
    MatXd W(500, 2);
    W << testing::random_walk(500, 5000 + seed), testing::random_walk(500, 6000 + seed);
    walks += johansen(W, 1).rank == 0;
  }
  return check(coint >= 90 && walks >= 85 && identity <= 1e-10,
               "cointegrated rank>=1 in " + std::to_string(coint) + "/100, independent rank 0 in " + std::to_string(walks) +
                   "/100, trace identity error " + fmt("%.2e", identity));
}

Outcome c7_engle_granger() {
  int coint = 0, walks = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto pair = synth::gen_cointegrated_pair(500, 1.0, 100 + seed, 1.0);
    coint += engle_granger(pair.y, pair.x).p_value < 0.10;
    walks += engle_granger(testing::random_walk(500, 7000 + seed), testing::random_walk(500, 8000 + seed)).p_value < 0.10;
  }
  return check(coint >= 90 && walks <= 20, "cointegrated p<0.10 in " + std::to_string(coint) +
                                               "/100, independent walks rejected in " + std::to_string(walks) + "/100");
}

Outcome c8_irf() {
  double worst = 0;
  int built = 0;
  CounterRng rng(88, 0);
  while (built < 10) {
    const Eigen::Index k = 2 + static_cast<Eigen::Index>(rng.below(3));
    const Eigen::Index p = 1 + static_cast<Eigen::Index>(rng.below(3));
    VarModel<double> m;
    m.intercept.resize(k);
    for (auto& v : m.intercept) v = rng.normal();
    for (Eigen::Index l = 0; l < p; ++l) {
      MatXd A(k, k);
      for (auto& v : A.reshaped()) v = 0.5 * rng.normal() / static_cast<double>(k * p);
      m.coefficients.push_back(A);
    }
    if (!(m.spectral_radius() < 0.95)) continue;
    MatXd B(k, k);
    for (auto& v : B.reshaped()) v = rng.normal();
    m.sigma_u = B * B.transpose() + MatXd::Identity(k, k);
    m.mean_abs = VecXd::Ones(k);
    ++built;
    const Eigen::Index H = 12;
    const auto ir = irf(m, H);
    const MatXd P = m.sigma_u.llt().matrixL();
    const auto simulate = [&](const VecXd& shock) {
      std::vector<VecXd> path;
      for (Eigen::Index h = 0; h <= H; ++h) {
        VecXd y = m.intercept;
        if (h == 0) y += shock;
        for (Eigen::Index l = 1; l <= p && h - l >= 0; ++l)
          y += m.coefficients[static_cast<std::size_t>(l - 1)] * path[static_cast<std::size_t>(h - l)];
        path.push_back(y);
      }
      return path;
    };
    const auto base = simulate(VecXd::Zero(k));
    for (Eigen::Index i = 0; i < k; ++i) {
      const auto hit = simulate(P.col(i));
      for (Eigen::Index h = 0; h <= H; ++h)
        for (Eigen::Index j = 0; j < k; ++j)
          worst = std::max(worst, std::abs(hit[static_cast<std::size_t>(h)](j) - base[static_cast<std::size_t>(h)](j) - ir(h, j, i)));
    }
  }
  return check(worst < 1e-8, "max abs error " + fmt("%.2e", worst) + " over 10 random stable VARs");
}

ml::SeriesMap noise_series(const std::vector<std::string>& names, Eigen::Index n, std::uint64_t seed) {
  ml::SeriesMap s;
  std::uint64_t stream = 0;
  for (const auto& name : names) {
    CounterRng rng(seed, 900 + stream++);
    VecXd v(n);
    for (auto& x : v) x = rng.normal();
    s.emplace_back(name, v);
  }
  return s;
}

std::vector<std::pair<std::string, VecXd>> tree_families(const ml::LaggedDataset& ds, std::uint64_t seed) {
  return {{"cart", ml::train_tree(ds, 3).importance},
          {"random_forest", ml::train_forest(ds, 100, 3, seed).importance},
          {"gradient_boosting", ml::train_boost(ds, ml::BoostMode::gradient_second_order, 100, 3, seed).importance},
          {"adaboost", ml::train_boost(ds, ml::BoostMode::adaboost_regression, 100, 3, seed).importance}};
}

Outcome c9_placebo() {
  int signal_first = 0, placebo_first = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto series = noise_series({"signal", "d1", "d2", "d3", "target"}, 1500, seed);
    CounterRng rng(seed, 5);
    VecXd& y = series.back().second;
    const VecXd& x = series.front().second;
    for (Eigen::Index t = 1; t < y.size(); ++t) y(t) = 10.0 * x(t - 1) + 0.1 * rng.normal();
    const auto ds = ml::build_lagged(series, {"signal", "d1", "d2", "d3"}, "target", {1, 2}, seed);
    const auto rep = ml::importance_report(tree_families(ds, seed), ds.names);
    bool first = true;
    for (const auto& f : rep.families) {
      first = first && f.ranks[0] == 1;
      placebo_first += f.placebo_rank == 1;
    }
    signal_first += first;
  }

  // Placebo position among three noise features: four equally likely ranks.
  std::vector<std::vector<int>> counts(4, std::vector<int>(4, 0));
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto series = noise_series({"a", "b", "c", "target"}, 600, 500 + seed);
    const auto ds = ml::build_lagged(series, {"a", "b", "c"}, "target", {1}, 500 + seed);
    const auto rep = ml::importance_report(tree_families(ds, seed), ds.names);
    for (std::size_t f = 0; f < 4; ++f) ++counts[f][static_cast<std::size_t>(rep.families[f].placebo_rank - 1)];
  }
  double min_p = 1;
  for (const auto& c : counts) {
    double stat = 0;
    for (int n : c) stat += (n - 25.0) * (n - 25.0) / 25.0;
    min_p = std::min(min_p, dist::chi_square_survival(stat, 3.0));
  }
  return check(signal_first == 20 && placebo_first == 0 && min_p > 0.01,
               "signal rank 1 in all families for " + std::to_string(signal_first) + "/20 seeds, placebo rank 1 " +
                   std::to_string(placebo_first) + " times, smallest uniformity p " + fmt("%.3f", min_p));
}

double rel_err(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale < 1e-12 ? 0.0 : std::abs(a - b) / scale;
}

Outcome c10_rnn() {
  double worst = 0;
  for (ml::Cell cell : {ml::Cell::gru, ml::Cell::lstm}) {
    ml::Rnn net(cell, 4, 16);
    net.initialize(31);
    CounterRng rng(32, 0);
    std::vector<MatXd> seqs;
    VecXd targets(8);
    for (int s = 0; s < 8; ++s) {
      MatXd q(5, 4);
      for (auto& v : q.reshaped()) v = rng.normal();
      seqs.push_back(q);
      targets(s) = rng.normal();
    }
    VecXd grad, unused;
    net.loss_and_gradient(seqs, targets, grad);
    const double h = 1e-5;
    for (int k = 0; k < 5; ++k) {
      const auto i = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(net.parameter_count())));
      ml::Rnn plus = net, minus = net;
      plus.parameters()(i) += h;
      minus.parameters()(i) -= h;
      const double fd = (plus.loss_and_gradient(seqs, targets, unused) - minus.loss_and_gradient(seqs, targets, unused)) / (2 * h);
      worst = std::max(worst, rel_err(grad(i), fd));
    }
  }
  return check(worst < 1e-4, "worst relative error " + fmt("%.2e", worst) + " (GRU and LSTM, 5 coordinates each)");
}

Outcome c11_event() {
  synth::BarProcess p;
  p.var.c = VecXd::Zero(4);
  p.var.A = {MatXd::Identity(4, 4) * 0.2};
  p.var.sigma = Eigen::Vector4d(4.0, 25.0, 1e-10, 1e-8).asDiagonal();
  p.var.T = 48 * 40;
  const auto bars = synth::gen_bar_series(p, static_cast<Timestamp>(days_from_civil({2012, 4, 1})) * kSecondsPerDay, 11);
  const auto r = studies::study_event(bars, studies::EventConfig{});
  const auto& w = r.table("windows");
  const auto pre = std::get<std::int64_t>(w.rows.at(0).at(3)), post = std::get<std::int64_t>(w.rows.at(1).at(3));
  return check(pre == 672 && post == 672, "pre " + std::to_string(pre) + " bars, post " + std::to_string(post) + " bars");
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(GOXLENS_CLI_PATH) + " " + args + " >" + log.string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome c12_determinism() {
  const fs::path root = fs::temp_directory_path() / "goxlens_acceptance_cli";
  fs::remove_all(root);
  fs::create_directories(root);
  {
    std::ofstream spec(root / "spec.json");
    spec << R"({"start_date": "2012-03-30", "n_days": 42, "n_trades": 60000, "aux": {"assets": ["spx"]}})";
  }
  const auto path = [&](const std::string& leaf) { return (root / leaf).string(); };
  if (run_cli("synth --spec " + path("spec.json") + " --seed 12 --out " + path("s"), root / "synth.log") != 0 ||
      run_cli("bars --trades " + path("s/trades.csv") + " --window 2012-03-30..2012-05-10 --out " + path("b"),
              root / "bars.log") != 0)
    return {Verdict::fail, "could not prepare inputs: " + slurp(root / "synth.log") + slurp(root / "bars.log")};

  const std::string bars = " --bars " + path("b/bars.csv");
  const std::vector<std::pair<std::string, std::string>> runs = {
      {"timing", "analyze timing" + bars + " --seed 3"},
      {"onchain", "analyze onchain" + bars + " --aux onchain=" + path("s/onchain.csv")},
      {"market", "analyze market" + bars + " --aux market_daily=" + path("s/market_daily.csv")},
      {"cross-asset", "analyze cross-asset" + bars + " --aux asset:spx=" + path("s/asset_spx.csv")},
      {"media", "analyze media" + bars + " --aux trends=" + path("s/trends.csv")},
      {"event", "analyze event" + bars},
  };
  std::vector<std::string> problems;
  std::size_t files = 0;
  for (const auto& [name, args] : runs) {
    const fs::path a = root / (name + "_a"), b = root / (name + "_b");
    const int ra = run_cli(args + " --out " + a.string(), root / (name + "_a.log"));
    const int rb = run_cli(args + " --out " + b.string(), root / (name + "_b.log"));
    if (ra != 0 || rb != 0) {
      problems.push_back(name + " exited " + std::to_string(ra) + "/" + std::to_string(rb));
      continue;
    }
    std::set<std::string> names_a, names_b;
    for (const auto& e : fs::directory_iterator(a)) names_a.insert(e.path().filename().string());
    for (const auto& e : fs::directory_iterator(b)) names_b.insert(e.path().filename().string());
    if (names_a != names_b) {
      problems.push_back(name + " wrote different file sets");
      continue;
    }
    for (const auto& f : names_a) {
      ++files;
      if (slurp(a / f) != slurp(b / f)) problems.push_back(name + "/" + f + " differs");
    }
  }
  fs::remove_all(root);
  std::string detail = std::to_string(runs.size()) + " studies, " + std::to_string(files) + " files compared";
  for (const auto& p : problems) detail += "; " + p;
  return check(problems.empty(), detail);
}

Outcome c13_dataset() {
  const char* env = std::getenv("GOXLENS_MTGOX_DIR");
  if (!env || !*env) return {Verdict::skip, "GOXLENS_MTGOX_DIR not set"};
  const fs::path dir = env;
  std::vector<fs::path> files;
  if (fs::is_directory(dir / "trades"))
    for (const auto& e : fs::directory_iterator(dir / "trades"))
      if (e.path().extension() == ".csv") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) return {Verdict::fail, "no trades/*.csv under " + dir.string()};

  std::vector<RawTradeRecord> records;
  for (const auto& f : files) {
    std::ifstream in(f);
    auto parsed = parse_trade_log(in, TradeSchema::mtgox_leak);
    records.insert(records.end(), parsed.records.begin(), parsed.records.end());
  }
  const auto ledger = pair_and_dedup(records);
  const auto flagged = flag_wash(ledger, default_wash_window());
  std::vector<std::string> failures;
  std::string detail = "deduplicated " + std::to_string(ledger.dedup_stats.deduplicated);
  if (ledger.dedup_stats.deduplicated != 7741721) failures.push_back("deduplicated count");

  const auto load = [&](const char* name, AuxKind kind) -> std::optional<AuxSeries> {
    std::ifstream in(dir / name);
    if (!in) return std::nullopt;
    return parse_aux(in, kind).series;
  };
  if (const auto supply = load("supply.csv", AuxKind::supply)) {
    const double share = marketcap_share(flagged, interpolate_supply(*supply)).mean_percent;
    detail += ", market-cap share " + fmt("%.3g", share) + "%";
    if (!(share >= 6.5e-5 / 2 && share <= 6.5e-5 * 2)) failures.push_back("market-cap share");
  } else {
    failures.push_back("supply.csv missing");
  }

  const BarSeries bars = build_bars(flagged);
  if (const auto market = load("market_daily.csv", AuxKind::market_daily)) {
    const auto r = studies::study_market(bars, *market, daily_quartiles(bars));
    const double share = std::get<double>(r.table("exchange_share").rows.at(0).at(1));
    detail += ", exchange share " + fmt("%.2f", share) + "%";
    if (!(std::abs(share - 83.37) <= 3.0)) failures.push_back("exchange share");
  } else {
    failures.push_back("market_daily.csv missing");
  }

  const MatXd Y = bars.matrix(studies::kFiveSeries);
  const bool wash_nonwash = granger(Y, 0, 1, 1).pass;
  const bool wash_liq = granger(Y, 0, 3, 1).pass;
  detail += std::string(", wash->nonwash ") + (wash_nonwash ? "pass" : "fail") + ", wash->liq " + (wash_liq ? "pass" : "fail");
  if (!wash_nonwash || wash_liq) failures.push_back("Granger pattern");

  for (const auto& f : failures) detail += "; mismatch: " + f;
  return check(failures.empty(), detail);
}

}  // namespace

int main() {
  int failed = 0;
  const auto report = [&](int id, const char* name, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {Verdict::fail, std::string("exception: ") + e.what()};
    }
    const char* tag = o.verdict == Verdict::pass ? "PASS" : o.verdict == Verdict::fail ? "FAIL" : "SKIP";
    failed += o.verdict == Verdict::fail;
    std::cout << tag << " " << id << " " << name << ": " << o.detail << std::endl;
  };

  DetectionRun det;
  report(1, "detection exactness", [&] {
    det = detection_runs();
    return check(det.exact, "worst precision " + fmt("%.4f", det.worst_precision) + ", worst recall " +
                                fmt("%.4f", det.worst_recall) + " over 20 seeds");
  });
  report(2, "dedup conservation", [&] { return check(det.conserved, "deduplicated count equals planted count for 20 seeds"); });
  report(3, "ADF size and power", c3_adf);
  report(4, "VAR recovery", c4_var);
  report(5, "Granger size and power", c5_granger);
  report(6, "Johansen", c6_johansen);
  report(7, "Engle-Granger", c7_engle_granger);
  report(8, "IRF oracle equivalence", c8_irf);
  report(9, "feature-importance placebo discipline", c9_placebo);
  report(10, "RNN gradient check", c10_rnn);
  report(11, "event window arithmetic", c11_event);
  report(12, "study determinism", c12_determinism);
  report(13, "full dataset reproduction", c13_dataset);
  return failed ? 1 : 0;
}
