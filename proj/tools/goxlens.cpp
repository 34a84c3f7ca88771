// goxlens command-line interface: ingest, detect, bars, analyze, ml, synth.

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "goxlens/csv.hpp"
#include "goxlens/detect.hpp"
#include "goxlens/error.hpp"
#include "goxlens/features.hpp"
#include "goxlens/ingest.hpp"
#include "goxlens/ml.hpp"
#include "goxlens/report.hpp"
#include "goxlens/studies.hpp"
#include "goxlens/synth.hpp"

namespace fs = std::filesystem;
using namespace goxlens;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string out;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  std::string window;
};

void add_common(CLI::App* sub, Common& c, bool need_out = true) {
  auto* o = sub->add_option("--out", c.out, "output directory");
  if (need_out) o->required();
  sub->add_option("--seed", c.seed, "random seed");
  sub->add_option("--threads", c.threads, "worker threads (default: logical cores)");
  sub->add_option("--window", c.window, "analysis window START..END (UTC)");
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  return in;
}

TradeSchema detect_schema(const std::string& path, const std::string& requested) {
  if (requested == "mtgox") return TradeSchema::mtgox_leak;
  if (requested == "canonical") return TradeSchema::canonical;
  std::ifstream in = open_input(path);
  std::string head;
  std::getline(in, head);
  return head.find("Japan") != std::string::npos || head.find("User_Id") != std::string::npos ? TradeSchema::mtgox_leak
                                                                                            : TradeSchema::canonical;
}

TimeWindow window_or(const std::string& text, TimeWindow fallback) {
  if (text.empty()) return fallback;
  const auto w = parse_window(text);
  if (!w || w->empty()) throw UsageError("--window must be START..END with START <= END, got '" + text + "'");
  return *w;
}

std::vector<int> parse_lags(const std::string& text) {
  std::vector<int> lags;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    int v = 0;
    const auto r = std::from_chars(item.data(), item.data() + item.size(), v);
    if (r.ec != std::errc() || r.ptr != item.data() + item.size() || v < 1)
      throw UsageError("--lags must be a comma-separated list of positive integers, got '" + text + "'");
    lags.push_back(v);
  }
  if (lags.empty()) throw UsageError("--lags is empty");
  return lags;
}

void report_row_errors(const std::string& what, const std::vector<RowError>& errors) {
  if (errors.empty()) return;
  std::cerr << what << ": skipped " << errors.size() << " malformed rows";
  std::cerr << " (first at line " << errors.front().line << ": " << errors.front().message << ")";
  std::cerr << '\n';
}

TradeLedger load_ledger(const std::string& path, const std::string& schema_name, std::size_t* row_errors = nullptr,
                        std::vector<RowError>* errors_out = nullptr) {
  const TradeSchema schema = detect_schema(path, schema_name);
  std::ifstream in = open_input(path);
  auto parsed = parse_trade_log(in, schema);
  report_row_errors(path, parsed.errors);
  if (row_errors) *row_errors = parsed.errors.size();
  if (errors_out) *errors_out = parsed.errors;
  return pair_and_dedup(parsed.records);
}

nlohmann::ordered_json dedup_json(const DedupStats& s) {
  return {{"raw_rows", s.raw_rows},   {"non_usd", s.non_usd},           {"unpaired", s.unpaired},
          {"paired", s.paired},       {"deduplicated", s.deduplicated}};
}

std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

BarSeries load_bars(const std::string& path, const std::string& window) {
  std::ifstream in = open_input(path);
  BarSeries bars = read_bars_csv(in, fs::path(path).stem().string());
  if (!window.empty()) {
    const TimeWindow w = window_or(window, {});
    bars = bars.slice(w.start, w.end + 1);
  }
  if (bars.empty()) throw DataError("no bars in '" + path + "'" + (window.empty() ? "" : " inside the window"));
  return bars;
}

struct AuxSpec {
  AuxKind kind;
  std::string name;
  std::string path;
};

AuxSpec parse_aux_flag(const std::string& flag) {
  const auto eq = flag.find('=');
  if (eq == std::string::npos) throw UsageError("--aux must be kind[:name]=path, got '" + flag + "'");
  std::string key = flag.substr(0, eq);
  std::string name;
  if (const auto colon = key.find(':'); colon != std::string::npos) {
    name = key.substr(colon + 1);
    key = key.substr(0, colon);
  }
  if (key == "asset") key = "asset_bar";
  const auto kind = aux_kind_from_string(key);
  if (!kind) throw UsageError("unknown aux kind '" + key + "'");
  if (*kind == AuxKind::asset_bar && name.empty()) name = fs::path(flag.substr(eq + 1)).stem().string();
  return {*kind, name, flag.substr(eq + 1)};
}

AuxSeries load_aux(const AuxSpec& a) {
  std::ifstream in = open_input(a.path);
  auto r = parse_aux(in, a.kind);
  report_row_errors(a.path, r.errors);
  for (const auto& w : r.warnings) std::cerr << a.path << ": " << w << '\n';
  return std::move(r.series);
}

const AuxSpec& require_aux(const std::vector<AuxSpec>& aux, AuxKind kind, const std::string& study) {
  for (const auto& a : aux)
    if (a.kind == kind) return a;
  throw UsageError("analyze " + study + " needs --aux " + to_string(kind) + "=PATH");
}

std::uint64_t require_seed(const Common& c, const std::string& what) {
  if (!c.seed) throw UsageError(what + " requires --seed");
  return *c.seed;
}

struct MlFlags {
  std::string lags;
  int trees = 100;
  int rounds = 100;
  int epochs = 20;
  int hidden = 16;
  bool no_recurrent = false;
};

void add_ml_flags(CLI::App* sub, MlFlags& f) {
  sub->add_option("--lags", f.lags, "comma-separated lag set (default 1,2,3,4,24)");
  sub->add_option("--trees", f.trees, "random forest size")->check(CLI::PositiveNumber);
  sub->add_option("--rounds", f.rounds, "boosting rounds")->check(CLI::PositiveNumber);
  sub->add_option("--epochs", f.epochs, "recurrent model epochs")->check(CLI::NonNegativeNumber);
  sub->add_option("--hidden", f.hidden, "recurrent hidden size")->check(CLI::PositiveNumber);
  sub->add_flag("--no-recurrent", f.no_recurrent, "skip the GRU and LSTM families");
}

studies::ImportanceConfig importance_config(const MlFlags& f, std::uint64_t seed) {
  studies::ImportanceConfig c;
  if (!f.lags.empty()) c.lags = parse_lags(f.lags);
  c.seed = seed;
  c.n_trees = f.trees;
  c.n_rounds = f.rounds;
  c.rnn.epochs = f.epochs;
  c.rnn.hidden = f.hidden;
  c.recurrent = !f.no_recurrent;
  return c;
}

int run(int argc, char** argv) {
  CLI::App app{"goxlens: wash-trade forensics on exchange trade logs"};
  app.require_subcommand(1);

  Common ingest_c, detect_c, bars_c, analyze_c, ml_c, synth_c;
  std::string trades, schema = "auto", supply, bars_path, spec_path, study;
  std::vector<std::string> aux_flags;
  bool force = false;
  std::string event, activity = "tick";
  int pre_days = 14, post_days = 14;
  MlFlags analyze_ml, ml_flags;

  auto* ingest = app.add_subcommand("ingest", "parse, pair and de-duplicate a trade log");
  ingest->add_option("--trades", trades, "trade log CSV")->required();
  ingest->add_option("--schema", schema, "mtgox, canonical or auto")->check(CLI::IsMember({"auto", "mtgox", "canonical"}));
  add_common(ingest, ingest_c);

  auto* detect = app.add_subcommand("detect", "flag self-matched trades");
  detect->add_option("--trades", trades, "trade log CSV")->required();
  detect->add_option("--schema", schema, "mtgox, canonical or auto")->check(CLI::IsMember({"auto", "mtgox", "canonical"}));
  detect->add_option("--supply", supply, "circulating supply CSV for the market-cap share");
  add_common(detect, detect_c);

  auto* bars = app.add_subcommand("bars", "build 30-minute bars");
  bars->add_option("--trades", trades, "trade log CSV")->required();
  bars->add_option("--schema", schema, "mtgox, canonical or auto")->check(CLI::IsMember({"auto", "mtgox", "canonical"}));
  add_common(bars, bars_c);

  auto* analyze = app.add_subcommand("analyze", "run a study on bars");
  analyze->add_option("study", study, "timing, onchain, market, cross-asset, media or event")
      ->required()
      ->check(CLI::IsMember({"timing", "onchain", "market", "cross-asset", "media", "event"}));
  analyze->add_option("--bars", bars_path, "bars CSV")->required();
  analyze->add_option("--aux", aux_flags, "auxiliary input kind[:name]=path (repeatable)");
  analyze->add_flag("--force", force, "continue past the stationarity gate");
  analyze->add_option("--event", event, "event timestamp (default 2012-04-20 00:00:00)");
  analyze->add_option("--pre-days", pre_days, "days before the event")->check(CLI::PositiveNumber);
  analyze->add_option("--post-days", post_days, "days after the event")->check(CLI::PositiveNumber);
  analyze->add_option("--activity", activity, "asset activity column label")->check(CLI::IsMember({"tick", "volume"}));
  add_ml_flags(analyze, analyze_ml);
  add_common(analyze, analyze_c);

  auto* ml = app.add_subcommand("ml", "feature importance across model families");
  ml->add_option("--bars", bars_path, "bars CSV")->required();
  add_ml_flags(ml, ml_flags);
  add_common(ml, ml_c);

  auto* synth = app.add_subcommand("synth", "generate labelled synthetic inputs");
  synth->add_option("--spec", spec_path, "generator spec JSON")->required();
  add_common(synth, synth_c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  for (const Common* c : {&ingest_c, &detect_c, &bars_c, &analyze_c, &ml_c, &synth_c})
    if (c->threads > 0) ml::thread_limit() = c->threads;

  if (ingest->parsed()) {
    std::size_t bad = 0;
    std::vector<RowError> errors;
    const TradeLedger ledger = load_ledger(trades, schema, &bad, &errors);
    std::ostringstream csv_out;
    write_canonical_log(csv_out, ledger);
    const fs::path out = ingest_c.out;
    atomic_write(out / "ledger.csv", csv_out.str());
    nlohmann::ordered_json j;
    j["input"] = fs::path(trades).filename().string();
    j["schema"] = detect_schema(trades, schema) == TradeSchema::mtgox_leak ? "mtgox" : "canonical";
    j["row_errors"] = bad;
    j["dedup"] = dedup_json(ledger.dedup_stats);
    j["errors"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < std::min<std::size_t>(errors.size(), 20); ++i)
      j["errors"].push_back({{"line", errors[i].line}, {"message", errors[i].message}});
    atomic_write(out / "ingest.json", dump(j));
    return 0;
  }

  if (detect->parsed() || bars->parsed()) {
    const Common& c = detect->parsed() ? detect_c : bars_c;
    const TimeWindow w = window_or(c.window, default_wash_window());
    const TradeLedger ledger = load_ledger(trades, schema);
    const FlaggedLedger flagged = flag_wash(ledger, w);
    const fs::path out = c.out;
    if (detect->parsed()) {
      std::ostringstream csv_out;
      write_flagged_csv(csv_out, flagged);
      atomic_write(out / "flagged.csv", csv_out.str());
      nlohmann::ordered_json j;
      j["window"] = format_timestamp(w.start) + ".." + format_timestamp(w.end);
      j["trades"] = flagged.trades.size();
      j["wash_count"] = flagged.wash_count;
      j["nonwash_count"] = flagged.nonwash_count;
      j["dedup"] = dedup_json(ledger.dedup_stats);
      if (!supply.empty()) {
        const AuxSeries s = load_aux({AuxKind::supply, "", supply});
        const auto share = marketcap_share(flagged, interpolate_supply(s));
        for (const auto& warn : share.warnings) std::cerr << warn << '\n';
        j["marketcap_share"] = {{"mean_percent", json_number(share.mean_percent)},
                                {"wash_trades", share.wash_trades},
                                {"clamped", share.clamped}};
      }
      atomic_write(out / "summary.json", dump(j));
    } else {
      const BarSeries b = build_bars(flagged);
      std::ostringstream csv_out;
      write_bars_csv(csv_out, b);
      atomic_write(out / "bars.csv", csv_out.str());
    }
    return 0;
  }

  if (analyze->parsed()) {
    const BarSeries b = load_bars(bars_path, analyze_c.window);
    std::vector<AuxSpec> aux;
    for (const auto& f : aux_flags) aux.push_back(parse_aux_flag(f));
    StudyReport report;
    if (study == "timing") {
      studies::TimingConfig cfg;
      cfg.importance = importance_config(analyze_ml, require_seed(analyze_c, "analyze timing"));
      cfg.force = force;
      report = studies::study_timing(b, cfg);
    } else if (study == "onchain") {
      const AuxSeries s = load_aux(require_aux(aux, AuxKind::onchain, study));
      report = studies::study_onchain(b, aggregate_to_grid(s, "output", b), daily_quartiles(b));
    } else if (study == "market") {
      const AuxSeries s = load_aux(require_aux(aux, AuxKind::market_daily, study));
      report = studies::study_market(b, s, daily_quartiles(b));
    } else if (study == "cross-asset") {
      std::vector<AssetBarSeries> assets;
      for (const auto& a : aux)
        if (a.kind == AuxKind::asset_bar) assets.push_back(build_asset_bars(load_aux(a), b, a.name, activity));
      if (assets.empty()) throw UsageError("analyze cross-asset needs at least one --aux asset:NAME=PATH");
      report = studies::study_cross_asset(b, assets);
    } else if (study == "media") {
      const AuxSeries s = load_aux(require_aux(aux, AuxKind::trends, study));
      report = studies::study_media(b, s);
    } else {
      studies::EventConfig cfg;
      if (!event.empty()) {
        const auto t = parse_date_or_timestamp(event);
        if (!t) throw UsageError("--event must be a date or timestamp, got '" + event + "'");
        cfg.event = *t;
      }
      cfg.pre_days = pre_days;
      cfg.post_days = post_days;
      report = studies::study_event(b, cfg);
    }
    write_report(analyze_c.out, report);
    return 0;
  }

  if (ml->parsed()) {
    const auto cfg = importance_config(ml_flags, require_seed(ml_c, "ml"));
    const BarSeries b = load_bars(bars_path, ml_c.window);
    const auto rep = studies::timing_importance(b, cfg);
    nlohmann::ordered_json j = studies::importance_json(rep);
    j["parameters"] = {{"lags", cfg.lags}, {"seed", cfg.seed}, {"n_trees", cfg.n_trees}, {"n_rounds", cfg.n_rounds},
                       {"max_depth", cfg.max_depth}, {"epochs", cfg.rnn.epochs}, {"hidden", cfg.rnn.hidden}};
    const fs::path out = ml_c.out;
    atomic_write(out / "importance.json", dump(j));
    atomic_write(out / "importance.csv", table_csv(studies::importance_rank_table(rep)));
    return 0;
  }

  if (synth->parsed()) {
    const std::uint64_t seed = require_seed(synth_c, "synth");
    std::ifstream in = open_input(spec_path);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw DataError("spec '" + spec_path + "': " + e.what());
    }
    synth::SynthSpec spec = synth::spec_from_json(j);
    spec.seed = seed;
    const fs::path out = synth_c.out;
    const auto log = synth::gen_exchange_log(spec);
    std::ostringstream trades_out;
    synth::write_exchange_log(trades_out, log);
    atomic_write(out / "trades.csv", trades_out.str());
    atomic_write(out / "truth.json", dump(synth::truth_json(spec, log)));

    const FlaggedLedger flagged = flag_wash(pair_and_dedup(log.records), spec.window());
    const BarSeries b = build_bars(flagged, "synthetic");
    auto write = [&](const std::string& name, auto&& fn) {
      std::ostringstream s;
      fn(s);
      atomic_write(out / name, s.str());
    };
    write("onchain.csv", [&](std::ostream& s) { synth::write_onchain_csv(s, spec, b); });
    write("market_daily.csv", [&](std::ostream& s) { synth::write_market_daily_csv(s, spec, b); });
    write("supply.csv", [&](std::ostream& s) { synth::write_supply_csv(s, spec); });
    write("trends.csv", [&](std::ostream& s) { synth::write_trends_csv(s, spec); });
    for (const auto& a : spec.aux.assets)
      write("asset_" + a + ".csv", [&](std::ostream& s) { synth::write_asset_csv(s, spec, a); });
    if (spec.var) {
      const MatXd Y = synth::gen_var_process(spec.var->c, spec.var->A, spec.var->sigma, spec.var->T, seed);
      write("var.csv", [&](std::ostream& s) {
        std::vector<std::string> head{"t"};
        for (Eigen::Index k = 0; k < Y.cols(); ++k) head.push_back("y" + std::to_string(k + 1));
        csv::write_row(s, head);
        for (Eigen::Index t = 0; t < Y.rows(); ++t) {
          std::vector<std::string> row{std::to_string(t)};
          for (Eigen::Index k = 0; k < Y.cols(); ++k) row.push_back(csv::format_double(Y(t, k)));
          csv::write_row(s, row);
        }
      });
    }
    if (spec.cointegration) {
      const auto pair = synth::gen_cointegrated_pair(spec.cointegration->T, spec.cointegration->noise_scale, seed,
                                                     spec.cointegration->beta);
      write("cointegrated.csv", [&](std::ostream& s) {
        csv::write_row(s, {"t", "x", "y"});
        for (Eigen::Index t = 0; t < pair.x.size(); ++t)
          csv::write_row(s, {std::to_string(t), csv::format_double(pair.x(t)), csv::format_double(pair.y(t))});
      });
    }
    return 0;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const studies::StationarityAbort& e) {
    std::cerr << "analysis aborted: " << e.what() << '\n';
    for (const auto& a : e.series)
      std::cerr << "  " << a.series << ": ADF " << csv::format_double(a.statistic) << ", p " << csv::format_double(a.p_value)
                << ", lag " << a.lag << ", " << (a.stationary ? "stationary" : "unit root not rejected") << '\n';
    std::cerr << "rerun with --force to continue\n";
    return 3;
  } catch (const AnalysisError& e) {
    std::cerr << "analysis error: " << e.what() << '\n';
    return 3;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
