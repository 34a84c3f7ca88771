#include <algorithm>
#include <set>
#include <string>

#include "doctest.h"
#include "goxlens/detect.hpp"
#include "goxlens/synth.hpp"

using namespace goxlens;

namespace {

PairedTrade trade(std::string buyer, std::string seller, Timestamp t, std::string id = "1") {
  return {std::move(id), std::move(buyer), std::move(seller), Btc::from_raw(100000000), Money::from_raw(500000), t};
}

}  // namespace

TEST_CASE("self-match is a wash trade") {
  CHECK(is_wash(trade("42", "42", 0)));
  CHECK_FALSE(is_wash(trade("42", "43", 0)));
}

TEST_CASE("default window spans the leaked period") {
  const TimeWindow w = default_wash_window();
  CHECK(format_timestamp(w.start) == "2011-06-26 00:00:00");
  CHECK(format_timestamp(w.end) == "2013-05-20 23:59:59");
}

TEST_CASE("trades outside the window are excluded and the rest partitioned") {
  const TimeWindow w{1000, 2000};
  TradeLedger ledger;
  ledger.trades = {trade("a", "a", 999, "1"), trade("a", "a", 1000, "2"), trade("a", "b", 1500, "3"),
                   trade("c", "c", 2000, "4"), trade("c", "d", 2001, "5")};
  const auto f = flag_wash(ledger, w);
  REQUIRE(f.trades.size() == 3);
  CHECK(f.wash_count == 2);
  CHECK(f.nonwash_count == 1);
  CHECK(f.wash_count + f.nonwash_count == f.trades.size());
  CHECK(f.trades[0].trade.trade_id == "2");
  CHECK(f.trades[2].trade.trade_id == "4");
  CHECK(f.window == w);
}

TEST_CASE("empty ledger yields an empty result") {
  const auto f = flag_wash(TradeLedger{}, default_wash_window());
  CHECK(f.trades.empty());
  CHECK(f.wash_count == 0);
}

TEST_CASE("permuting the ledger permutes the flags") {
  TradeLedger ledger;
  for (int i = 0; i < 50; ++i)
    ledger.trades.push_back(trade("u" + std::to_string(i % 3), "u" + std::to_string(i % 5), 100 + i, std::to_string(i)));
  const auto a = flag_wash(ledger, {0, 1000});
  std::reverse(ledger.trades.begin(), ledger.trades.end());
  const auto b = flag_wash(ledger, {0, 1000});
  REQUIRE(a.trades.size() == b.trades.size());
  for (std::size_t i = 0; i < a.trades.size(); ++i) {
    const auto& x = a.trades[i];
    const auto& y = b.trades[b.trades.size() - 1 - i];
    CHECK(x.trade.trade_id == y.trade.trade_id);
    CHECK(x.wash == y.wash);
  }
}

TEST_CASE("planted self-trades are recovered exactly") {
  synth::SynthSpec spec;
  spec.seed = 300;
  spec.n_trades = 10000;
  spec.wash_rate = 0.03;
  const auto log = synth::gen_exchange_log(spec);
  const auto f = flag_wash(pair_and_dedup(log.records), spec.window());
  std::set<std::string> flagged;
  for (const auto& t : f.trades)
    if (t.wash) flagged.insert(t.trade.trade_id);
  CHECK(flagged == log.planted_wash_ids);
  CHECK(f.wash_count == log.planted_wash_ids.size());
  CHECK(f.wash_count + f.nonwash_count == 10000);
}

TEST_CASE("flagged CSV has one row per trade") {
  TradeLedger ledger;
  ledger.trades = {trade("a", "a", 10, "1"), trade("a", "b", 20, "2")};
  std::ostringstream out;
  write_flagged_csv(out, flag_wash(ledger, {0, 100}));
  const std::string s = out.str();
  CHECK(std::count(s.begin(), s.end(), '\n') == 3);
  CHECK(s.find("wash") != std::string::npos);
}
