#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string_view>
#include <ostream>
#include <string>
#include <vector>

#include "goxlens/fixed_point.hpp"
#include "goxlens/time.hpp"

namespace goxlens {

enum class Side { buy, sell, unknown };

enum class TradeSchema { mtgox_leak, canonical };

/// One half of an exchange trade as it appears in the log.
struct RawTradeRecord {
  std::string user_id;
  std::string trade_id;
  Timestamp timestamp = 0;
  std::string currency;
  Btc bitcoins;
  Money money;
  Side side = Side::unknown;

  friend bool operator==(const RawTradeRecord&, const RawTradeRecord&) = default;
};

struct RowError {
  std::size_t line;
  std::string message;
};

template <typename Record>
struct ParseResult {
  std::vector<Record> records;
  std::vector<RowError> errors;

  std::size_t skipped() const { return errors.size(); }
};

/// Reads a trade log. A missing mandatory column throws SchemaError; bad
/// rows are collected and parsing continues.
ParseResult<RawTradeRecord> parse_trade_log(std::istream& source, TradeSchema schema);

struct PairedTrade {
  std::string trade_id;
  std::string buyer;
  std::string seller;
  Btc bitcoins;
  Money money;
  Timestamp timestamp = 0;

  bool priced() const { return bitcoins.raw() > 0 && money.raw() > 0; }
  /// money / bitcoins; only meaningful when priced().
  double price() const { return money.to_double() / bitcoins.to_double(); }

  friend bool operator==(const PairedTrade&, const PairedTrade&) = default;
};

/// Ordering on (timestamp, buyer, seller, bitcoins, money), which is also the
/// de-duplication key.
bool key_less(const PairedTrade& a, const PairedTrade& b);
bool key_equal(const PairedTrade& a, const PairedTrade& b);

struct DedupStats {
  std::size_t raw_rows = 0;
  std::size_t non_usd = 0;
  std::size_t unpaired = 0;
  std::size_t paired = 0;
  std::size_t deduplicated = 0;

  friend bool operator==(const DedupStats&, const DedupStats&) = default;
};

struct TradeLedger {
  std::vector<PairedTrade> trades;
  DedupStats dedup_stats;
};

/// Joins the two halves of each trade_id and removes exact-key duplicates.
/// Three or more halves under one trade_id throw AmbiguousTradeError.
TradeLedger pair_and_dedup(const std::vector<RawTradeRecord>& records);

/// Writes the ledger back as a canonical log (buy half then sell half per
/// trade), so that parse_trade_log + pair_and_dedup reproduces it.
void write_canonical_log(std::ostream& out, const TradeLedger& ledger);

enum class AuxKind { onchain, market_daily, supply, trends, asset_bar };

/// Column-oriented auxiliary series with strictly increasing timestamps.
///   onchain:      input, output            (BTC summed per timestamp)
///   market_daily: volume_btc
///   supply:       circulating_supply
///   trends:       score
///   asset_bar:    close, tick_or_volume
struct AuxSeries {
  AuxKind kind;
  std::vector<Timestamp> times;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> values;  // values[column][point]

  std::size_t size() const { return times.size(); }
  /// Throws std::out_of_range for an unknown column.
  const std::vector<double>& column(std::string_view name) const;
};

struct AuxParseResult {
  AuxSeries series;
  std::vector<RowError> errors;
  std::vector<std::string> warnings;
};

AuxParseResult parse_aux(std::istream& source, AuxKind kind);

std::string to_string(AuxKind kind);
std::optional<AuxKind> aux_kind_from_string(std::string_view s);

}  // namespace goxlens
