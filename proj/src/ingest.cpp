#include "goxlens/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "goxlens/csv.hpp"
#include "goxlens/error.hpp"

namespace goxlens {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::size_t require_column(const csv::Header& header, std::string_view name) {
  auto idx = header.find(name);
  if (!idx) throw SchemaError("missing mandatory column '" + std::string(name) + "'");
  return *idx;
}

std::optional<Side> parse_side(std::string_view s) {
  const std::string v = lower(s);
  if (v == "buy" || v == "bid" || v == "b") return Side::buy;
  if (v == "sell" || v == "ask" || v == "s") return Side::sell;
  if (v.empty() || v == "unknown") return Side::unknown;
  return std::nullopt;
}

std::optional<double> parse_real(std::string_view s) {
  if (s.empty()) return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(std::string(s), &used);
    if (used != s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

ParseResult<RawTradeRecord> parse_trade_log(std::istream& source, TradeSchema schema) {
  csv::Reader reader(source);
  auto header_row = reader.next();
  if (!header_row) throw SchemaError("trade log has no header row");
  const csv::Header header(*header_row);

  struct Columns {
    std::size_t user, trade, time, currency, btc, money;
    std::optional<std::size_t> side;
  } col{};
  if (schema == TradeSchema::mtgox_leak) {
    col = {require_column(header, "User_Id"), require_column(header, "Trade_Id"), require_column(header, "Date"),
           require_column(header, "Currency"), require_column(header, "Bitcoins"), require_column(header, "Money"),
           header.find("Type")};
    // Japan is part of the leak layout but carries nothing we use.
    require_column(header, "Japan");
  } else {
    col = {require_column(header, "user_id"),  require_column(header, "trade_id"), require_column(header, "timestamp"),
           require_column(header, "currency"), require_column(header, "bitcoins"), require_column(header, "money"),
           require_column(header, "side")};
  }
  std::size_t needed = std::max({col.user, col.trade, col.time, col.currency, col.btc, col.money}) + 1;
  if (schema == TradeSchema::canonical) needed = std::max(needed, *col.side + 1);

  ParseResult<RawTradeRecord> out;
  while (auto row = reader.next()) {
    const std::size_t line = reader.line();
    if (row->size() < needed) {
      out.errors.push_back(
          {line, "expected " + std::to_string(needed) + " fields, got " + std::to_string(row->size())});
      continue;
    }
    const auto& f = *row;
    RawTradeRecord rec;
    rec.user_id = f[col.user];
    rec.trade_id = f[col.trade];
    rec.currency = f[col.currency];
    if (rec.trade_id.empty()) {
      out.errors.push_back({line, "empty trade id"});
      continue;
    }
    auto ts = parse_timestamp(f[col.time]);
    if (!ts) {
      out.errors.push_back({line, "malformed timestamp '" + f[col.time] + "'"});
      continue;
    }
    rec.timestamp = *ts;
    auto btc = Btc::parse(f[col.btc]);
    if (!btc) {
      out.errors.push_back({line, "malformed bitcoins '" + f[col.btc] + "'"});
      continue;
    }
    rec.bitcoins = *btc;
    auto money = Money::parse(f[col.money]);
    if (!money) {
      out.errors.push_back({line, "malformed money '" + f[col.money] + "'"});
      continue;
    }
    rec.money = *money;
    if (col.side && *col.side < f.size()) {
      auto side = parse_side(f[*col.side]);
      if (!side) {
        out.errors.push_back({line, "unknown side '" + f[*col.side] + "'"});
        continue;
      }
      rec.side = *side;
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

bool key_less(const PairedTrade& a, const PairedTrade& b) {
  return std::tie(a.timestamp, a.buyer, a.seller, a.bitcoins, a.money) <
         std::tie(b.timestamp, b.buyer, b.seller, b.bitcoins, b.money);
}

bool key_equal(const PairedTrade& a, const PairedTrade& b) {
  return std::tie(a.timestamp, a.buyer, a.seller, a.bitcoins, a.money) ==
         std::tie(b.timestamp, b.buyer, b.seller, b.bitcoins, b.money);
}

TradeLedger pair_and_dedup(const std::vector<RawTradeRecord>& records) {
  TradeLedger ledger;
  ledger.dedup_stats.raw_rows = records.size();

  // Group halves by trade id in first-seen order.
  std::unordered_map<std::string_view, std::size_t> group_of;
  std::vector<std::vector<const RawTradeRecord*>> groups;
  group_of.reserve(records.size());
  for (const auto& r : records) {
    if (r.currency != "USD") {
      ++ledger.dedup_stats.non_usd;
      continue;
    }
    auto [it, inserted] = group_of.try_emplace(r.trade_id, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(&r);
  }

  std::vector<std::string> ambiguous;
  std::vector<PairedTrade> paired;
  paired.reserve(groups.size());
  for (const auto& g : groups) {
    if (g.size() == 1) {
      ++ledger.dedup_stats.unpaired;
      continue;
    }
    if (g.size() > 2) {
      ambiguous.push_back(g.front()->trade_id);
      continue;
    }
    const RawTradeRecord* buy = g[0];
    const RawTradeRecord* sell = g[1];
    if (g[0]->side == Side::sell && g[1]->side != Side::sell) std::swap(buy, sell);
    else if (g[1]->side == Side::buy && g[0]->side != Side::buy) std::swap(buy, sell);
    paired.push_back({buy->trade_id, buy->user_id, sell->user_id, buy->bitcoins, buy->money, buy->timestamp});
  }
  if (!ambiguous.empty()) {
    std::string msg = "trade ids with three or more halves:";
    for (std::size_t i = 0; i < std::min<std::size_t>(ambiguous.size(), 20); ++i) msg += " " + ambiguous[i];
    if (ambiguous.size() > 20) msg += " ... (" + std::to_string(ambiguous.size()) + " total)";
    throw AmbiguousTradeError(msg, std::move(ambiguous));
  }
  ledger.dedup_stats.paired = paired.size();

  std::sort(paired.begin(), paired.end(), [](const PairedTrade& a, const PairedTrade& b) {
    if (key_less(a, b)) return true;
    if (key_less(b, a)) return false;
    return a.trade_id < b.trade_id;
  });
  auto last = std::unique(paired.begin(), paired.end(), key_equal);
  paired.erase(last, paired.end());
  ledger.dedup_stats.deduplicated = paired.size();
  ledger.trades = std::move(paired);
  return ledger;
}

void write_canonical_log(std::ostream& out, const TradeLedger& ledger) {
  csv::write_row(out, {"user_id", "trade_id", "timestamp", "currency", "bitcoins", "money", "side"});
  for (const auto& t : ledger.trades) {
    const std::string ts = format_timestamp(t.timestamp);
    const std::string btc = t.bitcoins.to_string();
    const std::string money = t.money.to_string();
    csv::write_row(out, {t.buyer, t.trade_id, ts, "USD", btc, money, "buy"});
    csv::write_row(out, {t.seller, t.trade_id, ts, "USD", btc, money, "sell"});
  }
}

const std::vector<double>& AuxSeries::column(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return values[i];
  throw std::out_of_range("aux series has no column '" + std::string(name) + "'");
}

std::string to_string(AuxKind kind) {
  switch (kind) {
    case AuxKind::onchain: return "onchain";
    case AuxKind::market_daily: return "market_daily";
    case AuxKind::supply: return "supply";
    case AuxKind::trends: return "trends";
    case AuxKind::asset_bar: return "asset_bar";
  }
  return "?";
}

std::optional<AuxKind> aux_kind_from_string(std::string_view s) {
  for (AuxKind k : {AuxKind::onchain, AuxKind::market_daily, AuxKind::supply, AuxKind::trends, AuxKind::asset_bar})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

namespace {

struct AuxRow {
  Timestamp t;
  std::vector<double> v;
  std::size_t line;
};

}  // namespace

AuxParseResult parse_aux(std::istream& source, AuxKind kind) {
  csv::Reader reader(source);
  auto header_row = reader.next();
  if (!header_row) throw SchemaError(to_string(kind) + " file has no header row");
  const csv::Header header(*header_row);

  AuxParseResult out;
  out.series.kind = kind;
  std::vector<AuxRow> rows;

  auto fail = [&](std::size_t line, std::string msg) { out.errors.push_back({line, std::move(msg)}); };

  switch (kind) {
    case AuxKind::onchain: {
      const auto ti = require_column(header, "timestamp");
      const auto ty = require_column(header, "type");
      const auto am = require_column(header, "amount");
      require_column(header, "transaction_id");
      require_column(header, "address");
      out.series.columns = {"input", "output"};
      while (auto row = reader.next()) {
        const auto& f = *row;
        if (f.size() <= std::max({ti, ty, am})) { fail(reader.line(), "short row"); continue; }
        auto t = parse_timestamp(f[ti]);
        if (!t) { fail(reader.line(), "malformed timestamp '" + f[ti] + "'"); continue; }
        auto a = Btc::parse(f[am]);
        if (!a) { fail(reader.line(), "malformed amount '" + f[am] + "'"); continue; }
        const std::string dir = lower(f[ty]);
        if (dir == "input") rows.push_back({*t, {a->to_double(), 0.0}, reader.line()});
        else if (dir == "output") rows.push_back({*t, {0.0, a->to_double()}, reader.line()});
        else fail(reader.line(), "unknown direction '" + f[ty] + "'");
      }
      break;
    }
    case AuxKind::market_daily:
    case AuxKind::supply:
    case AuxKind::trends: {
      const char* tname = kind == AuxKind::trends ? "week_start" : "date";
      const char* vname = kind == AuxKind::market_daily ? "volume_btc"
                          : kind == AuxKind::supply     ? "circulating_supply"
                                                        : "score";
      const auto ti = require_column(header, tname);
      const auto vi = require_column(header, vname);
      out.series.columns = {vname};
      while (auto row = reader.next()) {
        const auto& f = *row;
        if (f.size() <= std::max(ti, vi)) { fail(reader.line(), "short row"); continue; }
        auto t = parse_date_or_timestamp(f[ti]);
        if (!t) { fail(reader.line(), "malformed date '" + f[ti] + "'"); continue; }
        auto v = parse_real(f[vi]);
        if (!v || *v < 0) { fail(reader.line(), "malformed value '" + f[vi] + "'"); continue; }
        rows.push_back({*t, {*v}, reader.line()});
      }
      break;
    }
    case AuxKind::asset_bar: {
      const auto ti = require_column(header, "timestamp");
      const auto ci = require_column(header, "close");
      const auto ki = require_column(header, "tick");
      const auto vi = require_column(header, "volume");
      out.series.columns = {"close", "tick_or_volume"};
      while (auto row = reader.next()) {
        const auto& f = *row;
        if (f.size() <= std::max({ti, ci, ki, vi})) { fail(reader.line(), "short row"); continue; }
        auto t = parse_timestamp(f[ti]);
        if (!t) { fail(reader.line(), "malformed timestamp '" + f[ti] + "'"); continue; }
        auto c = parse_real(f[ci]);
        if (!c || *c < 0) { fail(reader.line(), "malformed close '" + f[ci] + "'"); continue; }
        std::optional<double> activity = f[ki].empty() ? parse_real(f[vi]) : parse_real(f[ki]);
        if (f[ki].empty() && f[vi].empty()) activity = 0.0;
        if (!activity || *activity < 0) { fail(reader.line(), "malformed tick/volume"); continue; }
        rows.push_back({*t, {*c, *activity}, reader.line()});
      }
      break;
    }
  }

  const bool strict = kind == AuxKind::supply || kind == AuxKind::trends;
  if (strict) {
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (rows[i].t <= rows[i - 1].t)
        throw DataError(to_string(kind) + " timestamps not strictly increasing at line " +
                        std::to_string(rows[i].line));
  } else {
    std::stable_sort(rows.begin(), rows.end(), [](const AuxRow& a, const AuxRow& b) { return a.t < b.t; });
  }

  const std::size_t ncol = out.series.columns.size();
  out.series.values.assign(ncol, {});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!out.series.times.empty() && out.series.times.back() == rows[i].t) {
      if (kind == AuxKind::onchain) {
        for (std::size_t c = 0; c < ncol; ++c) out.series.values[c].back() += rows[i].v[c];
      } else {
        out.warnings.push_back("duplicate timestamp " + format_timestamp(rows[i].t) + " at line " +
                               std::to_string(rows[i].line) + "; later row wins");
        for (std::size_t c = 0; c < ncol; ++c) out.series.values[c].back() = rows[i].v[c];
      }
      continue;
    }
    out.series.times.push_back(rows[i].t);
    for (std::size_t c = 0; c < ncol; ++c) out.series.values[c].push_back(rows[i].v[c]);
  }
  return out;
}

}  // namespace goxlens
