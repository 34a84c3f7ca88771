#include "goxlens/detect.hpp"

#include "goxlens/csv.hpp"

namespace goxlens {

FlaggedLedger flag_wash(const TradeLedger& ledger, TimeWindow window) {
  FlaggedLedger out;
  out.window = window;
  for (const auto& t : ledger.trades) {
    if (!window.contains(t.timestamp)) continue;
    const bool wash = is_wash(t);
    out.trades.push_back({t, wash});
    ++(wash ? out.wash_count : out.nonwash_count);
  }
  return out;
}

void write_flagged_csv(std::ostream& out, const FlaggedLedger& flagged) {
  csv::write_row(out, {"trade_id", "timestamp", "buyer", "seller", "bitcoins", "money", "price", "wash"});
  for (const auto& f : flagged.trades) {
    const auto& t = f.trade;
    csv::write_row(out, {t.trade_id, format_timestamp(t.timestamp), t.buyer, t.seller, t.bitcoins.to_string(),
                         t.money.to_string(), t.priced() ? csv::format_double(t.price()) : std::string(),
                         f.wash ? "1" : "0"});
  }
}

}  // namespace goxlens
