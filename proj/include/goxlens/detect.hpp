#pragma once

#include <cstddef>
#include <ostream>
#include <vector>

#include "goxlens/ingest.hpp"
#include "goxlens/time.hpp"

namespace goxlens {

struct FlaggedTrade {
  PairedTrade trade;
  bool wash = false;
};

struct FlaggedLedger {
  std::vector<FlaggedTrade> trades;
  TimeWindow window;
  std::size_t wash_count = 0;
  std::size_t nonwash_count = 0;
};

/// A trade is a wash trade iff its buyer and seller are the same account.
inline bool is_wash(const PairedTrade& t) { return t.buyer == t.seller; }

/// Keeps trades inside `window` (inclusive) and flags self-matches.
FlaggedLedger flag_wash(const TradeLedger& ledger, TimeWindow window = default_wash_window());

void write_flagged_csv(std::ostream& out, const FlaggedLedger& flagged);

}  // namespace goxlens
