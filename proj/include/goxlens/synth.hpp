#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "goxlens/features.hpp"
#include "goxlens/ingest.hpp"
#include "goxlens/time.hpp"
#include "goxlens/types.hpp"
#include "json.hpp"

namespace goxlens::synth {

struct SurgeWindow {
  TimeWindow window;
  double wash_rate = 0;
};

struct VarTruth {
  VecXd c;
  std::vector<MatXd> A;
  MatXd sigma;
  Eigen::Index T = 1000;
};

struct CointegrationConfig {
  Eigen::Index T = 1000;
  double beta = 1.0;
  double noise_scale = 1.0;
};

struct AuxConfig {
  double onchain_beta = 2.0;          ///< onchain output = beta * nonwash + noise
  double onchain_noise = 1.0;
  double market_multiple = 0.2;       ///< daily market volume = multiple * daily total + noise
  double supply_start = 6.5e6;
  double supply_per_day = 7200;
  std::vector<std::string> assets;    ///< one minute-bar file per name
};

struct SynthSpec {
  std::uint64_t seed = 1;
  Day start_date = 0;  ///< defaults to 2011-06-26
  int n_days = 14;
  int n_traders = 100;
  std::size_t n_trades = 10000;
  double wash_rate = 0.03;
  std::vector<SurgeWindow> surges;
  double duplicate_rate = 0.0;
  double non_usd_rate = 0.0;
  double start_price = 15.0;
  double daily_vol = 0.03;
  double size_log_mean = 0.0;
  double size_log_sd = 1.0;
  std::optional<VarTruth> var;
  std::optional<CointegrationConfig> cointegration;
  std::vector<int> trend_weeks;  ///< week indices given a linear ramp by gen_bar_series
  AuxConfig aux;

  SynthSpec();
  TimeWindow window() const;
};

/// Missing keys keep their defaults; unknown keys throw DataError.
SynthSpec spec_from_json(const nlohmann::json& j);
nlohmann::ordered_json spec_to_json(const SynthSpec& spec);

struct ExchangeLog {
  std::vector<RawTradeRecord> records;  ///< both halves of every row, duplicates included
  std::set<std::string> planted_wash_ids;
  std::size_t n_trades = 0;      ///< distinct USD trades before duplicate injection
  std::size_t n_duplicates = 0;
  std::size_t n_non_usd = 0;
  std::vector<PairedTrade> trades;  ///< the distinct USD trades, in time order
};

/// Poisson arrivals over the configured window; each trade is a self-trade with the
/// rate in force at its time. Duplicates copy an earlier trade's key under a
/// later trade id.
ExchangeLog gen_exchange_log(const SynthSpec& spec);
void write_exchange_log(std::ostream& out, const ExchangeLog& log);
nlohmann::ordered_json truth_json(const SynthSpec& spec, const ExchangeLog& log);

/// y_t = c + sum_i A_i y_{t-i} + L e_t with L L' = sigma; 500 burn-in steps
/// are discarded. Throws UnstableModelError when the companion matrix has
/// spectral radius >= 1.
MatXd gen_var_process(const VecXd& c, const std::vector<MatXd>& A, const MatXd& sigma, Eigen::Index T,
                      std::uint64_t seed);

struct CointegratedPair {
  VecXd x;
  VecXd y;
  double beta = 0;
};

/// x is a Gaussian random walk; y = beta x + noise_scale * AR(1, 0.5) noise.
CointegratedPair gen_cointegrated_pair(Eigen::Index T, double noise_scale, std::uint64_t seed, double beta = 1.0);

/// Bar series driven by a VAR over (wash, nonwash, liq, vol) around the given
/// levels, floored at zero; total = wash + nonwash. Weeks in `trend_weeks`
/// (indices of whole weeks from the start) get a linear ramp of `trend_size`
/// added to wash and nonwash.
struct BarProcess {
  VarTruth var;
  Eigen::Vector4d level{50.0, 100.0, 1e-4, 1e-3};
  std::vector<int> trend_weeks;
  double trend_size = 0;
};
BarSeries gen_bar_series(const BarProcess& process, Timestamp start, std::uint64_t seed, std::string label = "synthetic");

/// Auxiliary inputs consistent with a generated exchange log.
void write_onchain_csv(std::ostream& out, const SynthSpec& spec, const BarSeries& bars);
void write_market_daily_csv(std::ostream& out, const SynthSpec& spec, const BarSeries& bars);
void write_supply_csv(std::ostream& out, const SynthSpec& spec);
void write_trends_csv(std::ostream& out, const SynthSpec& spec);
void write_asset_csv(std::ostream& out, const SynthSpec& spec, const std::string& name);

}  // namespace goxlens::synth
