#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "quanto/cli/config.hpp"
#include "quanto/cli/report.hpp"
#include "quanto/data_io.hpp"
#include "quanto/diagnostics.hpp"
#include "quanto/inference.hpp"
#include "quanto/pricing.hpp"

namespace quanto::cli {

inline constexpr const char* kVersion = "quanto 1.0.0";

/// Aligned asset/FX prices and the return panel of the requested window.
struct MarketData {
    PriceSeries asset;
    PriceSeries fx;
    ReturnPanel panel;
    SpotState spot;
};

/// window = 0 uses every available return. A window longer than the data
/// throws ConfigError.
MarketData load_market_data(const ExperimentConfig& cfg, const FxSeries& fx, std::size_t window);

struct FamilyEstimate {
    std::string family;
    Chain chain;  // single point for "mle"
    std::optional<MleEstimate> mle;
    std::uint64_t seed = 0;
};

/// Seed offset of a family, fixed so that dropping a family from the list
/// leaves the others' chains unchanged.
std::uint64_t family_seed(std::uint64_t base, const std::string& family);

FamilyEstimate estimate_family(const std::string& family, const ReturnPanel& panel,
                               const ExperimentConfig& cfg);

/// One row per (family, parameter).
CsvTable estimates_table(const std::vector<FamilyEstimate>& estimates);

struct QuoteRow {
    OptionQuote quote;
    QuantoQuote quanto;
    Moneyness bucket;
    PricingResult model;
    double nse = 0.0;
    std::optional<double> implied_vol;
    std::optional<double> bs_i;
    std::optional<double> bs_h;
};

struct QuoteSet {
    std::vector<OptionQuote> retained;
    std::vector<Rejection> rejected;
};

/// Loads and filters the configured option chain.
QuoteSet load_quotes(const ExperimentConfig& cfg);

/// Prices every quote as a fixed-rate quanto call (F3) with common random
/// numbers across strikes of one maturity, plus the BS-I and BS-H baselines.
std::vector<QuoteRow> price_quotes(const std::vector<OptionQuote>& quotes, const Chain& chain,
                                   const ExperimentConfig& cfg, const ReturnPanel& panel,
                                   const std::string& family);

CsvTable pricing_table(const std::vector<QuoteRow>& rows);

/// Index of the quote whose predictive density is reported: maturity nearest
/// 51 days, then strike nearest the spot.
std::size_t featured_quote(const std::vector<QuoteRow>& rows);

struct CommandOutcome {
    std::vector<std::filesystem::path> files;
    std::vector<std::string> warnings;
};

CommandOutcome cmd_estimate(const ExperimentConfig& cfg);
CommandOutcome cmd_price(const ExperimentConfig& cfg, const std::filesystem::path& draws,
                         const std::string& label);
CommandOutcome cmd_experiment(const ExperimentConfig& cfg);
CommandOutcome cmd_diagnose(const std::filesystem::path& draws,
                            const std::filesystem::path& out_dir, const std::string& label);

} // namespace quanto::cli
