#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "quanto/inference.hpp"
#include "quanto/model.hpp"
#include "quanto/pricing.hpp"

namespace quanto::cli {

/// Bad or inconsistent configuration; the CLI maps it to exit code 1.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct FxSeries {
    std::string name;
    std::filesystem::path path;
};

struct ExperimentConfig {
    std::filesystem::path asset_series;
    std::vector<FxSeries> fx_series;  // in file order
    std::string primary_fx;           // empty: first entry
    std::filesystem::path option_chain;

    double r_d_annual = 0.0;
    double r_f_annual = 0.0;
    double h_fix = 1.0;
    int periods_per_year = 252;

    std::size_t draws = 300000;
    std::size_t burn_in = 100000;
    std::uint64_t seed = 1;
    std::vector<std::string> families{"ttn", "tnn", "ign", "mnc", "mle"};
    ProposalTuning tuning{};

    std::size_t n_paths = 10000;
    std::size_t paths_per_draw = 1;
    PricingMode mode = PricingMode::Static;
    std::size_t refresh_interval = 5;
    std::size_t sweeps_per_refresh = 1;
    std::size_t partitions = 8;

    std::vector<std::size_t> windows;  // sample sizes T; empty: all returns
    std::size_t histogram_bins = 40;
    std::filesystem::path out_dir = "out";

    MarketConfig market() const;
    const FxSeries& primary() const;
    /// Largest configured window, or 0 for "all data".
    std::size_t estimation_window() const;

    /// Throws ConfigError. Checks K > K0, known families, positive counts and
    /// that every referenced file exists.
    void validate() const;

    /// key = value lines in a stable order; used for the run manifest.
    std::vector<std::pair<std::string, std::string>> echo() const;
};

/// Flat `key = value` text with `#` comments. Relative paths resolve against
/// `base_dir`. Unknown or repeated keys throw ConfigError.
ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

std::vector<std::string> parse_family_list(const std::string& text);

} // namespace quanto::cli
