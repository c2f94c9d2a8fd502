#include "quanto/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>

#include "quanto/cli/report.hpp"
#include "quanto/data_io.hpp"

namespace quanto::cli {

namespace {

const std::set<std::string> kKnownFamilies{"ttn", "tnn", "ign", "mnc", "mle"};

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& value) {
    const auto v = parse_decimal(value);
    if (!v) {
        throw ConfigError(key + ": expected a number, got '" + value + "'");
    }
    return *v;
}

template <typename Int>
Int to_integer(const std::string& key, const std::string& value) {
    Int out{};
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw ConfigError(key + ": expected a non-negative integer, got '" + value + "'");
    }
    return out;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
    std::filesystem::path p(value);
    return p.is_absolute() ? p : base / p;
}

} // namespace

std::vector<std::string> parse_family_list(const std::string& text) {
    std::vector<std::string> out;
    for (auto& f : split_csv_line(text)) {
        std::transform(f.begin(), f.end(), f.begin(), [](unsigned char c) {
            return static_cast<char>(std::tolower(c));
        });
        if (f.empty()) {
            continue;
        }
        if (!kKnownFamilies.contains(f)) {
            throw ConfigError("unknown family '" + f + "'");
        }
        if (std::find(out.begin(), out.end(), f) == out.end()) {
            out.push_back(f);
        }
    }
    if (out.empty()) {
        throw ConfigError("family list is empty");
    }
    return out;
}

MarketConfig ExperimentConfig::market() const {
    return MarketConfig::from_annual(r_d_annual, r_f_annual, h_fix, periods_per_year);
}

const FxSeries& ExperimentConfig::primary() const {
    if (fx_series.empty()) {
        throw ConfigError("no fx.<NAME> series configured");
    }
    if (primary_fx.empty()) {
        return fx_series.front();
    }
    for (const auto& fx : fx_series) {
        if (fx.name == primary_fx) {
            return fx;
        }
    }
    throw ConfigError("primary_fx '" + primary_fx + "' is not among the fx series");
}

std::size_t ExperimentConfig::estimation_window() const {
    return windows.empty() ? 0 : *std::max_element(windows.begin(), windows.end());
}

void ExperimentConfig::validate() const {
    if (!(draws > burn_in)) {
        throw ConfigError("draws (K) must exceed burn_in (K0)");
    }
    if (n_paths == 0 || paths_per_draw == 0 || partitions == 0 || histogram_bins == 0) {
        throw ConfigError("n_paths, paths_per_draw, partitions and histogram_bins must be positive");
    }
    if (mode == PricingMode::Sequential && refresh_interval == 0) {
        throw ConfigError("refresh_interval must be positive");
    }
    if (periods_per_year <= 0 || !(h_fix > 0.0)) {
        throw ConfigError("periods_per_year and h_fix must be positive");
    }
    for (auto w : windows) {
        if (w < 2) {
            throw ConfigError("sample-size windows must be at least 2");
        }
    }
    for (const auto& f : families) {
        if (!kKnownFamilies.contains(f)) {
            throw ConfigError("unknown family '" + f + "'");
        }
    }
    try {
        market().validate();
        ProposalSpec::truncated_student_t(1.0, 1.0, tuning.tt_dof);
        ProposalSpec::inverse_gamma(tuning.ig_shape, 1.0);
        ProposalSpec::normal_random_walk(tuning.rho_step);
        ProposalSpec::truncated_normal(1.0, tuning.vol_scale_multiplier);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    auto must_exist = [](const std::filesystem::path& p, const char* what) {
        if (p.empty() || !std::filesystem::exists(p)) {
            throw ConfigError(std::string(what) + " file not found: " + p.string());
        }
    };
    must_exist(asset_series, "asset");
    if (fx_series.empty()) {
        throw ConfigError("at least one fx.<NAME> series is required");
    }
    for (const auto& fx : fx_series) {
        must_exist(fx.path, "fx");
    }
    primary();
    if (!option_chain.empty()) {
        must_exist(option_chain, "options");
    }
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::echo() const {
    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("asset", asset_series.generic_string());
    for (const auto& fx : fx_series) {
        kv.emplace_back("fx." + fx.name, fx.path.generic_string());
    }
    kv.emplace_back("primary_fx", primary().name);
    kv.emplace_back("options", option_chain.generic_string());
    kv.emplace_back("r_d_annual", fmt(r_d_annual));
    kv.emplace_back("r_f_annual", fmt(r_f_annual));
    kv.emplace_back("h_fix", fmt(h_fix));
    kv.emplace_back("periods_per_year", std::to_string(periods_per_year));
    kv.emplace_back("draws", std::to_string(draws));
    kv.emplace_back("burn_in", std::to_string(burn_in));
    kv.emplace_back("seed", std::to_string(seed));
    std::string fams;
    for (const auto& f : families) {
        fams += (fams.empty() ? "" : ",") + f;
    }
    kv.emplace_back("families", fams);
    kv.emplace_back("vol_scale_multiplier", fmt(tuning.vol_scale_multiplier));
    kv.emplace_back("tt_dof", fmt(tuning.tt_dof));
    kv.emplace_back("ig_shape", fmt(tuning.ig_shape));
    kv.emplace_back("rho_step", fmt(tuning.rho_step));
    kv.emplace_back("n_paths", std::to_string(n_paths));
    kv.emplace_back("paths_per_draw", std::to_string(paths_per_draw));
    kv.emplace_back("mode", to_string(mode));
    kv.emplace_back("refresh_interval", std::to_string(refresh_interval));
    kv.emplace_back("sweeps_per_refresh", std::to_string(sweeps_per_refresh));
    kv.emplace_back("partitions", std::to_string(partitions));
    std::string ws;
    for (auto w : windows) {
        ws += (ws.empty() ? "" : ",") + std::to_string(w);
    }
    kv.emplace_back("windows", ws);
    kv.emplace_back("histogram_bins", std::to_string(histogram_bins));
    return kv;
}

ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
    ExperimentConfig cfg;
    std::set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        }
        if (!seen.insert(key).second) {
            throw ConfigError("line " + std::to_string(line_no) + ": repeated key '" + key + "'");
        }

        if (key.starts_with("fx.")) {
            const auto name = key.substr(3);
            if (name.empty()) {
                throw ConfigError("line " + std::to_string(line_no) + ": fx series needs a name");
            }
            cfg.fx_series.push_back({name, resolve(base_dir, value)});
        } else if (key == "asset") {
            cfg.asset_series = resolve(base_dir, value);
        } else if (key == "options") {
            cfg.option_chain = value.empty() ? std::filesystem::path{} : resolve(base_dir, value);
        } else if (key == "primary_fx") {
            cfg.primary_fx = value;
        } else if (key == "r_d_annual") {
            cfg.r_d_annual = to_double(key, value);
        } else if (key == "r_f_annual") {
            cfg.r_f_annual = to_double(key, value);
        } else if (key == "h_fix") {
            cfg.h_fix = to_double(key, value);
        } else if (key == "periods_per_year") {
            cfg.periods_per_year = to_integer<int>(key, value);
        } else if (key == "draws") {
            cfg.draws = to_integer<std::size_t>(key, value);
        } else if (key == "burn_in") {
            cfg.burn_in = to_integer<std::size_t>(key, value);
        } else if (key == "seed") {
            cfg.seed = to_integer<std::uint64_t>(key, value);
        } else if (key == "families") {
            cfg.families = parse_family_list(value);
        } else if (key == "vol_scale_multiplier") {
            cfg.tuning.vol_scale_multiplier = to_double(key, value);
        } else if (key == "tt_dof") {
            cfg.tuning.tt_dof = to_double(key, value);
        } else if (key == "ig_shape") {
            cfg.tuning.ig_shape = to_double(key, value);
        } else if (key == "rho_step") {
            cfg.tuning.rho_step = to_double(key, value);
        } else if (key == "n_paths") {
            cfg.n_paths = to_integer<std::size_t>(key, value);
        } else if (key == "paths_per_draw") {
            cfg.paths_per_draw = to_integer<std::size_t>(key, value);
        } else if (key == "mode") {
            try {
                cfg.mode = pricing_mode_from_string(value);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
        } else if (key == "refresh_interval") {
            cfg.refresh_interval = to_integer<std::size_t>(key, value);
        } else if (key == "sweeps_per_refresh") {
            cfg.sweeps_per_refresh = to_integer<std::size_t>(key, value);
        } else if (key == "partitions") {
            cfg.partitions = to_integer<std::size_t>(key, value);
        } else if (key == "windows") {
            cfg.windows.clear();
            for (const auto& w : split_csv_line(value)) {
                if (!w.empty()) {
                    cfg.windows.push_back(to_integer<std::size_t>(key, w));
                }
            }
        } else if (key == "histogram_bins") {
            cfg.histogram_bins = to_integer<std::size_t>(key, value);
        } else if (key == "out") {
            cfg.out_dir = resolve(base_dir, value);
        } else {
            throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config " + path.string());
    }
    return parse_config(in, path.parent_path());
}

} // namespace quanto::cli
