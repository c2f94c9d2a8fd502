#include "quanto/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <thread>

#include "quanto/black_scholes.hpp"
#include "quanto/conjugate.hpp"
#include "quanto/date.hpp"
#include "quanto/errors.hpp"

namespace quanto::cli {

namespace {

constexpr std::uint64_t kPricingSeedOffset = 0x9E3779B97F4A7C15ULL;

std::optional<CandidateSet> candidate_set(const std::string& family) {
    if (family == "ttn") {
        return CandidateSet::TTN;
    }
    if (family == "tnn") {
        return CandidateSet::TNN;
    }
    if (family == "ign") {
        return CandidateSet::IGN;
    }
    return std::nullopt;
}

std::string manifest(const std::string& command, const ExperimentConfig* cfg,
                     const std::vector<std::pair<std::string, std::string>>& extra) {
    std::string out = std::string(kVersion) + "\ncommand = " + command + "\n";
    if (cfg) {
        for (const auto& [k, v] : cfg->echo()) {
            out += k + " = " + v + "\n";
        }
    }
    for (const auto& [k, v] : extra) {
        out += k + " = " + v + "\n";
    }
    return out;
}

void emit(CommandOutcome& outcome, const std::filesystem::path& path, const std::string& text) {
    write_atomic(path, text);
    outcome.files.push_back(path);
}

std::string histogram_csv(const Histogram& h) {
    CsvTable t({"bin_lo", "bin_hi", "count"});
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        t.add_row({fmt(h.edges[i]), fmt(h.edges[i + 1]), std::to_string(h.counts[i])});
    }
    return t.str();
}

std::string posterior_histogram_csv(const Chain& chain, std::size_t bins) {
    CsvTable t({"parameter", "bin_lo", "bin_hi", "count"});
    for (auto p : kAllParams) {
        const auto values = chain.post_burn_in_values(p);
        const auto h = make_histogram(values, bins);
        for (std::size_t i = 0; i < h.counts.size(); ++i) {
            t.add_row({to_string(p), fmt(h.edges[i]), fmt(h.edges[i + 1]),
                       std::to_string(h.counts[i])});
        }
    }
    return t.str();
}

std::string rejections_csv(const QuoteSet& qs) {
    CsvTable t({"row", "reason", "detail"});
    for (const auto& r : qs.rejected) {
        std::string detail = r.detail;
        std::replace(detail.begin(), detail.end(), ',', ';');
        t.add_row({std::to_string(r.row), r.reason, detail});
    }
    return t.str();
}

std::string predictive_summary(const QuoteRow& row, const std::string& label) {
    std::string s;
    s += "family = " + label + "\n";
    s += "quote_date = " + to_iso_string(row.quote.quote_date) + "\n";
    s += "strike = " + fmt(row.quote.strike) + "\n";
    s += "maturity_days = " + std::to_string(row.quote.maturity_days) + "\n";
    s += "mean = " + fmt(row.model.price) + "\n";
    s += "NSE = " + fmt(row.nse) + "\n";
    s += "mc_std_error = " + fmt(row.model.mc_std_error) + "\n";
    s += "hpdi99_lo = " + fmt(row.model.hpdi_99.lo) + "\n";
    s += "hpdi99_hi = " + fmt(row.model.hpdi_99.hi) + "\n";
    s += "market_price = " + fmt(row.quanto.quote.market_price) + "\n";
    return s;
}

std::optional<double> rpe(std::optional<double> model, double market) {
    if (!model || !(market > 0.0)) {
        return std::nullopt;
    }
    return relative_pricing_error(*model, market);
}

void write_pricing_outputs(CommandOutcome& outcome, const std::filesystem::path& dir,
                           const std::string& label, const std::vector<QuoteRow>& rows,
                           std::size_t bins) {
    emit(outcome, dir / ("pricing_" + label + ".csv"), pricing_table(rows).str());
    if (rows.empty()) {
        return;
    }
    const auto& feat = rows[featured_quote(rows)];
    emit(outcome, dir / ("predictive_" + label + ".csv"),
         histogram_csv(make_histogram(feat.model.per_draw_prices, bins)));
    emit(outcome, dir / ("predictive_summary_" + label + ".txt"), predictive_summary(feat, label));
}

} // namespace

MarketData load_market_data(const ExperimentConfig& cfg, const FxSeries& fx, std::size_t window) {
    auto asset = load_price_series(cfg.asset_series);
    auto rate = load_price_series(fx.path);
    auto [a, h] = align_series(asset, rate);
    const std::size_t available = a.size() - 1;
    if (window > available) {
        throw ConfigError("window " + std::to_string(window) + " exceeds the " +
                          std::to_string(available) + " aligned returns for " + fx.name);
    }
    if (window > 0) {
        a = a.tail(window + 1);
        h = h.tail(window + 1);
    }
    ReturnPanel panel(log_returns(a), log_returns(h));
    SpotState spot(a.prices().back(), h.prices().back());
    return MarketData{std::move(a), std::move(h), std::move(panel), spot};
}

std::uint64_t family_seed(std::uint64_t base, const std::string& family) {
    static const std::map<std::string, std::uint64_t> offsets{
        {"ttn", 0}, {"tnn", 1}, {"ign", 2}, {"mnc", 3}, {"mle", 4}};
    const auto it = offsets.find(family);
    return base + (it == offsets.end() ? 5 : it->second);
}

FamilyEstimate estimate_family(const std::string& family, const ReturnPanel& panel,
                               const ExperimentConfig& cfg) {
    const auto seed = family_seed(cfg.seed, family);
    const auto& stats = panel.stats();
    if (auto set = candidate_set(family)) {
        const auto proposals = default_proposals(*set, stats, cfg.tuning);
        auto chain = mwg_sample(panel, proposals, cfg.draws, cfg.burn_in,
                                default_initial_theta(stats), seed);
        return {family, std::move(chain), std::nullopt, seed};
    }
    if (family == "mnc") {
        return {family, conjugate_sample(panel, NiwHyperparameters{}, cfg.draws, cfg.burn_in, seed),
                std::nullopt, seed};
    }
    if (family == "mle") {
        auto est = mle_estimate(panel);
        return {family, Chain::point(est.theta_hat), est, seed};
    }
    throw ConfigError("unknown family '" + family + "'");
}

CsvTable estimates_table(const std::vector<FamilyEstimate>& estimates) {
    CsvTable t({"family", "parameter", "mean", "std_dev", "hpdi95_lo", "hpdi95_hi", "nse", "cd",
                "acceptance_rate"});
    for (const auto& e : estimates) {
        for (auto p : kAllParams) {
            if (e.mle) {
                const auto& th = e.mle->theta_hat;
                const double v = p == Param::SigmaX   ? th.sigma_x()
                                 : p == Param::SigmaH ? th.sigma_h()
                                                      : th.rho();
                t.add_row({e.family, to_string(p), fmt(v), kMissing, kMissing, kMissing, kMissing,
                           kMissing, kMissing});
                continue;
            }
            const auto s = summarize(e.chain, p);
            t.add_row({e.family, to_string(p), fmt(s.mean), fmt(s.std_dev), fmt(s.hpdi_95.lo),
                       fmt(s.hpdi_95.hi), fmt(s.nse), fmt(s.cd), fmt(s.acceptance_rate)});
        }
    }
    return t;
}

QuoteSet load_quotes(const ExperimentConfig& cfg) {
    if (cfg.option_chain.empty()) {
        throw ConfigError("no option chain configured (key 'options')");
    }
    auto chain = load_option_chain(cfg.option_chain);
    QuoteSet qs;
    qs.rejected = std::move(chain.rejected);
    auto filtered = filter_options(chain.quotes, cfg.market());
    qs.retained = std::move(filtered.retained);
    for (auto& [q, r] : filtered.dropped) {
        r.detail = "strike=" + fmt(q.strike) + " maturity_days=" +
                   std::to_string(q.maturity_days) + " price=" + fmt(q.market_price);
        qs.rejected.push_back(std::move(r));
    }
    return qs;
}

std::vector<QuoteRow> price_quotes(const std::vector<OptionQuote>& quotes, const Chain& chain,
                                   const ExperimentConfig& cfg, const ReturnPanel& panel,
                                   const std::string& family) {
    const auto market = cfg.market();
    const double hist_vol = mle_estimate(panel).theta_hat.sigma_x();

    std::map<std::pair<int, double>, std::vector<std::size_t>> groups;  // (maturity, spot)
    for (std::size_t i = 0; i < quotes.size(); ++i) {
        groups[{quotes[i].maturity_days, quotes[i].underlying_spot}].push_back(i);
    }

    std::vector<QuoteRow> rows(quotes.size());
    for (const auto& [key, idx] : groups) {
        const auto [maturity, spot_x] = key;
        const auto horizon = static_cast<std::size_t>(maturity);

        PricingRequest req;
        req.kind = PayoffKind::F3;
        req.horizon = horizon;
        req.spot = SpotState(spot_x, 1.0);
        req.market = market;
        req.n_paths = cfg.n_paths;
        req.paths_per_draw = cfg.paths_per_draw;
        req.seed = (cfg.seed ^ kPricingSeedOffset) + horizon;
        req.mode = cfg.mode;
        req.refresh_interval = cfg.refresh_interval;
        req.partitions = cfg.partitions;
        if (cfg.mode == PricingMode::Sequential) {
            req.sequential = SequentialUpdate{panel.stats(),
                                              candidate_set(family).value_or(CandidateSet::TTN),
                                              cfg.tuning, cfg.sweeps_per_refresh};
        }
        std::vector<double> strikes;
        for (auto i : idx) {
            strikes.push_back(quotes[i].strike);
        }
        auto results = price_predictive_batch(req, strikes, chain);

        // BS-I: implied vol of the quote nearest the money at this maturity.
        std::size_t atm = idx.front();
        for (auto i : idx) {
            if (std::abs(quotes[i].strike / spot_x - 1.0) <
                std::abs(quotes[atm].strike / spot_x - 1.0)) {
                atm = i;
            }
        }
        std::optional<double> atm_vol;
        try {
            atm_vol = implied_vol(quotes[atm].market_price, spot_x, quotes[atm].strike, market.r_f,
                                  static_cast<double>(horizon));
        } catch (const NoSolutionError&) {
        }

        for (std::size_t j = 0; j < idx.size(); ++j) {
            const auto& q = quotes[idx[j]];
            QuoteRow& row = rows[idx[j]];
            row.quote = q;
            row.quanto = construct_quanto(q, market, market.h_fix);
            row.bucket = moneyness_bucket(q.strike, q.underlying_spot);
            row.model = std::move(results[j]);
            row.nse = row.model.per_draw_prices.size() >= 100 ? nse(row.model.per_draw_prices)
                                                              : row.model.mc_std_error;
            const double to_quanto = row.quanto.discount * row.quanto.h_fix;
            try {
                row.implied_vol = implied_vol(q.market_price, q.underlying_spot, q.strike,
                                              market.r_f, static_cast<double>(horizon));
            } catch (const NoSolutionError&) {
            }
            if (atm_vol) {
                row.bs_i = to_quanto * bs_call(q.underlying_spot, q.strike, *atm_vol, market.r_f,
                                               static_cast<double>(horizon));
            }
            row.bs_h = to_quanto * bs_call(q.underlying_spot, q.strike, hist_vol, market.r_f,
                                           static_cast<double>(horizon));
        }
    }
    return rows;
}

CsvTable pricing_table(const std::vector<QuoteRow>& rows) {
    CsvTable t({"quote_date", "strike", "maturity_days", "moneyness", "spot", "market_price",
                "model_price", "mc_std_error", "nse", "hpdi99_lo", "hpdi99_hi", "implied_vol",
                "bs_i", "bs_h", "rpe_model", "rpe_bs_i", "rpe_bs_h"});
    for (const auto& r : rows) {
        const double market = r.quanto.quote.market_price;
        t.add_row({to_iso_string(r.quote.quote_date), fmt(r.quote.strike),
                   std::to_string(r.quote.maturity_days), to_string(r.bucket),
                   fmt(r.quote.underlying_spot), fmt(market), fmt(r.model.price),
                   fmt(r.model.mc_std_error), fmt(r.nse), fmt(r.model.hpdi_99.lo),
                   fmt(r.model.hpdi_99.hi), fmt(r.implied_vol), fmt(r.bs_i), fmt(r.bs_h),
                   fmt(rpe(r.model.price, market)), fmt(rpe(r.bs_i, market)),
                   fmt(rpe(r.bs_h, market))});
    }
    return t;
}

std::size_t featured_quote(const std::vector<QuoteRow>& rows) {
    if (rows.empty()) {
        throw std::invalid_argument("no priced quotes");
    }
    std::size_t best = 0;
    auto key = [&](std::size_t i) {
        const auto& q = rows[i].quote;
        return std::pair{std::abs(q.maturity_days - 51),
                         std::abs(q.strike / q.underlying_spot - 1.0)};
    };
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (key(i) < key(best)) {
            best = i;
        }
    }
    return best;
}

CommandOutcome cmd_estimate(const ExperimentConfig& cfg) {
    cfg.validate();
    CommandOutcome outcome;
    const auto data = load_market_data(cfg, cfg.primary(), cfg.estimation_window());

    std::vector<FamilyEstimate> estimates;
    std::vector<std::pair<std::string, std::string>> extra;
    extra.emplace_back("returns", std::to_string(data.panel.size()));
    for (const auto& fam : cfg.families) {
        try {
            estimates.push_back(estimate_family(fam, data.panel, cfg));
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw std::runtime_error("family " + fam + ": " + e.what());
        }
        const auto& est = estimates.back();
        extra.emplace_back("seed." + fam, std::to_string(est.seed));
        for (const auto& w : est.chain.warnings()) {
            outcome.warnings.push_back(fam + ": " + w);
            extra.emplace_back("warning." + fam, w);
        }
    }
    const auto& dir = cfg.out_dir;
    emit(outcome, dir / "estimates.csv", estimates_table(estimates).str());
    for (const auto& est : estimates) {
        if (est.mle) {
            continue;
        }
        emit(outcome, dir / ("draws_" + est.family + ".csv"), draws_csv(est.chain));
        emit(outcome, dir / ("posterior_hist_" + est.family + ".csv"),
             posterior_histogram_csv(est.chain, cfg.histogram_bins));
    }
    emit(outcome, dir / "run_manifest_estimate.txt", manifest("estimate", &cfg, extra));
    return outcome;
}

CommandOutcome cmd_price(const ExperimentConfig& cfg, const std::filesystem::path& draws,
                         const std::string& label) {
    cfg.validate();
    if (!std::filesystem::exists(draws)) {
        throw ConfigError("draws file not found: " + draws.string());
    }
    CommandOutcome outcome;
    const auto chain = read_draws(draws);
    const auto data = load_market_data(cfg, cfg.primary(), cfg.estimation_window());
    const auto quotes = load_quotes(cfg);
    const auto rows = price_quotes(quotes.retained, chain, cfg, data.panel, label);

    write_pricing_outputs(outcome, cfg.out_dir, label, rows, cfg.histogram_bins);
    emit(outcome, cfg.out_dir / "rejections_options.csv", rejections_csv(quotes));
    emit(outcome, cfg.out_dir / ("run_manifest_price_" + label + ".txt"),
         manifest("price", &cfg,
                  {{"draws_file", draws.filename().generic_string()},
                   {"draws", std::to_string(chain.size())},
                   {"quotes_retained", std::to_string(quotes.retained.size())},
                   {"quotes_rejected", std::to_string(quotes.rejected.size())}}));
    return outcome;
}

namespace {

struct CellResult {
    std::string fx;
    std::size_t window = 0;
    std::map<std::string, std::vector<QuoteRow>> rows;  // by family
    std::map<std::string, std::string> status;          // by family
    std::vector<std::string> warnings;
};

std::string window_label(std::size_t w) { return w == 0 ? "Tall" : "T" + std::to_string(w); }

void run_cell(const ExperimentConfig& cfg, const QuoteSet& quotes, CellResult& cell,
              CommandOutcome& files) {
    const FxSeries* fx = nullptr;
    for (const auto& f : cfg.fx_series) {
        if (f.name == cell.fx) {
            fx = &f;
        }
    }
    const auto dir = cfg.out_dir / cell.fx / window_label(cell.window);
    MarketData data = load_market_data(cfg, *fx, cell.window);

    std::vector<FamilyEstimate> estimates;
    for (const auto& fam : cfg.families) {
        try {
            estimates.push_back(estimate_family(fam, data.panel, cfg));
            for (const auto& w : estimates.back().chain.warnings()) {
                cell.warnings.push_back(cell.fx + "/" + window_label(cell.window) + "/" + fam +
                                        ": " + w);
            }
            auto rows = price_quotes(quotes.retained, estimates.back().chain, cfg, data.panel, fam);
            write_pricing_outputs(files, dir, fam, rows, cfg.histogram_bins);
            cell.rows[fam] = std::move(rows);
            cell.status[fam] = "ok";
        } catch (const std::exception& e) {
            std::string msg = e.what();
            std::replace(msg.begin(), msg.end(), ',', ';');
            cell.status[fam] = "error: " + msg;
        }
    }
    emit(files, dir / "estimates.csv", estimates_table(estimates).str());
}

} // namespace

CommandOutcome cmd_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto quotes = load_quotes(cfg);

    std::vector<CellResult> cells;
    const std::vector<std::size_t> windows =
        cfg.windows.empty() ? std::vector<std::size_t>{0} : cfg.windows;
    for (const auto& fx : cfg.fx_series) {
        for (auto w : windows) {
            CellResult c;
            c.fx = fx.name;
            c.window = w;
            cells.push_back(std::move(c));
        }
    }

    std::vector<CommandOutcome> cell_files(cells.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            try {
                run_cell(cfg, quotes, cells[i], cell_files[i]);
            } catch (const std::exception& e) {
                std::string msg = e.what();
                std::replace(msg.begin(), msg.end(), ',', ';');
                for (const auto& fam : cfg.families) {
                    cells[i].status.try_emplace(fam, "error: " + msg);
                }
            }
        }
    };
    const std::size_t n_workers =
        std::min<std::size_t>(cells.size(), std::max(1u, std::thread::hardware_concurrency()));
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 1; w < n_workers; ++w) {
            pool.emplace_back(worker);
        }
        worker();
    }

    CommandOutcome outcome;
    for (auto& cf : cell_files) {
        outcome.files.insert(outcome.files.end(), cf.files.begin(), cf.files.end());
    }

    CsvTable table2({"fx", "window", "method", "moneyness", "n_quotes", "mean_rpe", "mean_nse",
                     "status"});
    CsvTable curves({"fx", "window", "method", "maturity_days", "strike", "moneyness",
                     "model_price", "market_price"});
    const std::vector<Moneyness> buckets{Moneyness::ITM, Moneyness::ATM, Moneyness::OTM};

    for (const auto& cell : cells) {
        outcome.warnings.insert(outcome.warnings.end(), cell.warnings.begin(),
                                cell.warnings.end());
        const auto wl = std::to_string(cell.window);

        auto add_method = [&](const std::string& method, const std::string& status,
                              const std::vector<QuoteRow>* rows, auto price_of, bool with_nse) {
            for (auto b : buckets) {
                std::size_t n = 0;
                double sum_rpe = 0.0;
                double sum_nse = 0.0;
                if (rows) {
                    for (const auto& r : *rows) {
                        const auto p = price_of(r);
                        const auto e = rpe(p, r.quanto.quote.market_price);
                        if (r.bucket != b || !e) {
                            continue;
                        }
                        ++n;
                        sum_rpe += *e;
                        sum_nse += r.nse;
                    }
                }
                const double dn = static_cast<double>(n);
                table2.add_row({cell.fx, wl, method, to_string(b), std::to_string(n),
                                n ? fmt(sum_rpe / dn) : kMissing,
                                n && with_nse ? fmt(sum_nse / dn) : kMissing, status});
            }
        };

        const std::vector<QuoteRow>* baseline_rows = nullptr;
        for (const auto& fam : cfg.families) {
            const auto st = cell.status.count(fam) ? cell.status.at(fam) : "error: not run";
            const auto it = cell.rows.find(fam);
            const auto* rows = it == cell.rows.end() ? nullptr : &it->second;
            if (rows && !baseline_rows) {
                baseline_rows = rows;
            }
            add_method(fam, st, rows,
                       [](const QuoteRow& r) { return std::optional<double>(r.model.price); },
                       true);
            if (rows) {
                for (const auto& r : *rows) {
                    curves.add_row({cell.fx, wl, fam, std::to_string(r.quote.maturity_days),
                                    fmt(r.quote.strike), to_string(r.bucket), fmt(r.model.price),
                                    fmt(r.quanto.quote.market_price)});
                }
            }
        }
        const std::string bs_status = baseline_rows ? "ok" : "error: no priced family";
        add_method("bs-i", bs_status, baseline_rows, [](const QuoteRow& r) { return r.bs_i; },
                   false);
        add_method("bs-h", bs_status, baseline_rows, [](const QuoteRow& r) { return r.bs_h; },
                   false);
    }

    emit(outcome, cfg.out_dir / "table2.csv", table2.str());
    emit(outcome, cfg.out_dir / "curves.csv", curves.str());
    emit(outcome, cfg.out_dir / "rejections_options.csv", rejections_csv(quotes));
    std::vector<std::pair<std::string, std::string>> extra;
    extra.emplace_back("cells", std::to_string(cells.size()));
    for (const auto& w : outcome.warnings) {
        extra.emplace_back("warning", w);
    }
    emit(outcome, cfg.out_dir / "run_manifest_experiment.txt",
         manifest("experiment", &cfg, extra));
    return outcome;
}

CommandOutcome cmd_diagnose(const std::filesystem::path& draws,
                            const std::filesystem::path& out_dir, const std::string& label) {
    if (!std::filesystem::exists(draws)) {
        throw ConfigError("draws file not found: " + draws.string());
    }
    CommandOutcome outcome;
    const auto chain = read_draws(draws);
    CsvTable t({"parameter", "draws", "mean", "std_dev", "hpdi95_lo", "hpdi95_hi", "hpdi99_lo",
                "hpdi99_hi", "nse", "cd", "move_rate"});
    for (auto p : kAllParams) {
        const auto s = summarize(chain, p);
        t.add_row({to_string(p), std::to_string(chain.size()), fmt(s.mean), fmt(s.std_dev),
                   fmt(s.hpdi_95.lo), fmt(s.hpdi_95.hi), fmt(s.hpdi_99.lo), fmt(s.hpdi_99.hi),
                   fmt(s.nse), fmt(s.cd), fmt(s.acceptance_rate)});
    }
    emit(outcome, out_dir / ("diagnose_" + label + ".csv"), t.str());
    emit(outcome, out_dir / ("run_manifest_diagnose_" + label + ".txt"),
         manifest("diagnose", nullptr, {{"draws_file", draws.filename().generic_string()}}));
    return outcome;
}

} // namespace quanto::cli
