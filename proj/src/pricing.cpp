#include "quanto/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

#include "quanto/black_scholes.hpp"
#include "quanto/random.hpp"

namespace quanto {

std::string to_string(PricingMode mode) {
    return mode == PricingMode::Static ? "static" : "sequential";
}

PricingMode pricing_mode_from_string(const std::string& text) {
    if (text == "static") {
        return PricingMode::Static;
    }
    if (text == "sequential") {
        return PricingMode::Sequential;
    }
    throw std::invalid_argument("unknown pricing mode '" + text + "'");
}

void PricingRequest::validate() const {
    if (!(strike >= 0.0) || !std::isfinite(strike)) {
        throw std::invalid_argument("strike must be a non-negative number");
    }
    if (n_paths == 0 || paths_per_draw == 0 || partitions == 0) {
        throw std::invalid_argument("n_paths, paths_per_draw and partitions must be positive");
    }
    market.validate();
    if (mode == PricingMode::Sequential) {
        if (refresh_interval == 0) {
            throw std::invalid_argument("refresh_interval must be positive");
        }
        if (!sequential) {
            throw std::invalid_argument("sequential mode needs the estimation history");
        }
    }
}

double pairwise_sum(std::span<const double> values) noexcept {
    if (values.size() <= 8) {
        double s = 0.0;
        for (double v : values) {
            s += v;
        }
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

std::vector<Theta> thin_draws(const Chain& chain, std::size_t count) {
    const auto kept = chain.post_burn_in();
    if (kept.empty()) {
        throw std::invalid_argument("chain has no post-burn-in draws");
    }
    std::vector<Theta> out;
    out.reserve(count);
    const std::size_t n = kept.size();
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t idx = i * n / count;
        out.push_back(kept[idx]);
    }
    return out;
}

namespace {

struct Terminal {
    double x;
    double h;
};

Terminal simulate_static(PayoffKind kind, const Theta& theta, const PricingRequest& req,
                         RandomStream& stream) {
    double sum_x = 0.0;
    double sum_h = 0.0;
    if (kind == PayoffKind::F3) {
        const double mx = risk_neutral_mean_x(theta, req.market);
        for (std::size_t j = 0; j < req.horizon; ++j) {
            sum_x += mx + theta.sigma_x() * stream.normal();
        }
        return {req.spot.x0 * std::exp(sum_x), req.spot.h0};
    }
    for (std::size_t j = 0; j < req.horizon; ++j) {
        const auto r = simulate_return_pair(theta, req.market, stream);
        sum_x += r.x;
        sum_h += r.h;
    }
    return {req.spot.x0 * std::exp(sum_x), req.spot.h0 * std::exp(sum_h)};
}

Terminal simulate_sequential(const Theta& start, const PricingRequest& req,
                             RandomStream& stream) {
    const auto& seq = *req.sequential;
    SufficientStats stats = seq.history;
    Theta theta = start;
    double sum_x = 0.0;
    double sum_h = 0.0;
    for (std::size_t j = 0; j < req.horizon; ++j) {
        const auto r = simulate_return_pair(theta, req.market, stream);
        sum_x += r.x;
        sum_h += r.h;
        stats.push(r.x, r.h);
        const bool refresh = (j + 1) % req.refresh_interval == 0 && j + 1 < req.horizon;
        if (refresh && seq.sweeps_per_refresh > 0) {
            const PosteriorKernel kernel(stats);
            const auto proposals = default_proposals(seq.family, stats, seq.tuning);
            ParamVector state{theta.sigma_x(), theta.sigma_h(), theta.rho()};
            for (std::size_t k = 0; k < seq.sweeps_per_refresh; ++k) {
                mwg_sweep(kernel, proposals, state, stream);
            }
            theta = Theta(state[0], state[1], state[2]);
        }
    }
    return {req.spot.x0 * std::exp(sum_x), req.spot.h0 * std::exp(sum_h)};
}

PricingResult summarize_prices(std::vector<double> per_draw, std::size_t distinct) {
    PricingResult r;
    const std::size_t n = per_draw.size();
    r.price = pairwise_sum(per_draw) / static_cast<double>(n);
    if (n >= 2) {
        std::vector<double> sq(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double d = per_draw[i] - r.price;
            sq[i] = d * d;
        }
        const double var = pairwise_sum(sq) / static_cast<double>(n - 1);
        r.mc_std_error = std::sqrt(var / static_cast<double>(n));
    }
    if (n >= 10) {
        r.hpdi_99 = hpdi(per_draw, 0.99);
    } else {
        auto [lo, hi] = std::minmax_element(per_draw.begin(), per_draw.end());
        r.hpdi_99 = {*lo, *hi};
    }
    r.n_effective_draws = distinct;
    r.per_draw_prices = std::move(per_draw);
    return r;
}

} // namespace

std::vector<PricingResult> price_predictive_batch(const PricingRequest& base,
                                                  std::span<const double> strikes,
                                                  const Chain& chain) {
    base.validate();
    if (chain.post_burn_in().empty()) {
        throw std::invalid_argument("chain has no post-burn-in draws");
    }
    for (double k : strikes) {
        if (!(k >= 0.0) || !std::isfinite(k)) {
            throw std::invalid_argument("strike must be a non-negative number");
        }
    }
    const std::size_t n_strikes = strikes.size();
    std::vector<PricingResult> results;
    results.reserve(n_strikes);

    if (base.horizon == 0) {
        for (double k : strikes) {
            const double v = payoff(base.kind, base.spot.x0, base.spot.h0, k, base.market);
            PricingResult r;
            r.price = v;
            r.hpdi_99 = {v, v};
            r.n_effective_draws = 1;
            r.per_draw_prices = {v};
            results.push_back(std::move(r));
        }
        return results;
    }

    const auto thetas = thin_draws(chain, base.n_paths);
    const std::size_t n = thetas.size();
    const double discount = std::exp(-base.market.r_d * static_cast<double>(base.horizon));
    const double inner = static_cast<double>(base.paths_per_draw);
    std::vector<std::vector<double>> per_draw(n_strikes, std::vector<double>(n));

    const std::size_t parts = std::min(base.partitions, n);
    auto run_partition = [&](std::size_t p) {
        RandomStream stream(base.seed, p);
        const std::size_t begin = p * n / parts;
        const std::size_t end = (p + 1) * n / parts;
        std::vector<double> acc(n_strikes);
        for (std::size_t i = begin; i < end; ++i) {
            std::fill(acc.begin(), acc.end(), 0.0);
            for (std::size_t m = 0; m < base.paths_per_draw; ++m) {
                const Terminal t = base.mode == PricingMode::Static
                                       ? simulate_static(base.kind, thetas[i], base, stream)
                                       : simulate_sequential(thetas[i], base, stream);
                for (std::size_t k = 0; k < n_strikes; ++k) {
                    acc[k] += payoff(base.kind, t.x, t.h, strikes[k], base.market);
                }
            }
            for (std::size_t k = 0; k < n_strikes; ++k) {
                per_draw[k][i] = discount * acc[k] / inner;
            }
        }
    };

    const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers = std::min(parts, hw);
    if (workers <= 1) {
        for (std::size_t p = 0; p < parts; ++p) {
            run_partition(p);
        }
    } else {
        std::vector<std::exception_ptr> errors(workers);
        {
            std::vector<std::jthread> pool;
            for (std::size_t w = 0; w < workers; ++w) {
                pool.emplace_back([&, w] {
                    try {
                        for (std::size_t p = w; p < parts; p += workers) {
                            run_partition(p);
                        }
                    } catch (...) {
                        errors[w] = std::current_exception();
                    }
                });
            }
        }
        for (auto& e : errors) {
            if (e) {
                std::rethrow_exception(e);
            }
        }
    }

    const std::size_t distinct = std::min(n, chain.post_burn_in().size());
    for (std::size_t k = 0; k < n_strikes; ++k) {
        results.push_back(summarize_prices(std::move(per_draw[k]), distinct));
    }
    return results;
}

PricingResult price_predictive(const PricingRequest& request, const Chain& chain) {
    const double strike = request.strike;
    return std::move(price_predictive_batch(request, std::span<const double>(&strike, 1), chain)
                         .front());
}

double closed_form_v3(const Theta& theta, const SpotState& spot, double strike_f,
                      std::size_t horizon, const MarketConfig& market) {
    if (!(strike_f >= 0.0)) {
        throw std::domain_error("strike must be non-negative");
    }
    const double s = static_cast<double>(horizon);
    if (horizon == 0) {
        return market.h_fix * std::max(spot.x0 - strike_f, 0.0);
    }
    const double discount = std::exp(-market.r_d * s);
    const double forward =
        spot.x0 * std::exp((market.r_f - theta.rho() * theta.sigma_x() * theta.sigma_h()) * s);
    if (strike_f == 0.0) {
        return discount * market.h_fix * forward;
    }
    const double total_vol = theta.sigma_x() * std::sqrt(s);
    const double d1 = (std::log(forward / strike_f) + 0.5 * total_vol * total_vol) / total_vol;
    const double d2 = d1 - total_vol;
    return discount * market.h_fix * (forward * norm_cdf(d1) - strike_f * norm_cdf(d2));
}

} // namespace quanto
