#include "quanto/black_scholes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "quanto/errors.hpp"

namespace quanto {

double norm_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double bs_call(double spot, double strike, double vol_per_period, double rate_per_period,
               double horizon) {
    if (!(spot > 0.0) || strike < 0.0 || horizon < 0.0 || vol_per_period < 0.0) {
        throw std::domain_error("bs_call: invalid inputs");
    }
    const double discount = std::exp(-rate_per_period * horizon);
    if (strike == 0.0) {
        return spot;
    }
    const double total_vol = vol_per_period * std::sqrt(horizon);
    if (total_vol <= 0.0) {
        return std::max(spot - strike * discount, 0.0);
    }
    const double d1 = (std::log(spot / strike) + rate_per_period * horizon) / total_vol +
                      0.5 * total_vol;
    const double d2 = d1 - total_vol;
    return spot * norm_cdf(d1) - strike * discount * norm_cdf(d2);
}

double implied_vol(double price, double spot, double strike, double rate_per_period,
                   double horizon) {
    if (!(spot > 0.0) || !(strike > 0.0) || !(horizon > 0.0)) {
        throw std::domain_error("implied_vol: spot, strike and horizon must be positive");
    }
    const double lower_bound = std::max(spot - strike * std::exp(-rate_per_period * horizon), 0.0);
    if (!(price >= lower_bound) || !(price <= spot)) {
        throw NoSolutionError("price outside no-arbitrage bounds");
    }
    const double root_s = std::sqrt(horizon);
    double lo = 1e-8 / root_s;
    double hi = 5.0 / root_s;
    const double f_lo = bs_call(spot, strike, lo, rate_per_period, horizon) - price;
    const double f_hi = bs_call(spot, strike, hi, rate_per_period, horizon) - price;
    if (f_lo >= 0.0) {
        return lo;
    }
    if (f_hi < 0.0) {
        throw NoSolutionError("price above the volatility bracket");
    }
    // Bisect to full double precision; the price residual ends far below 1e-10.
    for (int iter = 0; iter < 200 && hi - lo > 1e-16 * hi; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double f = bs_call(spot, strike, mid, rate_per_period, horizon) - price;
        if (f == 0.0) {
            return mid;
        }
        (f < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double relative_pricing_error(double model_price, double market_price) {
    if (!(market_price > 0.0)) {
        throw std::domain_error("relative pricing error needs a positive market price");
    }
    return std::abs(model_price - market_price) / market_price;
}

} // namespace quanto
