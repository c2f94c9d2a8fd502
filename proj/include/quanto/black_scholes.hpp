#pragma once

#include <cstddef>

namespace quanto {

double norm_cdf(double x) noexcept;

/// European call with per-period volatility and rate over `horizon` periods.
/// Zero volatility gives max(S - K e^{-r s}, 0).
double bs_call(double spot, double strike, double vol_per_period, double rate_per_period,
               double horizon);

/// Inverts bs_call by bisection over total volatility sigma sqrt(s) in
/// [1e-8, 5]. Throws NoSolutionError when the price lies outside
/// [max(S - K e^{-r s}, 0), S] or beyond the bracket.
double implied_vol(double price, double spot, double strike, double rate_per_period,
                   double horizon);

/// |model - market| / market; throws std::domain_error for market <= 0.
double relative_pricing_error(double model_price, double market_price);

} // namespace quanto
