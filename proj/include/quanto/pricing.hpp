#pragma once

// Posterior-predictive Monte Carlo pricing of the four quanto payoffs and the
// closed-form fixed-rate quanto call.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "quanto/diagnostics.hpp"
#include "quanto/inference.hpp"
#include "quanto/model.hpp"

namespace quanto {

enum class PricingMode { Static, Sequential };

std::string to_string(PricingMode mode);
PricingMode pricing_mode_from_string(const std::string& text);

/// Settings for the step-by-step refresh. The history is the estimation
/// sample; simulated returns are appended to a per-path copy of it.
struct SequentialUpdate {
    SufficientStats history;
    CandidateSet family = CandidateSet::TTN;
    ProposalTuning tuning{};
    std::size_t sweeps_per_refresh = 1;
};

struct PricingRequest {
    PayoffKind kind = PayoffKind::F3;
    double strike = 0.0;        // K_d, K_f or K_H depending on kind
    std::size_t horizon = 1;    // trading days to maturity
    SpotState spot{1.0, 1.0};
    MarketConfig market{};
    std::size_t n_paths = 10000;  // posterior draws used after thinning
    std::size_t paths_per_draw = 1;
    std::uint64_t seed = 0;
    PricingMode mode = PricingMode::Static;
    std::size_t refresh_interval = 1;
    std::optional<SequentialUpdate> sequential;
    std::size_t partitions = 8;

    void validate() const;
};

struct PricingResult {
    double price = 0.0;
    double mc_std_error = 0.0;
    Interval hpdi_99{0.0, 0.0};
    std::size_t n_effective_draws = 0;
    /// Discounted payoff mean for each thinned posterior draw, in draw order.
    std::vector<double> per_draw_prices;

    friend bool operator==(const PricingResult&, const PricingResult&) = default;
};

/// Evenly spaced indices into the post-burn-in draws, `count` of them; draws
/// repeat when the chain is shorter than `count`.
std::vector<Theta> thin_draws(const Chain& chain, std::size_t count);

/// Prices one request per strike on common random numbers. `base.strike` is
/// ignored.
std::vector<PricingResult> price_predictive_batch(const PricingRequest& base,
                                                  std::span<const double> strikes,
                                                  const Chain& chain);

PricingResult price_predictive(const PricingRequest& request, const Chain& chain);

/// Fixed-rate quanto call e^{-r_d s} H_fix [F N(d1) - K N(d2)] with quanto
/// forward F = X e^{(r_f - rho sigma_x sigma_h) s}.
double closed_form_v3(const Theta& theta, const SpotState& spot, double strike_f,
                      std::size_t horizon, const MarketConfig& market);

/// Sum by recursive halving; the result depends only on the order of `values`.
double pairwise_sum(std::span<const double> values) noexcept;

} // namespace quanto
