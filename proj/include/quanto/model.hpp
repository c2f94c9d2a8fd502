#pragma once

// Correlated-GBM return model for a foreign asset X and an exchange rate H
// (domestic currency per unit of foreign currency). The time unit is one
// trading day throughout; annual quantities are converted on entry.

#include <chrono>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "quanto/random.hpp"

namespace quanto {

using Date = std::chrono::year_month_day;

/// Per-period volatilities and correlation.
class Theta {
public:
    /// Throws std::domain_error unless sigma_x > 0, sigma_h > 0 and -1 < rho < 1.
    Theta(double sigma_x, double sigma_h, double rho);

    static bool in_support(double sigma_x, double sigma_h, double rho) noexcept;

    double sigma_x() const noexcept { return sigma_x_; }
    double sigma_h() const noexcept { return sigma_h_; }
    double rho() const noexcept { return rho_; }

    friend bool operator==(const Theta&, const Theta&) = default;

private:
    double sigma_x_;
    double sigma_h_;
    double rho_;
};

struct Drift {
    double mu_x = 0.0;
    double mu_h = 0.0;

    Drift() = default;
    Drift(double mu_x, double mu_h);
};

struct MarketConfig {
    double r_d = 0.0;  // domestic rate per trading day
    double r_f = 0.0;  // foreign rate per trading day
    double h_fix = 1.0;
    int periods_per_year = 252;

    /// Rates are divided by periods_per_year.
    static MarketConfig from_annual(double r_d_annual, double r_f_annual, double h_fix,
                                    int periods_per_year);

    void validate() const;
};

struct SpotState {
    double x0;
    double h0;

    SpotState(double x0, double h0);
};

class PriceSeries {
public:
    /// Dates must be strictly increasing and prices strictly positive.
    PriceSeries(std::vector<Date> dates, std::vector<double> prices);

    const std::vector<Date>& dates() const noexcept { return dates_; }
    const std::vector<double>& prices() const noexcept { return prices_; }
    std::size_t size() const noexcept { return prices_.size(); }

    /// The last `count` observations.
    PriceSeries tail(std::size_t count) const;

private:
    std::vector<Date> dates_;
    std::vector<double> prices_;
};

/// Sufficient statistics of a bivariate return sample. Centered sums are kept
/// directly (Welford updates) so the posterior kernels never subtract large
/// raw moments.
struct SufficientStats {
    std::size_t n = 0;
    double mean_x = 0.0;
    double mean_h = 0.0;
    double sxx = 0.0;     // sum (x_t - xbar)^2
    double shh = 0.0;     // sum (h_t - hbar)^2
    double sxh = 0.0;     // sum (x_t - xbar)(h_t - hbar)
    double sum_xh = 0.0;  // sum x_t h_t

    static SufficientStats from(std::span<const double> x, std::span<const double> h);

    void push(double x, double h) noexcept;

    /// T xbar hbar - sum x_t h_t, the cross-moment term of the posterior kernels.
    double cross_term() const noexcept { return -sxh; }
};

class ReturnPanel {
public:
    /// Throws InsufficientDataError when T < 2, std::invalid_argument on length mismatch.
    ReturnPanel(std::vector<double> x, std::vector<double> h);

    const std::vector<double>& x() const noexcept { return x_; }
    const std::vector<double>& h() const noexcept { return h_; }
    std::size_t size() const noexcept { return x_.size(); }
    const SufficientStats& stats() const noexcept { return stats_; }

private:
    std::vector<double> x_;
    std::vector<double> h_;
    SufficientStats stats_;
};

/// ln(P_t / P_{t-1}) for consecutive observations.
std::vector<double> log_returns(const PriceSeries& prices);

/// Log of the bivariate normal return density with means mu_i - sigma_i^2 / 2.
double physical_logpdf(double x, double h, const Drift& drift, const Theta& theta);

/// Same kernel with the domestic risk-neutral means
/// r_f - rho sigma_x sigma_h - sigma_x^2 / 2 and r_d - r_f - sigma_h^2 / 2.
double risk_neutral_logpdf(double x, double h, const MarketConfig& market, const Theta& theta);

/// Risk-neutral drift of the asset log return, r_f - rho sigma_x sigma_h - sigma_x^2 / 2.
double risk_neutral_mean_x(const Theta& theta, const MarketConfig& market) noexcept;
double risk_neutral_mean_h(const Theta& theta, const MarketConfig& market) noexcept;

struct ReturnPair {
    double x;
    double h;
};

/// One (x, h) draw under the domestic risk-neutral measure. Consumes two
/// normals: z1 drives x, rho z1 + sqrt(1 - rho^2) z2 drives h.
ReturnPair simulate_return_pair(const Theta& theta, const MarketConfig& market,
                                RandomStream& stream);

enum class PayoffKind { F1, F2, F3, F4 };

std::string to_string(PayoffKind kind);
PayoffKind payoff_kind_from_string(const std::string& text);

/// Terminal payoff in domestic currency.
///   F1 = max(H X - K_d, 0)     F2 = H max(X - K_f, 0)
///   F3 = H_fix max(X - K_f, 0) F4 = X max(H - K_H, 0)
double payoff(PayoffKind kind, double x_terminal, double h_terminal, double strike,
              const MarketConfig& market);

} // namespace quanto
