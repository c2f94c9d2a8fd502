#include "quanto/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "quanto/date.hpp"
#include "quanto/errors.hpp"

namespace quanto {

// ---------------------------------------------------------------------------
//     Dates
// ---------------------------------------------------------------------------

std::optional<std::chrono::year_month_day> parse_iso_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        return std::nullopt;
    }
    auto field = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
        int value = 0;
        const char* first = text.data() + pos;
        const char* last = first + len;
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc{} || ptr != last) {
            return std::nullopt;
        }
        return value;
    };
    auto y = field(0, 4);
    auto m = field(5, 2);
    auto d = field(8, 2);
    if (!y || !m || !d) {
        return std::nullopt;
    }
    std::chrono::year_month_day date{std::chrono::year{*y},
                                     std::chrono::month{static_cast<unsigned>(*m)},
                                     std::chrono::day{static_cast<unsigned>(*d)}};
    if (!date.ok()) {
        return std::nullopt;
    }
    return date;
}

std::string to_iso_string(const std::chrono::year_month_day& date) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
    return buf;
}

// ---------------------------------------------------------------------------
//     Value types
// ---------------------------------------------------------------------------

Theta::Theta(double sigma_x, double sigma_h, double rho)
    : sigma_x_(sigma_x), sigma_h_(sigma_h), rho_(rho) {
    if (!in_support(sigma_x, sigma_h, rho)) {
        throw std::domain_error("theta outside support: sigma_x=" + std::to_string(sigma_x) +
                                ", sigma_h=" + std::to_string(sigma_h) +
                                ", rho=" + std::to_string(rho));
    }
}

bool Theta::in_support(double sigma_x, double sigma_h, double rho) noexcept {
    return sigma_x > 0.0 && sigma_h > 0.0 && rho > -1.0 && rho < 1.0 &&
           std::isfinite(sigma_x) && std::isfinite(sigma_h);
}

Drift::Drift(double mu_x_, double mu_h_) : mu_x(mu_x_), mu_h(mu_h_) {
    if (!std::isfinite(mu_x) || !std::isfinite(mu_h)) {
        throw std::domain_error("drift must be finite");
    }
}

MarketConfig MarketConfig::from_annual(double r_d_annual, double r_f_annual, double h_fix,
                                       int periods_per_year) {
    if (periods_per_year <= 0) {
        throw std::invalid_argument("periods_per_year must be positive");
    }
    MarketConfig market;
    market.r_d = r_d_annual / periods_per_year;
    market.r_f = r_f_annual / periods_per_year;
    market.h_fix = h_fix;
    market.periods_per_year = periods_per_year;
    market.validate();
    return market;
}

void MarketConfig::validate() const {
    if (!std::isfinite(r_d) || !std::isfinite(r_f)) {
        throw std::invalid_argument("interest rates must be finite");
    }
    if (!(h_fix > 0.0) || !std::isfinite(h_fix)) {
        throw std::invalid_argument("h_fix must be positive");
    }
    if (periods_per_year <= 0) {
        throw std::invalid_argument("periods_per_year must be positive");
    }
}

SpotState::SpotState(double x0_, double h0_) : x0(x0_), h0(h0_) {
    if (!(x0 > 0.0) || !(h0 > 0.0) || !std::isfinite(x0) || !std::isfinite(h0)) {
        throw std::domain_error("spot levels must be strictly positive");
    }
}

PriceSeries::PriceSeries(std::vector<Date> dates, std::vector<double> prices)
    : dates_(std::move(dates)), prices_(std::move(prices)) {
    if (dates_.size() != prices_.size()) {
        throw std::invalid_argument("price series: date and price counts differ");
    }
    for (std::size_t i = 0; i < prices_.size(); ++i) {
        if (!(prices_[i] > 0.0) || !std::isfinite(prices_[i])) {
            throw std::domain_error("non-positive price on " + to_iso_string(dates_[i]));
        }
        if (i > 0 && !(dates_[i - 1] < dates_[i])) {
            throw DataError("dates not strictly increasing at " + to_iso_string(dates_[i]));
        }
    }
}

PriceSeries PriceSeries::tail(std::size_t count) const {
    count = std::min(count, size());
    auto first = size() - count;
    return PriceSeries(std::vector<Date>(dates_.begin() + first, dates_.end()),
                       std::vector<double>(prices_.begin() + first, prices_.end()));
}

SufficientStats SufficientStats::from(std::span<const double> x, std::span<const double> h) {
    if (x.size() != h.size()) {
        throw std::invalid_argument("return sequences differ in length");
    }
    SufficientStats s;
    s.n = x.size();
    if (s.n == 0) {
        return s;
    }
    for (std::size_t t = 0; t < s.n; ++t) {
        s.mean_x += x[t];
        s.mean_h += h[t];
    }
    s.mean_x /= static_cast<double>(s.n);
    s.mean_h /= static_cast<double>(s.n);
    for (std::size_t t = 0; t < s.n; ++t) {
        const double dx = x[t] - s.mean_x;
        const double dh = h[t] - s.mean_h;
        s.sxx += dx * dx;
        s.shh += dh * dh;
        s.sxh += dx * dh;
        s.sum_xh += x[t] * h[t];
    }
    return s;
}

void SufficientStats::push(double x, double h) noexcept {
    ++n;
    const double inv_n = 1.0 / static_cast<double>(n);
    const double dx = x - mean_x;
    const double dh = h - mean_h;
    mean_x += dx * inv_n;
    mean_h += dh * inv_n;
    sxx += dx * (x - mean_x);
    shh += dh * (h - mean_h);
    sxh += dx * (h - mean_h);
    sum_xh += x * h;
}

ReturnPanel::ReturnPanel(std::vector<double> x, std::vector<double> h)
    : x_(std::move(x)), h_(std::move(h)) {
    if (x_.size() != h_.size()) {
        throw std::invalid_argument("return panel: x and h differ in length");
    }
    if (x_.size() < 2) {
        throw InsufficientDataError("return panel needs at least 2 observations");
    }
    stats_ = SufficientStats::from(x_, h_);
}

// ---------------------------------------------------------------------------
//     Densities and simulation
// ---------------------------------------------------------------------------

std::vector<double> log_returns(const PriceSeries& prices) {
    if (prices.size() < 2) {
        throw InsufficientDataError("log returns need at least 2 prices");
    }
    const auto& p = prices.prices();
    std::vector<double> out;
    out.reserve(p.size() - 1);
    for (std::size_t t = 1; t < p.size(); ++t) {
        if (!(p[t] > 0.0) || !(p[t - 1] > 0.0)) {
            throw std::domain_error("non-positive price on " +
                                    to_iso_string(prices.dates()[p[t] > 0.0 ? t - 1 : t]));
        }
        out.push_back(std::log(p[t] / p[t - 1]));
    }
    return out;
}

namespace {

double bivariate_normal_logpdf(double x, double h, double mean_x, double mean_h,
                               const Theta& theta) {
    const double sx = theta.sigma_x();
    const double sh = theta.sigma_h();
    const double rho = theta.rho();
    const double one_minus = 1.0 - rho * rho;
    const double zx = (x - mean_x) / sx;
    const double zh = (h - mean_h) / sh;
    const double quad = (zx * zx - 2.0 * rho * zx * zh + zh * zh) / one_minus;
    return -std::log(2.0 * std::numbers::pi * sx * sh) - 0.5 * std::log(one_minus) - 0.5 * quad;
}

} // namespace

double physical_logpdf(double x, double h, const Drift& drift, const Theta& theta) {
    const double mean_x = drift.mu_x - 0.5 * theta.sigma_x() * theta.sigma_x();
    const double mean_h = drift.mu_h - 0.5 * theta.sigma_h() * theta.sigma_h();
    return bivariate_normal_logpdf(x, h, mean_x, mean_h, theta);
}

double risk_neutral_mean_x(const Theta& theta, const MarketConfig& market) noexcept {
    return market.r_f - theta.rho() * theta.sigma_x() * theta.sigma_h() -
           0.5 * theta.sigma_x() * theta.sigma_x();
}

double risk_neutral_mean_h(const Theta& theta, const MarketConfig& market) noexcept {
    return market.r_d - market.r_f - 0.5 * theta.sigma_h() * theta.sigma_h();
}

double risk_neutral_logpdf(double x, double h, const MarketConfig& market, const Theta& theta) {
    return bivariate_normal_logpdf(x, h, risk_neutral_mean_x(theta, market),
                                   risk_neutral_mean_h(theta, market), theta);
}

ReturnPair simulate_return_pair(const Theta& theta, const MarketConfig& market,
                                RandomStream& stream) {
    const double z1 = stream.normal();
    const double z2 = stream.normal();
    const double rho = theta.rho();
    const double shock_h = rho * z1 + std::sqrt(1.0 - rho * rho) * z2;
    return {risk_neutral_mean_x(theta, market) + theta.sigma_x() * z1,
            risk_neutral_mean_h(theta, market) + theta.sigma_h() * shock_h};
}

std::string to_string(PayoffKind kind) {
    switch (kind) {
    case PayoffKind::F1: return "F1";
    case PayoffKind::F2: return "F2";
    case PayoffKind::F3: return "F3";
    case PayoffKind::F4: return "F4";
    }
    return "?";
}

PayoffKind payoff_kind_from_string(const std::string& text) {
    if (text == "F1" || text == "f1") return PayoffKind::F1;
    if (text == "F2" || text == "f2") return PayoffKind::F2;
    if (text == "F3" || text == "f3") return PayoffKind::F3;
    if (text == "F4" || text == "f4") return PayoffKind::F4;
    throw std::invalid_argument("unknown payoff kind: " + text);
}

double payoff(PayoffKind kind, double x_terminal, double h_terminal, double strike,
              const MarketConfig& market) {
    if (strike < 0.0) {
        throw std::domain_error("strike must be non-negative");
    }
    switch (kind) {
    case PayoffKind::F1: return std::max(h_terminal * x_terminal - strike, 0.0);
    case PayoffKind::F2: return h_terminal * std::max(x_terminal - strike, 0.0);
    case PayoffKind::F3: return market.h_fix * std::max(x_terminal - strike, 0.0);
    case PayoffKind::F4: return x_terminal * std::max(h_terminal - strike, 0.0);
    }
    return 0.0;
}

} // namespace quanto
