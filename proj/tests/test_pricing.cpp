#include <cmath>
#include <numeric>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "quanto/black_scholes.hpp"
#include "quanto/conjugate.hpp"
#include "quanto/pricing.hpp"
#include "test_util.hpp"

using namespace quanto;

namespace {

MarketConfig test_market() {
    MarketConfig m;
    m.r_d = 0.0001;
    m.r_f = 0.00008;
    m.h_fix = 1.0;
    return m;
}

PricingRequest base_request(PayoffKind kind, double strike, std::size_t horizon,
                            std::size_t paths) {
    PricingRequest r;
    r.kind = kind;
    r.strike = strike;
    r.horizon = horizon;
    r.spot = SpotState(100.0, 1.2);
    r.market = test_market();
    r.n_paths = paths;
    r.seed = 42;
    return r;
}

// Plain fixed-parameter pricer consuming one stream in the same order as a
// single partition: z1 then z2 per step, x-only normals for F3.
double reference_price(const PricingRequest& r, const Theta& th) {
    RandomStream stream(r.seed, 0);
    const double mx = r.market.r_f - th.rho() * th.sigma_x() * th.sigma_h() -
                      0.5 * th.sigma_x() * th.sigma_x();
    const double mh = r.market.r_d - r.market.r_f - 0.5 * th.sigma_h() * th.sigma_h();
    const double c = std::sqrt(1 - th.rho() * th.rho());
    double total = 0.0;
    for (std::size_t p = 0; p < r.n_paths; ++p) {
        double lx = 0.0, lh = 0.0;
        for (std::size_t j = 0; j < r.horizon; ++j) {
            const double z1 = stream.normal();
            if (r.kind == PayoffKind::F3) {
                lx += mx + th.sigma_x() * z1;
                continue;
            }
            const double z2 = stream.normal();
            lx += mx + th.sigma_x() * z1;
            lh += mh + th.sigma_h() * (th.rho() * z1 + c * z2);
        }
        const double x = r.spot.x0 * std::exp(lx);
        const double h = r.spot.h0 * std::exp(lh);
        double pay = 0.0;
        switch (r.kind) {
        case PayoffKind::F1: pay = std::max(h * x - r.strike, 0.0); break;
        case PayoffKind::F2: pay = h * std::max(x - r.strike, 0.0); break;
        case PayoffKind::F3: pay = r.market.h_fix * std::max(x - r.strike, 0.0); break;
        case PayoffKind::F4: pay = x * std::max(h - r.strike, 0.0); break;
        }
        total += pay;
    }
    return std::exp(-r.market.r_d * static_cast<double>(r.horizon)) * total /
           static_cast<double>(r.n_paths);
}

// e^{-r_d s} H_fix E[max(X_s - K, 0)] by 1-D quadrature over the normal shock.
double quadrature_v3(const Theta& th, double x0, double k, double s, const MarketConfig& m) {
    const double drift = (m.r_f - th.rho() * th.sigma_x() * th.sigma_h() -
                          0.5 * th.sigma_x() * th.sigma_x()) * s;
    const double vol = th.sigma_x() * std::sqrt(s);
    const double z_star = k > 0 ? (std::log(k / x0) - drift) / vol : -40.0;
    auto f = [&](double z) {
        const double x = x0 * std::exp(drift + vol * z);
        return (x - k) * std::exp(-0.5 * z * z) / std::sqrt(2 * std::numbers::pi);
    };
    const double lo = std::max(z_star, -40.0);
    const double integral =
        boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, 40.0, 15, 1e-14);
    return std::exp(-m.r_d * s) * m.h_fix * integral;
}

} // namespace

TEST(ClosedFormV3, MatchesQuadrature) {
    const auto m = test_market();
    for (double rho : {-0.6, 0.0, 0.4}) {
        for (double k : {80.0, 100.0, 125.0}) {
            for (std::size_t s : {5u, 51u, 250u}) {
                const Theta th(0.012, 0.007, rho);
                const double cf = closed_form_v3(th, SpotState(100, 1), k, s, m);
                const double q = quadrature_v3(th, 100, k, static_cast<double>(s), m);
                EXPECT_NEAR(cf, q, 1e-8 * q) << rho << " " << k << " " << s;
            }
        }
    }
}

TEST(ClosedFormV3, ZeroStrikeIsTheDiscountedQuantoForward) {
    const auto m = test_market();
    const Theta th(0.01, 0.005, 0.3);
    const double s = 40;
    EXPECT_DOUBLE_EQ(closed_form_v3(th, SpotState(100, 1), 0.0, 40, m),
                     100 * std::exp((m.r_f - 0.3 * 0.01 * 0.005 - m.r_d) * s));
}

TEST(ClosedFormV3, ReducesToBlackScholesWithoutCorrelation) {
    MarketConfig m;
    m.r_d = m.r_f = 0.0002;
    const Theta th(0.011, 0.02, 0.0);
    EXPECT_NEAR(closed_form_v3(th, SpotState(100, 1), 97, 60, m), bs_call(100, 97, 0.011, 0.0002, 60),
                1e-12);
}

TEST(ClosedFormV3, ZeroHorizonIsIntrinsic) {
    MarketConfig m;
    m.h_fix = 2.0;
    EXPECT_EQ(closed_form_v3(Theta(0.1, 0.1, 0.0), SpotState(100, 1), 90, 0, m), 20.0);
}

TEST(PricePredictive, OneDrawChainEqualsReferencePricer) {
    const Theta th(0.006, 0.004, -0.03);
    const auto chain = Chain::point(th);
    for (auto kind : {PayoffKind::F1, PayoffKind::F2, PayoffKind::F3, PayoffKind::F4}) {
        const double k = kind == PayoffKind::F1 ? 120.0 : kind == PayoffKind::F4 ? 1.2 : 100.0;
        auto req = base_request(kind, k, 20, 3000);
        req.partitions = 1;
        const auto res = price_predictive(req, chain);
        const double ref = reference_price(req, th);
        EXPECT_NEAR(res.price, ref, 1e-12 * std::max(1.0, ref)) << to_string(kind);
    }
}

TEST(PricePredictive, MatchesClosedFormForF3) {
    const Theta th(0.006, 0.004, -0.03);
    auto req = base_request(PayoffKind::F3, 101.0, 51, 200000);
    const auto res = price_predictive(req, Chain::point(th));
    const double cf = closed_form_v3(th, req.spot, 101.0, 51, req.market);
    EXPECT_NEAR(res.price, cf, 4 * res.mc_std_error);
    EXPECT_GT(res.mc_std_error, 0.0);
}

TEST(PricePredictive, DiscountedProductIsAMartingale) {
    const Theta th(0.01, 0.008, 0.5);
    auto req = base_request(PayoffKind::F1, 0.0, 30, 100000);
    const auto res = price_predictive(req, Chain::point(th));
    EXPECT_NEAR(res.price, 100.0 * 1.2, 4 * res.mc_std_error);
}

TEST(PricePredictive, ZeroStrikeIdentities) {
    const Theta th(0.01, 0.008, -0.4);
    for (auto kind : {PayoffKind::F1, PayoffKind::F2, PayoffKind::F4}) {
        auto req = base_request(kind, 0.0, 25, 100000);
        const auto res = price_predictive(req, Chain::point(th));
        EXPECT_NEAR(res.price, 120.0, 4 * res.mc_std_error) << to_string(kind);
    }
    auto req = base_request(PayoffKind::F3, 0.0, 25, 100000);
    const auto res = price_predictive(req, Chain::point(th));
    EXPECT_NEAR(res.price, closed_form_v3(th, req.spot, 0.0, 25, req.market),
                4 * res.mc_std_error + 1e-12);
}

TEST(PricePredictive, MonotoneAndConvexInStrike) {
    const auto panel = quanto::testing::synthetic_panel(800, 0.01, 0.006, 0.2, 3);
    const auto chain = mwg_sample(panel, default_proposals(CandidateSet::TNN, panel.stats()), 3000,
                                  1000, default_initial_theta(panel.stats()), 7);
    const std::vector<double> strikes{90, 95, 100, 105, 110};
    for (auto kind : {PayoffKind::F1, PayoffKind::F3}) {
        auto req = base_request(kind, 0.0, 40, 20000);
        const double scale = kind == PayoffKind::F1 ? 1.2 : 1.0;
        std::vector<double> ks;
        for (double k : strikes) {
            ks.push_back(k * scale);
        }
        const auto res = price_predictive_batch(req, ks, chain);
        for (std::size_t i = 1; i < res.size(); ++i) {
            EXPECT_LE(res[i].price, res[i - 1].price);
        }
        for (std::size_t i = 1; i + 1 < res.size(); ++i) {
            const double second = res[i + 1].price - 2 * res[i].price + res[i - 1].price;
            EXPECT_GE(second, -2 * res[i].mc_std_error);
        }
    }
}

TEST(PricePredictive, FixedSeedIsBitIdentical) {
    const auto panel = quanto::testing::synthetic_panel(300, 0.01, 0.006, 0.2, 4);
    const auto chain = conjugate_sample(panel, {}, 1500, 500, 9);
    auto req = base_request(PayoffKind::F2, 100.0, 15, 2000);
    req.paths_per_draw = 3;
    const auto a = price_predictive(req, chain);
    const auto b = price_predictive(req, chain);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.per_draw_prices.size(), 2000u);
    EXPECT_EQ(a.n_effective_draws, 1000u);
    req.seed = 43;
    EXPECT_NE(price_predictive(req, chain).price, a.price);
}

TEST(PricePredictive, ZeroHorizonReturnsIntrinsicValue) {
    auto req = base_request(PayoffKind::F3, 90.0, 0, 100);
    req.market.h_fix = 1.5;
    const auto res = price_predictive(req, Chain::point(Theta(0.01, 0.01, 0.0)));
    EXPECT_EQ(res.price, 15.0);
    EXPECT_EQ(res.mc_std_error, 0.0);
    EXPECT_EQ(res.hpdi_99.lo, 15.0);
}

TEST(PricePredictive, RejectsInvalidRequests) {
    const auto chain = Chain::point(Theta(0.01, 0.01, 0.0));
    auto req = base_request(PayoffKind::F3, -1.0, 10, 100);
    EXPECT_THROW(price_predictive(req, chain), std::invalid_argument);
    req.strike = 1.0;
    req.n_paths = 0;
    EXPECT_THROW(price_predictive(req, chain), std::invalid_argument);
    req.n_paths = 10;
    req.mode = PricingMode::Sequential;
    EXPECT_THROW(price_predictive(req, chain), std::invalid_argument);
    EXPECT_THROW(pricing_mode_from_string("dynamic"), std::invalid_argument);
    EXPECT_THROW(closed_form_v3(Theta(0.01, 0.01, 0.0), req.spot, -1.0, 5, req.market),
                 std::domain_error);
}

TEST(ThinDraws, EvenlySpacedAndRepeatingWhenShort) {
    std::vector<Theta> d;
    for (int i = 0; i < 10; ++i) {
        d.emplace_back(1.0 + i, 1.0, 0.0);
    }
    const Chain chain(d, 2, {0, 0, 0}, 0);
    const auto four = thin_draws(chain, 4);
    ASSERT_EQ(four.size(), 4u);
    EXPECT_EQ(four[0].sigma_x(), 3.0);
    EXPECT_EQ(four[1].sigma_x(), 5.0);
    EXPECT_EQ(four[3].sigma_x(), 9.0);
    const auto sixteen = thin_draws(chain, 16);
    EXPECT_EQ(sixteen[0].sigma_x(), 3.0);
    EXPECT_EQ(sixteen[1].sigma_x(), 3.0);
    EXPECT_EQ(sixteen[15].sigma_x(), 10.0);
}

TEST(PairwiseSum, AgreesWithLongDoubleAccumulation) {
    std::vector<double> v(100001);
    long double exact = 0.0L;
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = 1.0 / (1.0 + static_cast<double>(i % 977));
        exact += v[i];
    }
    EXPECT_NEAR(pairwise_sum(v), static_cast<double>(exact), 1e-11);
    EXPECT_EQ(pairwise_sum(std::vector<double>{}), 0.0);
}

TEST(SequentialPricing, DeterministicAndCloseToStaticForLongHistories) {
    const auto panel = quanto::testing::synthetic_panel(2000, 0.006, 0.004, -0.1, 12);
    const auto chain = mwg_sample(panel, default_proposals(CandidateSet::TTN, panel.stats()), 3000,
                                  1000, default_initial_theta(panel.stats()), 5);
    auto req = base_request(PayoffKind::F3, 100.0, 20, 2000);
    const auto stat = price_predictive(req, chain);
    req.mode = PricingMode::Sequential;
    req.refresh_interval = 5;
    req.sequential = SequentialUpdate{panel.stats(), CandidateSet::TTN, {}, 1};
    const auto a = price_predictive(req, chain);
    const auto b = price_predictive(req, chain);
    EXPECT_EQ(a, b);
    EXPECT_NE(a.price, stat.price);
    EXPECT_NEAR(a.price, stat.price, 4 * std::hypot(a.mc_std_error, stat.mc_std_error));
}
