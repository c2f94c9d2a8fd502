#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "quanto/diagnostics.hpp"
#include "quanto/errors.hpp"
#include "quanto/inference.hpp"
#include "test_util.hpp"

using namespace quanto;
using quanto::testing::synthetic_panel;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Joint kernel evaluated term by term from the raw returns.
double raw_joint_kernel(const ReturnPanel& p, double sx, double sh, double rho) {
    double xbar = 0, hbar = 0;
    for (std::size_t t = 0; t < p.size(); ++t) {
        xbar += p.x()[t];
        hbar += p.h()[t];
    }
    xbar /= static_cast<double>(p.size());
    hbar /= static_cast<double>(p.size());
    double quad = 0.0;
    for (std::size_t t = 0; t < p.size(); ++t) {
        const double a = (p.x()[t] - xbar) / sx;
        const double b = (p.h()[t] - hbar) / sh;
        quad += a * a - 2.0 * rho * a * b + b * b;
    }
    const double n = static_cast<double>(p.size());
    return -0.5 * n * std::log(1 - rho * rho) - n * std::log(sx) - (n - 1) * std::log(sh) -
           quad / (2.0 * (1 - rho * rho));
}

// Target whose coordinates are independent and equal to fixed densities.
class IndependentTarget final : public ConditionalTarget {
public:
    double log_conditional(Param param, const ParamVector& s) const override {
        switch (param) {
        case Param::SigmaX: return tn_.log_density(s[0], 0.0);
        case Param::SigmaH: return tn_.log_density(s[1], 0.0);
        case Param::Rho:
            if (!(std::abs(s[2]) < 1.0)) {
                return kNegInf;
            }
            return -0.5 * (s[2] / 0.2) * (s[2] / 0.2);
        }
        return kNegInf;
    }

private:
    ProposalSpec tn_ = ProposalSpec::truncated_normal(1.0, 0.3);
};

} // namespace

TEST(PosteriorKernel, JointMatchesTermByTermOracle) {
    const auto panel = synthetic_panel(300, 0.01, 0.006, -0.2, 3);
    const PosteriorKernel k(panel);
    for (double sx : {0.008, 0.01, 0.013}) {
        for (double rho : {-0.5, 0.0, 0.3}) {
            const double ref = raw_joint_kernel(panel, sx, 0.0065, rho);
            EXPECT_NEAR(k.log_joint(sx, 0.0065, rho), ref, 1e-9 * std::abs(ref));
        }
    }
}

// Differences of each conditional kernel in its own coordinate equal the
// matching differences of the joint kernel.
TEST(PosteriorKernel, ConditionalDifferencesMatchJointProperty) {
    std::mt19937_64 eng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        const double sx0 = 0.002 + 0.02 * u(eng);
        const double sh0 = 0.002 + 0.02 * u(eng);
        const double rho0 = -0.9 + 1.8 * u(eng);
        const auto panel = synthetic_panel(20 + rep * 7, sx0, sh0, rho0, 100 + rep);
        const PosteriorKernel k(panel);
        auto draw_theta = [&] {
            return std::array<double, 3>{sx0 * (0.7 + 0.6 * u(eng)), sh0 * (0.7 + 0.6 * u(eng)),
                                         -0.95 + 1.9 * u(eng)};
        };
        const auto a = draw_theta();
        const auto b = draw_theta();
        EXPECT_NEAR(k.log_cond_sigma_x(a[0], a[1], a[2]) - k.log_cond_sigma_x(b[0], a[1], a[2]),
                    k.log_joint(a[0], a[1], a[2]) - k.log_joint(b[0], a[1], a[2]), 1e-10);
        EXPECT_NEAR(k.log_cond_sigma_h(a[1], a[0], a[2]) - k.log_cond_sigma_h(b[1], a[0], a[2]),
                    k.log_joint(a[0], a[1], a[2]) - k.log_joint(a[0], b[1], a[2]), 1e-10);
        EXPECT_NEAR(k.log_cond_rho(a[2], a[0], a[1]) - k.log_cond_rho(b[2], a[0], a[1]),
                    k.log_joint(a[0], a[1], a[2]) - k.log_joint(a[0], a[1], b[2]), 1e-10);
    }
}

TEST(PosteriorKernel, OutsideSupportIsMinusInfinity) {
    const auto panel = synthetic_panel(50, 0.01, 0.01, 0.0, 1);
    const PosteriorKernel k(panel);
    EXPECT_EQ(k.log_joint(-0.01, 0.01, 0.0), kNegInf);
    EXPECT_EQ(k.log_cond_sigma_x(0.0, 0.01, 0.0), kNegInf);
    EXPECT_EQ(k.log_cond_sigma_h(-1.0, 0.01, 0.0), kNegInf);
    EXPECT_EQ(k.log_cond_rho(1.0, 0.01, 0.01), kNegInf);
    EXPECT_EQ(k.log_conditional(Param::Rho, {0.01, 0.01, -1.2}), kNegInf);
}

TEST(PosteriorKernel, FreeFunctionsAgreeWithTheClass) {
    const auto panel = synthetic_panel(80, 0.01, 0.02, 0.4, 5);
    const PosteriorKernel k(panel);
    EXPECT_EQ(log_cond_sigma_x(0.011, 0.02, 0.3, panel), k.log_cond_sigma_x(0.011, 0.02, 0.3));
    EXPECT_EQ(log_cond_sigma_h(0.021, 0.01, 0.3, panel), k.log_cond_sigma_h(0.021, 0.01, 0.3));
    EXPECT_EQ(log_cond_rho(0.3, 0.01, 0.02, panel), k.log_cond_rho(0.3, 0.01, 0.02));
    EXPECT_EQ(log_joint_posterior(Theta(0.01, 0.02, 0.3), panel), k.log_joint(0.01, 0.02, 0.3));
}

TEST(PosteriorKernel, NeedsTwoObservations) {
    SufficientStats s;
    s.push(0.1, 0.2);
    EXPECT_THROW(PosteriorKernel{s}, InsufficientDataError);
}

TEST(AcceptanceProbability, Cases) {
    EXPECT_DOUBLE_EQ(acceptance_probability(0.0, 0.0, 0.0, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(acceptance_probability(-1.0, 0.0, 0.0, 0.0), std::exp(-1.0));
    EXPECT_DOUBLE_EQ(acceptance_probability(0.0, 0.0, -2.0, 0.0), std::exp(-2.0));
    EXPECT_DOUBLE_EQ(acceptance_probability(5.0, 0.0, 0.0, 0.0), 1.0);
    EXPECT_EQ(acceptance_probability(kNegInf, 0.0, 0.0, 0.0), 0.0);
    EXPECT_EQ(acceptance_probability(0.0, kNegInf, 0.0, 0.0), 1.0);
    EXPECT_EQ(acceptance_probability(std::nan(""), 0.0, 0.0, 0.0), 0.0);
}

TEST(Chain, ValidatesLayout) {
    std::vector<Theta> d(5, Theta(0.1, 0.1, 0.0));
    EXPECT_THROW(Chain(d, 5, {0, 0, 0}, 1), std::invalid_argument);
    EXPECT_THROW(Chain(d, 2, {4, 0, 0}, 1), std::invalid_argument);
    Chain c(d, 2, {3, 1, 0}, 9);
    EXPECT_EQ(c.post_burn_in().size(), 3u);
    EXPECT_DOUBLE_EQ(c.acceptance_rate(Param::SigmaH), 1.0 / 3.0);
    EXPECT_EQ(c.seed(), 9u);
}

TEST(Chain, PointChainHasOneDraw) {
    auto c = Chain::point(Theta(0.1, 0.2, 0.3));
    ASSERT_EQ(c.post_burn_in().size(), 1u);
    EXPECT_EQ(c.post_burn_in_values(Param::Rho), std::vector<double>{0.3});
}

TEST(MetropolisWithinGibbs, ExactIndependenceProposalAlwaysAccepts) {
    IndependentTarget target;
    const ProposalTriple proposals{ProposalSpec::truncated_normal(1.0, 0.3),
                                   ProposalSpec::truncated_normal(1.0, 0.3),
                                   ProposalSpec::normal_random_walk(0.15)};
    const auto run = run_metropolis_within_gibbs(target, proposals, 20000, 2000, {1.0, 1.0, 0.0}, 3);
    EXPECT_EQ(run.accepted_after_burn_in[0], 18000u);
    EXPECT_EQ(run.accepted_after_burn_in[1], 18000u);
    EXPECT_LT(run.accepted_after_burn_in[2], 18000u);

    std::vector<double> rho;
    for (std::size_t k = 2000; k < run.draws.size(); ++k) {
        rho.push_back(run.draws[k][2]);
    }
    const auto s = summarize_samples(rho, 0.0);
    EXPECT_NEAR(s.mean, 0.0, 4 * s.nse);
    EXPECT_NEAR(s.std_dev, 0.2, 0.02);
}

TEST(MetropolisWithinGibbs, RequiresMoreSweepsThanBurnIn) {
    IndependentTarget target;
    const ProposalTriple proposals{ProposalSpec::truncated_normal(1.0, 0.3),
                                   ProposalSpec::truncated_normal(1.0, 0.3),
                                   ProposalSpec::normal_random_walk(0.1)};
    EXPECT_THROW(run_metropolis_within_gibbs(target, proposals, 10, 10, {1, 1, 0}, 1),
                 std::invalid_argument);
}

TEST(MetropolisWithinGibbs, FixedSeedIsReproducible) {
    const auto panel = synthetic_panel(400, 0.006, 0.004, -0.1, 17);
    const auto props = default_proposals(CandidateSet::TTN, panel.stats());
    const auto init = default_initial_theta(panel.stats());
    const auto a = mwg_sample(panel, props, 2000, 500, init, 99);
    const auto b = mwg_sample(panel, props, 2000, 500, init, 99);
    const auto c = mwg_sample(panel, props, 2000, 500, init, 100);
    EXPECT_EQ(a.draws(), b.draws());
    EXPECT_NE(a.draws(), c.draws());
}

TEST(MetropolisWithinGibbs, RecoversGeneratingParameters) {
    const double sx = 0.006, sh = 0.004, rho = -0.3;
    const auto panel = synthetic_panel(2000, sx, sh, rho, 31);
    for (auto set : {CandidateSet::TTN, CandidateSet::TNN, CandidateSet::IGN}) {
        const auto chain = mwg_sample(panel, default_proposals(set, panel.stats()), 8000, 2000,
                                      default_initial_theta(panel.stats()), 5);
        const double truth[3] = {sx, sh, rho};
        for (auto p : kAllParams) {
            const auto s = summarize(chain, p);
            EXPECT_LT(std::abs(s.mean - truth[static_cast<int>(p)]), 3.0 * s.std_dev)
                << to_string(set) << " " << to_string(p);
            EXPECT_GT(s.acceptance_rate, 0.0);
        }
    }
}

TEST(MetropolisWithinGibbs, HopelessProposalTriggersWarning) {
    const auto panel = synthetic_panel(500, 0.006, 0.004, 0.0, 2);
    // Candidates centred a hundred times too high never get accepted.
    const ProposalTriple props{ProposalSpec::truncated_normal(0.6, 0.001),
                               ProposalSpec::truncated_normal(0.4, 0.001),
                               ProposalSpec::normal_random_walk(0.1)};
    const auto chain = mwg_sample(panel, props, 600, 100, Theta(0.006, 0.004, 0.0), 1);
    EXPECT_EQ(chain.accepted(Param::SigmaX), 0u);
    EXPECT_FALSE(chain.warnings().empty());
}

TEST(Mle, MatchesSampleMoments) {
    const auto panel = synthetic_panel(1000, 0.01, 0.02, 0.5, 4);
    const auto est = mle_estimate(panel);
    double mx = 0, mh = 0;
    for (std::size_t t = 0; t < panel.size(); ++t) {
        mx += panel.x()[t];
        mh += panel.h()[t];
    }
    const double n = static_cast<double>(panel.size());
    mx /= n;
    mh /= n;
    double vx = 0, vh = 0, c = 0;
    for (std::size_t t = 0; t < panel.size(); ++t) {
        vx += (panel.x()[t] - mx) * (panel.x()[t] - mx);
        vh += (panel.h()[t] - mh) * (panel.h()[t] - mh);
        c += (panel.x()[t] - mx) * (panel.h()[t] - mh);
    }
    EXPECT_NEAR(est.theta_hat.sigma_x(), std::sqrt(vx / n), 1e-14);
    EXPECT_NEAR(est.theta_hat.sigma_h(), std::sqrt(vh / n), 1e-14);
    EXPECT_NEAR(est.theta_hat.rho(), c / std::sqrt(vx * vh), 1e-12);
    EXPECT_NEAR(est.drift_hat.mu_x, mx + 0.5 * vx / n, 1e-15);
}

TEST(Mle, LikelihoodGradientVanishes) {
    // Unit-scale returns keep finite-difference truncation error small.
    const auto panel = synthetic_panel(400, 1.0, 0.8, 0.3, 6, 0.1, -0.05);
    const auto est = mle_estimate(panel);
    auto loglik = [&](double mux, double muh, double sx, double sh, double rho) {
        double s = 0.0;
        const Theta th(sx, sh, rho);
        const Drift d(mux, muh);
        for (std::size_t t = 0; t < panel.size(); ++t) {
            s += physical_logpdf(panel.x()[t], panel.h()[t], d, th);
        }
        return s;
    };
    const double p[5] = {est.drift_hat.mu_x, est.drift_hat.mu_h, est.theta_hat.sigma_x(),
                         est.theta_hat.sigma_h(), est.theta_hat.rho()};
    // Profile out the drift: at fixed sigma the mean must match x-bar, so the
    // drift used inside physical_logpdf is shifted back by sigma^2 / 2.
    const double h = 1e-5;
    for (int i = 2; i < 5; ++i) {
        double up[5], dn[5];
        std::copy(p, p + 5, up);
        std::copy(p, p + 5, dn);
        up[i] += h;
        dn[i] -= h;
        // Keep the distribution mean fixed while perturbing a volatility.
        up[0] = p[0] + 0.5 * (up[2] * up[2] - p[2] * p[2]);
        dn[0] = p[0] + 0.5 * (dn[2] * dn[2] - p[2] * p[2]);
        up[1] = p[1] + 0.5 * (up[3] * up[3] - p[3] * p[3]);
        dn[1] = p[1] + 0.5 * (dn[3] * dn[3] - p[3] * p[3]);
        const double g = (loglik(up[0], up[1], up[2], up[3], up[4]) -
                          loglik(dn[0], dn[1], dn[2], dn[3], dn[4])) /
                         (2 * h);
        EXPECT_NEAR(g, 0.0, 1e-4) << "coordinate " << i;
    }
}

TEST(Mle, DegenerateDataIsReported) {
    EXPECT_THROW(mle_estimate(ReturnPanel({0.01, 0.01, 0.01}, {0.1, 0.2, 0.3})),
                 DegenerateDataError);
    EXPECT_THROW(mle_estimate(ReturnPanel({0.01, 0.02, 0.04}, {0.02, 0.04, 0.08})),
                 DegenerateDataError);
}

TEST(DefaultProposals, AnchorAtTheMle) {
    const auto panel = synthetic_panel(900, 0.006, 0.004, 0.1, 8);
    const auto mle = mle_estimate(panel).theta_hat;
    const auto ttn = default_proposals(CandidateSet::TTN, panel.stats());
    EXPECT_EQ(ttn[0].family(), ProposalFamily::TruncatedStudentT);
    EXPECT_DOUBLE_EQ(ttn[0].location(), mle.sigma_x());
    EXPECT_NEAR(ttn[0].scale(), 2.0 * mle.sigma_x() / 30.0, 1e-15);
    EXPECT_EQ(ttn[0].shape(), 5.0);
    EXPECT_TRUE(ttn[2].is_random_walk());
    EXPECT_EQ(ttn[2].scale(), 0.1);

    const auto ign = default_proposals(CandidateSet::IGN, panel.stats());
    EXPECT_EQ(ign[1].family(), ProposalFamily::InverseGamma);
    EXPECT_NEAR(ign[1].scale() / ign[1].shape(), 1.2 * mle.sigma_h() * mle.sigma_h(), 1e-18);

    const auto tnn = default_proposals(CandidateSet::TNN, panel.stats());
    EXPECT_EQ(tnn[1].family(), ProposalFamily::TruncatedNormal);
}

TEST(DefaultProposals, DegenerateStatsThrow) {
    auto s = SufficientStats::from(std::vector<double>{0.1, 0.1}, std::vector<double>{0.1, 0.2});
    EXPECT_THROW(default_proposals(CandidateSet::TTN, s), DegenerateDataError);
}

TEST(DefaultInitialTheta, ClampsCorrelation) {
    auto s = SufficientStats::from(std::vector<double>{0.01, 0.02, 0.03, 0.05},
                                   std::vector<double>{0.011, 0.0205, 0.031, 0.0502});
    const auto init = default_initial_theta(s);
    EXPECT_LE(std::abs(init.rho()), 0.99);
}

TEST(CandidateSet, LowercaseNames) {
    EXPECT_EQ(to_string(CandidateSet::TTN), "ttn");
    EXPECT_EQ(to_string(CandidateSet::IGN), "ign");
    EXPECT_EQ(to_string(Param::SigmaX), "sigma_x");
}
