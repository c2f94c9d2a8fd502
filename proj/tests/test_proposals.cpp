#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <gtest/gtest.h>

#include "quanto/proposals.hpp"

using namespace quanto;

namespace {

double integrate_positive(const auto& f) {
    boost::math::quadrature::exp_sinh<double> integrator;
    return integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity());
}

double density_mass(const ProposalSpec& spec) {
    return integrate_positive([&](double v) { return std::exp(spec.log_density(v, 0.0)); });
}

double density_mean(const ProposalSpec& spec) {
    return integrate_positive([&](double v) { return v * std::exp(spec.log_density(v, 0.0)); });
}

double density_sd(const ProposalSpec& spec, double mean) {
    const double m2 = integrate_positive(
        [&](double v) { return v * v * std::exp(spec.log_density(v, 0.0)); });
    return std::sqrt(m2 - mean * mean);
}

void expect_draws_match_density(const ProposalSpec& spec, std::uint64_t seed) {
    RandomStream stream(seed);
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = spec.draw(0.0, stream);
        ASSERT_GT(v, 0.0);
        sum += v;
    }
    const double mean = density_mean(spec);
    const double sd = density_sd(spec, mean);
    EXPECT_NEAR(sum / n, mean, 5.0 * sd / std::sqrt(n)) << spec.describe();
}

} // namespace

TEST(Proposals, DensitiesIntegrateToOne) {
    const std::vector<ProposalSpec> specs{
        ProposalSpec::truncated_normal(1.0, 0.3),
        ProposalSpec::truncated_normal(0.006, 0.0003),
        ProposalSpec::truncated_normal(-1.0, 0.5),
        ProposalSpec::truncated_student_t(1.0, 0.3, 5.0),
        ProposalSpec::truncated_student_t(-2.0, 1.0, 5.0),
        ProposalSpec::inverse_gamma(5.0, 6.0),
        ProposalSpec::inverse_gamma(3.0, 0.5),
    };
    for (const auto& s : specs) {
        EXPECT_NEAR(density_mass(s), 1.0, 1e-7) << s.describe();
    }
}

TEST(Proposals, NormalRandomWalkIsSymmetricAndNormalized) {
    auto rw = ProposalSpec::normal_random_walk(0.1);
    EXPECT_DOUBLE_EQ(rw.log_density(0.3, 0.1), rw.log_density(0.1, 0.3));
    EXPECT_NEAR(rw.log_density(0.0, 0.0), -std::log(0.1) - 0.5 * std::log(2 * std::numbers::pi),
                1e-14);
    EXPECT_TRUE(rw.is_random_walk());
}

TEST(Proposals, RandomWalkCentresOnCurrent) {
    auto rw = ProposalSpec::normal_random_walk(0.05);
    RandomStream stream(3);
    double sum = 0.0;
    const int n = 50000;
    for (int i = 0; i < n; ++i) {
        sum += rw.draw(0.7, stream);
    }
    EXPECT_NEAR(sum / n, 0.7, 5 * 0.05 / std::sqrt(n));
}

TEST(Proposals, TruncatedNormalDrawsMatchDensity) {
    expect_draws_match_density(ProposalSpec::truncated_normal(1.0, 0.3), 1);
    expect_draws_match_density(ProposalSpec::truncated_normal(0.2, 0.4), 2);
}

TEST(Proposals, TruncatedNormalTailSamplerMatchesAnalyticMean) {
    const double mu = -1.0, sigma = 0.5;
    auto spec = ProposalSpec::truncated_normal(mu, sigma);
    const double alpha = -mu / sigma;
    const double phi = std::exp(-0.5 * alpha * alpha) / std::sqrt(2 * std::numbers::pi);
    const double tail = 0.5 * std::erfc(alpha / std::numbers::sqrt2);
    const double analytic = mu + sigma * phi / tail;
    EXPECT_NEAR(density_mean(spec), analytic, 1e-9);
    expect_draws_match_density(spec, 4);
}

TEST(Proposals, TruncatedStudentTDrawsMatchDensity) {
    expect_draws_match_density(ProposalSpec::truncated_student_t(1.0, 0.3, 5.0), 5);
    expect_draws_match_density(ProposalSpec::truncated_student_t(-2.0, 1.0, 5.0), 6);
}

TEST(Proposals, InverseGammaDrawsMatchDensity) {
    expect_draws_match_density(ProposalSpec::inverse_gamma(5.0, 6.0), 7);
    // Mode of the implied sigma^2 density sits at scale / (shape + 1).
    auto spec = ProposalSpec::inverse_gamma(5.0, 6.0 * 0.01 * 0.01);
    RandomStream stream(8);
    std::vector<double> v;
    for (int i = 0; i < 20000; ++i) {
        const double s = spec.draw(0.0, stream);
        v.push_back(s * s);
    }
    double mean = 0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    // E[sigma^2] = scale / (shape - 1)
    EXPECT_NEAR(mean, 6e-4 / 4.0, 0.03 * 6e-4 / 4.0);
}

TEST(Proposals, OutsideSupportHasZeroDensity) {
    EXPECT_EQ(ProposalSpec::truncated_normal(1, 1).log_density(-0.1, 0),
              -std::numeric_limits<double>::infinity());
    EXPECT_EQ(ProposalSpec::truncated_student_t(1, 1, 5).log_density(0.0, 0),
              -std::numeric_limits<double>::infinity());
    EXPECT_EQ(ProposalSpec::inverse_gamma(5, 1).log_density(-2.0, 0),
              -std::numeric_limits<double>::infinity());
}

TEST(Proposals, InvalidParametersAreRejected) {
    EXPECT_THROW(ProposalSpec::truncated_normal(1.0, 0.0), std::invalid_argument);
    EXPECT_THROW(ProposalSpec::truncated_normal(1.0, -1.0), std::invalid_argument);
    EXPECT_THROW(ProposalSpec::truncated_normal(-100.0, 1.0), std::invalid_argument);
    EXPECT_THROW(ProposalSpec::truncated_student_t(1.0, 1.0, 2.0), std::invalid_argument);
    EXPECT_THROW(ProposalSpec::inverse_gamma(2.0, 1.0), std::invalid_argument);
    EXPECT_THROW(ProposalSpec::inverse_gamma(5.0, 0.0), std::invalid_argument);
    EXPECT_THROW(ProposalSpec::normal_random_walk(0.0), std::invalid_argument);
    EXPECT_THROW(ProposalSpec::normal_random_walk(std::nan("")), std::invalid_argument);
}

TEST(Proposals, FixedSeedReproducesDraws) {
    auto spec = ProposalSpec::truncated_student_t(0.5, 0.2, 5.0);
    RandomStream a(42), b(42);
    for (int i = 0; i < 100; ++i) {
        EXPECT_EQ(spec.draw(0.0, a), spec.draw(0.0, b));
    }
}

TEST(Proposals, DescribeNamesTheFamily) {
    EXPECT_EQ(ProposalSpec::normal_random_walk(0.1).describe(), "N-RW(step=0.1)");
    EXPECT_EQ(to_string(ProposalFamily::TruncatedStudentT), "TT");
}
