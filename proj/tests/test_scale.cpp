#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "cpinfer/scale.hpp"
#include "cpinfer/simulate.hpp"

using namespace cpinfer;

namespace {

time_series gaussian_series(index_t n, double sigma, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, sigma);
    std::vector<double> y(static_cast<std::size_t>(n));
    for (double& v : y) v = gauss(rng);
    return time_series(std::move(y));
}

}  // namespace

TEST(MadSigma, ConstantSeriesGivesZero) {
    EXPECT_DOUBLE_EQ(mad_sigma(time_series(std::vector<double>(64, 3.5)), 0).value, 0.0);
    EXPECT_DOUBLE_EQ(mad_sigma(time_series(std::vector<double>(64, -1.0)), 2).value, 0.0);
}

TEST(MadSigma, ConsistentOnGaussianNoise) {
    const time_series ts = gaussian_series(100000, 2.0, 101);
    const double est = mad_sigma(ts, 0).value;
    EXPECT_GT(est, 1.96);
    EXPECT_LT(est, 2.04);
}

TEST(MadSigma, RobustToChangePoints) {
    std::mt19937_64 rng(103);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const time_series mean = gen_signal(blocks_signal());
    std::vector<double> y = mean.values;
    for (double& v : y) v += gauss(rng);
    const double est = mad_sigma(time_series(std::move(y)), 0).value;
    EXPECT_NEAR(est, 1.0, 0.1);
}

TEST(MadSigma, TooShortThrows) {
    EXPECT_THROW(mad_sigma(time_series({1.0, 2.0}), 0), parameter_error);
    EXPECT_THROW(mad_sigma(time_series({1.0, 2.0, 3.0, 4.0}), 2), parameter_error);
}

TEST(DifSigma, HandExampleAlternating) {
    std::vector<double> y;
    for (int i = 0; i < 64; ++i) y.push_back(i % 2 == 0 ? 0.0 : 1.0);
    const double est = dif_sigma(time_series(std::move(y)), 0).value;
    EXPECT_NEAR(est * est, 0.5, 1e-12);
}

TEST(DifSigma, ConstantSeriesGivesZero) {
    EXPECT_DOUBLE_EQ(dif_sigma(time_series(std::vector<double>(32, 7.0)), 1).value, 0.0);
}

TEST(DifSigma, ConsistentOnHeavyTails) {
    // unit-variance scaled t5 noise
    std::mt19937_64 rng(107);
    std::student_t_distribution<double> t5(5.0);
    std::vector<double> y(100000);
    for (double& v : y) v = std::sqrt(0.6) * t5(rng);
    const double est = dif_sigma(time_series(std::move(y)), 0).value;
    EXPECT_GT(est * est, 0.97);
    EXPECT_LT(est * est, 1.03);
}

TEST(LrvTau, WhiteNoiseRecoversUnitVariance) {
    const time_series ts = gaussian_series(100000, 1.0, 109);
    const scale_estimate est = lrv_tau(ts, 0);
    EXPECT_EQ(est.block_size, 46);  // floor(100000^(1/3))
    EXPECT_GT(est.value * est.value, 0.9);
    EXPECT_LT(est.value * est.value, 1.1);
}

TEST(LrvTau, RecoversAr1LongRunVariance) {
    // AR(1), phi = 0.5, unit innovations: tau^2 = 1/(1-phi)^2 = 4
    std::mt19937_64 rng(113);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const index_t n = 1000000;
    std::vector<double> y(static_cast<std::size_t>(n));
    double z = 0.0;
    for (int t = 0; t < 500; ++t) z = 0.5 * z + gauss(rng);
    for (double& v : y) {
        z = 0.5 * z + gauss(rng);
        v = z;
    }
    const scale_estimate est = lrv_tau(time_series(std::move(y)), 0);
    EXPECT_NEAR(est.value * est.value, 4.0, 0.6);  // within 15%
}

TEST(LrvTau, ConstantSeriesGivesZero) {
    EXPECT_DOUBLE_EQ(lrv_tau(time_series(std::vector<double>(1000, 2.0)), 0).value, 0.0);
}

TEST(LrvTau, TooFewBlocksThrows) {
    EXPECT_THROW(lrv_tau(time_series(std::vector<double>(30, 1.0)), 0, 20), parameter_error);
}

TEST(Estimators, DegreePolynomialInvariance) {
    std::mt19937_64 rng(127);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> coef(-4.0, 4.0);
    for (int p : {0, 1, 2}) {
        const index_t n = 2048;
        std::vector<double> y(static_cast<std::size_t>(n));
        for (double& v : y) v = gauss(rng);
        std::vector<double> shifted = y;
        std::vector<double> q(static_cast<std::size_t>(p) + 1);
        for (double& c : q) c = coef(rng);
        for (index_t t = 1; t <= n; ++t) {
            const double s = static_cast<double>(t) / static_cast<double>(n);
            double acc = 0.0, sp = 1.0;
            for (double c : q) {
                acc += c * sp;
                sp *= s;
            }
            shifted[static_cast<std::size_t>(t - 1)] += acc;
        }
        const time_series base{std::vector<double>(y)};
        const time_series trended{std::vector<double>(shifted)};
        EXPECT_NEAR(mad_sigma(base, p).value, mad_sigma(trended, p).value, 1e-9);
        EXPECT_NEAR(dif_sigma(base, p).value, dif_sigma(trended, p).value, 1e-9);
        // constants are annihilated by the block differences too
        std::vector<double> plus_const = y;
        for (double& v : plus_const) v += 5.0;
        EXPECT_NEAR(lrv_tau(base, p).value, lrv_tau(time_series(std::move(plus_const)), p).value,
                    1e-9);
    }
}

TEST(Estimators, NonnegativeOnRandomInputs) {
    std::mt19937_64 rng(131);
    std::uniform_real_distribution<double> unif(-100.0, 100.0);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> y(256);
        for (double& v : y) v = unif(rng);
        const time_series ts(std::move(y));
        const int p = rep % 3;
        EXPECT_GE(mad_sigma(ts, p).value, 0.0);
        EXPECT_GE(dif_sigma(ts, p).value, 0.0);
        EXPECT_GE(lrv_tau(ts, p).value, 0.0);
    }
}
