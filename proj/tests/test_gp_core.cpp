#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include <tipp/gp_core.hpp>

#include "oracles.hpp"

using namespace tipp;

namespace {

GpHyperParams params(double sig2, double noise2, double l1, double l2, double mean = 0.0) {
    return {sig2, noise2, l1, l2, mean};
}

Locations random_grid_locations(std::mt19937_64& rng, std::size_t count, int r = 6, int n = 10, double w = 5.0) {
    std::uniform_int_distribution<int> row(1, r), col(1, n);
    Locations out;
    while (out.size() < count) {
        const Location x{(col(rng) - 1) * w, (row(rng) - 1) * w};
        if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
    }
    return out;
}

GpHyperParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.2, 3.0);
    return params(u(rng), 0.05 * u(rng), 5.0 * u(rng), 5.0 * u(rng), u(rng));
}

} // namespace

TEST(Kernel, SameLocationAddsNoise) {
    const auto p = params(0.1542, 0.0036, 40.45, 16.0);
    EXPECT_NEAR(kernel({10, 5}, {10, 5}, p), 0.1578, 1e-15);
}

TEST(Kernel, HorizontalOffsetOfOneLengthScale) {
    EXPECT_NEAR(kernel({0, 0}, {5, 0}, params(1, 0, 5, 1)), 0.60653065971263342, 1e-15);
}

TEST(Kernel, DecaysToZeroFarAway) {
    EXPECT_LT(kernel({0, 0}, {1e4, 0}, params(1, 0.5, 5, 5)), 1e-300);
}

TEST(CovMatrix, SingleLocation) {
    const Locations one{{3, 4}};
    const auto c = cov_matrix(one, params(2, 0.5, 1, 1));
    ASSERT_EQ(c.rows(), 1);
    EXPECT_DOUBLE_EQ(c(0, 0), 2.5);
}

TEST(CovMatrix, SymmetricAndMatchesKernelCalls) {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 20; ++t) {
        const auto locs = random_grid_locations(rng, 3);
        const auto p = random_params(rng);
        const auto c = cov_matrix(locs, p);
        EXPECT_TRUE(c.isApprox(c.transpose(), 0.0));
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                const double want = oracle::kernel(locs[i], locs[j], p);
                EXPECT_NEAR(c(i, j), want, 1e-12 * std::abs(want));
            }
    }
}

TEST(PosteriorMean, NoiselessInterpolation) {
    const Locations s{{0, 0}, {5, 0}, {0, 5}};
    Eigen::VectorXd z(3);
    z << 1.5, -0.25, 3.0;
    const auto mu = posterior_mean(s, s, z, params(1, 0, 7, 4));
    EXPECT_LT((mu - z).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(PosteriorMean, ZeroResidualGivesPriorMean) {
    const Locations s{{0, 0}, {5, 5}};
    const Locations u{{10, 0}, {20, 5}, {5, 0}};
    const auto p = params(1, 0.1, 5, 5, 2.75);
    const auto mu = posterior_mean(u, s, Eigen::VectorXd::Constant(2, 2.75), p);
    for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(mu(i), 2.75);
}

TEST(PosteriorMean, MatchesDenseInverse) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> nd;
    for (int t = 0; t < 20; ++t) {
        const auto all = random_grid_locations(rng, 6);
        const Locations s(all.begin(), all.begin() + 4), u(all.begin() + 4, all.end());
        const auto p = random_params(rng);
        Eigen::VectorXd z(4);
        for (int i = 0; i < 4; ++i) z(i) = nd(rng);
        const Eigen::VectorXd expected =
            (oracle::cov(u, s, p) * oracle::cov(s, s, p).inverse() * (z.array() - p.prior_mean).matrix()).array() +
            p.prior_mean;
        EXPECT_LT((posterior_mean(u, s, z, p) - expected).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(PosteriorMean, RejectsMismatchedMeasurements) {
    const Locations s{{0, 0}};
    try {
        (void)posterior_mean(s, s, Eigen::VectorXd::Zero(2), params(1, 0, 1, 1));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
    }
}

TEST(PosteriorCov, EmptyConditioningIsPrior) {
    const Locations u{{0, 0}, {5, 0}};
    const auto p = params(1, 0.1, 5, 5);
    EXPECT_TRUE(posterior_cov(u, {}, p).isApprox(cov_matrix(u, p)));
}

TEST(PosteriorCov, MatchesSchurComplementOracle) {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 30; ++t) {
        const auto all = random_grid_locations(rng, 5);
        const Locations u(all.begin(), all.begin() + 3), s(all.begin() + 3, all.end());
        const auto p = random_params(rng);
        EXPECT_LT((posterior_cov(u, s, p) - oracle::posterior_cov(u, s, p)).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(PosteriorCov, VarianceNeverDropsBelowNoise) {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 200; ++t) {
        const auto all = random_grid_locations(rng, 7);
        const Locations y{all[0]};
        const Locations a(all.begin() + 1, all.end());
        const auto p = random_params(rng);
        EXPECT_GE(posterior_cov(y, a, p)(0, 0), p.noise_variance - 1e-9);
    }
}

TEST(GpConditioner, AgreesWithFreeFunction) {
    std::mt19937_64 rng(5);
    const auto all = random_grid_locations(rng, 6);
    const Locations s(all.begin(), all.begin() + 4), u(all.begin() + 4, all.end());
    const auto p = random_params(rng);
    const GpConditioner cond(s, p);
    EXPECT_LT((cond.posterior_cov(u) - posterior_cov(u, s, p)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(JointEntropy, ScalarGaussian) {
    Eigen::MatrixXd c(1, 1);
    c << 0.7;
    EXPECT_NEAR(joint_entropy(c), 0.5 * std::log(2 * std::numbers::pi * std::numbers::e * 0.7), 1e-14);
}

TEST(JointEntropy, BlockDiagonalIsAdditive) {
    Eigen::MatrixXd a(2, 2), b(1, 1), c = Eigen::MatrixXd::Zero(3, 3);
    a << 2.0, 0.3, 0.3, 1.0;
    b << 0.4;
    c.topLeftCorner(2, 2) = a;
    c(2, 2) = 0.4;
    EXPECT_NEAR(joint_entropy(c), joint_entropy(a) + joint_entropy(b), 1e-12);
}

TEST(JointEntropy, MatchesCofactorDeterminant) {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> nd;
    for (int t = 0; t < 20; ++t) {
        Eigen::MatrixXd g(4, 4);
        for (int i = 0; i < 16; ++i) g(i / 4, i % 4) = nd(rng);
        const Eigen::MatrixXd c = g * g.transpose() + 0.1 * Eigen::MatrixXd::Identity(4, 4);
        EXPECT_NEAR(joint_entropy(c), oracle::entropy_of(c), 1e-10);
    }
}

TEST(JointEntropy, PermutationInvariant) {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 20; ++t) {
        auto locs = random_grid_locations(rng, 6);
        const auto p = random_params(rng);
        const double h = joint_entropy(cov_matrix(locs, p));
        std::shuffle(locs.begin(), locs.end(), rng);
        EXPECT_NEAR(joint_entropy(cov_matrix(locs, p)), h, 1e-10);
    }
}

TEST(JointEntropy, SingularMatrixRaises) {
    const Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2, 2);
    try {
        (void)joint_entropy(c);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SingularSystem);
    }
}

TEST(JointEntropy, JitterRescuesNearSingular) {
    // Two noiseless points one micrometre apart with a 100 m length-scale.
    const Locations locs{{0, 0}, {1e-6, 0}};
    EXPECT_NO_THROW((void)joint_entropy(cov_matrix(locs, params(1, 0, 100, 100))));
}

TEST(ConditionalEntropy, EmptyGivenIsPrior) {
    const Locations a{{0, 0}, {0, 5}};
    const auto p = params(1, 0.1, 5, 5);
    EXPECT_DOUBLE_EQ(conditional_entropy(a, {}, p), joint_entropy(cov_matrix(a, p)));
}

TEST(ConditionalEntropy, ConditioningReducesEntropyAndChainRuleHolds) {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 50; ++t) {
        const auto all = random_grid_locations(rng, 4);
        const Locations a(all.begin(), all.begin() + 2), b(all.begin() + 2, all.end());
        const auto p = random_params(rng);
        EXPECT_LE(conditional_entropy(a, b, p), conditional_entropy(a, {}, p) + 1e-9);
        const double joint = joint_entropy(cov_matrix(all, p));
        EXPECT_NEAR(joint, conditional_entropy(b, {}, p) + conditional_entropy(a, b, p), 1e-8);
    }
}

TEST(MutualInformation, IndependentAtExtremeSeparation) {
    const Locations a{{0, 0}}, b{{1e5, 0}};
    EXPECT_NEAR(mutual_information(a, b, {}, params(1, 0.1, 5, 5)), 0.0, 1e-6);
}

TEST(MutualInformation, SymmetricAndMatchesDeterminantRatio) {
    std::mt19937_64 rng(9);
    for (int t = 0; t < 50; ++t) {
        const auto all = random_grid_locations(rng, 5);
        const Locations a(all.begin(), all.begin() + 2), b(all.begin() + 2, all.begin() + 4), g{all[4]};
        const auto p = random_params(rng);
        const double ab = mutual_information(a, b, g, p);
        EXPECT_NEAR(ab, mutual_information(b, a, g, p), 1e-8);
        EXPECT_NEAR(ab, oracle::mutual_info(a, b, g, p), 1e-8);
        EXPECT_GE(ab, -1e-10);
    }
}

TEST(MutualInformation, OverlapRejected) {
    const Locations a{{0, 0}, {5, 0}}, b{{5, 0}};
    try {
        (void)mutual_information(a, b, {}, params(1, 0.1, 5, 5));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::OverlappingSets);
    }
}
