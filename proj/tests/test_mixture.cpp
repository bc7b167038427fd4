#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "pglab/errors.hpp"
#include "pglab/mixture.hpp"
#include "support/oracles.hpp"

using namespace pglab;
using V = std::vector<double>;

TEST(Mixture, ConstructionValidates) {
    EXPECT_THROW(GaussianMixture({}, 1.0, {}), ContractError);
    EXPECT_THROW(GaussianMixture({{0.0}, {1.0, 2.0}}, 1.0, {0.5, 0.5}), ContractError);
    EXPECT_THROW(GaussianMixture({{0.0}}, 0.0, {1.0}), ContractError);
    EXPECT_THROW(GaussianMixture({{0.0}, {1.0}}, 1.0, {0.6, 0.5}), ContractError);
    EXPECT_THROW(GaussianMixture({{0.0}, {1.0}}, 1.0, {1.0, 0.0}), ContractError);
    EXPECT_NO_THROW(GaussianMixture({{0.0}, {1.0}}, 1.0, {0.25, 0.75}));
}

TEST(Mixture, ToyDefaults) {
    const auto mix = GaussianMixture::symmetric_pair(500, 2.0, 0.25);
    EXPECT_EQ(mix.dim(), 500u);
    EXPECT_EQ(mix.components(), 2u);
    EXPECT_EQ(mix.mean(0)[499], -2.0);
    EXPECT_EQ(mix.mean(1)[0], 2.0);
}

TEST(LogDensity, WorkedExamples) {
    const GaussianMixture std_normal({{0.0}}, 1.0, {1.0});
    EXPECT_NEAR(marginal_log_density(std_normal, V{0.0}, 0.0), -0.5 * std::log(2 * std::numbers::pi), 1e-15);
    const auto pair = GaussianMixture::symmetric_pair(1, 1.5, 0.4);
    const GaussianMixture one({{1.5}}, 0.4, {1.0});
    EXPECT_NEAR(marginal_log_density(pair, V{0.0}, 0.7), marginal_log_density(one, V{0.0}, 0.7), 1e-14);
}

TEST(LogDensity, MatchesQuadrature3D) {
    // Isotropic components factor over coordinates, so the 3-D convolution
    // integral is a product of 1-D integrals per component.
    oracle::Gen gen(51);
    const auto mix = GaussianMixture::symmetric_pair(3, 2.0, 0.25);
    for (int t = 0; t < 10; ++t) {
        const double sigma = gen.log_uniform(0.1, 5.0);
        const V z = gen.vec(3, 2.0);
        double p = 0.0;
        for (double m : {-2.0, 2.0}) {
            double prod = 0.5;
            for (double zi : z) {
                const oracle::Mixture1D comp{{m}, {1.0}, 0.25};
                prod *= comp.noisy_density(zi, sigma);
            }
            p += prod;
        }
        EXPECT_NEAR(std::exp(marginal_log_density(mix, z, sigma)) / p, 1.0, 1e-6);
    }
}

TEST(Score, WorkedExamples) {
    const GaussianMixture one({{1.0, -2.0}}, 0.3, {1.0});
    EXPECT_EQ(score(one, V{1.0, -2.0}, 0.5), (V{0.0, 0.0}));
    const auto pair = GaussianMixture::symmetric_pair(4, 2.0, 0.25);
    for (double s : score(pair, V{0, 0, 0, 0}, 0.8)) EXPECT_NEAR(s, 0.0, 1e-15);
}

TEST(Score, MatchesFiniteDifferences) {
    oracle::Gen gen(52);
    const auto mix = GaussianMixture::symmetric_pair(2, 2.0, 0.25);
    const V z{1, 1};
    const V s = score(mix, z, 1.0);
    const std::vector<std::size_t> all{0, 1};
    const V g = oracle::fd_gradient([&](std::span<const double> x) { return marginal_log_density(mix, x, 1.0); },
                                    z, 1e-5, all);
    EXPECT_LE(oracle::rel_err(g, s), 1e-5);
    for (std::size_t d = 1; d <= 5; ++d) {
        const auto m = GaussianMixture::symmetric_pair(d, 2.0, 0.25);
        std::vector<std::size_t> idx(d);
        for (std::size_t i = 0; i < d; ++i) idx[i] = i;
        for (double sigma : {0.1, 1.0, 10.0}) {
            for (int t = 0; t < 10; ++t) {
                const V zz = gen.vec(d, 2.0 + sigma);
                const V fd = oracle::fd_gradient(
                    [&](std::span<const double> x) { return marginal_log_density(m, x, sigma); }, zz, 1e-5, idx);
                EXPECT_LE(oracle::rel_err(fd, score(m, zz, sigma)), 1e-5);
            }
        }
    }
}

TEST(Denoiser, WorkedExamples) {
    const auto mix = GaussianMixture::symmetric_pair(3, 2.0, 0.25);
    const V z{0.3, -1.0, 4.0};
    EXPECT_EQ(denoiser_uncond(mix, z, 0.0), z);
    EXPECT_EQ(denoiser_cond(mix, 1, z, 0.0), z);
    const GaussianMixture one({{2.0}}, 0.25, {1.0});
    EXPECT_NEAR(denoiser_uncond(one, V{5.0}, 1e6)[0], 2.0, 1e-3);
    EXPECT_NEAR(denoiser_cond(one, 0, V{0.0}, 1.0)[0], 1.88235, 5e-6);
    EXPECT_NEAR(denoiser_cond(one, 0, V{0.0}, 1.0)[0], 2.0 - 2.0 * 0.0625 / 1.0625, 1e-15);
    const V mu(mix.mean(1).begin(), mix.mean(1).end());
    EXPECT_EQ(denoiser_cond(mix, 1, mu, 3.0), mu);
    EXPECT_THROW(denoiser_cond(mix, 2, z, 1.0), ContractError);
}

TEST(Denoiser, QuadratureOracle1D) {
    const auto mix = GaussianMixture::symmetric_pair(1, 2.0, 0.25);
    const oracle::Mixture1D ref{{-2.0, 2.0}, {0.5, 0.5}, 0.25};
    EXPECT_NEAR(denoiser_uncond(mix, V{0.5}, 1.0)[0], ref.posterior_mean(0.5, 1.0), 1e-6);
    for (double z : {-3.0, -0.2, 0.0, 1.1, 2.5})
        for (double s : {0.05, 0.5, 3.0}) EXPECT_NEAR(denoiser_uncond(mix, V{z}, s)[0], ref.posterior_mean(z, s), 1e-6);
    const GaussianMixture one({{2.0}}, 0.25, {1.0});
    const oracle::Mixture1D ref1{{2.0}, {1.0}, 0.25};
    EXPECT_NEAR(denoiser_cond(mix, 1, V{0.0}, 1.0)[0], ref1.posterior_mean(0.0, 1.0), 1e-6);
}

TEST(Denoiser, TweedieMatchesPosteriorMean) {
    oracle::Gen gen(53);
    for (int t = 0; t < 100; ++t) {
        const std::size_t d = gen.dim(1, 500);
        const std::size_t k = gen.size(1, 4);
        std::vector<V> means;
        for (std::size_t i = 0; i < k; ++i) means.push_back(gen.vec(d, 2.0));
        V w(k, 1.0 / static_cast<double>(k));
        const GaussianMixture mix(means, gen.uniform(0.1, 1.0), w);
        const double sigma = gen.log_uniform(1e-3, 100);
        const V z = gen.vec(d, 1.0 + sigma);
        EXPECT_LE(oracle::max_abs_diff(denoiser_uncond(mix, z, sigma), posterior_mean(mix, z, sigma)), 1e-10);
    }
}

TEST(Denoiser, SingleComponentConsistency) {
    oracle::Gen gen(54);
    for (int t = 0; t < 50; ++t) {
        const std::size_t d = gen.dim(1, 500);
        const GaussianMixture one({gen.vec(d)}, 0.25, {1.0});
        const double sigma = gen.log_uniform(1e-3, 100);
        const V z = gen.vec(d, sigma);
        EXPECT_LE(oracle::max_abs_diff(denoiser_cond(one, 0, z, sigma), denoiser_uncond(one, z, sigma)), 1e-12);
        EXPECT_EQ(denoiser_cond(one, 0, z, sigma), posterior_mean(one, z, sigma));
    }
}

TEST(Responsibilities, NormalizedInFarTails) {
    oracle::Gen gen(55);
    const auto mix = GaussianMixture::symmetric_pair(500, 2.0, 0.25);
    for (double far : {1.0, 1e2, 1e4, 1e6}) {
        const V z = gen.vec(500, far * 0.25);
        for (double sigma : {0.0, 1e-3, 1.0, 80.0}) {
            const V g = responsibilities(mix, z, sigma);
            double sum = 0.0;
            for (double v : g) {
                EXPECT_GE(v, 0.0);
                EXPECT_TRUE(std::isfinite(v));
                sum += v;
            }
            EXPECT_NEAR(sum, 1.0, 1e-12);
            EXPECT_TRUE(std::isfinite(marginal_log_density(mix, z, sigma)));
        }
    }
}

TEST(Responsibilities, Symmetry) {
    const auto mix = GaussianMixture::symmetric_pair(10, 2.0, 0.25);
    const V g = responsibilities(mix, V(10, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(g[0], 0.5);
    EXPECT_DOUBLE_EQ(g[1], 0.5);
}
