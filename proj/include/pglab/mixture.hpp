#pragma once

// Isotropic Gaussian mixture data distribution with closed-form noisy
// marginals, scores and posterior-mean denoisers under z = x + sigma * eps.

#include <cstddef>
#include <span>
#include <vector>

namespace pglab {

class GaussianMixture {
public:
    // Throws ContractError unless all means share one nonzero length,
    // component_sigma > 0, weights are positive and sum to 1 within 1e-12.
    GaussianMixture(std::vector<std::vector<double>> means, double component_sigma,
                    std::vector<double> weights);

    // Equal-weight pair at -magnitude * 1 and +magnitude * 1.
    static GaussianMixture symmetric_pair(std::size_t dim, double magnitude, double component_sigma);

    // One component per entry of `offsets`, each broadcast to `dim` coordinates.
    static GaussianMixture broadcast(std::size_t dim, std::span<const double> offsets,
                                     double component_sigma, std::vector<double> weights);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t components() const noexcept { return means_.size(); }
    double component_sigma() const noexcept { return component_sigma_; }
    std::span<const double> mean(std::size_t i) const { return means_.at(i); }
    std::span<const double> weights() const noexcept { return weights_; }

    // Mixture containing only component i (weight 1).
    GaussianMixture component(std::size_t i) const;

private:
    std::vector<std::vector<double>> means_;
    double component_sigma_;
    std::vector<double> weights_;
    std::vector<double> log_weights_;
    std::size_t dim_;

    friend std::vector<double> responsibilities(const GaussianMixture&, std::span<const double>, double);
    friend double marginal_log_density(const GaussianMixture&, std::span<const double>, double);
};

// log sum_i w_i N(z; mu_i, (s_c^2 + sigma^2) I), evaluated with log-sum-exp.
double marginal_log_density(const GaussianMixture& mix, std::span<const double> z, double sigma);

// Posterior component probabilities gamma_i(z) at noise level sigma.
std::vector<double> responsibilities(const GaussianMixture& mix, std::span<const double> z, double sigma);

// grad_z log p_sigma(z)
std::vector<double> score(const GaussianMixture& mix, std::span<const double> z, double sigma);

// E[x | z] via Tweedie: z + sigma^2 * score.
std::vector<double> denoiser_uncond(const GaussianMixture& mix, std::span<const double> z, double sigma);

// E[x | z] as the responsibility-weighted per-component posterior means.
std::vector<double> posterior_mean(const GaussianMixture& mix, std::span<const double> z, double sigma);

// Posterior mean under component `class_index` alone.
std::vector<double> denoiser_cond(const GaussianMixture& mix, std::size_t class_index,
                                  std::span<const double> z, double sigma);

}  // namespace pglab
