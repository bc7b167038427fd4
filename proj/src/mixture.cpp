#include "pglab/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "pglab/errors.hpp"
#include "vec_ops.hpp"

namespace pglab {

GaussianMixture::GaussianMixture(std::vector<std::vector<double>> means, double component_sigma,
                                 std::vector<double> weights)
    : means_(std::move(means)), component_sigma_(component_sigma), weights_(std::move(weights)) {
    if (means_.empty()) throw ContractError("mixture needs at least one component");
    if (weights_.size() != means_.size()) throw ContractError("one weight per component required");
    dim_ = means_.front().size();
    if (dim_ == 0) throw ContractError("mixture dimension must be >= 1");
    for (const auto& m : means_) {
        if (m.size() != dim_) throw ContractError("all component means must have the same length");
        if (!vec::all_finite(std::span<const double>(m))) throw ContractError("component means must be finite");
    }
    if (!(component_sigma_ > 0.0) || !std::isfinite(component_sigma_))
        throw ContractError("component sigma must be finite and > 0");
    double total = 0.0;
    for (double w : weights_) {
        if (!(w > 0.0)) throw ContractError("mixture weights must be > 0");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        std::ostringstream msg;
        msg << "mixture weights must sum to 1 (got " << total << ")";
        throw ContractError(msg.str());
    }
    log_weights_.resize(weights_.size());
    std::transform(weights_.begin(), weights_.end(), log_weights_.begin(),
                   [](double w) { return std::log(w); });
}

GaussianMixture GaussianMixture::symmetric_pair(std::size_t dim, double magnitude,
                                                double component_sigma) {
    const double offsets[] = {-magnitude, magnitude};
    return broadcast(dim, offsets, component_sigma, {0.5, 0.5});
}

GaussianMixture GaussianMixture::broadcast(std::size_t dim, std::span<const double> offsets,
                                           double component_sigma, std::vector<double> weights) {
    std::vector<std::vector<double>> means;
    means.reserve(offsets.size());
    for (double c : offsets) means.emplace_back(dim, c);
    return GaussianMixture(std::move(means), component_sigma, std::move(weights));
}

GaussianMixture GaussianMixture::component(std::size_t i) const {
    if (i >= means_.size()) throw ContractError("component index out of range");
    return GaussianMixture({means_[i]}, component_sigma_, {1.0});
}

namespace {

void check_point(const GaussianMixture& mix, std::span<const double> z, double sigma) {
    if (z.size() != mix.dim()) {
        std::ostringstream msg;
        msg << "point has dimension " << z.size() << ", mixture has " << mix.dim();
        throw ContractError(msg.str());
    }
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ContractError("noise level must be finite and >= 0");
}

double total_variance(const GaussianMixture& mix, double sigma) {
    return mix.component_sigma() * mix.component_sigma() + sigma * sigma;
}

// log w_i + log N(z; mu_i, var I) for every component.
std::vector<double> component_log_terms(const GaussianMixture& mix, std::span<const double> z,
                                        double sigma, std::span<const double> log_weights) {
    const double var = total_variance(mix, sigma);
    const double log_norm = -0.5 * static_cast<double>(mix.dim()) * std::log(2.0 * std::numbers::pi * var);
    std::vector<double> terms(mix.components());
    for (std::size_t i = 0; i < terms.size(); ++i)
        terms[i] = log_weights[i] + log_norm - 0.5 * vec::sqdist(z, mix.mean(i)) / var;
    return terms;
}

double log_sum_exp(std::span<const double> terms) {
    const double top = *std::max_element(terms.begin(), terms.end());
    double acc = 0.0;
    for (double t : terms) acc += std::exp(t - top);
    return top + std::log(acc);
}

}  // namespace

double marginal_log_density(const GaussianMixture& mix, std::span<const double> z, double sigma) {
    check_point(mix, z, sigma);
    return log_sum_exp(component_log_terms(mix, z, sigma, mix.log_weights_));
}

std::vector<double> responsibilities(const GaussianMixture& mix, std::span<const double> z, double sigma) {
    check_point(mix, z, sigma);
    std::vector<double> terms = component_log_terms(mix, z, sigma, mix.log_weights_);
    // shift by the max and divide; subtracting a large log-normalizer loses digits
    const double top = *std::max_element(terms.begin(), terms.end());
    double total = 0.0;
    for (double& t : terms) total += (t = std::exp(t - top));
    for (double& t : terms) t /= total;
    return terms;
}

std::vector<double> score(const GaussianMixture& mix, std::span<const double> z, double sigma) {
    const std::vector<double> gamma = responsibilities(mix, z, sigma);
    const double inv_var = 1.0 / total_variance(mix, sigma);
    // sum_i gamma_i (mu_i - z) / var = (sum_i gamma_i mu_i - z) / var
    std::vector<double> out(z.size(), 0.0);
    for (std::size_t i = 0; i < gamma.size(); ++i)
        vec::axpy(std::span<const double>(out), gamma[i] * inv_var, mix.mean(i), out);
    vec::axpy(std::span<const double>(out), -inv_var, z, out);
    return out;
}

std::vector<double> denoiser_uncond(const GaussianMixture& mix, std::span<const double> z, double sigma) {
    const std::vector<double> s = score(mix, z, sigma);
    std::vector<double> out(z.size());
    vec::axpy(z, sigma * sigma, std::span<const double>(s), out);
    return out;
}

std::vector<double> posterior_mean(const GaussianMixture& mix, std::span<const double> z, double sigma) {
    const std::vector<double> gamma = responsibilities(mix, z, sigma);
    const double shrink = mix.component_sigma() * mix.component_sigma() / total_variance(mix, sigma);
    std::vector<double> out(z.size(), 0.0);
    std::vector<double> component_mean(z.size());
    for (std::size_t i = 0; i < gamma.size(); ++i) {
        // mu_i + shrink * (z - mu_i)
        vec::lincomb(1.0 - shrink, mix.mean(i), shrink, z, component_mean);
        vec::axpy(std::span<const double>(out), gamma[i], std::span<const double>(component_mean), out);
    }
    return out;
}

std::vector<double> denoiser_cond(const GaussianMixture& mix, std::size_t class_index,
                                  std::span<const double> z, double sigma) {
    if (class_index >= mix.components()) {
        std::ostringstream msg;
        msg << "class index " << class_index << " out of range for " << mix.components() << " components";
        throw ContractError(msg.str());
    }
    check_point(mix, z, sigma);
    const double shrink = mix.component_sigma() * mix.component_sigma() / total_variance(mix, sigma);
    // (1 - shrink) mu + shrink z; shrink is exactly 1 at sigma = 0
    std::vector<double> out(z.size());
    vec::lincomb(1.0 - shrink, mix.mean(class_index), shrink, z, out);
    return out;
}

}  // namespace pglab
