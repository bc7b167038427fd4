#pragma once

// Deterministic probability-flow ODE sampling over a decreasing sigma
// schedule, with guidance applied to the denoised prediction at every
// denoiser evaluation.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "pglab/guidance.hpp"
#include "pglab/mixture.hpp"

namespace pglab {

struct SigmaSchedule {
    double sigma_min = 0.002;
    double sigma_max = 80.0;
    double rho = 7.0;
    int steps = 64;
};

void validate(const SigmaSchedule& schedule);

// `steps` strictly decreasing values from sigma_max to sigma_min, then 0.
std::vector<double> karras_sigmas(const SigmaSchedule& schedule);

enum class StepRule { euler, heun };

// Whether the Heun corrector evaluation advances the momentum buffer.
enum class MomentumMode { per_evaluation, per_step };

enum class StrategyKind { none, cfg, apg };

struct GuidanceStrategy {
    StrategyKind kind = StrategyKind::none;
    GuidanceParams params{};

    static GuidanceStrategy unguided() { return {}; }
    static GuidanceStrategy cfg(double w) { return {StrategyKind::cfg, GuidanceParams{w, 1.0, 0.0, 0.0}}; }
    static GuidanceStrategy apg(const GuidanceParams& p) { return {StrategyKind::apg, p}; }
};

// Denoised prediction D(z, sigma).
using Denoiser = std::function<std::vector<double>(std::span<const double> z, double sigma)>;

std::vector<double> euler_step(std::span<const double> z, double sigma_cur, double sigma_next,
                               std::span<const double> denoised);

std::vector<double> heun_step(std::span<const double> z, double sigma_cur, double sigma_next,
                              const Denoiser& eval);

struct StepRecord {
    int step = 0;
    double sigma = 0.0;
    double update_norm = 0.0;  // |cond - uncond| at the step's first evaluation
    double gain = 0.0;         // NaN when |cond| is degenerate
    int gain_alignment = 0;
};

struct TrajectoryState {
    double sigma;
    std::vector<double> z;
};

struct Trajectory {
    std::vector<TrajectoryState> states;  // steps + 1 entries unless keep_states is off
    std::vector<StepRecord> records;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    std::span<const double> terminal() const { return states.back().z; }
};

struct SampleOptions {
    StepRule rule = StepRule::heun;
    MomentumMode momentum = MomentumMode::per_evaluation;
    bool keep_states = true;  // false keeps only the initial and terminal states
    bool record_diagnostics = true;
};

// z_0 = sigma_max * eps with eps from NormalStream(seed, stream).
// Throws SamplingError if a state turns non-finite.
Trajectory sample(const Denoiser& cond, const Denoiser& uncond, std::size_t dim,
                  const GuidanceStrategy& strategy, const SigmaSchedule& schedule,
                  std::uint64_t seed, std::uint64_t stream = 0,
                  const SampleOptions& options = {});

// The guided prediction, as used inside sample(). Owns the trajectory's
// momentum buffer.
class GuidedDenoiser {
public:
    GuidedDenoiser(Denoiser cond, Denoiser uncond, GuidanceStrategy strategy);

    // commit = false evaluates against a scratch copy of the momentum buffer.
    std::vector<double> operator()(std::span<const double> z, double sigma, bool commit = true,
                                   StepRecord* record = nullptr);

    const MomentumState<double>& momentum() const noexcept { return momentum_; }

private:
    Denoiser cond_;
    Denoiser uncond_;
    GuidanceStrategy strategy_;
    MomentumState<double> momentum_;
};

struct DriftSummary {
    std::size_t count = 0;
    double mean = 0.0;  // Euclidean distance to nearest component mean
    double median = 0.0;
    double max = 0.0;
    double mean_normalized = 0.0;  // distance / (sigma_c * sqrt(d))
    double fraction_within = 0.0;  // share with distance <= 3 sigma_c sqrt(d)
    std::vector<std::size_t> mode_counts;  // samples nearest to each component
    std::vector<double> distances;
};

DriftSummary mode_drift(std::span<const std::vector<double>> samples, const GaussianMixture& mix);

// step,sigma,z0..z{k-1},update_norm,gain
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, std::size_t coords);

}  // namespace pglab
