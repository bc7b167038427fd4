#include "pglab/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "pglab/errors.hpp"
#include "pglab/format.hpp"
#include "pglab/philox.hpp"
#include "vec_ops.hpp"

namespace pglab {

void validate(const SigmaSchedule& s) {
    if (s.steps < 1) throw ValidationError("steps", "must be >= 1");
    if (!(s.sigma_min > 0.0) || !std::isfinite(s.sigma_min))
        throw ValidationError("sigma_min", "must be finite and > 0");
    if (!(s.sigma_max > s.sigma_min) || !std::isfinite(s.sigma_max))
        throw ValidationError("sigma_max", "must be finite and > sigma_min");
    if (!(s.rho > 0.0) || !std::isfinite(s.rho)) throw ValidationError("rho", "must be finite and > 0");
}

std::vector<double> karras_sigmas(const SigmaSchedule& schedule) {
    if (schedule.steps < 1) throw ContractError("sigma schedule needs at least one step");
    validate(schedule);
    const int n = schedule.steps;
    std::vector<double> sigmas;
    sigmas.reserve(static_cast<std::size_t>(n) + 1);
    if (n == 1) {
        sigmas.push_back(schedule.sigma_max);
    } else {
        const double inv_rho = 1.0 / schedule.rho;
        const double hi = std::pow(schedule.sigma_max, inv_rho);
        const double lo = std::pow(schedule.sigma_min, inv_rho);
        for (int i = 0; i < n; ++i) {
            const double frac = static_cast<double>(i) / static_cast<double>(n - 1);
            sigmas.push_back(std::pow(hi + frac * (lo - hi), schedule.rho));
        }
        // endpoints exactly as configured
        sigmas.front() = schedule.sigma_max;
        sigmas.back() = schedule.sigma_min;
    }
    sigmas.push_back(0.0);
    return sigmas;
}

std::vector<double> euler_step(std::span<const double> z, double sigma_cur, double sigma_next,
                               std::span<const double> denoised) {
    if (!(sigma_cur > 0.0)) throw ContractError("euler_step requires sigma_cur > 0");
    if (z.size() != denoised.size()) throw ContractError("z and denoised lengths differ");
    if (sigma_next == 0.0) return {denoised.begin(), denoised.end()};
    std::vector<double> slope(z.size());
    vec::lincomb(1.0 / sigma_cur, z, -1.0 / sigma_cur, denoised, slope);
    std::vector<double> out(z.size());
    vec::axpy(z, sigma_next - sigma_cur, std::span<const double>(slope), out);
    return out;
}

std::vector<double> heun_step(std::span<const double> z, double sigma_cur, double sigma_next,
                              const Denoiser& eval) {
    if (!(sigma_cur > 0.0)) throw ContractError("heun_step requires sigma_cur > 0");
    const std::vector<double> d0 = eval(z, sigma_cur);
    if (sigma_next == 0.0) return euler_step(z, sigma_cur, sigma_next, d0);

    const double h = sigma_next - sigma_cur;
    std::vector<double> slope0(z.size());
    vec::lincomb(1.0 / sigma_cur, z, -1.0 / sigma_cur, std::span<const double>(d0), slope0);
    std::vector<double> predictor(z.size());
    vec::axpy(z, h, std::span<const double>(slope0), predictor);

    const std::vector<double> d1 = eval(predictor, sigma_next);
    std::vector<double> slope1(z.size());
    vec::lincomb(1.0 / sigma_next, std::span<const double>(predictor), -1.0 / sigma_next,
                 std::span<const double>(d1), slope1);
    std::vector<double> avg(z.size());
    vec::lincomb(0.5, std::span<const double>(slope0), 0.5, std::span<const double>(slope1), avg);
    std::vector<double> out(z.size());
    vec::axpy(z, h, std::span<const double>(avg), out);
    return out;
}

GuidedDenoiser::GuidedDenoiser(Denoiser cond, Denoiser uncond, GuidanceStrategy strategy)
    : cond_(std::move(cond)),
      uncond_(std::move(uncond)),
      strategy_(strategy),
      momentum_(strategy.kind == StrategyKind::apg ? strategy.params.beta : 0.0) {
    validate(strategy_.params);
}

std::vector<double> GuidedDenoiser::operator()(std::span<const double> z, double sigma, bool commit,
                                               StepRecord* record) {
    if (strategy_.kind == StrategyKind::none && record == nullptr) return cond_(z, sigma);

    const std::vector<double> c = cond_(z, sigma);
    const std::vector<double> u = uncond_(z, sigma);
    const DenoisedPair<double> pair{c, u};
    if (record != nullptr) {
        const std::vector<double> delta = update_direction(pair);
        record->update_norm = vec::norm(std::span<const double>(delta));
        const double w = strategy_.kind == StrategyKind::none ? 1.0 : strategy_.params.w;
        try {
            const GainFactor g = gain_factor(pair, w);
            record->gain = g.value;
            record->gain_alignment = g.alignment;
        } catch (const DegenerateReferenceError&) {
            record->gain = std::numeric_limits<double>::quiet_NaN();
            record->gain_alignment = 0;
        }
    }

    switch (strategy_.kind) {
        case StrategyKind::none:
            return c;
        case StrategyKind::cfg:
            return cfg_combine(pair, strategy_.params.w);
        case StrategyKind::apg:
            if (commit) return apg_update(pair, strategy_.params, &momentum_);
            {
                MomentumState<double> scratch = momentum_;
                return apg_update(pair, strategy_.params, &scratch);
            }
    }
    return c;
}

namespace {

void check_finite(std::span<const double> z, int step, double sigma) {
    if (vec::all_finite(z)) return;
    std::ostringstream msg;
    msg << "non-finite state at step " << step << " (sigma = " << sigma << ")";
    throw SamplingError(step, sigma, msg.str());
}

}  // namespace

Trajectory sample(const Denoiser& cond, const Denoiser& uncond, std::size_t dim,
                  const GuidanceStrategy& strategy, const SigmaSchedule& schedule, std::uint64_t seed, std::uint64_t stream,
                  const SampleOptions& options) {
    const std::vector<double> sigmas = karras_sigmas(schedule);
    GuidedDenoiser guided(cond, uncond, strategy);

    Trajectory traj;
    traj.seed = seed;
    traj.stream = stream;

    if (dim == 0) throw ContractError("sample dimension must be >= 1");
    NormalStream rng(seed, stream);
    std::vector<double> z(dim);
    for (double& v : z) v = schedule.sigma_max * rng.next();
    traj.states.push_back({sigmas.front(), z});

    for (std::size_t i = 0; i + 1 < sigmas.size(); ++i) {
        const double s_cur = sigmas[i];
        const double s_next = sigmas[i + 1];
        const int step = static_cast<int>(i);
        StepRecord rec;
        rec.step = step;
        rec.sigma = s_cur;
        bool first_eval = true;

        const Denoiser eval = [&](std::span<const double> x, double s) {
            const bool commit = first_eval || options.momentum == MomentumMode::per_evaluation;
            StepRecord* r = (first_eval && options.record_diagnostics) ? &rec : nullptr;
            first_eval = false;
            return guided(x, s, commit, r);
        };

        if (options.rule == StepRule::euler) {
            const std::vector<double> d = eval(z, s_cur);
            z = euler_step(z, s_cur, s_next, d);
        } else {
            z = heun_step(z, s_cur, s_next, eval);
        }
        check_finite(z, step, s_cur);
        if (options.record_diagnostics) traj.records.push_back(rec);
        if (options.keep_states || s_next == 0.0) traj.states.push_back({s_next, z});
    }
    return traj;
}

DriftSummary mode_drift(std::span<const std::vector<double>> samples, const GaussianMixture& mix) {
    if (samples.empty()) throw ContractError("mode_drift needs at least one sample");
    DriftSummary out;
    out.count = samples.size();
    out.mode_counts.assign(mix.components(), 0);
    out.distances.reserve(samples.size());
    const double scale = mix.component_sigma() * std::sqrt(static_cast<double>(mix.dim()));

    std::size_t within = 0;
    double sum = 0.0;
    for (const auto& x : samples) {
        if (x.size() != mix.dim()) throw ContractError("sample dimension differs from mixture");
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_i = 0;
        for (std::size_t i = 0; i < mix.components(); ++i) {
            const double d2 = vec::sqdist(std::span<const double>(x), mix.mean(i));
            if (d2 < best) {
                best = d2;
                best_i = i;
            }
        }
        const double dist = std::sqrt(best);
        out.distances.push_back(dist);
        ++out.mode_counts[best_i];
        sum += dist;
        if (dist <= 3.0 * scale) ++within;
    }
    const auto n = static_cast<double>(samples.size());
    out.mean = sum / n;
    out.mean_normalized = out.mean / scale;
    out.fraction_within = static_cast<double>(within) / n;

    std::vector<double> sorted = out.distances;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t m = sorted.size();
    out.median = m % 2 == 1 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
    out.max = sorted.back();
    return out;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, std::size_t coords) {
    out << "step,sigma";
    for (std::size_t k = 0; k < coords; ++k) out << ",z" << k;
    out << ",update_norm,gain\n";
    for (std::size_t i = 0; i < trajectory.states.size(); ++i) {
        const auto& st = trajectory.states[i];
        out << i << ',' << format_double(st.sigma);
        for (std::size_t k = 0; k < coords; ++k)
            out << ',' << (k < st.z.size() ? format_double(st.z[k]) : std::string());
        if (i < trajectory.records.size()) {
            out << ',' << format_double(trajectory.records[i].update_norm) << ','
                << format_double(trajectory.records[i].gain);
        } else {
            out << ",,";
        }
        out << '\n';
    }
}

}  // namespace pglab
