#include "acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "../support/oracles.hpp"
#include "pglab/errors.hpp"
#include "pglab/experiment.hpp"
#include "pglab/format.hpp"
#include "pglab/guidance.hpp"
#include "pglab/image_io.hpp"
#include "pglab/image_metrics.hpp"
#include "pglab/mixture.hpp"
#include "pglab/prediction.hpp"
#include "pglab/sampler.hpp"
#include "toy_reference.hpp"

namespace pglab::acceptance {
namespace {

using oracle::Vec;

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(3);
    s << std::scientific << v;
    return s.str();
}

class Checks {
public:
    explicit Checks(CriterionResult& result) : result_(result) {}

    bool expect(bool ok, const std::string& what) {
        result_.details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
        all_ = all_ && ok;
        return ok;
    }
    // Tracks the worst value of a metric that must stay at or below `limit`.
    bool bound(const std::string& what, double worst, double limit) {
        return expect(worst <= limit, what + ": worst " + fmt(worst) + " (limit " + fmt(limit) + ")");
    }
    bool all() const { return all_; }

private:
    CriterionResult& result_;
    bool all_ = true;
};

template <class T>
DenoisedPair<T> pair_of(const std::vector<T>& c, const std::vector<T>& u) {
    return {std::span<const T>(c), std::span<const T>(u)};
}

// ---------------------------------------------------------------- 1
void algebraic_identities(Checks& c) {
    oracle::Gen gen(1001);
    double eq_err = 0.0, grad_err = 0.0;
    bool degenerate_exact = true, degenerate_exact_f = true, w1_exact = true;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t d = gen.dim(1, 4096);
        const double scale = gen.log_uniform(1e-3, 1e3);
        const Vec cond = gen.vec(d, scale), uncond = gen.vec(d, scale);
        const double w = gen.uniform(0.0, 12.0);
        const auto pair = pair_of(cond, uncond);

        const Vec combined = cfg_combine(pair, w);
        eq_err = std::max(eq_err, oracle::rel_err(combined, oracle::cfg_eq1(cond, uncond, w)));

        // gradient of 0.5 |cond - uncond|^2 with respect to cond
        const auto coords = gen.pick(d, d);
        const auto f = [&](std::span<const double> x) {
            return cfg_objective(DenoisedPair<double>{x, std::span<const double>(uncond)});
        };
        const Vec g = oracle::fd_gradient(f, cond, 1e-5 * scale, coords);
        Vec lhs(coords.size()), rhs(coords.size());
        for (std::size_t k = 0; k < coords.size(); ++k) {
            lhs[k] = combined[coords[k]];
            rhs[k] = cond[coords[k]] + (w - 1.0) * g[k];
        }
        grad_err = std::max(grad_err, oracle::rel_err(rhs, lhs));

        const Vec apg = apg_update<double>(pair, GuidanceParams{w, 1.0, 0.0, 0.0}, nullptr);
        degenerate_exact = degenerate_exact && apg == combined;

        std::vector<float> cf(cond.begin(), cond.end()), uf(uncond.begin(), uncond.end());
        const auto pf = pair_of(cf, uf);
        degenerate_exact_f = degenerate_exact_f &&
                             apg_update<float>(pf, GuidanceParams{w, 1.0, 0.0, 0.0}, nullptr) == cfg_combine(pf, w);

        MomentumState<double> state(gen.uniform(-0.9, 0.0));
        const GuidanceParams any{1.0, gen.uniform(-1.0, 2.0), gen.uniform(0.0, 2.0) * scale, state.beta()};
        w1_exact = w1_exact && cfg_combine(pair, 1.0) == cond && apg_update(pair, any, &state) == cond;
    }
    c.bound("CFG Eq.1 form vs canonical form, relative error", eq_err, 1e-12);
    c.bound("cfg_combine vs cond + (w-1) * finite-difference gradient, relative error", grad_err, 1e-4);
    c.expect(degenerate_exact, "APG(eta=1, r off, beta=0) == CFG bit-for-bit (double)");
    c.expect(degenerate_exact_f, "APG(eta=1, r off, beta=0) == CFG bit-for-bit (float storage)");
    c.expect(w1_exact, "w=1 returns cond unchanged for CFG and APG");

    const Vec c1{1, 0}, u0{0, 0}, c2{2, 1}, u1{1, 1};
    c.expect(cfg_combine(pair_of(c1, u0), 1.0) == Vec{1, 0} && cfg_combine(pair_of(c1, u0), 3.0) == Vec{3, 0} &&
                 cfg_combine(pair_of(c2, u1), 2.0) == Vec{3, 1},
             "cfg_combine worked examples");
}

// ---------------------------------------------------------------- 2
void projection_suite(Checks& c) {
    oracle::Gen gen(2002);
    double recon = 0.0, orth = 0.0, oracle_gap = 0.0, clamp_norm_excess = 0.0, momentum_err = 0.0;
    bool idempotent = true, identity_inside = true;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t d = gen.dim(2, 4096);
        const Vec delta = gen.vec(d, gen.log_uniform(1e-3, 1e3));
        const Vec ref = gen.vec(d, gen.log_uniform(1e-3, 1e3));
        const auto s = split_parallel_orthogonal<double>(delta, ref);
        Vec sum(d);
        for (std::size_t i = 0; i < d; ++i) sum[i] = s.parallel[i] + s.orthogonal[i];
        recon = std::max(recon, oracle::max_abs_diff(sum, delta));
        orth = std::max(orth, std::abs(static_cast<double>(oracle::dot(s.orthogonal, ref))) /
                                  (oracle::norm(delta) * oracle::norm(ref)));
        const auto o = oracle::project(delta, ref);
        oracle_gap = std::max(oracle_gap, oracle::max_abs_diff(s.parallel, o.parallel) /
                                              std::max(oracle::norm(delta), 1e-300));

        const double r = gen.log_uniform(1e-3, 1e3);
        const Vec once = clamp_norm<double>(delta, r);
        const Vec twice = clamp_norm<double>(once, r);
        idempotent = idempotent && once == twice;
        clamp_norm_excess = std::max(clamp_norm_excess, (oracle::norm(once) - r) / r);
        if (oracle::norm(delta) <= r) identity_inside = identity_inside && once == delta;

        const double beta = gen.uniform(-0.99, 0.99);
        const std::size_t steps = gen.size(1, 64);
        const std::size_t md = gen.dim(1, 512);
        std::vector<Vec> deltas;
        MomentumState<double> state(beta);
        Vec last;
        for (std::size_t k = 0; k < steps; ++k) {
            deltas.push_back(gen.vec(md));
            last = momentum_update<double>(state, deltas.back());
        }
        momentum_err = std::max(momentum_err, oracle::max_abs_diff(last, oracle::momentum_unrolled(deltas, beta)));
    }
    c.bound("parallel + orthogonal reconstructs delta, max abs error", recon, 1e-9);
    c.bound("|<orthogonal, ref>| / (|delta| |ref|)", orth, 1e-8);
    c.bound("parallel component vs extended-precision oracle, relative", oracle_gap, 1e-12);
    c.expect(idempotent, "clamp_norm(clamp_norm(x, r), r) == clamp_norm(x, r)");
    c.bound("clamped norm excess over r, relative", clamp_norm_excess, 1e-12);
    c.expect(identity_inside, "clamp_norm is the identity inside the sphere");
    c.bound("momentum buffer vs unrolled-sum oracle", momentum_err, 1e-10);

    const Vec d1{1, 2, 3}, r1{1, 1, 1};
    const auto s = split_parallel_orthogonal<double>(d1, r1);
    c.expect(s.parallel == Vec{2, 2, 2} && s.orthogonal == Vec{-1, 0, 1}, "split of [1,2,3] against [1,1,1]");
    const Vec clamp = clamp_norm<double>(Vec{3, 4}, 1.0);
    c.expect(std::abs(clamp[0] - 0.6) <= 1e-15 && std::abs(clamp[1] - 0.8) <= 1e-15, "clamp of [3,4] to r=1");
    MomentumState<double> m(-0.75);
    const Vec one{1};
    const double a = momentum_update<double>(m, one)[0];
    const double b = momentum_update<double>(m, one)[0];
    const double e = momentum_update<double>(m, one)[0];
    c.expect(a == 1.0 && b == 0.25 && e == 0.8125, "beta=-0.75 momentum sequence 1, 0.25, 0.8125");
    const Vec cond{1, 0}, uncond{0, -1};
    c.expect(apg_update<double>(pair_of(cond, uncond), GuidanceParams{2.0, 0.0, 0.0, 0.0}, nullptr) == Vec{1, 1},
             "APG worked example: projection removes the parallel part");
}

// ---------------------------------------------------------------- 3
void conversion_suite(Checks& c) {
    oracle::Gen gen(3003);
    double synth = 0.0, trip = 0.0, cross = 0.0, wide_cond = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t d = gen.dim(1, 256);
        const Vec x = gen.vec(d), eps = gen.vec(d);
        const double angle = gen.uniform(1e-3, std::numbers::pi / 2 - 1e-3);
        const double a = std::cos(angle), s = std::sin(angle);
        Vec z(d), v(d);
        for (std::size_t i = 0; i < d; ++i) {
            z[i] = a * x[i] + s * eps[i];
            v[i] = a * eps[i] - s * x[i];
        }
        const auto dd = ScheduleParams::ddpm(a, s);
        const Vec via_eps = to_denoised(PredictionKind::EpsilonDDPM, z, eps, dd);
        const Vec via_v = to_denoised(PredictionKind::VelocityDDPM, z, v, dd);
        synth = std::max({synth, oracle::max_abs_diff(via_eps, x), oracle::max_abs_diff(via_v, x)});
        cross = std::max(cross, oracle::max_abs_diff(via_eps, via_v));

        const double t = gen.uniform(0.0, 1.0);
        Vec zr(d), vr(d);
        for (std::size_t i = 0; i < d; ++i) {
            zr[i] = (1.0 - t) * x[i] + t * eps[i];
            vr[i] = eps[i] - x[i];
        }
        const auto rf = ScheduleParams::rectified_flow(t);
        synth = std::max(synth, oracle::max_abs_diff(to_denoised(PredictionKind::VelocityRF, zr, vr, rf), x));

        // round trips with sigma in (0, 1)
        const Vec raw = gen.vec(d);
        const double st = gen.uniform(1e-9, 1.0);
        const auto sched_dd = ScheduleParams::ddpm(std::sqrt(1.0 - st * st), st);
        const auto sched_rf = ScheduleParams::rectified_flow(st);
        for (auto kind : {PredictionKind::EpsilonDDPM, PredictionKind::VelocityDDPM, PredictionKind::VelocityRF}) {
            const auto& sched = kind == PredictionKind::VelocityRF ? sched_rf : sched_dd;
            const Vec back = from_denoised(kind, z, to_denoised(kind, z, raw, sched), sched);
            trip = std::max(trip, oracle::max_abs_diff(back, raw));
        }

        // sigma down to 1e-6: error relative to the magnitude amplified by 1/sigma
        const double sw = gen.log_uniform(1e-6, 1.0);
        const auto wide_dd = ScheduleParams::ddpm(std::sqrt(1.0 - sw * sw), sw);
        const auto wide_rf = ScheduleParams::rectified_flow(sw);
        for (auto kind : {PredictionKind::EpsilonDDPM, PredictionKind::VelocityDDPM, PredictionKind::VelocityRF}) {
            const auto& sched = kind == PredictionKind::VelocityRF ? wide_rf : wide_dd;
            const Vec den = to_denoised(kind, z, raw, sched);
            const Vec back = from_denoised(kind, z, den, sched);
            const double amplified = (oracle::max_abs(z) + oracle::max_abs(den)) / sw + oracle::max_abs(raw);
            wide_cond = std::max(wide_cond, oracle::max_abs_diff(back, raw) / amplified);
        }
    }
    c.bound("synthesis consistency (epsilon, v_ddpm, v_rf), max abs error", synth, 1e-10);
    c.bound("round trips (epsilon, v_ddpm, v_rf), sigma in (0,1), max abs error", trip, 1e-10);
    c.bound("epsilon path vs v path, max abs error", cross, 1e-10);
    c.bound("round trips, sigma in [1e-6,1], error relative to |z|/sigma scale", wide_cond, 1e-12);

    const auto k1 = edm_coefficients(1e-9, 0.5);
    const auto k2 = edm_coefficients(0.5, 0.5);
    const auto k3 = edm_coefficients(1.0, 1.0);
    c.expect(std::abs(k1.c_skip - 1.0) <= 1e-15 && k1.c_out <= 1e-8, "EDM sigma -> 0: c_skip -> 1, c_out -> 0");
    c.expect(std::abs(k2.c_skip - 0.5) <= 1e-15, "EDM sigma = sigma_data = 0.5: c_skip = 0.5");
    c.expect(std::abs(k3.c_out - 1.0 / std::sqrt(2.0)) <= 1e-15 && std::abs(k3.c_out - 0.70711) < 5e-6,
             "EDM sigma = sigma_data = 1: c_out = 1/sqrt(2)");
    const auto k4 = edm_coefficients(1e6, 0.5);
    c.expect(k4.c_skip < 1e-12 && std::abs(k4.c_out - 0.5) < 1e-9, "EDM sigma -> inf: c_skip -> 0, c_out -> sigma_data");

    const Vec z{1.1}, raw{0.5};
    c.expect(std::abs(to_denoised(PredictionKind::EpsilonDDPM, z, raw, ScheduleParams::ddpm(0.8, 0.6))[0] - 1.0) <= 1e-15,
             "epsilon worked example recovers x = 1");
    const Vec zv{0.6}, vv{-0.8};
    c.expect(std::abs(to_denoised(PredictionKind::VelocityDDPM, zv, vv, ScheduleParams::ddpm(0.6, 0.8))[0] - 1.0) <= 1e-15,
             "v_ddpm worked example recovers x = 1");
    const Vec z2{2}, d1{1};
    c.expect(from_denoised(PredictionKind::VelocityRF, z2, d1, ScheduleParams::rectified_flow(0.5)) == Vec{2},
             "v_rf inverse worked example");
}

// ---------------------------------------------------------------- 4
void analytic_score_suite(Checks& c) {
    oracle::Gen gen(4004);
    double fd_err = 0.0;
    for (std::size_t d = 1; d <= 5; ++d) {
        const auto mix = GaussianMixture::symmetric_pair(d, 2.0, 0.25);
        for (double sigma : {0.1, 1.0, 10.0}) {
            for (int trial = 0; trial < 20; ++trial) {
                const Vec z = gen.vec(d, 2.0 + sigma);
                const Vec s = score(mix, z, sigma);
                std::vector<std::size_t> all(d);
                for (std::size_t i = 0; i < d; ++i) all[i] = i;
                const Vec g = oracle::fd_gradient(
                    [&](std::span<const double> x) { return marginal_log_density(mix, x, sigma); }, z, 1e-5, all);
                fd_err = std::max(fd_err, oracle::rel_err(g, s));
            }
        }
    }
    c.bound("score vs finite differences of log density (d <= 5, sigma in {0.1,1,10}), relative", fd_err, 1e-5);

    const auto toy_mix = GaussianMixture::symmetric_pair(500, 2.0, 0.25);
    double tweedie = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const double sigma = gen.log_uniform(1e-3, 100.0);
        Vec z = gen.vec(500, sigma);
        const double shift = gen.uniform(-3.0, 3.0);
        for (double& v : z) v += shift;
        tweedie = std::max(tweedie, oracle::max_abs_diff(denoiser_uncond(toy_mix, z, sigma), posterior_mean(toy_mix, z, sigma)));
    }
    c.bound("Tweedie form vs posterior-mean form at d = 500, max abs error", tweedie, 1e-10);

    const oracle::Mixture1D m1{{-2.0, 2.0}, {0.5, 0.5}, 0.25};
    const auto mix1 = GaussianMixture::symmetric_pair(1, 2.0, 0.25);
    double quad = 0.0, quad_density = 0.0;
    for (double z : {0.5, -1.3, 0.0, 2.2, 4.0}) {
        for (double sigma : {0.3, 1.0, 2.5}) {
            const Vec zz{z};
            quad = std::max(quad, std::abs(denoiser_uncond(mix1, zz, sigma)[0] - m1.posterior_mean(z, sigma)));
            quad_density = std::max(quad_density, std::abs(std::exp(marginal_log_density(mix1, zz, sigma)) /
                                                               m1.noisy_density(z, sigma) -
                                                           1.0));
        }
    }
    c.bound("1-D posterior mean vs quadrature, abs error", quad, 1e-6);
    c.bound("1-D noisy density vs quadrature, relative", quad_density, 1e-6);
    c.expect(std::abs(denoiser_uncond(mix1, Vec{0.5}, 1.0)[0] - m1.posterior_mean(0.5, 1.0)) <= 1e-6,
             "worked example z = 0.5, sigma = 1 against quadrature");

    const auto one = GaussianMixture::broadcast(1, std::vector<double>{2.0}, 0.25, {1.0});
    const double cond_val = denoiser_cond(one, 0, Vec{0.0}, 1.0)[0];
    c.expect(std::abs(cond_val - (2.0 + 0.0625 / 1.0625 * -2.0)) <= 1e-15 && std::abs(cond_val - 1.88235) < 5e-6,
             "conditional worked example 1.88235");

    double consistency = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t d = gen.dim(1, 500);
        const double sigma = gen.log_uniform(1e-3, 100.0);
        const auto single = GaussianMixture::broadcast(d, std::vector<double>{gen.uniform(-3, 3)}, 0.25, {1.0});
        const Vec z = gen.vec(d, sigma + 1.0);
        consistency = std::max(consistency, oracle::max_abs_diff(denoiser_cond(single, 0, z, sigma),
                                                                 denoiser_uncond(single, z, sigma)));
    }
    c.bound("one-component mixture: conditional vs unconditional denoiser", consistency, 1e-12);

    double norm_err = 0.0;
    bool nonneg = true;
    for (double far : {1.0, 1e3, 1e6}) {
        for (int trial = 0; trial < 20; ++trial) {
            const Vec z = gen.vec(500, far * 0.25);
            for (double sigma : {0.0, 0.01, 1.0, 80.0}) {
                const Vec g = responsibilities(toy_mix, z, sigma);
                double sum = 0.0;
                for (double v : g) {
                    nonneg = nonneg && v >= 0.0 && std::isfinite(v);
                    sum += v;
                }
                norm_err = std::max(norm_err, std::abs(sum - 1.0));
            }
        }
    }
    c.expect(nonneg, "responsibilities finite and non-negative out to |z| ~ 1e6 sigma_c");
    c.bound("responsibilities sum to 1", norm_err, 1e-12);
}

// ---------------------------------------------------------------- 5
void sampler_distribution(Checks& c) {
    const Vec mu{1.5, -0.5};
    const double sc = 0.5;
    const GaussianMixture mix({mu}, sc, {1.0});
    const SigmaSchedule sched{};
    const std::size_t n = 10000;
    std::vector<Vec> terminals(n);
    const Denoiser cond = [&](std::span<const double> z, double s) { return denoiser_cond(mix, 0, z, s); };
    const Denoiser uncond = [&](std::span<const double> z, double s) { return denoiser_uncond(mix, z, s); };
    SampleOptions opts;
    opts.keep_states = false;
    opts.record_diagnostics = false;
    for (std::size_t j = 0; j < n; ++j) {
        const Trajectory t = sample(cond, uncond, 2, GuidanceStrategy::unguided(), sched, 5, j, opts);
        terminals[j].assign(t.terminal().begin(), t.terminal().end());
    }
    const double target_var = sc * sc + sched.sigma_min * sched.sigma_min;
    for (std::size_t k = 0; k < 2; ++k) {
        long double sum = 0.0L;
        for (const auto& t : terminals) sum += t[k];
        const double mean = static_cast<double>(sum / n);
        long double ss = 0.0L;
        for (const auto& t : terminals) ss += (t[k] - mean) * (t[k] - mean);
        const double var = static_cast<double>(ss / (n - 1));
        const double se = std::sqrt(var / n);
        c.expect(std::abs(mean - mu[k]) <= 3.0 * se, "coordinate " + std::to_string(k) + " mean " + fmt(mean) +
                                                           " vs " + fmt(mu[k]) + " (3 SE = " + fmt(3 * se) + ")");
        c.expect(std::abs(var / target_var - 1.0) <= 0.05, "coordinate " + std::to_string(k) + " variance " +
                                                                fmt(var) + " vs " + fmt(target_var) + " (5%)");
    }
    const Trajectory full = sample(cond, uncond, 2, GuidanceStrategy::cfg(1.0), sched, 5, 0);
    const Trajectory none = sample(cond, uncond, 2, GuidanceStrategy::unguided(), sched, 5, 0);
    c.expect(full.states.size() == static_cast<std::size_t>(sched.steps) + 1, "trajectory holds steps + 1 states");
    c.expect(full.terminal()[0] == none.terminal()[0] && full.terminal()[1] == none.terminal()[1],
             "CFG w=1 and unguided give identical terminal samples");
}

// ---------------------------------------------------------------- 6
void toy_drift(Checks& c, unsigned jobs, std::ostream& log) {
    ExperimentConfig cfg;
    cfg.jobs = jobs;
    cfg.samples = 1000;
    cfg.strategies = {"cfg", "apg"};
    cfg.w = {1, 2, 3, 5, 8};
    cfg.eta = {0.0};
    cfg.r = {"auto"};
    cfg.beta = {-0.5};
    const auto mix = make_mixture(cfg);
    std::map<std::string, double, std::less<>> mean;
    std::map<std::string, std::vector<std::size_t>> modes;
    std::map<std::string, double> radius;
    std::size_t failures = 0;
    for (const Cell& cell : enumerate_cells(cfg)) {
        const CellResult res = run_cell(cfg, mix, cell);
        const std::string key = std::string(to_string(cell.kind)) + "_w" + std::to_string(static_cast<int>(cell.params.w));
        mean[key] = res.drift.mean;
        modes[key] = res.drift.mode_counts;
        radius[key] = res.cell.params.r;
        failures += res.failures;
        log << "  toy " << key << " r=" << format_double(res.cell.params.r) << " mean=" << format_double(res.drift.mean)
            << " modes=" << res.drift.mode_counts[0] << "/" << res.drift.mode_counts[1] << '\n';
    }
    c.expect(failures == 0, "no failed trajectories");
    const int ws[] = {1, 2, 3, 5, 8};
    bool monotone = true;
    std::string cfg_line = "CFG mean distance over w = 1,2,3,5,8:";
    for (int i = 0; i < 5; ++i) {
        cfg_line += " " + fmt(mean["cfg_w" + std::to_string(ws[i])]);
        if (i > 0) monotone = monotone && mean["cfg_w" + std::to_string(ws[i])] >= mean["cfg_w" + std::to_string(ws[i - 1])];
    }
    c.expect(monotone, "(a) " + cfg_line + " is non-decreasing");
    for (int w : {3, 5, 8}) {
        const double a = mean["apg_w" + std::to_string(w)], b = mean["cfg_w" + std::to_string(w)];
        c.expect(a < b, "(b) w=" + std::to_string(w) + ": APG " + fmt(a) + " < CFG " + fmt(b));
    }
    const auto& m3 = modes["apg_w3"];
    const double total = static_cast<double>(m3[0] + m3[1]);
    c.expect(m3[0] >= 0.2 * total && m3[1] >= 0.2 * total,
             "(c) APG w=3 mode shares " + std::to_string(m3[0]) + "/" + std::to_string(m3[1]) + " each >= 20%");

    if (kToyReference.empty()) {
        c.expect(false, "reference distances not recorded yet");
        return;
    }
    double worst = 0.0;
    for (const auto& [key, value] : kToyReference) {
        const auto it = mean.find(key);
        if (it == mean.end()) {
            c.expect(false, "reference cell " + std::string(key) + " missing");
            continue;
        }
        worst = std::max(worst, std::abs(it->second / value - 1.0));
    }
    c.bound("mean distances vs first-run reference values, relative", worst, kToyReferenceTolerance);
}

// ---------------------------------------------------------------- 7
void metrics_suite(Checks& c, const std::filesystem::path& scratch) {
    const auto gray = ImageRGB::solid(8, 8, {0.5, 0.5, 0.5});
    const auto red = ImageRGB::solid(8, 8, {1, 0, 0});
    c.expect(mean_saturation(gray) == 0.0 && rms_contrast(gray) == 0.0, "solid gray: saturation 0, contrast 0");
    c.expect(mean_saturation(red) == 1.0, "pure red: saturation 1");
    Vec px;
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
            const double v = (x + y) % 2 ? 1.0 : 0.0;
            px.insert(px.end(), {v, v, v});
        }
    const ImageRGB checker(8, 8, px);
    c.expect(std::abs(rms_contrast(checker) - 0.5) <= 1e-15, "0/1 checkerboard: contrast 0.5");
    const auto hsv = rgb_to_hsv({0.2, 0.4, 0.6});
    c.expect(std::abs(hsv.s - 2.0 / 3.0) <= 1e-15 && std::abs(hsv.v - 0.6) <= 1e-15, "hexcone worked example");

    oracle::Gen gen(7007);
    Vec values(100000);
    for (double& v : values) v = gen.normal();
    const DensityEstimate est = kde(values);
    double sup = 0.0;
    bool nonneg = true;
    for (std::size_t i = 0; i < est.grid.size(); ++i) {
        sup = std::max(sup, std::abs(est.density[i] - oracle::normal_pdf(est.grid[i], 0.0, 1.0)));
        nonneg = nonneg && est.density[i] >= 0.0;
    }
    const double mass = est.integral();
    c.expect(mass >= 0.98 && mass <= 1.02, "KDE mass " + fmt(mass) + " in [0.98, 1.02]");
    c.bound("KDE sup-norm vs standard normal pdf, n = 1e5", sup, 0.02);
    c.expect(nonneg, "KDE density non-negative");

    // Files on disk through the metrics runner.
    const auto dir = scratch / "metrics_images";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    write_png(dir / "a_gray.png", ImageRGB::solid(4, 4, {0.4, 0.4, 0.4}));
    write_png(dir / "b_red.png", ImageRGB::solid(4, 4, {1, 0, 0}), 16, true);
    write_png(dir / "c_checker.png", checker);
    std::ofstream(dir / "d_broken.png") << "not a png";
    MetricsOptions mo;
    mo.directory = dir;
    mo.out = scratch / "metrics_out";
    const MetricsSummary ms = run_metrics(mo);
    const double hand_sat = (0.0 + 1.0 + 0.0) / 3.0;
    const double hand_con = (0.0 + 0.0 + 0.5) / 3.0;
    c.expect(std::abs(ms.report.mean_saturation - hand_sat) <= 1e-12 &&
                 std::abs(ms.report.mean_contrast - hand_con) <= 1e-12 && ms.report.skipped == 1,
             "PNG directory aggregate matches hand average, unreadable file skipped and counted");
}

// ---------------------------------------------------------------- 8
std::map<std::string, std::string> output_hashes(const std::filesystem::path& manifest) {
    std::ifstream in(manifest);
    const auto doc = nlohmann::json::parse(in);
    std::map<std::string, std::string> out;
    for (const auto& o : doc.at("outputs")) out[o.at("path").get<std::string>()] = o.at("sha256").get<std::string>();
    return out;
}

void determinism(Checks& c, const std::filesystem::path& scratch, unsigned jobs) {
    ExperimentConfig cfg;
    cfg.samples = 200;
    cfg.calibration_samples = 8;
    cfg.seed = 1234;
    std::map<std::string, std::string> first;
    for (int run = 0; run < 2; ++run) {
        cfg.out = (scratch / ("determinism_" + std::to_string(run))).string();
        cfg.jobs = run == 0 ? 1 : std::max(2u, jobs);
        std::filesystem::remove_all(cfg.out);
        run_toy(cfg);
        const auto hashes = output_hashes(std::filesystem::path(cfg.out) / "manifest.json");
        if (run == 0) {
            first = hashes;
            c.expect(hashes.size() >= 6, std::to_string(hashes.size()) + " hashed outputs in the manifest");
        } else {
            c.expect(hashes == first, "second run (different worker count) reproduces every output hash");
        }
    }
}

using Body = std::function<void(Checks&)>;

struct Criterion {
    int id;
    const char* title;
    double budget;
    bool heavy;
};

constexpr Criterion kCriteria[] = {
    {1, "algebraic identity suite", 10.0, false},
    {2, "projection suite", 10.0, false},
    {3, "conversion suite", 5.0, false},
    {4, "analytic-score suite", 30.0, false},
    {5, "sampler distributional check", 120.0, true},
    {6, "toy drift reproduction", 600.0, true},
    {7, "metrics suite", 30.0, false},
    {8, "determinism", 60.0, true},
};

}  // namespace

std::vector<CriterionResult> run(const Options& options, std::ostream& log) {
    std::filesystem::create_directories(options.scratch);
    std::vector<CriterionResult> results;
    for (const auto& crit : kCriteria) {
        if (!options.only.empty() &&
            std::find(options.only.begin(), options.only.end(), crit.id) == options.only.end())
            continue;
        if (options.quick && crit.heavy) continue;
        CriterionResult res;
        res.id = crit.id;
        res.title = crit.title;
        res.budget_seconds = crit.budget;
        Checks checks(res);
        const auto start = std::chrono::steady_clock::now();
        try {
            switch (crit.id) {
                case 1: algebraic_identities(checks); break;
                case 2: projection_suite(checks); break;
                case 3: conversion_suite(checks); break;
                case 4: analytic_score_suite(checks); break;
                case 5: sampler_distribution(checks); break;
                case 6: toy_drift(checks, options.jobs, log); break;
                case 7: metrics_suite(checks, options.scratch); break;
                case 8: determinism(checks, options.scratch, options.jobs); break;
            }
        } catch (const std::exception& e) {
            checks.expect(false, std::string("unexpected exception: ") + e.what());
        }
        res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        checks.expect(res.seconds <= res.budget_seconds,
                      "runtime " + fmt(res.seconds) + " s within " + fmt(res.budget_seconds) + " s");
        res.passed = checks.all();
        for (const auto& d : res.details) log << "  [" << res.id << "] " << d << '\n';
        results.push_back(std::move(res));
    }
    return results;
}

std::string summary_line(const CriterionResult& r) {
    std::ostringstream s;
    s.precision(3);
    s << (r.passed ? "[PASS] " : "[FAIL] ") << r.id << ' ' << r.title << " (" << std::fixed << r.seconds << " s / "
      << r.budget_seconds << " s)";
    return s.str();
}

}  // namespace pglab::acceptance
