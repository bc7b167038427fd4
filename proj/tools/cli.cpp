#include "cli.hpp"

#include <cstdlib>
#include <ostream>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "../tests/acceptance/acceptance.hpp"
#include "pglab/errors.hpp"
#include "pglab/experiment.hpp"
#include "pglab/format.hpp"
#include "pglab/simd.hpp"

namespace pglab {
namespace {

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
    auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err, true);
    auto logger = std::make_shared<spdlog::logger>("pglab", sink);
    logger->set_pattern("[%l] %v");
    logger->set_level(spdlog::level::info);
    if (const char* env = std::getenv("PG_LAB_LOG"); env && *env) {
        const std::string name(env);
        const auto level = spdlog::level::from_str(name);
        if (level == spdlog::level::off && name != "off")
            logger->warn("PG_LAB_LOG={} is not a log level, using info", name);
        else
            logger->set_level(level);
    }
    return logger;
}

unsigned default_jobs() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

void report_cells(const RunSummary& summary, std::ostream& out) {
    out << "cell,r,mean_distance,fraction_within_3sigma,failures\n";
    for (const auto& cell : summary.cells) {
        out << cell.cell.label << ',' << format_double(cell.cell.params.r) << ','
            << (cell.terminals.empty() && cell.drift.count == 0 ? std::string("nan")
                                                                 : format_double(cell.drift.mean))
            << ',' << format_double(cell.drift.fraction_within) << ',' << cell.failures << '\n';
    }
}

int finish_run(const RunSummary& summary, spdlog::logger& log) {
    log.info("wrote {} files", summary.outputs.size() + 1);
    if (summary.failures > 0) {
        log.warn("{} of {} trajectories failed", summary.failures, summary.trajectories);
        for (const auto& cell : summary.cells)
            for (const auto& msg : cell.failure_messages) log.debug("{}: {}", cell.cell.label, msg);
    }
    if (summary.failures * 100 > summary.trajectories) {
        log.error("more than 1% of trajectories failed");
        return 2;
    }
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    auto log = make_logger(err);

    ExperimentConfig cfg;
    cfg.jobs = default_jobs();
    MetricsOptions metrics;
    std::string out_dir;
    bool kde = false;

    CLI::App app{"Guidance experiments on an analytic Gaussian mixture, plus image color metrics"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Key-value configuration file (flags override it)");
    app.add_option("--seed", cfg.seed, "Base seed for initial noise");
    app.add_option("--jobs", cfg.jobs, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--out", out_dir, "Output directory");
    app.add_flag("--kde", kde, "metrics: also write per-channel KDE curves");

    app.add_option("--dim", cfg.dim, "Mixture dimension");
    app.add_option("--mode", cfg.mode, "Mode magnitude (means at -mode and +mode)");
    app.add_option("--component_sigma,--component-sigma", cfg.component_sigma, "Per-coordinate component std");
    app.add_option("--weights", cfg.weights, "One weight (single component) or two")->delimiter(',');
    app.add_option("--sigma_min,--sigma-min", cfg.schedule.sigma_min, "Smallest positive noise level");
    app.add_option("--sigma_max,--sigma-max", cfg.schedule.sigma_max, "Initial noise level");
    app.add_option("--rho", cfg.schedule.rho, "Karras spacing exponent");
    app.add_option("--steps", cfg.schedule.steps, "Number of sampler steps");
    app.add_option("--step_rule,--step-rule", cfg.step_rule, "heun or euler");
    app.add_option("--momentum_mode,--momentum-mode", cfg.momentum_mode, "per_evaluation or per_step");
    app.add_option("--strategies", cfg.strategies, "Any of none, cfg, apg")->delimiter(',');
    app.add_option("--w", cfg.w, "Guidance scales")->delimiter(',');
    app.add_option("--eta", cfg.eta, "APG parallel weights")->delimiter(',');
    app.add_option("--r", cfg.r, "APG rescale radii, or auto")->delimiter(',');
    app.add_option("--beta", cfg.beta, "APG momentum strengths")->delimiter(',');
    app.add_option("--samples", cfg.samples, "Trajectories per cell");
    app.add_option("--calibration_samples,--calibration-samples", cfg.calibration_samples,
                   "Trajectories in the radius calibration pass");
    app.add_option("--sweep_cap,--sweep-cap", cfg.sweep_cap, "Maximum number of cells");
    app.add_option("--trace", cfg.trace, "Trajectory dumps per cell");
    app.add_option("--trace_coords,--trace-coords", cfg.trace_coords, "Coordinates per trajectory dump row");

    auto* toy = app.add_subcommand("toy", "Sample each strategy on the toy mixture");
    auto* sweep = app.add_subcommand("sweep", "Drift summary over the strategy grid");
    auto* met = app.add_subcommand("metrics", "Saturation and contrast of a directory of images");
    met->add_option("directory", metrics.directory, "Image directory")->required();
    met->add_option("--glob", metrics.glob, "File name pattern");
    auto* self = app.add_subcommand("selftest", "Run the acceptance suite");
    bool quick = false;
    std::vector<int> only;
    self->add_flag("--quick", quick, "Skip the sampling-heavy criteria");
    self->add_option("--only", only, "Criterion numbers to run")->delimiter(',');
    for (auto* sub : {toy, sweep, met, self}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*toy || *sweep) {
            if (!out_dir.empty()) cfg.out = out_dir;
            log->info("simd backend: {}", simd::to_string(simd::kernels().backend));
            const RunSummary summary = *toy ? run_toy(cfg) : run_sweep(cfg);
            report_cells(summary, out);
            log->info("manifest: {}", (std::filesystem::path(cfg.out) / "manifest.json").string());
            return finish_run(summary, *log);
        }
        if (*met) {
            if (!out_dir.empty()) metrics.out = out_dir;
            metrics.kde = kde;
            metrics.jobs = cfg.jobs;
            const MetricsSummary summary = run_metrics(metrics);
            for (const auto& w : summary.report.warnings) log->warn("{}", w);
            out << "images," << summary.report.rows.size() << "\nskipped," << summary.report.skipped
                << "\nmean_saturation," << format_double(summary.report.mean_saturation)
                << "\nmean_contrast," << format_double(summary.report.mean_contrast) << '\n';
            log->info("wrote {}", (metrics.out / "metrics.csv").string());
            return 0;
        }
        acceptance::Options opts;
        opts.quick = quick;
        opts.only = only;
        opts.jobs = cfg.jobs;
        opts.scratch = out_dir.empty() ? std::filesystem::temp_directory_path() / "pglab_selftest"
                                       : std::filesystem::path(out_dir);
        const auto results = acceptance::run(opts, err);
        bool ok = true;
        for (const auto& r : results) {
            out << acceptance::summary_line(r) << '\n';
            ok = ok && r.passed;
        }
        return ok ? 0 : 2;
    } catch (const ValidationError& e) {
        log->error("invalid config: {}", e.what());
        return 1;
    } catch (const ContractError& e) {
        log->error("{}", e.what());
        return 1;
    } catch (const std::exception& e) {
        log->error("{}", e.what());
        return 2;
    }
}

}  // namespace pglab
