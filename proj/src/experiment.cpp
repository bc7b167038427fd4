#include "pglab/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include "pglab/errors.hpp"
#include "pglab/format.hpp"
#include "pglab/image_io.hpp"
#include "pglab/manifest.hpp"
#include "pglab/svg.hpp"
#include "worker_pool.hpp"

namespace pglab {
namespace {

std::optional<double> parse_radius(const std::string& text) {
    if (text == "auto") return std::nullopt;
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ValidationError("r", "expected a number or 'auto', got '" + text + "'");
    }
    if (used != text.size() || !std::isfinite(v))
        throw ValidationError("r", "expected a number or 'auto', got '" + text + "'");
    return v;
}

template <class T>
std::string join_list(const std::vector<T>& values) {
    std::string out = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        if constexpr (std::is_same_v<T, std::string>) {
            out += '"' + values[i] + '"';
        } else {
            out += format_double(values[i]);
        }
    }
    return out + "]";
}

std::string sanitize(std::string s) {
    for (char& c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.' || c == '_')) c = '_';
    return s;
}

std::filesystem::path prepare_out_dir(const std::string& out) {
    std::filesystem::path dir(out);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    const auto probe = dir / ".pglab_write_probe";
    std::ofstream test(probe);
    if (ec || !test) throw std::runtime_error("output directory is not writable: " + dir.string());
    test.close();
    std::filesystem::remove(probe, ec);
    return dir;
}

void write_text(const std::filesystem::path& dir, const std::filesystem::path& rel,
                const std::string& content, std::vector<std::filesystem::path>& outputs) {
    write_file_atomic(dir / rel, content);
    outputs.push_back(rel);
}

std::string drift_header(std::size_t components) {
    std::string h =
        "strategy,w,eta,r,beta,samples,failures,mean_distance,median_distance,max_distance,"
        "mean_normalized,fraction_within_3sigma";
    for (std::size_t i = 0; i < components; ++i) h += ",mode_" + std::to_string(i);
    return h + "\n";
}

std::string drift_row(const CellResult& res, std::size_t components) {
    const auto& p = res.cell.params;
    const bool guided = res.cell.kind != StrategyKind::none;
    const bool apg = res.cell.kind == StrategyKind::apg;
    std::ostringstream row;
    row << to_string(res.cell.kind) << ',' << (guided ? format_double(p.w) : "1") << ','
        << (apg ? format_double(p.eta) : "") << ',' << (apg ? format_double(p.r) : "") << ','
        << (apg ? format_double(p.beta) : "") << ',' << res.terminals.size() << ',' << res.failures;
    const auto& d = res.drift;
    if (res.terminals.empty()) {
        row << ",,,,,";
        for (std::size_t i = 0; i < components; ++i) row << ',';
    } else {
        row << ',' << format_double(d.mean) << ',' << format_double(d.median) << ','
            << format_double(d.max) << ',' << format_double(d.mean_normalized) << ','
            << format_double(d.fraction_within);
        for (std::size_t i = 0; i < components; ++i) row << ',' << d.mode_counts[i];
    }
    row << '\n';
    return row.str();
}

std::string manifest_for(const std::string& command, const ExperimentConfig& config,
                         std::chrono::steady_clock::time_point start,
                         const std::vector<std::filesystem::path>& outputs,
                         const std::filesystem::path& dir) {
    RunManifest m;
    m.command = command;
    m.config_text = to_config_text(config);
    m.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    m.outputs = outputs;
    return render_manifest(m, dir);
}

}  // namespace

void validate(const ExperimentConfig& c) {
    if (c.dim < 1) throw ValidationError("dim", "must be >= 1");
    if (!std::isfinite(c.mode)) throw ValidationError("mode", "must be finite");
    if (!(c.component_sigma > 0.0) || !std::isfinite(c.component_sigma))
        throw ValidationError("component_sigma", "must be finite and > 0");
    if (c.weights.size() != 1 && c.weights.size() != 2)
        throw ValidationError("weights", "give one weight (single component) or two (pair at -mode/+mode)");
    double total = 0.0;
    for (double w : c.weights) {
        if (!(w > 0.0)) throw ValidationError("weights", "weights must be > 0");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ValidationError("weights", "weights must sum to 1");
    validate(c.schedule);
    parse_step_rule(c.step_rule);
    parse_momentum_mode(c.momentum_mode);
    if (c.strategies.empty()) throw ValidationError("strategies", "list at least one strategy");
    for (const auto& s : c.strategies) parse_strategy(s);
    if (c.w.empty()) throw ValidationError("w", "list at least one guidance scale");
    for (double w : c.w)
        if (!std::isfinite(w) || w < 0.0) throw ValidationError("w", "guidance scales must be finite and >= 0");
    if (c.eta.empty()) throw ValidationError("eta", "list at least one value");
    for (double e : c.eta)
        if (!std::isfinite(e)) throw ValidationError("eta", "must be finite");
    if (c.r.empty()) throw ValidationError("r", "list at least one value");
    for (const auto& r : c.r) parse_radius(r);
    if (c.beta.empty()) throw ValidationError("beta", "list at least one value");
    for (double b : c.beta)
        if (!std::isfinite(b)) throw ValidationError("beta", "must be finite");
    if (c.samples < 1) throw ValidationError("samples", "must be >= 1");
    if (c.calibration_samples < 1) throw ValidationError("calibration_samples", "must be >= 1");
    if (c.jobs < 1) throw ValidationError("jobs", "must be >= 1");
    if (c.sweep_cap < 1) throw ValidationError("sweep_cap", "must be >= 1");
    if (c.out.empty()) throw ValidationError("out", "must name a directory");
}

GaussianMixture make_mixture(const ExperimentConfig& c) {
    if (c.weights.size() == 1) {
        const double offsets[] = {c.mode};
        return GaussianMixture::broadcast(c.dim, offsets, c.component_sigma, c.weights);
    }
    const double offsets[] = {-c.mode, c.mode};
    return GaussianMixture::broadcast(c.dim, offsets, c.component_sigma, c.weights);
}

StepRule parse_step_rule(const std::string& name) {
    if (name == "heun") return StepRule::heun;
    if (name == "euler") return StepRule::euler;
    throw ValidationError("step_rule", "expected heun or euler, got '" + name + "'");
}

MomentumMode parse_momentum_mode(const std::string& name) {
    if (name == "per_evaluation") return MomentumMode::per_evaluation;
    if (name == "per_step") return MomentumMode::per_step;
    throw ValidationError("momentum_mode", "expected per_evaluation or per_step, got '" + name + "'");
}

StrategyKind parse_strategy(const std::string& name) {
    if (name == "none") return StrategyKind::none;
    if (name == "cfg") return StrategyKind::cfg;
    if (name == "apg") return StrategyKind::apg;
    throw ValidationError("strategies", "expected none, cfg or apg, got '" + name + "'");
}

std::string_view to_string(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::none: return "none";
        case StrategyKind::cfg: return "cfg";
        case StrategyKind::apg: return "apg";
    }
    return "unknown";
}

std::string to_config_text(const ExperimentConfig& c) {
    std::ostringstream out;
    out << "dim=" << c.dim << '\n'
        << "mode=" << format_double(c.mode) << '\n'
        << "component_sigma=" << format_double(c.component_sigma) << '\n'
        << "weights=" << join_list(c.weights) << '\n'
        << "sigma_min=" << format_double(c.schedule.sigma_min) << '\n'
        << "sigma_max=" << format_double(c.schedule.sigma_max) << '\n'
        << "rho=" << format_double(c.schedule.rho) << '\n'
        << "steps=" << c.schedule.steps << '\n'
        << "step_rule=\"" << c.step_rule << "\"\n"
        << "momentum_mode=\"" << c.momentum_mode << "\"\n"
        << "strategies=" << join_list(c.strategies) << '\n'
        << "w=" << join_list(c.w) << '\n'
        << "eta=" << join_list(c.eta) << '\n'
        << "r=" << join_list(c.r) << '\n'
        << "beta=" << join_list(c.beta) << '\n'
        << "samples=" << c.samples << '\n'
        << "calibration_samples=" << c.calibration_samples << '\n'
        << "seed=" << c.seed << '\n'
        << "sweep_cap=" << c.sweep_cap << '\n'
        << "trace=" << c.trace << '\n'
        << "trace_coords=" << c.trace_coords << '\n';
    return out.str();
}

std::vector<Cell> enumerate_cells(const ExperimentConfig& c) {
    std::vector<Cell> cells;
    for (const auto& name : c.strategies) {
        const StrategyKind kind = parse_strategy(name);
        if (kind == StrategyKind::none) {
            cells.push_back({kind, GuidanceParams{1.0, 1.0, 0.0, 0.0}, false, "none"});
        } else if (kind == StrategyKind::cfg) {
            for (double w : c.w)
                cells.push_back({kind, GuidanceParams{w, 1.0, 0.0, 0.0}, false, "cfg_w" + format_double(w)});
        } else {
            for (double w : c.w)
                for (double eta : c.eta)
                    for (const auto& r : c.r)
                        for (double beta : c.beta) {
                            const auto radius = parse_radius(r);
                            Cell cell{kind, GuidanceParams{w, eta, radius.value_or(0.0), beta},
                                      !radius.has_value(), ""};
                            cell.label = "apg_w" + format_double(w) + "_eta" + format_double(eta) + "_r" +
                                         (radius ? format_double(*radius) : std::string("auto")) +
                                         "_beta" + format_double(beta);
                            cells.push_back(cell);
                        }
        }
    }
    for (auto& cell : cells) cell.label = sanitize(cell.label);
    return cells;
}

namespace {

struct ToyDenoisers {
    Denoiser cond;
    Denoiser uncond;
};

ToyDenoisers toy_denoisers(const GaussianMixture& mix, std::size_t cls) {
    return {[&mix, cls](std::span<const double> z, double s) { return denoiser_cond(mix, cls, z, s); },
            [&mix](std::span<const double> z, double s) { return denoiser_uncond(mix, z, s); }};
}

constexpr std::uint64_t kCalibrationStreamBase = std::uint64_t{1} << 40;

}  // namespace

double calibrate_radius(const ExperimentConfig& config, const GaussianMixture& mix,
                        const GuidanceParams& params) {
    GuidanceParams probe = params;
    probe.r = 0.0;
    const GuidanceStrategy strategy = GuidanceStrategy::apg(probe);
    SampleOptions opts;
    opts.rule = parse_step_rule(config.step_rule);
    opts.momentum = parse_momentum_mode(config.momentum_mode);
    opts.keep_states = false;
    std::vector<std::vector<double>> norms(config.calibration_samples);
    parallel_for(config.calibration_samples, config.jobs, [&](std::size_t j) {
        const auto dn = toy_denoisers(mix, j % mix.components());
        const Trajectory t = sample(dn.cond, dn.uncond, mix.dim(), strategy, config.schedule,
                                    config.seed, kCalibrationStreamBase + j, opts);
        for (const auto& rec : t.records) norms[j].push_back(rec.update_norm);
    });
    std::vector<double> all;
    for (const auto& v : norms) all.insert(all.end(), v.begin(), v.end());
    std::sort(all.begin(), all.end());
    const std::size_t m = all.size();
    return m % 2 == 1 ? all[m / 2] : 0.5 * (all[m / 2 - 1] + all[m / 2]);
}

CellResult run_cell(const ExperimentConfig& config, const GaussianMixture& mix, Cell cell) {
    if (cell.auto_radius) cell.params.r = calibrate_radius(config, mix, cell.params);
    const GuidanceStrategy strategy{cell.kind, cell.params};
    SampleOptions opts;
    opts.rule = parse_step_rule(config.step_rule);
    opts.momentum = parse_momentum_mode(config.momentum_mode);
    opts.keep_states = false;
    opts.record_diagnostics = false;

    struct Slot {
        std::vector<double> terminal;
        std::string error;
        bool ok = false;
    };
    std::vector<Slot> slots(config.samples);
    parallel_for(config.samples, config.jobs, [&](std::size_t j) {
        const auto dn = toy_denoisers(mix, j % mix.components());
        try {
            Trajectory t = sample(dn.cond, dn.uncond, mix.dim(), strategy, config.schedule, config.seed, j, opts);
            slots[j].terminal = std::move(t.states.back().z);
            slots[j].ok = true;
        } catch (const SamplingError& e) {
            slots[j].error = "trajectory " + std::to_string(j) + ": " + e.what();
        }
    });

    CellResult res;
    res.cell = cell;
    for (std::size_t j = 0; j < slots.size(); ++j) {
        if (slots[j].ok) {
            res.terminals.push_back(std::move(slots[j].terminal));
            res.classes.push_back(j % mix.components());
        } else {
            ++res.failures;
            res.failure_messages.push_back(slots[j].error);
        }
    }

    SampleOptions trace_opts = opts;
    trace_opts.keep_states = true;
    trace_opts.record_diagnostics = true;
    for (std::size_t j = 0; j < std::min(config.trace, config.samples); ++j) {
        const auto dn = toy_denoisers(mix, j % mix.components());
        try {
            res.traces.push_back(
                sample(dn.cond, dn.uncond, mix.dim(), strategy, config.schedule, config.seed, j, trace_opts));
        } catch (const SamplingError&) {
            // already counted above
        }
    }
    if (!res.terminals.empty()) res.drift = mode_drift(res.terminals, mix);
    return res;
}

RunSummary run_toy(const ExperimentConfig& config) {
    validate(config);
    const auto start = std::chrono::steady_clock::now();
    const std::vector<Cell> cells = enumerate_cells(config);
    if (cells.size() > config.sweep_cap)
        throw ValidationError("sweep_cap", std::to_string(cells.size()) + " cells exceed the cap of " +
                                               std::to_string(config.sweep_cap) + "; use a smaller grid");
    const auto dir = prepare_out_dir(config.out);
    const GaussianMixture mix = make_mixture(config);

    RunSummary summary;
    std::string drift_csv = drift_header(mix.components());
    for (const Cell& cell : cells) {
        CellResult res = run_cell(config, mix, cell);
        summary.trajectories += config.samples;
        summary.failures += res.failures;

        std::ostringstream samples;
        samples << "index,class";
        for (std::size_t k = 0; k < mix.dim(); ++k) samples << ",x" << k;
        samples << '\n';
        for (std::size_t i = 0; i < res.terminals.size(); ++i) {
            samples << i << ',' << res.classes[i];
            for (double v : res.terminals[i]) samples << ',' << format_double(v);
            samples << '\n';
        }
        write_text(dir, "samples_" + cell.label + ".csv", samples.str(), summary.outputs);

        std::vector<PlotSeries> series(mix.components());
        for (std::size_t c = 0; c < series.size(); ++c) series[c].label = "class " + std::to_string(c);
        for (std::size_t i = 0; i < res.terminals.size(); ++i) {
            const auto& t = res.terminals[i];
            series[res.classes[i]].x.push_back(t[0]);
            series[res.classes[i]].y.push_back(t.size() > 1 ? t[1] : 0.0);
        }
        const PlotLabels labels{cell.label + " terminal samples", "x0", "x1"};
        write_text(dir, "scatter_" + cell.label + ".svg", scatter_plot_svg(labels, series), summary.outputs);

        for (std::size_t j = 0; j < res.traces.size(); ++j) {
            std::ostringstream trace;
            write_trajectory_csv(trace, res.traces[j], config.trace_coords);
            write_text(dir, "trace_" + cell.label + "_" + std::to_string(j) + ".csv", trace.str(),
                       summary.outputs);
        }
        drift_csv += drift_row(res, mix.components());
        summary.cells.push_back(std::move(res));
    }
    write_text(dir, "drift.csv", drift_csv, summary.outputs);
    write_text(dir, "config.ini", to_config_text(config), summary.outputs);
    write_file_atomic(dir / "manifest.json", manifest_for("toy", config, start, summary.outputs, dir));
    return summary;
}

RunSummary run_sweep(const ExperimentConfig& config) {
    validate(config);
    const auto start = std::chrono::steady_clock::now();
    const std::vector<Cell> cells = enumerate_cells(config);
    if (cells.size() > config.sweep_cap)
        throw ValidationError("sweep_cap", std::to_string(cells.size()) + " cells exceed the cap of " +
                                               std::to_string(config.sweep_cap) + "; use a smaller grid");
    const auto dir = prepare_out_dir(config.out);
    const GaussianMixture mix = make_mixture(config);

    RunSummary summary;
    std::string csv = drift_header(mix.components());
    std::vector<PlotSeries> series;
    auto series_for = [&](const std::string& label) -> PlotSeries& {
        for (auto& s : series)
            if (s.label == label) return s;
        series.push_back({label, {}, {}});
        return series.back();
    };
    for (const Cell& cell : cells) {
        CellResult res = run_cell(config, mix, cell);
        summary.trajectories += config.samples;
        summary.failures += res.failures;
        csv += drift_row(res, mix.components());

        std::string key(to_string(cell.kind));
        if (cell.kind == StrategyKind::apg) {
            key += " eta=" + format_double(cell.params.eta) +
                   " r=" + (cell.auto_radius ? std::string("auto") : format_double(cell.params.r)) +
                   " beta=" + format_double(cell.params.beta);
        }
        if (!res.terminals.empty()) {
            auto& s = series_for(key);
            s.x.push_back(cell.kind == StrategyKind::none ? 1.0 : cell.params.w);
            s.y.push_back(res.drift.mean);
        }
        res.terminals.clear();
        res.traces.clear();
        summary.cells.push_back(std::move(res));
    }
    write_text(dir, "sweep.csv", csv, summary.outputs);
    const PlotLabels labels{"Mean nearest-mode distance vs guidance scale", "w", "mean distance"};
    write_text(dir, "sweep.svg", line_plot_svg(labels, series), summary.outputs);
    write_text(dir, "config.ini", to_config_text(config), summary.outputs);
    write_file_atomic(dir / "manifest.json", manifest_for("sweep", config, start, summary.outputs, dir));
    return summary;
}

MetricsSummary run_metrics(const MetricsOptions& options) {
    if (!std::filesystem::is_directory(options.directory))
        throw ValidationError("directory", "no such directory: " + options.directory.string());
    const auto files = list_images(options.directory, options.glob);
    if (files.empty())
        throw ValidationError("glob", "no files in " + options.directory.string() + " match '" +
                                          options.glob + "'");
    const auto dir = prepare_out_dir(options.out.string());

    MetricsSummary summary;
    summary.report = color_report_from_files(files, options.jobs);
    const auto& rep = summary.report;

    std::ostringstream csv;
    csv << "image,saturation,contrast\n";
    for (const auto& row : rep.rows)
        csv << row.name << ',' << format_double(row.saturation) << ',' << format_double(row.contrast) << '\n';
    csv << "__mean__," << format_double(rep.mean_saturation) << ',' << format_double(rep.mean_contrast) << '\n';
    write_text(dir, "metrics.csv", csv.str(), summary.outputs);

    if (options.kde) {
        const Channel channels[] = {Channel::red, Channel::green, Channel::blue, Channel::saturation};
        std::vector<std::vector<double>> pooled(std::size(channels));
        for (const auto& f : files) {
            try {
                const ImageRGB img = read_image(f);
                for (std::size_t c = 0; c < std::size(channels); ++c) {
                    const auto v = channel_values(img, channels[c]);
                    pooled[c].insert(pooled[c].end(), v.begin(), v.end());
                }
            } catch (const std::exception&) {
                // counted in the report already
            }
        }
        std::vector<PlotSeries> series;
        std::ostringstream kde_csv;
        kde_csv << "channel,x,density\n";
        for (std::size_t c = 0; c < std::size(channels); ++c) {
            try {
                const DensityEstimate est = kde(pooled[c]);
                PlotSeries s{std::string(to_string(channels[c])), est.grid, est.density};
                for (std::size_t i = 0; i < est.grid.size(); ++i)
                    kde_csv << to_string(channels[c]) << ',' << format_double(est.grid[i]) << ','
                            << format_double(est.density[i]) << '\n';
                series.push_back(std::move(s));
            } catch (const std::exception& e) {
                summary.report.warnings.push_back(std::string(to_string(channels[c])) + " KDE skipped: " + e.what());
            }
        }
        write_text(dir, "kde.csv", kde_csv.str(), summary.outputs);
        const PlotLabels labels{"Pixel value density", "value", "density"};
        write_text(dir, "kde.svg", line_plot_svg(labels, series), summary.outputs);
    }
    return summary;
}

}  // namespace pglab
