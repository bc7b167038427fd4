#pragma once

// Toy-experiment configuration and runners shared by the CLI and the
// acceptance suite.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pglab/guidance.hpp"
#include "pglab/image_metrics.hpp"
#include "pglab/mixture.hpp"
#include "pglab/sampler.hpp"

namespace pglab {

struct ExperimentConfig {
    // mixture: one component at +mode, or two at -mode / +mode
    std::size_t dim = 500;
    double mode = 2.0;
    double component_sigma = 0.25;
    std::vector<double> weights{0.5, 0.5};

    SigmaSchedule schedule{};
    std::string step_rule = "heun";             // heun | euler
    std::string momentum_mode = "per_evaluation";  // per_evaluation | per_step

    std::vector<std::string> strategies{"cfg", "apg"};  // none | cfg | apg
    std::vector<double> w{3.0};
    std::vector<double> eta{0.0};
    std::vector<std::string> r{"auto"};  // number (<= 0 disables) or "auto"
    std::vector<double> beta{-0.5};

    std::size_t samples = 1000;
    std::size_t calibration_samples = 16;
    std::uint64_t seed = 0;
    unsigned jobs = 1;
    std::size_t sweep_cap = 256;
    std::size_t trace = 1;         // trajectories dumped per cell
    std::size_t trace_coords = 2;  // coordinates per trajectory dump row
    std::string out = "pglab_out";
};

// Throws ValidationError naming the offending key.
void validate(const ExperimentConfig& config);

GaussianMixture make_mixture(const ExperimentConfig& config);
StepRule parse_step_rule(const std::string& name);
MomentumMode parse_momentum_mode(const std::string& name);
StrategyKind parse_strategy(const std::string& name);
std::string_view to_string(StrategyKind kind);

// key = value lines, loadable again as a config file.
std::string to_config_text(const ExperimentConfig& config);

// One (strategy, hyperparameter) combination.
struct Cell {
    StrategyKind kind = StrategyKind::none;
    GuidanceParams params{};
    bool auto_radius = false;
    std::string label;
};

// none -> one cell; cfg -> one per w; apg -> w x eta x r x beta.
std::vector<Cell> enumerate_cells(const ExperimentConfig& config);

struct CellResult {
    Cell cell;  // with the radius resolved
    std::vector<std::vector<double>> terminals;  // successful trajectories, in index order
    std::vector<std::size_t> classes;
    std::vector<Trajectory> traces;
    std::size_t failures = 0;
    std::vector<std::string> failure_messages;
    DriftSummary drift;
};

// Median |cond - uncond| over all steps of a short APG pass with rescaling off.
double calibrate_radius(const ExperimentConfig& config, const GaussianMixture& mix,
                        const GuidanceParams& params);

// Trajectory j uses class j % components, seed `config.seed`, stream j.
CellResult run_cell(const ExperimentConfig& config, const GaussianMixture& mix, Cell cell);

struct RunSummary {
    std::vector<std::filesystem::path> outputs;
    std::size_t trajectories = 0;
    std::size_t failures = 0;
    std::vector<CellResult> cells;
};

// Write samples, drift CSV, scatter SVGs, trajectory dumps and manifest.
RunSummary run_toy(const ExperimentConfig& config);
// Write sweep CSV, line-plot SVG and manifest.
RunSummary run_sweep(const ExperimentConfig& config);

struct MetricsOptions {
    std::filesystem::path directory;
    std::string glob = "*.png";
    std::filesystem::path out = "pglab_metrics";
    bool kde = false;
    unsigned jobs = 1;
};

struct MetricsSummary {
    ColorReport report;
    std::vector<std::filesystem::path> outputs;
};

MetricsSummary run_metrics(const MetricsOptions& options);

}  // namespace pglab
