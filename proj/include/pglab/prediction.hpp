#pragma once

// Conversions between raw denoiser outputs and the denoised prediction D.
//
//   epsilon   z = a x + s eps          D = (z - s raw) / a
//   v_ddpm    v = a eps - s x          D = a z - s raw
//   v_rf      z = (1-t) x + t eps      D = z - t raw
//   edm       D = c_skip z + c_out F   (F already evaluated at c_in z)
//   denoised  D = raw

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace pglab {

enum class PredictionKind { EpsilonDDPM, VelocityDDPM, DenoisedDirect, VelocityRF, PreconditionedEDM };

// Stable config names: "epsilon", "v_ddpm", "denoised", "v_rf", "edm".
std::string_view to_string(PredictionKind kind);
// Throws ContractError on an unknown name.
PredictionKind parse_prediction_kind(std::string_view name);

struct ScheduleParams {
    double alpha_t = 1.0;
    double sigma_t = 0.0;

    static ScheduleParams ddpm(double alpha, double sigma) { return {alpha, sigma}; }
    static ScheduleParams rectified_flow(double t) { return {1.0 - t, t}; }
    static ScheduleParams edm(double sigma) { return {1.0, sigma}; }
};

// Checks the schedule invariants for the given kind; throws ContractError.
void check_schedule(PredictionKind kind, const ScheduleParams& sched);

struct EDMCoefficients {
    double c_skip = 1.0;
    double c_in = 1.0;
    double c_out = 0.0;
    double c_noise = 0.0;
};

EDMCoefficients edm_coefficients(double sigma, double sigma_data);

std::vector<double> to_denoised(PredictionKind kind, std::span<const double> z,
                                std::span<const double> raw, const ScheduleParams& sched,
                                const std::optional<EDMCoefficients>& edm = std::nullopt);

// Inverse of to_denoised. Not defined for PreconditionedEDM.
std::vector<double> from_denoised(PredictionKind kind, std::span<const double> z,
                                  std::span<const double> denoised, const ScheduleParams& sched);

}  // namespace pglab
