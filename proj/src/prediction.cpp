#include "pglab/prediction.hpp"

#include <cmath>
#include <string>

#include "pglab/errors.hpp"
#include "vec_ops.hpp"

namespace pglab {

std::string_view to_string(PredictionKind kind) {
    switch (kind) {
        case PredictionKind::EpsilonDDPM: return "epsilon";
        case PredictionKind::VelocityDDPM: return "v_ddpm";
        case PredictionKind::DenoisedDirect: return "denoised";
        case PredictionKind::VelocityRF: return "v_rf";
        case PredictionKind::PreconditionedEDM: return "edm";
    }
    return "unknown";
}

PredictionKind parse_prediction_kind(std::string_view name) {
    for (auto kind : {PredictionKind::EpsilonDDPM, PredictionKind::VelocityDDPM,
                      PredictionKind::DenoisedDirect, PredictionKind::VelocityRF,
                      PredictionKind::PreconditionedEDM}) {
        if (to_string(kind) == name) return kind;
    }
    throw ContractError("unknown prediction kind '" + std::string(name) +
                        "' (expected epsilon, v_ddpm, denoised, v_rf or edm)");
}

void check_schedule(PredictionKind kind, const ScheduleParams& sched) {
    const double a = sched.alpha_t;
    const double s = sched.sigma_t;
    if (!std::isfinite(a) || !std::isfinite(s)) throw ContractError("schedule coefficients must be finite");
    if (s < 0.0) throw ContractError("sigma_t must be >= 0");
    switch (kind) {
        case PredictionKind::EpsilonDDPM:
        case PredictionKind::VelocityDDPM:
            if (std::abs(a * a + s * s - 1.0) > 1e-9)
                throw ContractError("DDPM schedule requires alpha_t^2 + sigma_t^2 = 1");
            break;
        case PredictionKind::VelocityRF:
            if (std::abs(a - (1.0 - s)) > 1e-12)
                throw ContractError("rectified-flow schedule requires alpha_t = 1 - sigma_t");
            break;
        case PredictionKind::PreconditionedEDM:
            if (a != 1.0) throw ContractError("EDM schedule requires alpha_t = 1");
            break;
        case PredictionKind::DenoisedDirect:
            break;
    }
}

EDMCoefficients edm_coefficients(double sigma, double sigma_data) {
    if (!(sigma > 0.0) || !(sigma_data > 0.0) || !std::isfinite(sigma) || !std::isfinite(sigma_data))
        throw ContractError("edm_coefficients requires sigma > 0 and sigma_data > 0");
    const double s2 = sigma * sigma;
    const double d2 = sigma_data * sigma_data;
    const double root = std::sqrt(s2 + d2);
    EDMCoefficients c;
    c.c_skip = d2 / (s2 + d2);
    c.c_out = sigma * sigma_data / root;
    c.c_in = 1.0 / root;
    c.c_noise = 0.25 * std::log(sigma);
    return c;
}

namespace {

void check_lengths(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ContractError("z and prediction lengths differ");
}

}  // namespace

std::vector<double> to_denoised(PredictionKind kind, std::span<const double> z,
                                std::span<const double> raw, const ScheduleParams& sched,
                                const std::optional<EDMCoefficients>& edm) {
    check_lengths(z, raw);
    if (edm.has_value() != (kind == PredictionKind::PreconditionedEDM))
        throw ContractError("EDM coefficients must be given exactly for the edm kind");
    check_schedule(kind, sched);

    const double a = sched.alpha_t;
    const double s = sched.sigma_t;
    std::vector<double> out(z.size());
    switch (kind) {
        case PredictionKind::EpsilonDDPM:
            if (a == 0.0) throw DivisionByZeroError("epsilon conversion needs alpha_t != 0");
            vec::lincomb(1.0 / a, z, -s / a, raw, out);
            break;
        case PredictionKind::VelocityDDPM:
            vec::lincomb(a, z, -s, raw, out);
            break;
        case PredictionKind::VelocityRF:
            vec::lincomb(1.0, z, -s, raw, out);
            break;
        case PredictionKind::DenoisedDirect:
            out.assign(raw.begin(), raw.end());
            break;
        case PredictionKind::PreconditionedEDM:
            vec::lincomb(edm->c_skip, z, edm->c_out, raw, out);
            break;
    }
    return out;
}

std::vector<double> from_denoised(PredictionKind kind, std::span<const double> z,
                                  std::span<const double> denoised, const ScheduleParams& sched) {
    check_lengths(z, denoised);
    if (kind == PredictionKind::PreconditionedEDM)
        throw UnsupportedKindError("edm predictions cannot be converted back from D");
    check_schedule(kind, sched);

    const double a = sched.alpha_t;
    const double s = sched.sigma_t;
    if (kind == PredictionKind::DenoisedDirect) return {denoised.begin(), denoised.end()};
    if (s == 0.0)
        throw DivisionByZeroError(std::string(to_string(kind)) + " conversion needs sigma_t > 0");

    std::vector<double> out(z.size());
    switch (kind) {
        case PredictionKind::EpsilonDDPM:
            vec::lincomb(1.0 / s, z, -a / s, denoised, out);
            break;
        case PredictionKind::VelocityDDPM:
            vec::lincomb(a / s, z, -1.0 / s, denoised, out);
            break;
        case PredictionKind::VelocityRF:
            vec::lincomb(1.0 / s, z, -1.0 / s, denoised, out);
            break;
        default:
            break;
    }
    return out;
}

}  // namespace pglab
