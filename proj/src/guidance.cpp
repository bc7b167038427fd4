#include "pglab/guidance.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "pglab/errors.hpp"
#include "vec_ops.hpp"

namespace pglab {

void validate(const GuidanceParams& params) {
    if (!std::isfinite(params.w) || params.w < 0.0)
        throw ValidationError("w", "guidance scale must be finite and >= 0");
    if (!std::isfinite(params.eta)) throw ValidationError("eta", "must be finite");
    if (!std::isfinite(params.r)) throw ValidationError("r", "must be finite");
    if (!std::isfinite(params.beta)) throw ValidationError("beta", "must be finite");
}

std::vector<std::string> guidance_warnings(const GuidanceParams& params) {
    std::vector<std::string> out;
    if (params.eta > 1.0) {
        std::ostringstream msg;
        msg << "eta = " << params.eta << " > 1 amplifies the parallel component beyond plain CFG";
        out.push_back(msg.str());
    }
    if (params.beta > 0.0) out.emplace_back("beta > 0 is forward momentum; reverse momentum uses beta < 0");
    return out;
}

template <class T>
void check_pair(const DenoisedPair<T>& pair) {
    if (pair.cond.size() != pair.uncond.size()) {
        std::ostringstream msg;
        msg << "cond/uncond length mismatch: " << pair.cond.size() << " vs " << pair.uncond.size();
        throw ContractError(msg.str());
    }
    if (!vec::all_finite(pair.cond) || !vec::all_finite(pair.uncond))
        throw ContractError("denoised predictions contain non-finite entries");
}

template <class T>
std::vector<T> update_direction(const DenoisedPair<T>& pair) {
    check_pair(pair);
    std::vector<T> delta(pair.cond.size());
    vec::sub(pair.cond, pair.uncond, std::span<T>(delta));
    return delta;
}

template <class T>
std::vector<T> cfg_combine(const DenoisedPair<T>& pair, double w) {
    const std::vector<T> delta = update_direction(pair);
    std::vector<T> out(delta.size());
    vec::axpy(pair.cond, w - 1.0, std::span<const T>(delta), std::span<T>(out));
    return out;
}

template <class T>
Decomposition<T> split_parallel_orthogonal(std::span<const T> delta, std::span<const T> reference,
                                           double floor) {
    if (delta.size() != reference.size())
        throw ContractError("delta/reference length mismatch");
    const double ref_sq = vec::dot(reference, reference);
    if (!(std::sqrt(ref_sq) >= floor))
        throw DegenerateReferenceError("reference norm below floor; projection undefined");
    const double coeff = vec::dot(delta, reference) / ref_sq;
    Decomposition<T> out{std::vector<T>(delta.size()), std::vector<T>(delta.size())};
    vec::project(delta, reference, coeff, std::span<T>(out.parallel), std::span<T>(out.orthogonal));
    return out;
}

namespace {

// Norms within a few ulps of r count as inside the sphere, so a second
// clamp of an already clamped vector is an exact no-op.
template <class T>
constexpr double clamp_slack() {
    return 16.0 * std::numeric_limits<T>::epsilon();
}

// In-place clamp; returns true if the vector was scaled.
template <class T>
bool clamp_in_place(std::span<T> delta, double r) {
    if (r <= 0.0) return false;
    const double n = vec::norm(std::span<const T>(delta));
    if (n <= r * (1.0 + clamp_slack<T>())) return false;
    vec::scale(std::span<const T>(delta), r / n, delta);
    return true;
}

}  // namespace

template <class T>
std::vector<T> clamp_norm(std::span<const T> delta, double r) {
    std::vector<T> out(delta.begin(), delta.end());
    clamp_in_place(std::span<T>(out), r);
    return out;
}

template <class T>
std::span<const T> MomentumState<T>::update(std::span<const T> delta) {
    if (running_average_.empty()) running_average_.assign(delta.size(), T{0});
    if (running_average_.size() != delta.size())
        throw ContractError("momentum buffer length differs from update length");
    vec::axpy(delta, beta_, std::span<const T>(running_average_), std::span<T>(running_average_));
    return running_average_;
}

template <class T>
std::vector<T> momentum_update(MomentumState<T>& state, std::span<const T> delta) {
    const auto avg = state.update(delta);
    return {avg.begin(), avg.end()};
}

template <class T>
std::vector<T> apg_update(const DenoisedPair<T>& pair, const GuidanceParams& params,
                          MomentumState<T>* state, ApgDiagnostics* diagnostics) {
    std::vector<T> delta = update_direction(pair);
    ApgDiagnostics diag;
    diag.raw_update_norm = vec::norm(std::span<const T>(delta));

    if (params.beta != 0.0) {
        if (state == nullptr) throw ContractError("APG with beta != 0 requires a momentum state");
        if (state->beta() != params.beta)
            throw ContractError("momentum state beta differs from guidance params beta");
        const auto avg = state->update(std::span<const T>(delta));
        std::copy(avg.begin(), avg.end(), delta.begin());
    }

    diag.rescaled = clamp_in_place(std::span<T>(delta), params.r);
    diag.effective_update_norm =
        diag.rescaled ? params.r : vec::norm(std::span<const T>(delta));

    // eta = 1 recombines to the unprojected update; skipping the split keeps
    // this path bit-identical to cfg_combine.
    std::vector<T> update;
    if (params.eta == 1.0) {
        update = std::move(delta);
    } else {
        const double ref_sq = vec::dot(pair.cond, pair.cond);
        if (!(std::sqrt(ref_sq) >= kDefaultReferenceFloor)) {
            diag.degenerate_reference = true;
            update = std::move(delta);
        } else {
            const double coeff = vec::dot(std::span<const T>(delta), pair.cond) / ref_sq;
            diag.parallel_norm = std::abs(coeff) * std::sqrt(ref_sq);
            std::vector<T> parallel(delta.size());
            update.resize(delta.size());
            vec::project(std::span<const T>(delta), pair.cond, coeff, std::span<T>(parallel),
                         std::span<T>(update));
            vec::axpy(std::span<const T>(update), params.eta, std::span<const T>(parallel),
                      std::span<T>(update));
        }
    }

    std::vector<T> out(update.size());
    vec::axpy(pair.cond, params.w - 1.0, std::span<const T>(update), std::span<T>(out));
    if (diagnostics != nullptr) *diagnostics = diag;
    return out;
}

template <class T>
GainFactor gain_factor(const DenoisedPair<T>& pair, double w, double floor) {
    const std::vector<T> delta = update_direction(pair);
    const double cond_sq = vec::dot(pair.cond, pair.cond);
    const double cond_norm = std::sqrt(cond_sq);
    if (!(cond_norm >= floor)) throw DegenerateReferenceError("gain factor undefined for |cond| = 0");
    const double inner = vec::dot(std::span<const T>(delta), pair.cond);
    // |<d, c> / <c, c> * c| = |<d, c>| / |c|
    const double parallel_norm = std::abs(inner) / cond_norm;
    GainFactor g;
    g.value = 1.0 + (w - 1.0) * parallel_norm / cond_norm;
    g.alignment = inner > 0.0 ? 1 : (inner < 0.0 ? -1 : 0);
    return g;
}

template <class T>
double cfg_objective(const DenoisedPair<T>& pair) {
    const std::vector<T> delta = update_direction(pair);
    return 0.5 * vec::dot(std::span<const T>(delta), std::span<const T>(delta));
}

#define PGLAB_INSTANTIATE_GUIDANCE(T)                                                          \
    template void check_pair<T>(const DenoisedPair<T>&);                                       \
    template std::vector<T> update_direction<T>(const DenoisedPair<T>&);                       \
    template std::vector<T> cfg_combine<T>(const DenoisedPair<T>&, double);                    \
    template Decomposition<T> split_parallel_orthogonal<T>(std::span<const T>,                 \
                                                           std::span<const T>, double);        \
    template std::vector<T> clamp_norm<T>(std::span<const T>, double);                         \
    template class MomentumState<T>;                                                           \
    template std::vector<T> momentum_update<T>(MomentumState<T>&, std::span<const T>);         \
    template std::vector<T> apg_update<T>(const DenoisedPair<T>&, const GuidanceParams&,       \
                                          MomentumState<T>*, ApgDiagnostics*);                 \
    template GainFactor gain_factor<T>(const DenoisedPair<T>&, double, double);                \
    template double cfg_objective<T>(const DenoisedPair<T>&);

PGLAB_INSTANTIATE_GUIDANCE(float)
PGLAB_INSTANTIATE_GUIDANCE(double)

#undef PGLAB_INSTANTIATE_GUIDANCE

}  // namespace pglab
