#pragma once

// Classifier-free guidance and adaptive projected guidance (APG) on flat
// prediction vectors.
//
// All routines work in denoised-prediction space. Storage may be float or
// double; inner products, norms and the projection coefficient are always
// evaluated in double.

#include <span>
#include <string>
#include <vector>

namespace pglab {

struct GuidanceParams {
    double w = 1.0;      // guidance scale, w = 1 is unguided
    double eta = 0.0;    // weight of the component parallel to cond
    double r = 0.0;      // rescale radius, <= 0 disables rescaling
    double beta = -0.5;  // momentum strength, negative = reverse momentum
};

// Throws ValidationError naming the field (w, eta, r, beta) on a bad value.
void validate(const GuidanceParams& params);

// Non-fatal observations about a parameter set, e.g. eta > 1.
std::vector<std::string> guidance_warnings(const GuidanceParams& params);

template <class T>
struct DenoisedPair {
    std::span<const T> cond;
    std::span<const T> uncond;
};

// Equal lengths and finite entries, otherwise ContractError.
template <class T>
void check_pair(const DenoisedPair<T>& pair);

template <class T>
struct Decomposition {
    std::vector<T> parallel;
    std::vector<T> orthogonal;
};

inline constexpr double kDefaultReferenceFloor = 1e-12;

// cond - uncond
template <class T>
std::vector<T> update_direction(const DenoisedPair<T>& pair);

// cond + (w - 1) * (cond - uncond), which equals uncond + w * (cond - uncond).
template <class T>
std::vector<T> cfg_combine(const DenoisedPair<T>& pair, double w);

// Splits delta into the part along `reference` and the remainder.
// Throws DegenerateReferenceError if |reference| < floor.
template <class T>
Decomposition<T> split_parallel_orthogonal(std::span<const T> delta, std::span<const T> reference,
                                           double floor = kDefaultReferenceFloor);

// delta * min(1, r / |delta|); identity when r <= 0.
template <class T>
std::vector<T> clamp_norm(std::span<const T> delta, double r);

// Exponential running sum of update directions, one per trajectory.
// The buffer starts as the zero vector and takes its length from the first
// update.
template <class T>
class MomentumState {
public:
    explicit MomentumState(double beta) : beta_(beta) {}

    double beta() const noexcept { return beta_; }
    std::span<const T> running_average() const noexcept { return running_average_; }
    bool empty() const noexcept { return running_average_.empty(); }

    // running_average <- delta + beta * running_average
    std::span<const T> update(std::span<const T> delta);

    void reset() { running_average_.clear(); }

private:
    double beta_;
    std::vector<T> running_average_;
};

template <class T>
std::vector<T> momentum_update(MomentumState<T>& state, std::span<const T> delta);

struct ApgDiagnostics {
    double raw_update_norm = 0.0;       // |cond - uncond|
    double effective_update_norm = 0.0;  // after momentum and rescaling
    double parallel_norm = 0.0;
    bool rescaled = false;
    bool degenerate_reference = false;  // |cond| below floor, whole update kept as orthogonal
};

// Momentum (if beta != 0), then rescaling (if r > 0), then projection onto
// cond. Returns cond + (w - 1) * (orthogonal + eta * parallel).
// `state` may be null only when params.beta == 0.
template <class T>
std::vector<T> apg_update(const DenoisedPair<T>& pair, const GuidanceParams& params,
                          MomentumState<T>* state, ApgDiagnostics* diagnostics = nullptr);

// Diagnostic multiplier 1 + (w - 1) * |dD_parallel| / |cond|. alignment is the
// sign of <dD, cond>, so a parallel component pointing against cond is
// distinguishable from one pointing along it.
struct GainFactor {
    double value = 1.0;
    int alignment = 0;
};

template <class T>
GainFactor gain_factor(const DenoisedPair<T>& pair, double w,
                       double floor = kDefaultReferenceFloor);

// 0.5 * |cond - uncond|^2. Its gradient with respect to cond is the update
// direction, so cfg_combine is one ascent step of size w - 1.
template <class T>
double cfg_objective(const DenoisedPair<T>& pair);

}  // namespace pglab
