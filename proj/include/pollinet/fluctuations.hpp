#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pollinet/gillespie.hpp"
#include "pollinet/matrix.hpp"
#include "pollinet/mean_field.hpp"
#include "pollinet/trajectory.hpp"

namespace pollinet {

/// Per-species diffusion coefficients of the limiting fluctuation SDE:
///   plant i: sqrt([b^P(R_i) + d^P(R_i) + (1/n) sum_l k(x_i,x_l) P_l] P_i),
/// pollinator side mirrored. Layout matches the mean-field state.
std::vector<double> diffusion_coefficients(const std::vector<double>& mean_field_state, const Community& community,
                                           const RateParams& params, const Kernels& kernels);

/// Fills its argument with iid standard normal draws (test hook for coupled
/// noise refinements).
using NoiseFill = std::function<void(std::vector<double>&)>;

/// Euler-Maruyama driver for the linear fluctuation SDE
///   d eta = J(t) eta dt + sigma(t) dW
/// with J the mean-field Jacobian and sigma the diffusion coefficients, both
/// evaluated along the (linearly interpolated) ODE trajectory. The step grid
/// is fixed by (dt, record times), so coefficient tables can be shared across
/// replicas.
class OuDriver {
  public:
    OuDriver(const Trajectory& ode_trajectory, const Community& community, const RateParams& params,
             const Kernels& kernels, double dt, std::vector<double> record_times);

    Trajectory run(const std::vector<double>& eta0, std::uint64_t seed, std::uint64_t replica = 0) const;
    Trajectory run_with_noise(const std::vector<double>& eta0, const NoiseFill& noise) const;

    Matrix drift_at(double t) const;
    std::vector<double> sigma_at(double t) const;

    std::size_t dim() const { return dim_; }
    const std::vector<double>& record_times() const { return record_times_; }

  private:
    const Trajectory& ode_;
    const Community& community_;
    RateParams params_;
    Kernels kernels_;
    std::vector<double> record_times_;
    std::size_t dim_;
    struct Step {
        double t, h;
        bool record_after;
    };
    std::vector<Step> steps_;
    // flat per-step coefficient tables (empty when recomputing on the fly)
    std::vector<double> drift_cache_;  // steps x dim^2
    std::vector<double> sigma_cache_;  // steps x dim
    bool cache_coefficients_ = true;   // large systems recompute per step instead
};

/// One OU path with default options; deterministic given (seed, replica).
Trajectory simulate_ou(const Trajectory& ode_trajectory, const Community& community, const RateParams& params,
                       const Kernels& kernels, const std::vector<double>& eta0, double dt, std::uint64_t seed,
                       std::uint64_t replica = 0, std::vector<double> record_times = {});

/// sqrt(K) (counts/K - ODE) per replica at the shared record times. All
/// trajectories must carry identical time grids (AlignmentError otherwise).
struct FluctuationSamples {
    std::vector<double> times;
    std::vector<std::vector<std::vector<double>>> eta;  // [time][replica][coordinate]
};
FluctuationSamples empirical_fluctuations(const std::vector<Trajectory>& ibm_trajectories,
                                          const Trajectory& ode_trajectory, int K);

struct MomentSummary {
    std::vector<double> mean, variance;  // per coordinate, variance with 1/(R-1)
};
MomentSummary moments(const std::vector<std::vector<double>>& samples);

}  // namespace pollinet
