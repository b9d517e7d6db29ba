#pragma once

#include <vector>

#include "pollinet/matrix.hpp"
#include "pollinet/network.hpp"
#include "pollinet/rates.hpp"
#include "pollinet/rk45.hpp"
#include "pollinet/trajectory.hpp"

namespace pollinet {

/// Plant-side and pollinator-side competition kernels.
struct Kernels {
    KernelSpec plant;
    KernelSpec poll;
};

/// State layout for the large-K limit: [P_1..P_n, A_1..A_m], entrywise >= 0.
///
/// dP_i/dt = [g^P(sum_{j~i} C_ij A_j) - (1/n) sum_l k(x_i,x_l) P_l] P_i
/// dA_j/dt = [g^A(sum_{i~j} C_ij P_i) - (1/m) sum_l h(y_j,y_l) A_l] A_j
std::vector<double> ode_rhs(const std::vector<double>& state, const Community& community, const RateParams& params,
                            const Kernels& kernels);

/// Repeated right-hand-side evaluation without reallocation.
class MeanFieldSystem {
  public:
    MeanFieldSystem(const Community& community, const RateParams& params, const Kernels& kernels);

    void operator()(double t, const std::vector<double>& y, std::vector<double>& dydt);

    std::size_t dim() const { return static_cast<std::size_t>(community_.n + community_.m); }

  private:
    const Community& community_;
    RateParams params_;
    Kernels kernels_;
    std::vector<double> res_p_, res_a_, comp_p_, comp_a_, clamped_;
    friend std::vector<double> ode_rhs(const std::vector<double>&, const Community&, const RateParams&,
                                       const Kernels&);
};

/// Adaptive RK45 with step rejection on sign crossing and a 1e-12 extinction
/// floor; throws StiffnessError on step underflow.
Trajectory integrate_ode(const std::vector<double>& init, const Community& community, const RateParams& params,
                         const Kernels& kernels, double t_end, const std::vector<double>& record_times,
                         const rk45::Options& options = {});

/// Max over species of the stationarity defect: zero-abundance species
/// contribute 0, others |g(resource) - competition|.
double equilibrium_residual(const std::vector<double>& state, const Community& community, const RateParams& params,
                            const Kernels& kernels);

/// Analytic Jacobian of the vector field at `state`, (n+m) x (n+m).
Matrix jacobian(const std::vector<double>& state, const Community& community, const RateParams& params,
                const Kernels& kernels);

}  // namespace pollinet
