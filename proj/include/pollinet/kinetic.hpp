#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pollinet/matrix.hpp"
#include "pollinet/mean_field.hpp"
#include "pollinet/network.hpp"
#include "pollinet/rates.hpp"
#include "pollinet/rk45.hpp"

namespace pollinet {

/// Plant/pollinator densities on the uniform trait grid x_i = i/N, i = 0..N.
/// Masses are rectangular-rule sums (1/N) sum_i.
struct DensityField {
    int N = 0;
    std::vector<double> p, a;  // length N+1 each

    double gridpoint(int i) const { return static_cast<double>(i) / N; }
    double plant_mass() const;
    double poll_mass() const;
    void validate() const;
};

/// Continuum interaction kernel psi(x,y) = c(x,y) phi(x,y), where c is the
/// limit of n c~/(n+m) with m = n, i.e. half the harvest intensity.
double psi(double x, double y, const GraphonSpec& graphon, const HarvestSpec& harvest);

/// psi tabulated at the (N+1)^2 gridpoints.
Matrix psi_grid(const GraphonSpec& graphon, const HarvestSpec& harvest, int N);

/// Rectangular-rule right-hand side:
///   dp_i/dt = [g^P((1/N) sum_j psi_ij a_j) - (1/N) sum_j k(x_i,x_j) p_j] p_i
/// and the pollinator mirror.
std::pair<std::vector<double>, std::vector<double>> grid_rhs(const DensityField& field, const Matrix& psi_on_grid,
                                                             const RateParams& params, const KernelSpec& kernel_k,
                                                             const KernelSpec& kernel_h);

struct KineticSnapshot {
    double t = 0.0;
    DensityField field;
};

/// Same adaptive integrator contract as the mean-field module
/// (positivity-preserving, extinction floor, StiffnessError on underflow).
std::vector<KineticSnapshot> integrate_kinetic(const DensityField& init, const Matrix& psi_on_grid,
                                               const RateParams& params, const KernelSpec& kernel_k,
                                               const KernelSpec& kernel_h, double t_end,
                                               const std::vector<double>& record_times,
                                               const rk45::Options& options = {});

/// Dirac-collapse instrument: share of rectangular-rule mass in the heaviest
/// cell, per side (ties broken toward the lower index).
struct ConcentrationMetrics {
    double plant_max_fraction = 0.0, poll_max_fraction = 0.0;
    int plant_argmax = 0, poll_argmax = 0;
    double plant_mass = 0.0, poll_mass = 0.0;
    bool plant_zero_mass = false, poll_zero_mass = false;
};
ConcentrationMetrics concentration_metrics(const DensityField& field);

/// The unique candidate stable stationary state under constant kernels and
/// psi increasing in each variable: a plant atom of mass (max g^P)/k at the
/// root x0 of
///   F(x) = g^A(plantMass psi(x,1)) psi(x,1) - h argmax g^P
/// and a pollinator atom of mass (argmax g^P)/psi(x0,1) at trait 1.
struct StableStatePrediction {
    bool exists = false;
    double x0 = 0.0;
    double plant_mass = 0.0, poll_mass = 0.0;
};
StableStatePrediction predicted_stable_state(const RateParams& params, double k, double h,
                                             const std::function<double(double, double)>& psi_fn);

/// Max stationarity defect over cells carrying mass > 1e-9.
double stationarity_residual(const DensityField& field, const Matrix& psi_on_grid, const RateParams& params,
                             const KernelSpec& kernel_k, const KernelSpec& kernel_h);

struct WeightedAtom {
    double position = 0.0;
    double weight = 0.0;
};

struct W1Result {
    double distance = 0.0;
    bool composite = false;  // masses differed; distance = mass gap + W1 of normalized measures
};

/// Exact Kantorovich-Rubinstein distance between atomic measures on [0,1]
/// from sorted cumulative functions. Unequal masses use the documented
/// composite convention |massA - massB| + W1(normalized).
W1Result wasserstein1(std::vector<WeightedAtom> a, std::vector<WeightedAtom> b);

/// The n = m = N+1 community with gridpoint traits, complete graph, weights
/// psi(x_i,y_j)/N and kernels scaled by (N+1)/N, under which the mean-field
/// ODE coincides exactly with the grid scheme. (The sampled-mean weight would
/// be c~/(n+m) = psi/(N+1); the (N+1)/N factor absorbs the endpoint of the
/// rectangular rule.)
struct LatticeSystem {
    Community community;
    double kernel_scale = 1.0;
};
LatticeSystem lattice_community(const HarvestSpec& harvest, int N);

/// Kinetic-limit verification: for each n (with m = n), integrate sampled
/// n-species ODE systems started from P_i = p0(x_i), A_j = a0(y_j), and report
/// the W1 distance between the empirical species measures and the grid
/// densities, averaged over seeds.
struct ConvergenceStudyResult {
    std::vector<int> ns;
    std::vector<double> times;
    Matrix mean_w1_plants;                               // ns x times
    Matrix mean_w1_polls;                                // ns x times
    std::vector<std::vector<std::vector<double>>> raw_plants;  // [n][seed][time]
    std::vector<std::vector<std::vector<double>>> raw_polls;
};
ConvergenceStudyResult convergence_study(const std::vector<int>& ns, const GraphonSpec& graphon,
                                         const HarvestSpec& harvest, const RateParams& params, const Kernels& kernels,
                                         int grid_n, double t_end, const std::vector<double>& record_times,
                                         std::uint64_t seed, int seeds_per_n,
                                         const std::function<double(double)>& p0,
                                         const std::function<double(double)>& a0, int jobs = 1,
                                         const rk45::Options& options = {});

}  // namespace pollinet
