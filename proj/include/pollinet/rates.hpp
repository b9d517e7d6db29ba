#pragma once

#include <string>
#include <vector>

#include "pollinet/grid2d.hpp"
#include "pollinet/network.hpp"

namespace pollinet {

/// Parameters of the demographic rate family
///   b^P(R) = alphaP R / (betaP + gammaP R),  d^P(R) = dP + deltaP R,
///   b^A(R) = alphaA R / (betaA + gammaA R),  d^A(R) = dA,
/// all strictly positive. Birth rates are bounded by alpha/gamma. The plant
/// death rate grows with harvested resources (the interaction trade-off).
///
/// The family is deliberately fixed: zeros, maxima, Jacobians, and the
/// stationary-state predictions downstream all use its closed forms. A
/// different Lipschitz rate family would slot in behind these signatures but
/// forfeits the closed-form analytics.
struct RateParams {
    double alpha_p = 0, beta_p = 0, gamma_p = 0, d_p = 0, delta_p = 0;
    double alpha_a = 0, beta_a = 0, gamma_a = 0, d_a = 0;

    void validate() const;

    double sup_birth_p() const { return alpha_p / gamma_p; }
    double sup_birth_a() const { return alpha_a / gamma_a; }
};

double birth_p(const RateParams& p, double r);
double death_p(const RateParams& p, double r);
double g_p(const RateParams& p, double r);
double birth_a(const RateParams& p, double r);
double death_a(const RateParams& p, double r);
double g_a(const RateParams& p, double r);

/// Analytic derivatives, used by the mean-field Jacobian.
double dg_p(const RateParams& p, double r);
double dg_a(const RateParams& p, double r);

/// The two positive zeros of g^P, ordered; g^P > 0 exactly between them.
/// Throws NoViableWindow when g^P is never positive.
struct GpZeros {
    double lower = 0, upper = 0;
};
GpZeros gp_zeros(const RateParams& p);

/// Location and value of the interior maximum of g^P on [0, inf).
/// Throws NoViableWindow when the stationary point is not positive.
struct GpMax {
    double r_star = 0, value = 0;
};
GpMax gp_max(const RateParams& p);

struct Viability {
    bool plant_viable = false;
    bool poll_viable = false;
};
/// plant_viable iff g^P is positive somewhere; poll_viable iff sup g^A > 0.
Viability viability_check(const RateParams& p);

/// Competition kernel: constant or tabulated (bilinear, continuous, >= 0).
class KernelSpec {
  public:
    static KernelSpec constant(double value);
    static KernelSpec tabulated(Grid2d grid);

    bool is_constant() const { return is_constant_; }
    double constant_value() const { return value_; }
    double operator()(double s, double t) const { return is_constant_ ? value_ : grid_(s, t); }

    std::string describe() const;

  private:
    KernelSpec() = default;
    bool is_constant_ = true;
    double value_ = 0.0;
    Grid2d grid_;
};

/// out_i = sum_{j ~ i} C_ij * pollAbund_j / scale. For the stochastic model
/// scale = K and pollAbund holds raw counts; for the ODE limit scale = 1.
std::vector<double> resources_plants(const Community& community, const std::vector<double>& poll_abund, double scale);

/// Mirror image: out_j = sum_{i ~ j} C_ij * plantAbund_i / scale.
std::vector<double> resources_pollinators(const Community& community, const std::vector<double>& plant_abund,
                                          double scale);

/// out_i = (1/n) sum_l kernel(traits_i, traits_l) * abund_l.
std::vector<double> competition(const KernelSpec& kernel, const std::vector<double>& traits,
                                const std::vector<double>& abund);

}  // namespace pollinet
