#pragma once

#include <vector>

#include "pollinet/network.hpp"
#include "pollinet/rates.hpp"

namespace pollinet {

/// One plant species and one pollinator species, connected, with interaction
/// weight c and constant competition strengths k (plants) and h (pollinators):
///   dP/dt = (g^P(cA) - kP) P,   dA/dt = (g^A(cP) - hA) A.
struct PairParams {
    RateParams rates;
    double c = 1.0, k = 1.0, h = 1.0;

    void validate() const;
};

enum class Stability { Stable, Unstable, NonHyperbolic };

struct PairEquilibrium {
    double plant = 0.0, poll = 0.0;
    Stability stability = Stability::Stable;
};

/// Null equilibrium first, then positive equilibria sorted by ascending
/// pollinator abundance.
struct EquilibriumReport {
    std::vector<PairEquilibrium> equilibria;
    double window_lo = 0.0, window_hi = 0.0;  // A-window (C0-/c, C0+/c), 0 when not viable
    double f_max = 0.0;                       // max of the auxiliary function on the window

    int positive_count() const { return static_cast<int>(equilibria.size()) - 1; }
    const PairEquilibrium& null_equilibrium() const { return equilibria.front(); }
};

/// Auxiliary root function of the equilibrium analysis:
///   f(x) = (1/h) g^A((c/k) g^P(cx)) - x,
/// defined for cx inside the positivity window of g^P; increasing then
/// decreasing there, and its zeros are the positive equilibrium pollinator
/// abundances. Throws std::domain_error outside the window.
double f_aux(double x, const PairParams& pair);

/// Locate every equilibrium and classify stability through the 2x2 Jacobian
///   J = [[-kP, cP (g^P)'(cA)], [cA (g^A)'(cP), -hA]]
/// (trace < 0, so the determinant sign decides). A tangency with
/// |max f| <= 1e-12 is reported as one non-hyperbolic equilibrium.
EquilibriumReport count_and_solve(const PairParams& pair);

struct Nullclines {
    std::vector<std::pair<double, double>> plant;  // (P, A) points where dP/dt = 0, P > 0
    std::vector<std::pair<double, double>> poll;   // (P, A) points where dA/dt = 0, A > 0
};

/// Sampled nullclines: plant branch P = g^P(cA)/k over the A-window, and
/// pollinator branch A = g^A(cP)/h where g^A(cP) >= 0.
Nullclines nullclines(const PairParams& pair, int grid_resolution);

/// Basin label per initial point: 0 = null equilibrium, 1.. = index into the
/// positive equilibria of count_and_solve, -1 = unresolved at t_end.
std::vector<int> phase_portrait(const PairParams& pair, const std::vector<std::pair<double, double>>& initial_points,
                                double t_end);

/// The 1x1 community realizing the pair system inside the general machinery.
Community make_pair_community(double c);

}  // namespace pollinet
