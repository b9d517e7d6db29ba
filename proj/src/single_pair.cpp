#include "pollinet/single_pair.hpp"

#include <cmath>
#include <stdexcept>

#include "pollinet/errors.hpp"
#include "pollinet/mean_field.hpp"

namespace pollinet {

void PairParams::validate() const {
    rates.validate();
    if (!(c > 0.0 && k > 0.0 && h > 0.0)) throw std::invalid_argument("pair parameters c, k, h must be positive");
}

namespace {
// f evaluated with the resource argument clamped at 0, so the window edges
// (where g^P vanishes up to rounding) stay evaluable inside searches.
double f_clamped(double x, const PairParams& pair) {
    const double gp = g_p(pair.rates, pair.c * x);
    const double r = std::max(0.0, (pair.c / pair.k) * gp);
    return g_a(pair.rates, r) / pair.h - x;
}

struct Window {
    double lo, hi;
};

Window pair_window(const PairParams& pair) {
    const GpZeros z = gp_zeros(pair.rates);
    return {z.lower / pair.c, z.upper / pair.c};
}

// golden-section maximum of a unimodal function on [lo, hi]
template <typename F>
double golden_max(F&& f, double lo, double hi) {
    const double inv_phi = 0.6180339887498948482;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 300 && (b - a) > 1e-14 * std::max(1.0, std::abs(b)); ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

template <typename F>
double bisect_root(F&& f, double lo, double hi) {
    double flo = f(lo);
    for (int it = 0; it < 200 && (hi - lo) > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((flo <= 0.0) == (fm <= 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

PairEquilibrium classify_positive(const PairParams& pair, double a_inf) {
    PairEquilibrium eq;
    eq.poll = a_inf;
    eq.plant = g_p(pair.rates, pair.c * a_inf) / pair.k;
    const double j11 = -pair.k * eq.plant;
    const double j12 = pair.c * eq.plant * dg_p(pair.rates, pair.c * a_inf);
    const double j21 = pair.c * a_inf * dg_a(pair.rates, pair.c * eq.plant);
    const double j22 = -pair.h * a_inf;
    const double trace = j11 + j22;
    const double det = j11 * j22 - j12 * j21;
    if (det > 0.0)
        eq.stability = (trace < 0.0) ? Stability::Stable : Stability::Unstable;
    else if (det < 0.0)
        eq.stability = Stability::Unstable;
    else
        eq.stability = Stability::NonHyperbolic;
    return eq;
}
}  // namespace

double f_aux(double x, const PairParams& pair) {
    pair.validate();
    const Window w = pair_window(pair);
    if (!(x > w.lo && x < w.hi)) throw std::domain_error("f_aux: argument outside the positivity window");
    return g_a(pair.rates, (pair.c / pair.k) * g_p(pair.rates, pair.c * x)) / pair.h - x;
}

EquilibriumReport count_and_solve(const PairParams& pair) {
    pair.validate();
    EquilibriumReport report;

    PairEquilibrium null_eq;
    null_eq.plant = null_eq.poll = 0.0;
    const double g0 = std::max(g_p(pair.rates, 0.0), g_a(pair.rates, 0.0));
    null_eq.stability = (g0 < 0.0) ? Stability::Stable : (g0 > 0.0 ? Stability::Unstable : Stability::NonHyperbolic);
    report.equilibria.push_back(null_eq);

    const Viability v = viability_check(pair.rates);
    if (!v.plant_viable || !v.poll_viable) return report;

    const Window w = pair_window(pair);
    report.window_lo = w.lo;
    report.window_hi = w.hi;
    auto f = [&](double x) { return f_clamped(x, pair); };

    const double x_peak = golden_max(f, w.lo, w.hi);
    const double f_max = f(x_peak);
    report.f_max = f_max;

    if (std::abs(f_max) <= 1e-12) {
        // tangency: one non-hyperbolic positive equilibrium
        PairEquilibrium eq = classify_positive(pair, x_peak);
        eq.stability = Stability::NonHyperbolic;
        report.equilibria.push_back(eq);
        return report;
    }
    if (f_max < 0.0) return report;

    // f < 0 at both edges, > 0 at the peak: one root on each side
    const double a_minus = bisect_root(f, w.lo, x_peak);
    const double a_plus = bisect_root(f, x_peak, w.hi);
    PairEquilibrium lo_eq = classify_positive(pair, a_minus);
    PairEquilibrium hi_eq = classify_positive(pair, a_plus);

    // cross-check: det(J) = -P A h k f'(A), so the smaller root (f' > 0) is
    // a saddle and the larger (f' < 0) is attracting
    if (lo_eq.stability != Stability::Unstable || hi_eq.stability != Stability::Stable)
        throw std::logic_error("count_and_solve: Jacobian classification contradicts the root ordering");

    report.equilibria.push_back(lo_eq);
    report.equilibria.push_back(hi_eq);
    return report;
}

Nullclines nullclines(const PairParams& pair, int grid_resolution) {
    pair.validate();
    if (grid_resolution < 2) throw std::invalid_argument("nullclines: resolution must be >= 2");
    Nullclines out;

    const Viability v = viability_check(pair.rates);
    if (v.plant_viable) {
        const Window w = pair_window(pair);
        for (int s = 0; s < grid_resolution; ++s) {
            const double a = w.lo + (w.hi - w.lo) * static_cast<double>(s) / (grid_resolution - 1);
            const double p = std::max(0.0, g_p(pair.rates, pair.c * a)) / pair.k;
            out.plant.emplace_back(p, a);
        }
    }
    if (v.poll_viable) {
        const RateParams& r = pair.rates;
        const double p_start = r.d_a * r.beta_a / (pair.c * (r.alpha_a - r.d_a * r.gamma_a));
        double p_end = 2.0 * p_start;
        try {
            p_end = std::max(p_end, 2.0 * gp_max(r).value / pair.k);
        } catch (const NoViableWindow&) {
        }
        const EquilibriumReport rep = count_and_solve(pair);
        for (const auto& eq : rep.equilibria) p_end = std::max(p_end, 2.0 * eq.plant);
        for (int s = 0; s < grid_resolution; ++s) {
            const double p = p_start + (p_end - p_start) * static_cast<double>(s) / (grid_resolution - 1);
            const double a = std::max(0.0, g_a(pair.rates, pair.c * p)) / pair.h;
            out.poll.emplace_back(p, a);
        }
    }
    return out;
}

Community make_pair_community(double c) {
    Community comm;
    comm.n = comm.m = 1;
    comm.x = {0.5};
    comm.y = {0.5};
    comm.g = {1};
    comm.c = {c};
    comm.spec_description = "single pair, weight c=" + std::to_string(c);
    comm.rebuild_neighbor_lists();
    return comm;
}

std::vector<int> phase_portrait(const PairParams& pair, const std::vector<std::pair<double, double>>& initial_points,
                                double t_end) {
    pair.validate();
    const EquilibriumReport report = count_and_solve(pair);
    const Community comm = make_pair_community(pair.c);
    const Kernels kernels{KernelSpec::constant(pair.k), KernelSpec::constant(pair.h)};

    std::vector<int> labels;
    labels.reserve(initial_points.size());
    for (const auto& [p0, a0] : initial_points) {
        const Trajectory traj =
            integrate_ode({p0, a0}, comm, pair.rates, kernels, t_end, {t_end});
        const double p = traj.values.back()[0];
        const double a = traj.values.back()[1];
        int label = -1;
        for (std::size_t e = 0; e < report.equilibria.size(); ++e) {
            const auto& eq = report.equilibria[e];
            if (std::hypot(p - eq.plant, a - eq.poll) < 1e-3) {
                label = static_cast<int>(e);
                break;
            }
        }
        labels.push_back(label);
    }
    return labels;
}

}  // namespace pollinet
