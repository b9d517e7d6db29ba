// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "pollinet/fluctuations.hpp"
#include "pollinet/gillespie.hpp"
#include "pollinet/kinetic.hpp"
#include "pollinet/mean_field.hpp"
#include "pollinet/network.hpp"
#include "pollinet/rates.hpp"
#include "pollinet/rng.hpp"
#include "pollinet/single_pair.hpp"
#include "support.hpp"

using namespace pollinet;
using namespace testsupport;

namespace {

int g_failures = 0;
std::vector<std::string> g_notes;

__attribute__((format(printf, 1, 2))) void note(const char* fmt, ...) {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof(buf), fmt, args);
    va_end(args);
    g_notes.push_back(buf);
}

void criterion(int number, const std::string& name, const std::function<bool()>& body) {
    g_notes.clear();
    const auto start = std::chrono::steady_clock::now();
    bool ok = false;
    std::string error;
    try {
        ok = body();
    } catch (const std::exception& e) {
        error = e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] criterion %d: %s (%.1fs)\n", ok ? "PASS" : "FAIL", number, name.c_str(), seconds);
    for (const auto& n : g_notes) std::printf("    %s\n", n.c_str());
    if (!error.empty()) std::printf("    exception: %s\n", error.c_str());
    if (!ok) ++g_failures;
    std::fflush(stdout);
}

bool check(bool cond, const char* what) {
    if (!cond) note("FAILED: %s", what);
    return cond;
}

Kernels const_kernels(double k, double h) { return {KernelSpec::constant(k), KernelSpec::constant(h)}; }

// ---------------------------------------------------------------- criterion 1
bool rate_family_analytics() {
    RateParams p = fig3_rates();  // alphaP=9, betaP=gammaP=1, deltaP=3, dP=1
    const GpZeros z = gp_zeros(p);
    const GpMax gm = gp_max(p);
    const double s13 = std::sqrt(13.0), s3 = std::sqrt(3.0);
    bool ok = true;
    ok &= check(std::abs(z.lower - (5.0 - s13) / 6.0) <= 1e-10, "lower zero of g^P to 1e-10");
    ok &= check(std::abs(z.upper - (5.0 + s13) / 6.0) <= 1e-10, "upper zero of g^P to 1e-10");
    ok &= check(std::abs(gm.r_star - (s3 - 1.0)) <= 1e-10, "argmax of g^P to 1e-10");
    ok &= check(std::abs(gm.value - (11.0 - 6.0 * s3)) <= 1e-10, "max of g^P to 1e-10");
    note("zeros = (%.12f, %.12f), max = (%.12f, %.12f)", z.lower, z.upper, gm.r_star, gm.value);
    return ok;
}

// ---------------------------------------------------------------- criterion 2
bool pair_equilibrium_structure() {
    bool ok = true;
    PairParams pair;
    pair.rates = fig3_rates(2.0, 1.0);
    pair.c = pair.k = pair.h = 1.0;
    const EquilibriumReport rep = count_and_solve(pair);
    ok &= check(rep.positive_count() == 2, "two positive equilibria for the figure parameters");
    if (rep.positive_count() == 2) {
        const PairEquilibrium lo = rep.equilibria[1], hi = rep.equilibria[2];
        ok &= check(lo.poll < hi.poll, "equilibria ordered by pollinator abundance");
        ok &= check(lo.stability == Stability::Unstable, "smaller-A equilibrium unstable");
        ok &= check(hi.stability == Stability::Stable, "larger-A equilibrium stable");
        for (const PairEquilibrium* eq : {&lo, &hi}) {
            const double res1 = std::abs(eq->plant - g_p(pair.rates, pair.c * eq->poll) / pair.k);
            const double res2 =
                std::abs(eq->poll - g_a(pair.rates, (pair.c / pair.k) * g_p(pair.rates, pair.c * eq->poll)) / pair.h);
            ok &= check(res1 <= 1e-9 && res2 <= 1e-9, "equilibrium system residual <= 1e-9");
        }
        note("equilibria: (%.6f, %.6f) unstable, (%.6f, %.6f) stable", lo.plant, lo.poll, hi.plant, hi.poll);
    }
    PairParams barren;
    barren.rates = fig3_rates(3.0, 1.2);
    barren.c = barren.k = 1.0;
    barren.h = 10.0;
    const EquilibriumReport none = count_and_solve(barren);
    ok &= check(none.positive_count() == 0, "no positive equilibria for dA=3, dP=1.2, h=10");
    return ok;
}

// ---------------------------------------------------------------- criterion 3
Community lln_community() {
    Community comm;
    comm.n = comm.m = 3;
    comm.x = {0.25, 0.5, 0.75};
    comm.y = {0.25, 0.5, 0.75};
    comm.g.assign(9, 1);
    comm.c.assign(9, 1.0 / 3.0);
    comm.spec_description = "fixed complete 3x3, weights 1/3";
    comm.rebuild_neighbor_lists();
    return comm;
}

bool lln_scaling() {
    const Community comm = lln_community();
    const RateParams p = fig3_rates(2.0, 1.0);
    const Kernels kernels = const_kernels(0.3, 10.0);
    // symmetric system reduces to the pair with c = 1, k = 0.3, h = 10
    PairParams pair;
    pair.rates = p;
    pair.k = 0.3;
    pair.h = 10.0;
    const EquilibriumReport rep = count_and_solve(pair);
    if (!check(rep.positive_count() == 2, "reference pair has a stable equilibrium")) return false;
    const PairEquilibrium eq = rep.equilibria[2];
    note("per-species equilibrium: P=%.4f A=%.4f", eq.plant, eq.poll);

    const double t_end = 5.0;
    std::vector<double> record;
    for (double t = 0.0; t <= t_end + 1e-12; t += 0.05) record.push_back(t);
    const int replicas = 200;

    std::vector<double> rms;
    for (int K : {100, 400, 1600}) {
        std::vector<long long> p0(3, llround(eq.plant * K)), a0(3, llround(eq.poll * K));
        std::vector<double> state;
        for (long long c : p0) state.push_back(static_cast<double>(c) / K);
        for (long long c : a0) state.push_back(static_cast<double>(c) / K);
        const Trajectory ode = integrate_ode(state, comm, p, kernels, t_end, record);
        const auto sims = simulate_replicas(comm, p, kernels, K, p0, a0, t_end, record, 1000 + K, replicas);
        double sum_sq = 0.0;
        for (const auto& sim : sims) {
            double sup = 0.0;
            for (std::size_t s = 0; s < record.size(); ++s)
                for (std::size_t c = 0; c < 6; ++c)
                    sup = std::max(sup, std::abs(sim.trajectory.values[s][c] - ode.values[s][c]));
            sum_sq += sup * sup;
        }
        rms.push_back(std::sqrt(sum_sq / replicas));
    }
    note("rms sup errors: K=100: %.4f, K=400: %.4f, K=1600: %.4f (ratios %.2f, %.2f)", rms[0], rms[1], rms[2],
         rms[0] / rms[1], rms[1] / rms[2]);
    bool ok = true;
    ok &= check(rms[0] > rms[1] && rms[1] > rms[2], "rms sup error strictly decreasing in K");
    ok &= check(rms[0] / rms[1] >= 1.4 && rms[0] / rms[1] <= 2.9, "K=100/K=400 ratio in [1.4, 2.9]");
    ok &= check(rms[1] / rms[2] >= 1.4 && rms[1] / rms[2] <= 2.9, "K=400/K=1600 ratio in [1.4, 2.9]");
    return ok;
}

// ---------------------------------------------------------------- criterion 4
bool clt_moments() {
    PairParams pair;
    pair.rates = fig3_rates(2.0, 1.0);
    const EquilibriumReport rep = count_and_solve(pair);
    if (!check(rep.positive_count() == 2, "stable pair equilibrium exists")) return false;
    const PairEquilibrium eq = rep.equilibria[2];
    const Community comm = make_pair_community(1.0);
    const Kernels kernels = const_kernels(1.0, 1.0);

    const int K = 10000;
    const double t_end = 2.0;
    const std::vector<long long> p0{llround(eq.plant * K)}, a0{llround(eq.poll * K)};
    const std::vector<double> state{static_cast<double>(p0[0]) / K, static_cast<double>(a0[0]) / K};
    const std::vector<double> record{0.0, 1.0, 2.0};

    const Trajectory ode = integrate_ode(state, comm, pair.rates, kernels, t_end, record);
    const int replicas = 200;
    const auto sims = simulate_replicas(comm, pair.rates, kernels, K, p0, a0, t_end, record, 42, replicas);
    std::vector<Trajectory> ibm;
    for (const auto& sim : sims) ibm.push_back(sim.trajectory);
    const FluctuationSamples emp = empirical_fluctuations(ibm, ode, K);
    const MomentSummary ms = moments(emp.eta.back());

    const int ou_paths = 2000;
    const OuDriver driver(ode, comm, pair.rates, kernels, 1e-3, record);
    std::vector<std::vector<double>> ou_final(ou_paths);
    for (int r = 0; r < ou_paths; ++r) ou_final[r] = driver.run({0.0, 0.0}, 43, r).values.back();
    const MomentSummary ou = moments(ou_final);

    bool ok = true;
    for (int c = 0; c < 2; ++c) {
        const double se = std::sqrt(ms.variance[c] / replicas);
        ok &= check(std::abs(ms.mean[c]) <= 3.0 * se, "empirical mean of eta within 3 s.e. of 0");
        const double ratio = ms.variance[c] / ou.variance[c];
        ok &= check(ratio >= 0.75 && ratio <= 1.33, "variance ratio IBM/OU in [0.75, 1.33]");
        note("coordinate %d: mean=%.3f (3se=%.3f), var ratio=%.3f (ibm %.2f vs ou %.2f)", c, ms.mean[c], 3.0 * se,
             ratio, ms.variance[c], ou.variance[c]);
    }
    return ok;
}

// ---------------------------------------------------------------- criterion 5
bool grid_ode_identification() {
    bool ok = true;
    for (int n : {10, 100}) {
        const auto harvest = HarvestSpec::product_xy();
        const LatticeSystem lattice = lattice_community(harvest, n);
        const Matrix psi_mat = psi_grid(GraphonSpec::constant(1.0), harvest, n);
        const RateParams p = kinetic_rates();
        const double k0 = 0.2, h0 = 0.2;

        DensityField f;
        f.N = n;
        f.p.resize(n + 1);
        f.a.resize(n + 1);
        Pcg64 rng(515, n);
        for (auto& v : f.p) v = rng.uniform(0.2, 2.5);
        for (auto& v : f.a) v = rng.uniform(0.2, 2.5);
        const auto [dp, da] = grid_rhs(f, psi_mat, p, KernelSpec::constant(k0), KernelSpec::constant(h0));

        std::vector<double> state = f.p;
        state.insert(state.end(), f.a.begin(), f.a.end());
        const Kernels scaled{KernelSpec::constant(k0 * lattice.kernel_scale),
                             KernelSpec::constant(h0 * lattice.kernel_scale)};
        const auto dydt = ode_rhs(state, lattice.community, p, scaled);
        double worst = 0.0;
        for (int i = 0; i <= n; ++i) {
            worst = std::max(worst, std::abs(dydt[i] - dp[i]));
            worst = std::max(worst, std::abs(dydt[n + 1 + i] - da[i]));
        }
        note("N=%d: max |grid_rhs - ode_rhs| = %.3e", n, worst);
        ok &= check(worst <= 1e-12, "grid scheme equals the lattice ODE to 1e-12");
    }
    return ok;
}

// ---------------------------------------------------------------- criterion 6
bool kinetic_collapse() {
    const int n = 100;
    const double kh = 0.2;  // documented constant competition choice
    const RateParams p = kinetic_rates();
    const auto graphon = GraphonSpec::constant(1.0);
    const auto harvest = HarvestSpec::product_xy();  // psi = xy/2
    const Matrix psi_mat = psi_grid(graphon, harvest, n);

    DensityField f0;
    f0.N = n;
    f0.p.resize(n + 1);
    f0.a.resize(n + 1);
    Pcg64 rng = make_rng(2024, Stream::Init);
    for (auto& v : f0.p) v = rng.uniform(4.0, 8.0);
    for (auto& v : f0.a) v = rng.uniform(1.0, 3.0);

    const auto kk = KernelSpec::constant(kh), hh = KernelSpec::constant(kh);
    const auto snaps = integrate_kinetic(f0, psi_mat, p, kk, hh, 1500.0, {100.0, 500.0, 1500.0});
    const ConcentrationMetrics m = concentration_metrics(snaps.back().field);
    const auto pred =
        predicted_stable_state(p, kh, kh, [&](double x, double y) { return psi(x, y, graphon, harvest); });

    bool ok = true;
    ok &= check(pred.exists, "predicted stable state exists");
    ok &= check(m.plant_max_fraction >= 0.99, "plant mass fraction >= 0.99");
    ok &= check(m.poll_max_fraction >= 0.99, "pollinator mass fraction >= 0.99");
    ok &= check(m.poll_argmax == n, "pollinator atom at the rightmost gridpoint");
    ok &= check(m.plant_argmax > 0 && m.plant_argmax < n, "plant atom strictly interior");
    const double loc = snaps.back().field.gridpoint(m.plant_argmax);
    ok &= check(std::abs(loc - pred.x0) <= 1.0 / n, "plant atom within one grid cell of the predicted root");
    ok &= check(std::abs(m.plant_mass - pred.plant_mass) <= 0.01 * pred.plant_mass,
                "plant mass within 1% of (max g^P)/k");
    note("t=1500: plant frac %.4f at x=%.3f (predicted x0=%.4f), poll frac %.4f at y=%.2f, masses %.4f / %.4f "
         "(predicted %.4f / %.4f)",
         m.plant_max_fraction, loc, pred.x0, m.poll_max_fraction, snaps.back().field.gridpoint(m.poll_argmax),
         m.plant_mass, m.poll_mass, pred.plant_mass, pred.poll_mass);
    return ok;
}

// ---------------------------------------------------------------- criterion 7
bool kinetic_limit_trend() {
    const std::vector<int> ns{50, 100, 200};
    const int seeds = 20;
    const double t_end = 5.0;
    const auto result = convergence_study(
        ns, GraphonSpec::product(), HarvestSpec::constant(1.0, 0.5), kinetic_rates(),
        const_kernels(0.2, 0.2), 100, t_end, {0.0, 5.0}, 4242, seeds, [](double) { return 6.0; },
        [](double) { return 2.0; });
    const std::size_t last = result.times.size() - 1;
    bool ok = true;
    for (std::size_t ni = 0; ni + 1 < ns.size(); ++ni) {
        ok &= check(result.mean_w1_plants(ni, last) > result.mean_w1_plants(ni + 1, last),
                    "plant W1 strictly decreasing in n at t=5");
        ok &= check(result.mean_w1_polls(ni, last) > result.mean_w1_polls(ni + 1, last),
                    "pollinator W1 strictly decreasing in n at t=5");
    }
    note("t=5 plant W1: %.4f, %.4f, %.4f; pollinator W1: %.4f, %.4f, %.4f", result.mean_w1_plants(0, last),
         result.mean_w1_plants(1, last), result.mean_w1_plants(2, last), result.mean_w1_polls(0, last),
         result.mean_w1_polls(1, last), result.mean_w1_polls(2, last));
    // initial distances only reflect sampling of the initial measures
    for (std::size_t ni = 0; ni + 1 < ns.size(); ++ni)
        ok &= check(result.mean_w1_plants(ni, 0) > result.mean_w1_plants(ni + 1, 0),
                    "t=0 sampling error decreasing in n");
    return ok;
}

// ---------------------------------------------------------------- criterion 8
bool invariant_suite() {
    bool ok = true;

    // gillespie: nonnegative counts and statistical mass bound
    {
        const Community comm = lln_community();
        const RateParams p = fig3_rates(2.0, 1.0);
        const auto sims = simulate_replicas(comm, p, const_kernels(0.3, 10.0), 100, {50, 50, 50}, {60, 60, 60}, 1.0,
                                            {0.5, 1.0}, 7, 500);
        double mean_mass = 0.0;
        bool nonneg = true;
        for (const auto& sim : sims) {
            for (const auto& row : sim.trajectory.values)
                for (double v : row) nonneg &= v >= 0.0;
            double mass = 0.0;
            for (int i = 0; i < 3; ++i) mass += sim.trajectory.values.back()[i];
            mean_mass += mass / 3.0;
        }
        mean_mass /= 500.0;
        ok &= check(nonneg, "IBM counts nonnegative");
        ok &= check(mean_mass <= 0.5 * std::exp(p.sup_birth_p() * 1.0), "IBM mean plant mass under e^{sup b^P t}");
    }

    // mean-field: orthant invariance and mass bound
    {
        const Community comm = sample_community(5, 5, GraphonSpec::product(), HarvestSpec::product_xy(0.5),
                                                identity_cdf_inverse(), identity_cdf_inverse(), 31);
        const RateParams p = fig3_rates();
        Pcg64 rng(77, 3);
        std::vector<double> y0(10);
        for (auto& v : y0) v = rng.uniform(0.0, 2.0);
        const Trajectory traj = integrate_ode(y0, comm, p, const_kernels(1, 1), 8.0, {2.0, 8.0});
        bool nonneg = true;
        for (const auto& row : traj.values)
            for (double v : row) nonneg &= v >= 0.0;
        ok &= check(nonneg, "ODE trajectory stays in the nonnegative orthant");
        double mass0 = 0.0, mass_end = 0.0;
        for (int i = 0; i < 5; ++i) {
            mass0 += y0[i];
            mass_end += traj.values.back()[i];
        }
        ok &= check(mass_end <= mass0 * std::exp(p.sup_birth_p() * 8.0) * (1 + 1e-9), "ODE plant mass bound");
    }

    // kinetic: positivity and mass bound
    {
        const int n = 40;
        const RateParams p = kinetic_rates();
        const Matrix psi_mat = psi_grid(GraphonSpec::constant(1.0), HarvestSpec::product_xy(), n);
        DensityField f0;
        f0.N = n;
        f0.p.assign(n + 1, 5.0);
        f0.a.assign(n + 1, 2.0);
        const auto snaps = integrate_kinetic(f0, psi_mat, p, KernelSpec::constant(0.2), KernelSpec::constant(0.2),
                                             4.0, {2.0, 4.0});
        bool nonneg = true;
        for (const auto& snap : snaps) {
            for (double v : snap.field.p) nonneg &= v >= 0.0;
            for (double v : snap.field.a) nonneg &= v >= 0.0;
        }
        ok &= check(nonneg, "kinetic field stays nonnegative");
        ok &= check(snaps.back().field.plant_mass() <= f0.plant_mass() * std::exp(p.sup_birth_p() * 4.0),
                    "kinetic plant mass bound");
    }

    // rates and mean-field derivative checks
    {
        const RateParams p = fig3_rates();
        bool deriv_ok = true;
        for (int k = -3; k <= 3; ++k) {
            const double r = std::pow(10.0, 0.7 * k);
            const double h = 1e-6 * std::max(1.0, r);
            deriv_ok &= std::abs(dg_p(p, r) - (g_p(p, r + h) - g_p(p, r - h)) / (2 * h)) <=
                        1e-6 * std::max(1.0, std::abs(dg_p(p, r)));
            deriv_ok &= std::abs(dg_a(p, r) - (g_a(p, r + h) - g_a(p, r - h)) / (2 * h)) <=
                        1e-6 * std::max(1.0, std::abs(dg_a(p, r)));
        }
        ok &= check(deriv_ok, "rate derivatives match central differences (rel 1e-6)");

        const Community comm = sample_community(4, 4, GraphonSpec::constant(0.8), HarvestSpec::product_xy(0.25),
                                                identity_cdf_inverse(), identity_cdf_inverse(), 83);
        Pcg64 rng(5, 9);
        std::vector<double> y(8);
        for (auto& v : y) v = rng.uniform(0.2, 1.8);
        const Kernels kernels = const_kernels(0.6, 1.1);
        const Matrix jac = jacobian(y, comm, fig3_rates(), kernels);
        bool jac_ok = true;
        for (std::size_t col = 0; col < 8; ++col) {
            const double h = 1e-6 * std::max(1.0, std::abs(y[col]));
            auto yp = y, ym = y;
            yp[col] += h;
            ym[col] -= h;
            const auto fp = ode_rhs(yp, comm, fig3_rates(), kernels);
            const auto fm = ode_rhs(ym, comm, fig3_rates(), kernels);
            for (std::size_t row = 0; row < 8; ++row) {
                const double fd = (fp[row] - fm[row]) / (2 * h);
                jac_ok &= std::abs(jac(row, col) - fd) <= 1e-5 * std::max(1.0, std::abs(fd));
            }
        }
        ok &= check(jac_ok, "mean-field jacobian matches finite differences (rel 1e-5)");
    }

    // network: degree chi-square at 1% and weight moments
    {
        const int n = 50, m = 40;
        const double phi0 = 0.3;
        auto [x, y] = sample_traits(n, m, identity_cdf_inverse(), identity_cdf_inverse(), 123);
        std::vector<long long> hist(m + 1, 0);
        for (int s = 0; s < 1000; ++s) {
            const DegreeStats st = degree_stats(sample_graph(x, y, GraphonSpec::constant(phi0), 5000 + s), n, m);
            for (int d : st.plant_degrees) ++hist[d];
        }
        const double total = 50.0 * 1000.0;
        std::vector<double> observed, expected;
        double obs_acc = 0.0, exp_acc = 0.0;
        for (int d = 0; d <= m; ++d) {
            obs_acc += static_cast<double>(hist[d]);
            exp_acc += total * binomial_pmf(m, phi0, d);
            if (exp_acc >= 5.0) {
                observed.push_back(obs_acc);
                expected.push_back(exp_acc);
                obs_acc = exp_acc = 0.0;
            }
        }
        observed.back() += obs_acc;
        expected.back() += exp_acc;
        double chi2 = 0.0;
        for (std::size_t b = 0; b < observed.size(); ++b)
            chi2 += (observed[b] - expected[b]) * (observed[b] - expected[b]) / expected[b];
        const double crit = chi2_quantile(static_cast<double>(observed.size()) - 1.0, kZ99);
        note("degree chi-square: %.1f vs critical %.1f (df %zu)", chi2, crit, observed.size() - 1);
        ok &= check(chi2 < crit, "pooled plant degrees pass chi-square vs Binomial(m, phi0) at 1%");

        auto [wx, wy] = sample_traits(100, 100, identity_cdf_inverse(), identity_cdf_inverse(), 77);
        std::vector<double> entry;
        for (int s = 0; s < 10000; ++s)
            entry.push_back(sample_weights(wx, wy, HarvestSpec::constant(1.0, 0.5), 40000 + s)[0]);
        const double target = 1.0 / 200.0;
        ok &= check(std::abs(mean(entry) - target) < 3.0 * std_error(entry), "weight mean within 3 s.e. of c/(n+m)");
        ok &= check(200.0 * 200.0 * variance(entry) <= 1.0 / 12.0 * 1.1, "(m+n)^2 variance bounded near 1/12");
    }
    return ok;
}

}  // namespace

int main() {
    criterion(1, "rate-family analytics (zeros and maximum of g^P)", rate_family_analytics);
    criterion(2, "1x1 equilibrium structure", pair_equilibrium_structure);
    criterion(3, "law of large numbers over the K ladder", lln_scaling);
    criterion(4, "CLT moments: empirical fluctuations vs the OU limit", clt_moments);
    criterion(5, "grid/ODE identification on lattice communities", grid_ode_identification);
    criterion(6, "kinetic collapse to a single pair (long-time grid run)", kinetic_collapse);
    criterion(7, "kinetic-limit W1 trend over n", kinetic_limit_trend);
    criterion(8, "invariant suite (positivity, mass bounds, derivatives, network statistics)", invariant_suite);
    if (g_failures == 0)
        std::printf("acceptance: all criteria passed\n");
    else
        std::printf("acceptance: %d criterion(s) FAILED\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
