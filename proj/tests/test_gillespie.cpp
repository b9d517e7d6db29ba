#include <doctest.h>

#include <cmath>
#include <vector>

#include "pollinet/gillespie.hpp"
#include "pollinet/mean_field.hpp"
#include "pollinet/single_pair.hpp"
#include "support.hpp"

using namespace pollinet;
using namespace testsupport;

namespace {
Kernels const_kernels(double k, double h) { return {KernelSpec::constant(k), KernelSpec::constant(h)}; }

IbmState make_state(int K, std::vector<long long> plants, std::vector<long long> polls) {
    IbmState s;
    s.K = K;
    s.plants = std::move(plants);
    s.polls = std::move(polls);
    return s;
}
}  // namespace

TEST_SUITE("gillespie") {
    TEST_CASE("all-zero counts form an absorbing state with zero total rate") {
        const Community comm = make_pair_community(1.0);
        const auto rates = event_rates(make_state(10, {0}, {0}), comm, fig3_rates(), const_kernels(1, 1));
        CHECK(rates.total == 0.0);
        GillespieEngine engine(comm, fig3_rates(), const_kernels(1, 1), 10, {0}, {0});
        Pcg64 rng = make_rng(1, Stream::Dynamics);
        CHECK_FALSE(engine.step(rng).has_value());
    }

    TEST_CASE("plant birth rate vanishes exactly when pollinators are absent") {
        const Community comm = make_pair_community(1.0);
        const auto rates = event_rates(make_state(10, {7}, {0}), comm, fig3_rates(), const_kernels(1, 1));
        CHECK(rates.plant_birth[0] == 0.0);   // b^P(0) = 0 by the Holling form
        CHECK(rates.plant_death[0] > 0.0);
        CHECK(rates.poll_birth[0] == 0.0);
        CHECK(rates.poll_death[0] == 0.0);
    }

    TEST_CASE("rates match a from-scratch double-loop oracle on a small community") {
        const Community comm = sample_community(3, 3, GraphonSpec::constant(0.8), HarvestSpec::product_xy(0.5),
                                                identity_cdf_inverse(), identity_cdf_inverse(), 17);
        const RateParams p = fig3_rates();
        Grid2d kgrid(2, 2, {0.5, 0.9, 0.9, 1.3});
        const Kernels kernels{KernelSpec::tabulated(kgrid), KernelSpec::constant(0.8)};
        const IbmState state = make_state(5, {3, 0, 5}, {2, 4, 1});
        const auto rates = event_rates(state, comm, p, kernels);
        const double K = 5.0;
        double total = 0.0;
        for (int i = 0; i < 3; ++i) {
            double res = 0.0;
            for (int j = 0; j < 3; ++j)
                if (comm.edge(i, j)) res += comm.weight(i, j) * state.polls[j];
            res /= K;
            double comp = 0.0;
            for (int l = 0; l < 3; ++l) comp += kernels.plant(comm.x[i], comm.x[l]) * state.plants[l];
            comp /= 3.0 * K;
            CHECK(rates.plant_birth[i] == doctest::Approx(birth_p(p, res) * state.plants[i]).epsilon(1e-13));
            CHECK(rates.plant_death[i] ==
                  doctest::Approx((death_p(p, res) + comp) * state.plants[i]).epsilon(1e-13));
            total += rates.plant_birth[i] + rates.plant_death[i];
        }
        for (int j = 0; j < 3; ++j) {
            double res = 0.0;
            for (int i = 0; i < 3; ++i)
                if (comm.edge(i, j)) res += comm.weight(i, j) * state.plants[i];
            res /= K;
            double comp = 0.0;
            for (int l = 0; l < 3; ++l) comp += 0.8 * state.polls[l];
            comp /= 3.0 * K;
            CHECK(rates.poll_birth[j] == doctest::Approx(birth_a(p, res) * state.polls[j]).epsilon(1e-13));
            CHECK(rates.poll_death[j] == doctest::Approx((death_a(p, res) + comp) * state.polls[j]).epsilon(1e-13));
            total += rates.poll_birth[j] + rates.poll_death[j];
        }
        CHECK(rates.total == doctest::Approx(total).epsilon(1e-13));
    }

    TEST_CASE("with no pollinators and positive dP the only event is a plant death") {
        const Community comm = make_pair_community(1.0);
        GillespieEngine engine(comm, fig3_rates(), const_kernels(1, 1), 10, {5}, {0});
        Pcg64 rng = make_rng(3, Stream::Dynamics);
        for (int e = 0; e < 5; ++e) {
            const auto ev = engine.step(rng);
            REQUIRE(ev.has_value());
            CHECK(ev->kind == EventKind::PlantDeath);
        }
        CHECK_FALSE(engine.step(rng).has_value());  // extinct now
    }

    TEST_CASE("fixed seed reproduces the exact event sequence") {
        const Community comm = sample_community(3, 3, GraphonSpec::constant(1.0), HarvestSpec::constant(2.0),
                                                identity_cdf_inverse(), identity_cdf_inverse(), 5);
        auto run = [&]() {
            GillespieEngine engine(comm, fig3_rates(), const_kernels(1, 1), 50, {30, 30, 30}, {60, 60, 60});
            Pcg64 rng = make_rng(11, Stream::Dynamics, 4);
            std::vector<std::tuple<int, int, double>> events;
            for (int e = 0; e < 2000; ++e) {
                const auto ev = engine.step(rng);
                if (!ev) break;
                events.emplace_back(static_cast<int>(ev->kind), ev->index, ev->dt);
            }
            return events;
        };
        CHECK(run() == run());
    }

    TEST_CASE("transitions move exactly one coordinate by one and never go negative") {
        const Community comm = sample_community(2, 2, GraphonSpec::constant(1.0), HarvestSpec::constant(2.0),
                                                identity_cdf_inverse(), identity_cdf_inverse(), 6);
        GillespieEngine engine(comm, fig3_rates(), const_kernels(1, 1), 20, {10, 12}, {25, 20});
        Pcg64 rng = make_rng(12, Stream::Dynamics);
        auto prev_p = engine.state().plants;
        auto prev_a = engine.state().polls;
        for (int e = 0; e < 5000; ++e) {
            const auto ev = engine.step(rng);
            if (!ev) break;
            long long moved = 0;
            for (int i = 0; i < 2; ++i) {
                moved += std::abs(engine.state().plants[i] - prev_p[i]);
                moved += std::abs(engine.state().polls[i] - prev_a[i]);
                CHECK(engine.state().plants[i] >= 0);
                CHECK(engine.state().polls[i] >= 0);
            }
            CHECK(moved == 1);
            prev_p = engine.state().plants;
            prev_a = engine.state().polls;
        }
    }

    TEST_CASE("holding times transformed by the current total rate are uniform") {
        const Community comm = make_pair_community(1.0);
        GillespieEngine engine(comm, fig3_rates(), const_kernels(1, 1), 2000,
                               {llround(0.147 * 2000)}, {llround(1.325 * 2000)});
        Pcg64 rng = make_rng(21, Stream::Dynamics);
        std::vector<double> u;
        u.reserve(100000);
        for (int e = 0; e < 100000; ++e) {
            const double lambda = engine.total_rate();
            const auto ev = engine.step(rng);
            REQUIRE(ev.has_value());
            u.push_back(-std::expm1(-lambda * ev->dt));
        }
        CHECK(ks_statistic_uniform(u) < ks_critical(u.size(), kKs99));
    }

    TEST_CASE("incremental caches agree with a fresh recomputation after many events") {
        const Community comm = sample_community(4, 5, GraphonSpec::product(), HarvestSpec::product_xy(0.5),
                                                identity_cdf_inverse(), identity_cdf_inverse(), 30);
        Grid2d kgrid(2, 2, {0.4, 0.7, 0.7, 1.0});
        Grid2d hgrid(2, 2, {0.6, 0.9, 0.9, 1.2});
        const Kernels kernels{KernelSpec::tabulated(kgrid), KernelSpec::tabulated(hgrid)};
        // resync disabled (every 10^9) so the deviation reflects pure drift
        GillespieEngine engine(comm, fig3_rates(), kernels, 100, {60, 50, 70, 40}, {80, 90, 70, 60, 50},
                               1000000000LL);
        Pcg64 rng = make_rng(31, Stream::Dynamics);
        for (int e = 0; e < 20000; ++e) {
            if (!engine.step(rng)) break;
        }
        CHECK(engine.cache_deviation() <= 1e-9);

        // constant kernels exercise the rank-one competition class
        GillespieEngine engine2(comm, fig3_rates(), const_kernels(0.9, 1.1), 100, {60, 50, 70, 40},
                                {80, 90, 70, 60, 50}, 1000000000LL);
        for (int e = 0; e < 20000; ++e) {
            if (!engine2.step(rng)) break;
        }
        CHECK(engine2.cache_deviation() <= 1e-9);
    }

    TEST_CASE("replica results do not depend on worker-thread count") {
        const Community comm = make_pair_community(1.0);
        auto run = [&](int jobs) {
            return simulate_replicas(comm, fig3_rates(), const_kernels(1, 1), 100, {40}, {120}, 1.0,
                                     {0.5, 1.0}, 13, 8, jobs);
        };
        const auto serial = run(1);
        const auto parallel = run(4);
        REQUIRE(serial.size() == parallel.size());
        for (std::size_t r = 0; r < serial.size(); ++r) {
            CHECK(serial[r].events == parallel[r].events);
            CHECK(serial[r].trajectory.values == parallel[r].trajectory.values);
        }
    }

    TEST_CASE("simulate: all-zero initial counts give the identically zero trajectory") {
        const Community comm = make_pair_community(1.0);
        std::vector<double> record{0.0, 0.5, 1.0, 2.0};
        const SimResult res =
            simulate(comm, fig3_rates(), const_kernels(1, 1), 10, {0}, {0}, 2.0, record, 3);
        CHECK(res.status == SimStatus::AbsorbedAtZero);
        REQUIRE(res.trajectory.times.size() == record.size());
        for (const auto& row : res.trajectory.values)
            for (double v : row) CHECK(v == 0.0);
    }

    TEST_CASE("pure death process matches the exponential-decay oracle") {
        Community comm;
        comm.n = comm.m = 1;
        comm.x = {0.3};
        comm.y = {0.6};
        comm.g = {0};
        comm.c = {0.0};
        comm.rebuild_neighbor_lists();
        const RateParams p = fig3_rates();  // dA = 2
        const Kernels kernels = const_kernels(0.0, 0.0);
        const int replicas = 1000;
        const long long a0 = 50;
        const double t = 1.0;
        const auto sims = simulate_replicas(comm, p, kernels, 1, {0}, {a0}, t, {t}, 99, replicas);
        std::vector<double> finals;
        for (const auto& sim : sims) finals.push_back(sim.trajectory.values[0][1]);
        const double expected = static_cast<double>(a0) * std::exp(-p.d_a * t);
        CHECK(std::abs(mean(finals) - expected) < 3.0 * std_error(finals));
    }

    TEST_CASE("event cap returns a flagged partial trajectory") {
        const Community comm = make_pair_community(1.0);
        SimOptions opts;
        opts.event_cap = 50;
        const SimResult res = simulate(comm, fig3_rates(), const_kernels(1, 1), 500, {100}, {500}, 50.0,
                                       {0.0, 25.0, 50.0}, 7, 0, opts);
        CHECK(res.status == SimStatus::RuntimeBudgetExceeded);
        CHECK(res.events == 50);
        CHECK(res.trajectory.times.size() < 3);
    }

    TEST_CASE("statistical mass bound for the plant side") {
        const Community comm = sample_community(3, 3, GraphonSpec::constant(1.0), HarvestSpec::constant(3.0),
                                                identity_cdf_inverse(), identity_cdf_inverse(), 8);
        const RateParams p = fig3_rates();
        const int K = 50, replicas = 500;
        const double t = 1.0;
        const auto sims =
            simulate_replicas(comm, p, const_kernels(1, 1), K, {25, 25, 25}, {50, 50, 50}, t, {t}, 55, replicas);
        std::vector<double> masses;
        for (const auto& sim : sims) {
            double mass = 0.0;
            for (int i = 0; i < 3; ++i) mass += sim.trajectory.values[0][i];
            masses.push_back(mass / 3.0);
        }
        const double mass0 = 0.5;  // (1/n) sum of 25/50
        const double bound = mass0 * std::exp(p.sup_birth_p() * t);
        CHECK(mean(masses) <= bound * (1.0 + 3.0 * std_error(masses) / std::max(1e-12, mean(masses))));
    }

    TEST_CASE("IBM concentrates near the stable pair equilibrium") {
        // h = 10 damps the pollinator coordinate enough for a 0.2-ball to
        // hold; with h = 1 the limiting OU sd alone is ~0.26
        PairParams pair;
        pair.rates = fig3_rates(2.0, 1.0);
        pair.h = 10.0;
        const EquilibriumReport rep = count_and_solve(pair);
        REQUIRE(rep.positive_count() == 2);
        const PairEquilibrium eq = rep.equilibria[2];
        const Community comm = make_pair_community(1.0);
        const int K = 4000, replicas = 100;
        std::vector<double> record;
        for (double t = 0.0; t <= 20.0; t += 0.5) record.push_back(t);
        const auto sims = simulate_replicas(comm, pair.rates, const_kernels(1, 10), K,
                                            {llround(eq.plant * K)}, {llround(eq.poll * K)}, 20.0, record, 77,
                                            replicas);
        int inside = 0;
        for (const auto& sim : sims) {
            double worst = 0.0;
            for (const auto& row : sim.trajectory.values)
                worst = std::max(worst, std::hypot(row[0] - eq.plant, row[1] - eq.poll));
            if (worst <= 0.2) ++inside;
        }
        CHECK(inside >= 95);
    }

    TEST_CASE("sup error against the ODE decreases as K quadruples") {
        const Community comm = sample_community(3, 3, GraphonSpec::constant(1.0), HarvestSpec::constant(2.0),
                                                identity_cdf_inverse(), identity_cdf_inverse(), 44);
        const RateParams p = fig3_rates();
        const Kernels kernels = const_kernels(1.0, 10.0);
        std::vector<double> record;
        for (double t = 0.0; t <= 2.0; t += 0.1) record.push_back(t);
        std::vector<double> rms;
        for (int K : {100, 400}) {
            std::vector<long long> p0(3, llround(0.6 * K)), a0(3, llround(0.75 * K));
            std::vector<double> state;
            for (long long c : p0) state.push_back(static_cast<double>(c) / K);
            for (long long c : a0) state.push_back(static_cast<double>(c) / K);
            const Trajectory ode = integrate_ode(state, comm, p, kernels, 2.0, record);
            const auto sims = simulate_replicas(comm, p, kernels, K, p0, a0, 2.0, record, 202, 60);
            double sum_sq = 0.0;
            for (const auto& sim : sims) {
                double sup = 0.0;
                for (std::size_t s = 0; s < record.size(); ++s)
                    for (std::size_t c = 0; c < 6; ++c)
                        sup = std::max(sup, std::abs(sim.trajectory.values[s][c] - ode.values[s][c]));
                sum_sq += sup * sup;
            }
            rms.push_back(std::sqrt(sum_sq / 60.0));
        }
        CHECK(rms[1] < rms[0]);
        CHECK(rms[0] / rms[1] < 4.0);
    }
}
