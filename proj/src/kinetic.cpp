#include "pollinet/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pollinet/errors.hpp"
#include "pollinet/rng.hpp"
#include "pollinet/runner.hpp"

namespace pollinet {

double DensityField::plant_mass() const {
    double s = 0.0;
    for (double v : p) s += v;
    return s / static_cast<double>(N);
}

double DensityField::poll_mass() const {
    double s = 0.0;
    for (double v : a) s += v;
    return s / static_cast<double>(N);
}

void DensityField::validate() const {
    if (N < 1) throw std::invalid_argument("density field: N must be >= 1");
    if (p.size() != static_cast<std::size_t>(N + 1) || a.size() != static_cast<std::size_t>(N + 1))
        throw std::invalid_argument("density field: expected N+1 values per side");
    for (double v : p)
        if (!(v >= 0.0)) throw std::domain_error("density field: negative plant density");
    for (double v : a)
        if (!(v >= 0.0)) throw std::domain_error("density field: negative pollinator density");
}

double psi(double x, double y, const GraphonSpec& graphon, const HarvestSpec& harvest) {
    // with m = n species the per-pair mean weight is c~/(n+m), so the
    // continuum harvesting function is lim n c~/(n+m) = c~/2
    return graphon(x, y) * 0.5 * harvest.intensity(x, y);
}

Matrix psi_grid(const GraphonSpec& graphon, const HarvestSpec& harvest, int N) {
    if (N < 1) throw std::invalid_argument("psi_grid: N must be >= 1");
    Matrix psi_mat(static_cast<std::size_t>(N + 1), static_cast<std::size_t>(N + 1));
    for (int i = 0; i <= N; ++i)
        for (int j = 0; j <= N; ++j)
            psi_mat(i, j) = psi(static_cast<double>(i) / N, static_cast<double>(j) / N, graphon, harvest);
    return psi_mat;
}

namespace {
class GridSystem {
  public:
    GridSystem(int N, const Matrix& psi_on_grid, const RateParams& params, const KernelSpec& kernel_k,
               const KernelSpec& kernel_h)
        : n_(N), psi_(psi_on_grid), params_(params), kk_(kernel_k), kh_(kernel_h) {
        if (psi_.rows != static_cast<std::size_t>(N + 1) || psi_.cols != static_cast<std::size_t>(N + 1))
            throw std::invalid_argument("grid_rhs: psi grid dimensions do not match N");
        params_.validate();
        const std::size_t pts = static_cast<std::size_t>(N + 1);
        res_p_.resize(pts);
        res_a_.resize(pts);
        if (!kk_.is_constant() || !kh_.is_constant()) {
            grid_.resize(pts);
            for (std::size_t i = 0; i < pts; ++i) grid_[i] = static_cast<double>(i) / N;
        }
    }

    // y = [p_0..p_N, a_0..a_N]
    // TODO: detect separable psi (product harvest x constant graphon) and
    // replace the O(N^2) matvec with the rank-one O(N) form for N >= 500
    void operator()(double, const std::vector<double>& y, std::vector<double>& dydt) {
        const std::size_t pts = static_cast<std::size_t>(n_ + 1);
        dydt.resize(2 * pts);
        // clamp for intermediate RK stages (see MeanFieldSystem)
        clamped_.resize(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) clamped_[i] = y[i] > 0.0 ? y[i] : 0.0;
        const double* p = clamped_.data();
        const double* a = clamped_.data() + pts;
        const double inv_n = 1.0 / static_cast<double>(n_);

        for (std::size_t i = 0; i < pts; ++i) {
            double s = 0.0;
            const double* row = psi_.a.data() + i * pts;
            for (std::size_t j = 0; j < pts; ++j) s += row[j] * a[j];
            res_p_[i] = s * inv_n;
        }
        for (std::size_t j = 0; j < pts; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < pts; ++i) s += psi_.a[i * pts + j] * p[i];
            res_a_[j] = s * inv_n;
        }

        if (kk_.is_constant()) {
            double mass = 0.0;
            for (std::size_t i = 0; i < pts; ++i) mass += p[i];
            const double comp = kk_.constant_value() * mass * inv_n;
            for (std::size_t i = 0; i < pts; ++i) dydt[i] = (g_p(params_, res_p_[i]) - comp) * y[i];
        } else {
            for (std::size_t i = 0; i < pts; ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < pts; ++j) s += kk_(grid_[i], grid_[j]) * p[j];
                dydt[i] = (g_p(params_, res_p_[i]) - s * inv_n) * y[i];
            }
        }
        if (kh_.is_constant()) {
            double mass = 0.0;
            for (std::size_t j = 0; j < pts; ++j) mass += a[j];
            const double comp = kh_.constant_value() * mass * inv_n;
            for (std::size_t j = 0; j < pts; ++j) dydt[pts + j] = (g_a(params_, res_a_[j]) - comp) * y[pts + j];
        } else {
            for (std::size_t j = 0; j < pts; ++j) {
                double s = 0.0;
                for (std::size_t l = 0; l < pts; ++l) s += kh_(grid_[j], grid_[l]) * a[l];
                dydt[pts + j] = (g_a(params_, res_a_[j]) - s * inv_n) * y[pts + j];
            }
        }
    }

  private:
    int n_;
    const Matrix& psi_;
    RateParams params_;
    const KernelSpec& kk_;
    const KernelSpec& kh_;
    std::vector<double> res_p_, res_a_, grid_, clamped_;
};
}  // namespace

std::pair<std::vector<double>, std::vector<double>> grid_rhs(const DensityField& field, const Matrix& psi_on_grid,
                                                             const RateParams& params, const KernelSpec& kernel_k,
                                                             const KernelSpec& kernel_h) {
    field.validate();
    GridSystem sys(field.N, psi_on_grid, params, kernel_k, kernel_h);
    std::vector<double> y(field.p);
    y.insert(y.end(), field.a.begin(), field.a.end());
    std::vector<double> dydt;
    sys(0.0, y, dydt);
    const std::size_t pts = static_cast<std::size_t>(field.N + 1);
    return {{dydt.begin(), dydt.begin() + pts}, {dydt.begin() + pts, dydt.end()}};
}

std::vector<KineticSnapshot> integrate_kinetic(const DensityField& init, const Matrix& psi_on_grid,
                                               const RateParams& params, const KernelSpec& kernel_k,
                                               const KernelSpec& kernel_h, double t_end,
                                               const std::vector<double>& record_times, const rk45::Options& options) {
    init.validate();
    GridSystem sys(init.N, psi_on_grid, params, kernel_k, kernel_h);
    std::vector<double> y(init.p);
    y.insert(y.end(), init.a.begin(), init.a.end());

    std::vector<KineticSnapshot> snapshots;
    const std::size_t pts = static_cast<std::size_t>(init.N + 1);
    rk45::integrate([&sys](double t, const std::vector<double>& state, std::vector<double>& dydt) { sys(t, state, dydt); },
                    std::move(y), 0.0, t_end, record_times, options,
                    [&snapshots, &init, pts](double t, const std::vector<double>& state) {
                        KineticSnapshot snap;
                        snap.t = t;
                        snap.field.N = init.N;
                        snap.field.p.assign(state.begin(), state.begin() + pts);
                        snap.field.a.assign(state.begin() + pts, state.end());
                        snapshots.push_back(std::move(snap));
                    });
    return snapshots;
}

ConcentrationMetrics concentration_metrics(const DensityField& field) {
    field.validate();
    ConcentrationMetrics out;
    auto side = [&](const std::vector<double>& v, double& fraction, int& argmax, double& mass, bool& zero) {
        double total = 0.0, best = -1.0;
        int best_i = 0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            total += v[i];
            if (v[i] > best) {  // strict: ties keep the lower index
                best = v[i];
                best_i = static_cast<int>(i);
            }
        }
        mass = total / static_cast<double>(field.N);
        zero = !(total > 0.0);
        fraction = zero ? 0.0 : best / total;
        argmax = best_i;
    };
    side(field.p, out.plant_max_fraction, out.plant_argmax, out.plant_mass, out.plant_zero_mass);
    side(field.a, out.poll_max_fraction, out.poll_argmax, out.poll_mass, out.poll_zero_mass);
    return out;
}

StableStatePrediction predicted_stable_state(const RateParams& params, double k, double h,
                                             const std::function<double(double, double)>& psi_fn) {
    if (!(k > 0.0 && h > 0.0)) throw std::invalid_argument("predicted_stable_state: k, h must be positive");
    StableStatePrediction out;
    GpMax gm;
    try {
        gm = gp_max(params);
    } catch (const NoViableWindow&) {
        return out;  // no plant growth anywhere, no candidate state
    }
    if (!(gm.value > 0.0)) return out;
    out.plant_mass = gm.value / k;

    auto big_f = [&](double x) {
        const double psi_x1 = psi_fn(x, 1.0);
        return g_a(params, std::max(0.0, out.plant_mass * psi_x1)) * psi_x1 - h * gm.r_star;
    };

    // bracket the sign change on a fine scan, then bisect to 1e-10
    const int scan = 4096;
    int bracket_lo = -1;
    int changes = 0;
    double prev = big_f(0.0);
    for (int s = 1; s <= scan; ++s) {
        const double cur = big_f(static_cast<double>(s) / scan);
        if ((prev < 0.0 && cur >= 0.0) || (prev > 0.0 && cur <= 0.0)) {
            ++changes;
            if (bracket_lo < 0) bracket_lo = s - 1;
        }
        prev = cur;
    }
    if (changes == 0) return out;  // F never crosses zero: no stable state
    if (changes > 1) throw AmbiguousRoot("predicted_stable_state: several roots; uniqueness hypothesis violated");

    double lo = static_cast<double>(bracket_lo) / scan;
    double hi = static_cast<double>(bracket_lo + 1) / scan;
    double flo = big_f(lo);
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        const double fm = big_f(mid);
        if ((flo <= 0.0) == (fm <= 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    out.x0 = 0.5 * (lo + hi);
    out.exists = true;
    out.poll_mass = gm.r_star / psi_fn(out.x0, 1.0);
    return out;
}

double stationarity_residual(const DensityField& field, const Matrix& psi_on_grid, const RateParams& params,
                             const KernelSpec& kernel_k, const KernelSpec& kernel_h) {
    field.validate();
    const auto [dp, da] = grid_rhs(field, psi_on_grid, params, kernel_k, kernel_h);
    const double inv_n = 1.0 / static_cast<double>(field.N);
    double worst = 0.0;
    for (std::size_t i = 0; i < field.p.size(); ++i)
        if (field.p[i] * inv_n > 1e-9) worst = std::max(worst, std::abs(dp[i] / field.p[i]));
    for (std::size_t j = 0; j < field.a.size(); ++j)
        if (field.a[j] * inv_n > 1e-9) worst = std::max(worst, std::abs(da[j] / field.a[j]));
    return worst;
}

W1Result wasserstein1(std::vector<WeightedAtom> a, std::vector<WeightedAtom> b) {
    double mass_a = 0.0, mass_b = 0.0;
    for (const auto& atom : a) {
        if (atom.weight < 0.0) throw std::invalid_argument("wasserstein1: negative weight");
        mass_a += atom.weight;
    }
    for (const auto& atom : b) {
        if (atom.weight < 0.0) throw std::invalid_argument("wasserstein1: negative weight");
        mass_b += atom.weight;
    }
    W1Result out;
    if (mass_a == 0.0 && mass_b == 0.0) return out;
    if (mass_a == 0.0 || mass_b == 0.0) {
        // documented convention: an empty measure sits at distance massB
        out.distance = std::max(mass_a, mass_b);
        out.composite = true;
        return out;
    }
    out.composite = std::abs(mass_a - mass_b) > 1e-12 * std::max(mass_a, mass_b);

    auto by_position = [](const WeightedAtom& u, const WeightedAtom& v) { return u.position < v.position; };
    std::sort(a.begin(), a.end(), by_position);
    std::sort(b.begin(), b.end(), by_position);

    // integral of |F_a - F_b| over the positions, CDFs normalized to 1
    double w1 = 0.0;
    double fa = 0.0, fb = 0.0;
    std::size_t ia = 0, ib = 0;
    double cur = std::min(a.front().position, b.front().position);
    while (ia < a.size() || ib < b.size()) {
        const double next_a = ia < a.size() ? a[ia].position : std::numeric_limits<double>::infinity();
        const double next_b = ib < b.size() ? b[ib].position : std::numeric_limits<double>::infinity();
        const double next = std::min(next_a, next_b);
        w1 += std::abs(fa - fb) * (next - cur);
        cur = next;
        while (ia < a.size() && a[ia].position == next) fa += a[ia++].weight / mass_a;
        while (ib < b.size() && b[ib].position == next) fb += b[ib++].weight / mass_b;
    }
    out.distance = std::abs(mass_a - mass_b) + w1;
    return out;
}

LatticeSystem lattice_community(const HarvestSpec& harvest, int N) {
    if (N < 1) throw std::invalid_argument("lattice_community: N must be >= 1");
    LatticeSystem sys;
    Community& comm = sys.community;
    comm.n = comm.m = N + 1;
    comm.x.resize(N + 1);
    for (int i = 0; i <= N; ++i) comm.x[i] = static_cast<double>(i) / N;
    comm.y = comm.x;
    comm.g.assign(static_cast<std::size_t>(N + 1) * (N + 1), 1);
    comm.c.resize(static_cast<std::size_t>(N + 1) * (N + 1));
    const GraphonSpec complete = GraphonSpec::constant(1.0);
    for (int i = 0; i <= N; ++i)
        for (int j = 0; j <= N; ++j)
            comm.c[static_cast<std::size_t>(i) * (N + 1) + j] =
                psi(comm.x[i], comm.y[j], complete, harvest) / static_cast<double>(N);
    comm.spec_description = "lattice(N=" + std::to_string(N) + "), harvest=" + harvest.describe();
    comm.rebuild_neighbor_lists();
    sys.kernel_scale = static_cast<double>(N + 1) / static_cast<double>(N);
    return sys;
}

namespace {
std::vector<WeightedAtom> field_atoms(const std::vector<double>& values, int N) {
    std::vector<WeightedAtom> atoms;
    atoms.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        atoms.push_back({static_cast<double>(i) / N, values[i] / static_cast<double>(N)});
    return atoms;
}

std::vector<WeightedAtom> empirical_atoms(const std::vector<double>& traits, const double* abund) {
    std::vector<WeightedAtom> atoms;
    atoms.reserve(traits.size());
    const double inv = 1.0 / static_cast<double>(traits.size());
    for (std::size_t i = 0; i < traits.size(); ++i) atoms.push_back({traits[i], abund[i] * inv});
    return atoms;
}
}  // namespace

ConvergenceStudyResult convergence_study(const std::vector<int>& ns, const GraphonSpec& graphon,
                                         const HarvestSpec& harvest, const RateParams& params, const Kernels& kernels,
                                         int grid_n, double t_end, const std::vector<double>& record_times,
                                         std::uint64_t seed, int seeds_per_n,
                                         const std::function<double(double)>& p0,
                                         const std::function<double(double)>& a0, int jobs,
                                         const rk45::Options& options) {
    if (ns.empty() || seeds_per_n < 1) throw std::invalid_argument("convergence_study: empty plan");
    if (record_times.empty()) throw std::invalid_argument("convergence_study: need record times");

    // continuum reference on the grid
    DensityField init;
    init.N = grid_n;
    init.p.resize(grid_n + 1);
    init.a.resize(grid_n + 1);
    for (int i = 0; i <= grid_n; ++i) {
        init.p[i] = p0(static_cast<double>(i) / grid_n);
        init.a[i] = a0(static_cast<double>(i) / grid_n);
    }
    const Matrix psi_mat = psi_grid(graphon, harvest, grid_n);
    if (!kernels.plant.is_constant() || !kernels.poll.is_constant())
        throw std::invalid_argument("convergence_study: kernels must be evaluable on the grid (use constant kernels)");
    const auto snapshots =
        integrate_kinetic(init, psi_mat, params, kernels.plant, kernels.poll, t_end, record_times, options);

    std::vector<std::vector<WeightedAtom>> grid_plant_atoms, grid_poll_atoms;
    for (const auto& snap : snapshots) {
        grid_plant_atoms.push_back(field_atoms(snap.field.p, grid_n));
        grid_poll_atoms.push_back(field_atoms(snap.field.a, grid_n));
    }

    ConvergenceStudyResult result;
    result.ns = ns;
    result.times = record_times;
    result.mean_w1_plants = Matrix(ns.size(), record_times.size(), 0.0);
    result.mean_w1_polls = Matrix(ns.size(), record_times.size(), 0.0);
    result.raw_plants.assign(ns.size(), {});
    result.raw_polls.assign(ns.size(), {});
    for (std::size_t ni = 0; ni < ns.size(); ++ni) {
        result.raw_plants[ni].assign(seeds_per_n, std::vector<double>(record_times.size(), 0.0));
        result.raw_polls[ni].assign(seeds_per_n, std::vector<double>(record_times.size(), 0.0));
    }

    const int cells = static_cast<int>(ns.size()) * seeds_per_n;
    parallel_for(cells, jobs, [&](int cell) {
        const std::size_t ni = static_cast<std::size_t>(cell) / seeds_per_n;
        const int s = cell % seeds_per_n;
        const int n = ns[ni];
        std::uint64_t mix = seed ^ (0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(ni) * 1000003ULL +
                                                             static_cast<std::uint64_t>(s) + 1ULL));
        const std::uint64_t cell_seed = splitmix64(mix);
        const Community comm = sample_community(n, n, graphon, harvest, identity_cdf_inverse(),
                                                identity_cdf_inverse(), cell_seed);
        std::vector<double> state(2 * n);
        for (int i = 0; i < n; ++i) state[i] = p0(comm.x[i]);
        for (int j = 0; j < n; ++j) state[n + j] = a0(comm.y[j]);
        const Trajectory traj = integrate_ode(state, comm, params, kernels, t_end, record_times, options);
        for (std::size_t k = 0; k < record_times.size(); ++k) {
            const auto& row = traj.values[k];
            const auto plants = empirical_atoms(comm.x, row.data());
            const auto polls = empirical_atoms(comm.y, row.data() + n);
            result.raw_plants[ni][s][k] = wasserstein1(plants, grid_plant_atoms[k]).distance;
            result.raw_polls[ni][s][k] = wasserstein1(polls, grid_poll_atoms[k]).distance;
        }
    });

    for (std::size_t ni = 0; ni < ns.size(); ++ni)
        for (std::size_t k = 0; k < record_times.size(); ++k) {
            double sp = 0.0, sa = 0.0;
            for (int s = 0; s < seeds_per_n; ++s) {
                sp += result.raw_plants[ni][s][k];
                sa += result.raw_polls[ni][s][k];
            }
            result.mean_w1_plants(ni, k) = sp / seeds_per_n;
            result.mean_w1_polls(ni, k) = sa / seeds_per_n;
        }
    return result;
}

}  // namespace pollinet
