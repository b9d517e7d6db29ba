#include "pollinet/mean_field.hpp"

#include <cmath>
#include <stdexcept>

namespace pollinet {

namespace {
void check_state(const std::vector<double>& state, const Community& community) {
    if (state.size() != static_cast<std::size_t>(community.n + community.m))
        throw std::invalid_argument("state length does not match community");
    for (double v : state)
        if (v < 0.0) throw std::domain_error("mean-field state must be nonnegative");
}

// competition values into `out` (length n), abund given by a pointer slice
void competition_into(const KernelSpec& kernel, const std::vector<double>& traits, const double* abund,
                      std::vector<double>& out) {
    const std::size_t n = traits.size();
    out.resize(n);
    if (kernel.is_constant()) {
        double total = 0.0;
        for (std::size_t l = 0; l < n; ++l) total += abund[l];
        const double v = kernel.constant_value() * total / static_cast<double>(n);
        std::fill(out.begin(), out.end(), v);
        return;
    }
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t l = 0; l < n; ++l) s += kernel(traits[i], traits[l]) * abund[l];
        out[i] = s / static_cast<double>(n);
    }
}
}  // namespace

MeanFieldSystem::MeanFieldSystem(const Community& community, const RateParams& params, const Kernels& kernels)
    : community_(community), params_(params), kernels_(kernels) {
    params_.validate();
    res_p_.resize(community.n);
    res_a_.resize(community.m);
}

void MeanFieldSystem::operator()(double, const std::vector<double>& y, std::vector<double>& dydt) {
    const int n = community_.n, m = community_.m;
    dydt.resize(static_cast<std::size_t>(n + m));
    // intermediate RK stages may poke slightly below zero; evaluate the field
    // on the clamped state so rates stay inside their domain
    clamped_.resize(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) clamped_[i] = y[i] > 0.0 ? y[i] : 0.0;
    const double* P = clamped_.data();
    const double* A = clamped_.data() + n;

    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j : community_.plant_neighbors[i]) s += community_.weight(i, j) * A[j];
        res_p_[i] = s;
    }
    for (int j = 0; j < m; ++j) {
        double s = 0.0;
        for (int i : community_.poll_neighbors[j]) s += community_.weight(i, j) * P[i];
        res_a_[j] = s;
    }
    competition_into(kernels_.plant, community_.x, P, comp_p_);
    competition_into(kernels_.poll, community_.y, A, comp_a_);

    for (int i = 0; i < n; ++i) dydt[i] = (g_p(params_, res_p_[i]) - comp_p_[i]) * y[i];
    for (int j = 0; j < m; ++j) dydt[n + j] = (g_a(params_, res_a_[j]) - comp_a_[j]) * y[n + j];
}

std::vector<double> ode_rhs(const std::vector<double>& state, const Community& community, const RateParams& params,
                            const Kernels& kernels) {
    check_state(state, community);
    MeanFieldSystem sys(community, params, kernels);
    std::vector<double> dydt;
    sys(0.0, state, dydt);
    return dydt;
}

Trajectory integrate_ode(const std::vector<double>& init, const Community& community, const RateParams& params,
                         const Kernels& kernels, double t_end, const std::vector<double>& record_times,
                         const rk45::Options& options) {
    check_state(init, community);
    if (!(options.rel_tol > 0.0 && options.abs_tol > 0.0))
        throw std::invalid_argument("integrate_ode: tolerances must be positive");
    MeanFieldSystem sys(community, params, kernels);
    Trajectory traj;
    traj.scale = ScaleTag::ODE;
    traj.n = community.n;
    traj.m = community.m;
    traj.seed = community.seed;
    rk45::integrate([&sys](double t, const std::vector<double>& y, std::vector<double>& dydt) { sys(t, y, dydt); },
                    init, 0.0, t_end, record_times, options, [&traj](double t, const std::vector<double>& y) {
                        traj.times.push_back(t);
                        traj.values.push_back(y);
                    });
    return traj;
}

double equilibrium_residual(const std::vector<double>& state, const Community& community, const RateParams& params,
                            const Kernels& kernels) {
    check_state(state, community);
    const int n = community.n, m = community.m;
    std::vector<double> P(state.begin(), state.begin() + n);
    std::vector<double> A(state.begin() + n, state.end());
    const auto res_p = resources_plants(community, A, 1.0);
    const auto res_a = resources_pollinators(community, P, 1.0);
    const auto comp_p = competition(kernels.plant, community.x, P);
    const auto comp_a = competition(kernels.poll, community.y, A);
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        if (P[i] != 0.0) worst = std::max(worst, std::abs(g_p(params, res_p[i]) - comp_p[i]));
    for (int j = 0; j < m; ++j)
        if (A[j] != 0.0) worst = std::max(worst, std::abs(g_a(params, res_a[j]) - comp_a[j]));
    return worst;
}

Matrix jacobian(const std::vector<double>& state, const Community& community, const RateParams& params,
                const Kernels& kernels) {
    check_state(state, community);
    const int n = community.n, m = community.m;
    std::vector<double> P(state.begin(), state.begin() + n);
    std::vector<double> A(state.begin() + n, state.end());
    const auto res_p = resources_plants(community, A, 1.0);
    const auto res_a = resources_pollinators(community, P, 1.0);
    const auto comp_p = competition(kernels.plant, community.x, P);
    const auto comp_a = competition(kernels.poll, community.y, A);

    Matrix jac(static_cast<std::size_t>(n + m), static_cast<std::size_t>(n + m), 0.0);
    for (int i = 0; i < n; ++i) {
        const double growth = g_p(params, res_p[i]) - comp_p[i];
        const double slope = dg_p(params, res_p[i]);
        for (int l = 0; l < n; ++l) {
            double v = -kernels.plant(community.x[i], community.x[l]) * P[i] / static_cast<double>(n);
            if (i == l) v += growth;
            jac(i, l) = v;
        }
        for (int l : community.plant_neighbors[i]) jac(i, n + l) = slope * community.weight(i, l) * P[i];
    }
    for (int j = 0; j < m; ++j) {
        const double growth = g_a(params, res_a[j]) - comp_a[j];
        const double slope = dg_a(params, res_a[j]);
        for (int l : community.poll_neighbors[j]) jac(n + j, l) = slope * community.weight(l, j) * A[j];
        for (int l = 0; l < m; ++l) {
            double v = -kernels.poll(community.y[j], community.y[l]) * A[j] / static_cast<double>(m);
            if (j == l) v += growth;
            jac(n + j, n + l) = v;
        }
    }
    return jac;
}

}  // namespace pollinet
