#include "pollinet/fluctuations.hpp"

#include <cmath>
#include <stdexcept>

#include "pollinet/errors.hpp"
#include "pollinet/rng.hpp"

namespace pollinet {

std::vector<double> diffusion_coefficients(const std::vector<double>& mean_field_state, const Community& community,
                                           const RateParams& params, const Kernels& kernels) {
    const int n = community.n, m = community.m;
    if (mean_field_state.size() != static_cast<std::size_t>(n + m))
        throw std::invalid_argument("diffusion_coefficients: state length mismatch");
    std::vector<double> P(mean_field_state.begin(), mean_field_state.begin() + n);
    std::vector<double> A(mean_field_state.begin() + n, mean_field_state.end());
    const auto res_p = resources_plants(community, A, 1.0);
    const auto res_a = resources_pollinators(community, P, 1.0);
    const auto comp_p = competition(kernels.plant, community.x, P);
    const auto comp_a = competition(kernels.poll, community.y, A);

    std::vector<double> sigma(n + m, 0.0);
    for (int i = 0; i < n; ++i) {
        const double radicand = (birth_p(params, res_p[i]) + death_p(params, res_p[i]) + comp_p[i]) * P[i];
        if (radicand < 0.0) throw std::logic_error("diffusion_coefficients: negative radicand");
        sigma[i] = std::sqrt(radicand);
    }
    for (int j = 0; j < m; ++j) {
        const double radicand = (birth_a(params, res_a[j]) + death_a(params, res_a[j]) + comp_a[j]) * A[j];
        if (radicand < 0.0) throw std::logic_error("diffusion_coefficients: negative radicand");
        sigma[n + j] = std::sqrt(radicand);
    }
    return sigma;
}

OuDriver::OuDriver(const Trajectory& ode_trajectory, const Community& community, const RateParams& params,
                   const Kernels& kernels, double dt, std::vector<double> record_times)
    : ode_(ode_trajectory), community_(community), params_(params), kernels_(kernels),
      record_times_(std::move(record_times)), dim_(static_cast<std::size_t>(community.n + community.m)) {
    if (!(dt > 0.0)) throw std::invalid_argument("simulate_ou: dt must be positive");
    ode_trajectory.validate();
    if (ode_trajectory.times.empty()) throw std::invalid_argument("simulate_ou: empty ODE trajectory");
    const double t0 = ode_trajectory.times.front();
    const double t_end = ode_trajectory.times.back();
    if (record_times_.empty()) record_times_ = {t0, t_end};
    for (std::size_t k = 1; k < record_times_.size(); ++k)
        if (!(record_times_[k] > record_times_[k - 1]))
            throw std::invalid_argument("simulate_ou: record times must be strictly increasing");
    if (record_times_.front() < t0 - 1e-12 || record_times_.back() > t_end + 1e-12)
        throw std::invalid_argument("simulate_ou: record times outside the ODE time range");

    const double eps = 1e-12 * std::max(1.0, std::abs(t_end));
    std::size_t next_rec = 0;
    while (next_rec < record_times_.size() && record_times_[next_rec] <= t0 + eps) ++next_rec;

    const double expected_steps = (t_end - t0) / dt + static_cast<double>(record_times_.size());
    cache_coefficients_ = expected_steps * static_cast<double>(dim_ * dim_) < 4e7;

    double t = t0;
    while (t < t_end - eps) {
        double h = std::min(dt, t_end - t);
        if (next_rec < record_times_.size() && record_times_[next_rec] > t + eps)
            h = std::min(h, record_times_[next_rec] - t);
        Step sc;
        sc.t = t;
        sc.h = h;
        if (cache_coefficients_) {
            const auto state = ode_.interpolate(t);
            const Matrix jac = jacobian(state, community_, params_, kernels_);
            drift_cache_.insert(drift_cache_.end(), jac.a.begin(), jac.a.end());
            const auto sigma = diffusion_coefficients(state, community_, params_, kernels_);
            sigma_cache_.insert(sigma_cache_.end(), sigma.begin(), sigma.end());
        }
        t += h;
        sc.record_after = next_rec < record_times_.size() && record_times_[next_rec] <= t + eps;
        if (sc.record_after) ++next_rec;
        steps_.push_back(sc);
    }
}

Matrix OuDriver::drift_at(double t) const { return jacobian(ode_.interpolate(t), community_, params_, kernels_); }

std::vector<double> OuDriver::sigma_at(double t) const {
    return diffusion_coefficients(ode_.interpolate(t), community_, params_, kernels_);
}

Trajectory OuDriver::run_with_noise(const std::vector<double>& eta0, const NoiseFill& noise) const {
    if (eta0.size() != dim_) throw std::invalid_argument("simulate_ou: eta0 length mismatch");
    Trajectory traj;
    traj.scale = ScaleTag::OU;
    traj.n = community_.n;
    traj.m = community_.m;

    std::vector<double> eta = eta0;
    std::vector<double> drift(dim_), xi(dim_);

    const double t0 = ode_.times.front();
    const double eps = 1e-12 * std::max(1.0, std::abs(ode_.times.back()));
    std::size_t next_rec = 0;
    while (next_rec < record_times_.size() && record_times_[next_rec] <= t0 + eps) {
        traj.times.push_back(record_times_[next_rec]);
        traj.values.push_back(eta);
        ++next_rec;
    }

    Matrix drift_mat;
    std::vector<double> sigma_vec;
    for (std::size_t step = 0; step < steps_.size(); ++step) {
        const Step& sc = steps_[step];
        const double* jac;
        const double* sigma;
        if (cache_coefficients_) {
            jac = drift_cache_.data() + step * dim_ * dim_;
            sigma = sigma_cache_.data() + step * dim_;
        } else {
            const auto state = ode_.interpolate(sc.t);
            drift_mat = jacobian(state, community_, params_, kernels_);
            sigma_vec = diffusion_coefficients(state, community_, params_, kernels_);
            jac = drift_mat.a.data();
            sigma = sigma_vec.data();
        }
        const double sqrt_h = std::sqrt(sc.h);
        for (std::size_t i = 0; i < dim_; ++i) {
            double s = 0.0;
            const double* row = jac + i * dim_;
            for (std::size_t l = 0; l < dim_; ++l) s += row[l] * eta[l];
            drift[i] = s;
        }
        noise(xi);
        for (std::size_t i = 0; i < dim_; ++i) eta[i] += drift[i] * sc.h + sigma[i] * sqrt_h * xi[i];
        if (sc.record_after) {
            traj.times.push_back(record_times_[next_rec]);
            traj.values.push_back(eta);
            ++next_rec;
        }
    }
    return traj;
}

Trajectory OuDriver::run(const std::vector<double>& eta0, std::uint64_t seed, std::uint64_t replica) const {
    Pcg64 rng = make_rng(seed, Stream::Fluctuations, replica);
    Trajectory traj = run_with_noise(eta0, [&rng](std::vector<double>& xi) {
        for (double& v : xi) v = rng.normal();
    });
    traj.seed = seed;
    return traj;
}

Trajectory simulate_ou(const Trajectory& ode_trajectory, const Community& community, const RateParams& params,
                       const Kernels& kernels, const std::vector<double>& eta0, double dt, std::uint64_t seed,
                       std::uint64_t replica, std::vector<double> record_times) {
    const OuDriver driver(ode_trajectory, community, params, kernels, dt, std::move(record_times));
    return driver.run(eta0, seed, replica);
}

FluctuationSamples empirical_fluctuations(const std::vector<Trajectory>& ibm_trajectories,
                                          const Trajectory& ode_trajectory, int K) {
    if (ibm_trajectories.empty()) throw std::invalid_argument("empirical_fluctuations: no replicas");
    const std::vector<double>& times = ode_trajectory.times;
    for (const Trajectory& traj : ibm_trajectories) {
        if (traj.times.size() != times.size()) throw AlignmentError("empirical_fluctuations: time grid mismatch");
        for (std::size_t k = 0; k < times.size(); ++k)
            if (std::abs(traj.times[k] - times[k]) > 1e-9)
                throw AlignmentError("empirical_fluctuations: time grid mismatch");
    }
    const double sqrt_k = std::sqrt(static_cast<double>(K));
    FluctuationSamples samples;
    samples.times = times;
    samples.eta.resize(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
        samples.eta[k].reserve(ibm_trajectories.size());
        for (const Trajectory& traj : ibm_trajectories) {
            const auto& ibm_row = traj.values[k];
            const auto& ode_row = ode_trajectory.values[k];
            if (ibm_row.size() != ode_row.size())
                throw AlignmentError("empirical_fluctuations: dimension mismatch");
            std::vector<double> eta(ibm_row.size());
            for (std::size_t i = 0; i < eta.size(); ++i) eta[i] = sqrt_k * (ibm_row[i] - ode_row[i]);
            samples.eta[k].push_back(std::move(eta));
        }
    }
    return samples;
}

MomentSummary moments(const std::vector<std::vector<double>>& samples) {
    if (samples.empty()) throw std::invalid_argument("moments: no samples");
    const std::size_t dim = samples.front().size();
    const double r = static_cast<double>(samples.size());
    MomentSummary out;
    out.mean.assign(dim, 0.0);
    out.variance.assign(dim, 0.0);
    for (const auto& row : samples)
        for (std::size_t i = 0; i < dim; ++i) out.mean[i] += row[i];
    for (double& v : out.mean) v /= r;
    if (samples.size() < 2) return out;
    for (const auto& row : samples)
        for (std::size_t i = 0; i < dim; ++i) {
            const double d = row[i] - out.mean[i];
            out.variance[i] += d * d;
        }
    for (double& v : out.variance) v /= (r - 1.0);
    return out;
}

}  // namespace pollinet
