#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "pollinet/errors.hpp"

namespace pollinet::rk45 {

struct Options {
    double rel_tol = 1e-8;
    double abs_tol = 1e-8;
    double h_min = 1e-14;            // controller step below this raises StiffnessError
    double extinction_floor = 1e-12; // accepted components below this snap to exactly 0
    long long max_steps = 200'000'000;
};

/// Adaptive Dormand-Prince 5(4) on the nonnegative orthant. A step whose
/// result would cross below zero is rejected and halved; tiny accepted
/// components are floored to exactly 0 so extinction is absorbing.
///
/// `rhs(t, y, dydt)` fills the derivative; `sink(t, y)` is invoked at every
/// requested record time (strictly increasing, inside [t0, t_end]).
template <typename Rhs, typename Sink>
void integrate(Rhs&& rhs, std::vector<double> y, double t0, double t_end, const std::vector<double>& record_times,
               const Options& opt, Sink&& sink) {
    if (!(t_end > t0)) throw std::invalid_argument("rk45: t_end must exceed t0");
    for (std::size_t k = 1; k < record_times.size(); ++k)
        if (!(record_times[k] > record_times[k - 1]))
            throw std::invalid_argument("rk45: record times must be strictly increasing");
    if (!record_times.empty() && (record_times.front() < t0 || record_times.back() > t_end + 1e-12))
        throw std::invalid_argument("rk45: record times outside [t0, t_end]");

    const std::size_t dim = y.size();
    const double time_eps = 1e-12 * std::max(1.0, std::abs(t_end));

    std::size_t next_record = 0;
    double t = t0;
    while (next_record < record_times.size() && record_times[next_record] <= t + time_eps) {
        sink(record_times[next_record], y);
        ++next_record;
    }

    std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim);
    std::vector<double> ytmp(dim), ynew(dim);

    double h = std::min(1e-2 * (t_end - t0), 0.1);
    long long steps = 0;

    while (t < t_end - time_eps) {
        if (++steps > opt.max_steps) throw StiffnessError("rk45: step budget exceeded");
        if (h < opt.h_min) throw StiffnessError("rk45: step size underflow");

        double h_att = std::min(h, t_end - t);
        if (next_record < record_times.size() && record_times[next_record] > t + time_eps)
            h_att = std::min(h_att, record_times[next_record] - t);

        rhs(t, y, k1);
        for (std::size_t i = 0; i < dim; ++i) ytmp[i] = y[i] + h_att * (0.2 * k1[i]);
        rhs(t + 0.2 * h_att, ytmp, k2);
        for (std::size_t i = 0; i < dim; ++i) ytmp[i] = y[i] + h_att * (3.0 / 40 * k1[i] + 9.0 / 40 * k2[i]);
        rhs(t + 0.3 * h_att, ytmp, k3);
        for (std::size_t i = 0; i < dim; ++i)
            ytmp[i] = y[i] + h_att * (44.0 / 45 * k1[i] - 56.0 / 15 * k2[i] + 32.0 / 9 * k3[i]);
        rhs(t + 0.8 * h_att, ytmp, k4);
        for (std::size_t i = 0; i < dim; ++i)
            ytmp[i] = y[i] + h_att * (19372.0 / 6561 * k1[i] - 25360.0 / 2187 * k2[i] + 64448.0 / 6561 * k3[i] -
                                      212.0 / 729 * k4[i]);
        rhs(t + 8.0 / 9 * h_att, ytmp, k5);
        for (std::size_t i = 0; i < dim; ++i)
            ytmp[i] = y[i] + h_att * (9017.0 / 3168 * k1[i] - 355.0 / 33 * k2[i] + 46732.0 / 5247 * k3[i] +
                                      49.0 / 176 * k4[i] - 5103.0 / 18656 * k5[i]);
        rhs(t + h_att, ytmp, k6);
        for (std::size_t i = 0; i < dim; ++i)
            ynew[i] = y[i] + h_att * (35.0 / 384 * k1[i] + 500.0 / 1113 * k3[i] + 125.0 / 192 * k4[i] -
                                      2187.0 / 6784 * k5[i] + 11.0 / 84 * k6[i]);

        bool negative = false;
        for (std::size_t i = 0; i < dim; ++i)
            if (ynew[i] < 0.0) {
                negative = true;
                break;
            }
        if (negative) {
            h = 0.5 * h_att;
            continue;
        }

        rhs(t + h_att, ynew, k7);
        double err_norm = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            const double err = h_att * (71.0 / 57600 * k1[i] - 71.0 / 16695 * k3[i] + 71.0 / 1920 * k4[i] -
                                        17253.0 / 339200 * k5[i] + 22.0 / 525 * k6[i] - 1.0 / 40 * k7[i]);
            const double scale = opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err_norm = std::max(err_norm, std::abs(err) / scale);
        }

        if (err_norm <= 1.0) {
            t += h_att;
            y.swap(ynew);
            for (std::size_t i = 0; i < dim; ++i)
                if (y[i] < opt.extinction_floor) y[i] = 0.0;
            while (next_record < record_times.size() && record_times[next_record] <= t + time_eps) {
                sink(record_times[next_record], y);
                ++next_record;
            }
            const double grow = (err_norm == 0.0) ? 5.0 : std::min(5.0, 0.9 * std::pow(err_norm, -0.2));
            h = h_att * std::max(0.2, grow);
        } else {
            h = h_att * std::max(0.1, 0.9 * std::pow(err_norm, -0.2));
        }
    }

    while (next_record < record_times.size()) {
        sink(record_times[next_record], y);
        ++next_record;
    }
}

}  // namespace pollinet::rk45
