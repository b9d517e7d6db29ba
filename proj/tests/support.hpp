#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "pollinet/rates.hpp"

namespace testsupport {

// Kolmogorov-Smirnov statistic of a sample against U(0,1).
inline double ks_statistic_uniform(std::vector<double> sample) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = sample[i];
        d = std::max(d, std::abs((i + 1) / n - f));
        d = std::max(d, std::abs(f - i / n));
    }
    return d;
}

// Asymptotic KS critical value at significance alpha (two-sided).
inline double ks_critical(std::size_t n, double c_alpha) { return c_alpha / std::sqrt(static_cast<double>(n)); }
constexpr double kKs99 = 1.628;  // alpha = 0.01

// Wilson-Hilferty approximation of the chi-square quantile.
inline double chi2_quantile(double df, double z) {
    const double t = 1.0 - 2.0 / (9.0 * df) + z * std::sqrt(2.0 / (9.0 * df));
    return df * t * t * t;
}
constexpr double kZ99 = 2.3263478740408408;  // Phi^{-1}(0.99)

inline double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / (static_cast<double>(v.size()) - 1.0);
}

inline double std_error(const std::vector<double>& v) {
    return std::sqrt(variance(v) / static_cast<double>(v.size()));
}

// Binomial pmf via logs (safe for n ~ 50).
inline double binomial_pmf(int n, double p, int k) {
    double log_c = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    return std::exp(log_c + k * std::log(p) + (n - k) * std::log1p(-p));
}

// Solve the 2x2 Lyapunov equation J S + S J^T + D = 0 for symmetric S,
// D = diag(d1, d2). Three unknowns (s11, s12, s22), three linear equations.
struct Lyapunov2 {
    double s11, s12, s22;
};
inline Lyapunov2 solve_lyapunov_2x2(double j11, double j12, double j21, double j22, double d1, double d2) {
    // eq1: 2 j11 s11 + 2 j12 s12            = -d1
    // eq2: j21 s11 + (j11 + j22) s12 + j12 s22 = 0
    // eq3:            2 j21 s12 + 2 j22 s22 = -d2
    double a[3][4] = {{2 * j11, 2 * j12, 0, -d1}, {j21, j11 + j22, j12, 0}, {0, 2 * j21, 2 * j22, -d2}};
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        std::swap(a[col], a[pivot]);
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            for (int c = col; c < 4; ++c) a[r][c] -= f * a[col][c];
        }
    }
    return {a[0][3] / a[0][0], a[1][3] / a[1][1], a[2][3] / a[2][2]};
}

// Rate parameters of the phase-plane figure: alphaA=25, alphaP=9,
// betas/gammas 1, deltaP=3; dA and dP vary per scenario.
inline pollinet::RateParams fig3_rates(double d_a = 2.0, double d_p = 1.0) {
    pollinet::RateParams p;
    p.alpha_p = 9.0;
    p.beta_p = 1.0;
    p.gamma_p = 1.0;
    p.d_p = d_p;
    p.delta_p = 3.0;
    p.alpha_a = 25.0;
    p.beta_a = 1.0;
    p.gamma_a = 1.0;
    p.d_a = d_a;
    return p;
}

// Kinetic simulation parameter set: alphaA=3, alphaP=25, betaA=betaP=gammaP=1,
// gammaA=0.3, dP=1, dA=3, deltaP=3.
inline pollinet::RateParams kinetic_rates() {
    pollinet::RateParams p;
    p.alpha_p = 25.0;
    p.beta_p = 1.0;
    p.gamma_p = 1.0;
    p.d_p = 1.0;
    p.delta_p = 3.0;
    p.alpha_a = 3.0;
    p.beta_a = 1.0;
    p.gamma_a = 0.3;
    p.d_a = 3.0;
    return p;
}

}  // namespace testsupport
