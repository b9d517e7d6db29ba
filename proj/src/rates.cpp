#include "pollinet/rates.hpp"

#include <cmath>
#include <stdexcept>

#include "pollinet/errors.hpp"

namespace pollinet {

void RateParams::validate() const {
    const double vals[] = {alpha_p, beta_p, gamma_p, d_p, delta_p, alpha_a, beta_a, gamma_a, d_a};
    for (double v : vals)
        if (!(v > 0.0)) throw std::invalid_argument("rate parameters must all be strictly positive");
}

namespace {
void check_resource(double r) {
    if (r < 0.0) throw std::domain_error("rate function evaluated at negative resource");
}
}  // namespace

double birth_p(const RateParams& p, double r) {
    check_resource(r);
    return p.alpha_p * r / (p.beta_p + p.gamma_p * r);
}

double death_p(const RateParams& p, double r) {
    check_resource(r);
    return p.d_p + p.delta_p * r;
}

double g_p(const RateParams& p, double r) { return birth_p(p, r) - death_p(p, r); }

double birth_a(const RateParams& p, double r) {
    check_resource(r);
    return p.alpha_a * r / (p.beta_a + p.gamma_a * r);
}

double death_a(const RateParams& p, double r) {
    check_resource(r);
    return p.d_a;
}

double g_a(const RateParams& p, double r) { return birth_a(p, r) - death_a(p, r); }

double dg_p(const RateParams& p, double r) {
    check_resource(r);
    const double den = p.beta_p + p.gamma_p * r;
    return p.alpha_p * p.beta_p / (den * den) - p.delta_p;
}

double dg_a(const RateParams& p, double r) {
    check_resource(r);
    const double den = p.beta_a + p.gamma_a * r;
    return p.alpha_a * p.beta_a / (den * den);
}

namespace {
// Bisect f on [lo, hi] with f(lo)*f(hi) <= 0, to 1e-12 absolute in the abscissa.
template <typename F>
double bisect(F&& f, double lo, double hi) {
    double flo = f(lo);
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
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
}  // namespace

GpZeros gp_zeros(const RateParams& p) {
    p.validate();
    // g^P(R) = 0  <=>  deltaP gammaP R^2 + (dP gammaP + deltaP betaP - alphaP) R + dP betaP = 0
    const double a = p.delta_p * p.gamma_p;
    const double b = p.d_p * p.gamma_p + p.delta_p * p.beta_p - p.alpha_p;
    const double c = p.d_p * p.beta_p;
    const double disc = b * b - 4.0 * a * c;
    if (disc <= 0.0 || b >= 0.0) throw NoViableWindow("g^P has no positivity window");
    const double sq = std::sqrt(disc);
    // b < 0 here; the numerically stable split avoids cancellation
    const double q = -0.5 * (b - sq);
    double r1 = c / q;
    double r2 = q / a;
    if (r1 > r2) std::swap(r1, r2);
    // near-degenerate discriminant: polish each root against g^P directly
    if (disc < 1e-6 * b * b) {
        const double mid = -0.5 * b / a;  // abscissa of the vertex, g^P > 0 there
        auto f = [&](double r) { return g_p(p, r); };
        if (g_p(p, mid) <= 0.0) throw NoViableWindow("g^P has no positivity window");
        r1 = bisect(f, std::max(0.0, 0.5 * r1), mid);
        r2 = bisect(f, mid, 2.0 * r2);
    }
    return {r1, r2};
}

GpMax gp_max(const RateParams& p) {
    p.validate();
    // stationarity: alphaP betaP / (betaP + gammaP R)^2 = deltaP
    const double r_star = (std::sqrt(p.alpha_p * p.beta_p / p.delta_p) - p.beta_p) / p.gamma_p;
    if (!(r_star > 0.0)) throw NoViableWindow("g^P is decreasing on [0, inf)");
    return {r_star, g_p(p, r_star)};
}

Viability viability_check(const RateParams& p) {
    p.validate();
    Viability v;
    try {
        gp_zeros(p);
        v.plant_viable = true;
    } catch (const NoViableWindow&) {
        v.plant_viable = false;
    }
    v.poll_viable = p.sup_birth_a() > p.d_a;
    return v;
}

KernelSpec KernelSpec::constant(double value) {
    if (value < 0.0) throw std::invalid_argument("kernel: constant value must be >= 0");
    KernelSpec k;
    k.is_constant_ = true;
    k.value_ = value;
    return k;
}

KernelSpec KernelSpec::tabulated(Grid2d grid) {
    if (grid.min_value() < 0.0) throw std::invalid_argument("kernel: tabulated values must be >= 0");
    KernelSpec k;
    k.is_constant_ = false;
    k.grid_ = std::move(grid);
    return k;
}

std::string KernelSpec::describe() const {
    return is_constant_ ? "constant(" + std::to_string(value_) + ")" : "tabulated";
}

namespace {
void check_abund(const std::vector<double>& v, std::size_t expected, const char* what) {
    if (v.size() != expected) throw std::invalid_argument(std::string(what) + ": abundance length mismatch");
    for (double a : v)
        if (a < 0.0) throw std::domain_error(std::string(what) + ": negative abundance");
}
}  // namespace

std::vector<double> resources_plants(const Community& community, const std::vector<double>& poll_abund, double scale) {
    check_abund(poll_abund, static_cast<std::size_t>(community.m), "resources_plants");
    std::vector<double> out(community.n, 0.0);
    for (int i = 0; i < community.n; ++i) {
        double s = 0.0;
        for (int j : community.plant_neighbors[i]) s += community.weight(i, j) * poll_abund[j];
        out[i] = s / scale;
    }
    return out;
}

std::vector<double> resources_pollinators(const Community& community, const std::vector<double>& plant_abund,
                                          double scale) {
    check_abund(plant_abund, static_cast<std::size_t>(community.n), "resources_pollinators");
    std::vector<double> out(community.m, 0.0);
    for (int j = 0; j < community.m; ++j) {
        double s = 0.0;
        for (int i : community.poll_neighbors[j]) s += community.weight(i, j) * plant_abund[i];
        out[j] = s / scale;
    }
    return out;
}

std::vector<double> competition(const KernelSpec& kernel, const std::vector<double>& traits,
                                const std::vector<double>& abund) {
    if (traits.size() != abund.size()) throw std::invalid_argument("competition: length mismatch");
    const std::size_t n = traits.size();
    std::vector<double> out(n, 0.0);
    if (n == 0) return out;
    if (kernel.is_constant()) {
        double total = 0.0;
        for (double a : abund) total += a;
        const double v = kernel.constant_value() * total / static_cast<double>(n);
        std::fill(out.begin(), out.end(), v);
        return out;
    }
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t l = 0; l < n; ++l) s += kernel(traits[i], traits[l]) * abund[l];
        out[i] = s / static_cast<double>(n);
    }
    return out;
}

}  // namespace pollinet
