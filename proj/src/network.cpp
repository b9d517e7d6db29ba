#include "pollinet/network.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pollinet/errors.hpp"
#include "pollinet/rng.hpp"

namespace pollinet {

GraphonSpec GraphonSpec::constant(double phi0) {
    if (phi0 < 0.0 || phi0 > 1.0) throw std::invalid_argument("graphon: constant probability outside [0,1]");
    GraphonSpec s;
    s.kind_ = Kind::Constant;
    s.phi0_ = phi0;
    return s;
}

GraphonSpec GraphonSpec::product() {
    GraphonSpec s;
    s.kind_ = Kind::Product;
    return s;
}

GraphonSpec GraphonSpec::block(std::vector<double> row_boundaries, std::vector<double> col_boundaries,
                               Matrix block_probs) {
    auto check_bounds = [](const std::vector<double>& b, const char* side) {
        if (b.size() < 2 || b.front() != 0.0 || b.back() != 1.0)
            throw std::invalid_argument(std::string("graphon: ") + side + " boundaries must start at 0 and end at 1");
        for (std::size_t i = 1; i < b.size(); ++i)
            if (b[i] <= b[i - 1]) throw std::invalid_argument("graphon: boundaries must be strictly increasing");
    };
    check_bounds(row_boundaries, "row");
    check_bounds(col_boundaries, "col");
    if (block_probs.rows != row_boundaries.size() - 1 || block_probs.cols != col_boundaries.size() - 1)
        throw std::invalid_argument("graphon: block probability matrix dimensions do not match boundaries");
    for (double p : block_probs.a)
        if (p < 0.0 || p > 1.0) throw std::invalid_argument("graphon: block probability outside [0,1]");
    GraphonSpec s;
    s.kind_ = Kind::Block;
    s.row_bounds_ = std::move(row_boundaries);
    s.col_bounds_ = std::move(col_boundaries);
    s.block_probs_ = std::move(block_probs);
    return s;
}

GraphonSpec GraphonSpec::tabulated(Grid2d grid) {
    if (grid.min_value() < 0.0 || grid.max_value() > 1.0)
        throw std::invalid_argument("graphon: tabulated values outside [0,1]");
    GraphonSpec s;
    s.kind_ = Kind::Tabulated;
    s.grid_ = std::move(grid);
    return s;
}

namespace {
std::size_t block_index(const std::vector<double>& bounds, double v) {
    // cell i covers [bounds[i], bounds[i+1]); the last cell is closed at 1
    auto it = std::upper_bound(bounds.begin(), bounds.end(), v);
    std::size_t idx = static_cast<std::size_t>(it - bounds.begin());
    if (idx == 0) return 0;
    idx -= 1;
    return std::min(idx, bounds.size() - 2);
}
}  // namespace

double GraphonSpec::operator()(double x, double y) const {
    double v = 0.0;
    switch (kind_) {
        case Kind::Constant: v = phi0_; break;
        case Kind::Product: v = x * y; break;
        case Kind::Block: v = block_probs_(block_index(row_bounds_, x), block_index(col_bounds_, y)); break;
        case Kind::Tabulated: v = std::clamp(grid_(x, y), 0.0, 1.0); break;
    }
    if (!(v >= 0.0 && v <= 1.0)) throw std::logic_error("graphon evaluated outside [0,1]");
    return v;
}

std::string GraphonSpec::describe() const {
    switch (kind_) {
        case Kind::Constant: return "constant(" + std::to_string(phi0_) + ")";
        case Kind::Product: return "product";
        case Kind::Block: return "block";
        case Kind::Tabulated: return "tabulated";
    }
    return "?";
}

namespace {
void check_noise(double w) {
    if (w < 0.0 || w > 1.0) throw std::invalid_argument("harvest: noiseHalfWidth must lie in [0,1]");
}
}  // namespace

HarvestSpec HarvestSpec::constant(double c0, double noise_half_width) {
    if (c0 < 0.0) throw std::invalid_argument("harvest: constant intensity must be >= 0");
    check_noise(noise_half_width);
    HarvestSpec s;
    s.kind_ = Kind::Constant;
    s.c0_ = c0;
    s.noise_ = noise_half_width;
    return s;
}

HarvestSpec HarvestSpec::product_xy(double noise_half_width) {
    check_noise(noise_half_width);
    HarvestSpec s;
    s.kind_ = Kind::ProductXY;
    s.noise_ = noise_half_width;
    return s;
}

HarvestSpec HarvestSpec::product_x_one_minus_y(double noise_half_width) {
    check_noise(noise_half_width);
    HarvestSpec s;
    s.kind_ = Kind::ProductXOneMinusY;
    s.noise_ = noise_half_width;
    return s;
}

HarvestSpec HarvestSpec::tabulated(Grid2d grid, double noise_half_width) {
    if (grid.min_value() < 0.0) throw std::invalid_argument("harvest: tabulated intensity must be >= 0");
    check_noise(noise_half_width);
    HarvestSpec s;
    s.kind_ = Kind::Tabulated;
    s.grid_ = std::move(grid);
    s.noise_ = noise_half_width;
    return s;
}

double HarvestSpec::intensity(double x, double y) const {
    switch (kind_) {
        case Kind::Constant: return c0_;
        case Kind::ProductXY: return x * y;
        case Kind::ProductXOneMinusY: return x * (1.0 - y);
        case Kind::Tabulated: return std::max(0.0, grid_(x, y));
    }
    return 0.0;
}

std::string HarvestSpec::describe() const {
    std::string base;
    switch (kind_) {
        case Kind::Constant: base = "constant(" + std::to_string(c0_) + ")"; break;
        case Kind::ProductXY: base = "xy"; break;
        case Kind::ProductXOneMinusY: base = "x(1-y)"; break;
        case Kind::Tabulated: base = "tabulated"; break;
    }
    return base + ", noise=" + std::to_string(noise_);
}

void Community::rebuild_neighbor_lists() {
    plant_neighbors.assign(n, {});
    poll_neighbors.assign(m, {});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j)
            if (edge(i, j)) {
                plant_neighbors[i].push_back(j);
                poll_neighbors[j].push_back(i);
            }
}

namespace {
std::vector<double> sample_sorted_traits(int count, const CdfInverse& inv, Pcg64& rng) {
    // probe monotonicity and range before trusting the map
    double prev = inv(0.0);
    for (int k = 0; k <= 100; ++k) {
        const double u = static_cast<double>(k) / 100.0;
        const double v = inv(u);
        if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("trait inverse CDF leaves [0,1] on probe grid");
        if (v < prev - 1e-15) throw ConfigError("trait inverse CDF is not monotone on probe grid");
        prev = std::max(prev, v);
    }
    std::vector<double> t(count);
    for (auto& v : t) v = inv(rng.uniform01());
    std::sort(t.begin(), t.end());
    return t;
}
}  // namespace

std::pair<std::vector<double>, std::vector<double>> sample_traits(int n, int m, const CdfInverse& plant_cdf_inverse,
                                                                  const CdfInverse& poll_cdf_inverse,
                                                                  std::uint64_t seed) {
    if (n < 1 || m < 1) throw std::invalid_argument("sample_traits: need n, m >= 1");
    Pcg64 rng = make_rng(seed, Stream::Traits);
    auto x = sample_sorted_traits(n, plant_cdf_inverse, rng);
    auto y = sample_sorted_traits(m, poll_cdf_inverse, rng);
    return {std::move(x), std::move(y)};
}

std::vector<std::uint8_t> sample_graph(const std::vector<double>& x, const std::vector<double>& y,
                                       const GraphonSpec& graphon, std::uint64_t seed) {
    Pcg64 rng = make_rng(seed, Stream::Graph);
    std::vector<std::uint8_t> g(x.size() * y.size());
    std::size_t idx = 0;
    for (double xi : x)
        for (double yj : y) g[idx++] = rng.bernoulli(graphon(xi, yj)) ? 1 : 0;
    return g;
}

std::vector<double> sample_weights(const std::vector<double>& x, const std::vector<double>& y,
                                   const HarvestSpec& harvest, std::uint64_t seed) {
    Pcg64 rng = make_rng(seed, Stream::Weights);
    const double scale = 1.0 / static_cast<double>(x.size() + y.size());
    const double w = harvest.noise_half_width();
    std::vector<double> c(x.size() * y.size());
    std::size_t idx = 0;
    for (double xi : x)
        for (double yj : y) {
            const double noise = (w > 0.0) ? w * (2.0 * rng.uniform01() - 1.0) : 0.0;
            c[idx++] = harvest.intensity(xi, yj) * scale * (1.0 + noise);
        }
    return c;
}

Community sample_community(int n, int m, const GraphonSpec& graphon, const HarvestSpec& harvest,
                           const CdfInverse& plant_cdf_inverse, const CdfInverse& poll_cdf_inverse,
                           std::uint64_t seed) {
    Community comm;
    comm.n = n;
    comm.m = m;
    comm.seed = seed;
    std::tie(comm.x, comm.y) = sample_traits(n, m, plant_cdf_inverse, poll_cdf_inverse, seed);
    comm.g = sample_graph(comm.x, comm.y, graphon, seed);
    comm.c = sample_weights(comm.x, comm.y, harvest, seed);
    comm.spec_description = "graphon=" + graphon.describe() + "; harvest=" + harvest.describe();
    comm.rebuild_neighbor_lists();
    return comm;
}

DegreeStats degree_stats(const std::vector<std::uint8_t>& g, int n, int m) {
    DegreeStats stats;
    stats.plant_degrees.assign(n, 0);
    stats.poll_degrees.assign(m, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j)
            if (g[static_cast<std::size_t>(i) * m + j]) {
                ++stats.plant_degrees[i];
                ++stats.poll_degrees[j];
                ++stats.edge_count;
            }
    stats.plant_histogram.assign(m + 1, 0);
    for (int d : stats.plant_degrees) ++stats.plant_histogram[d];
    stats.poll_histogram.assign(n + 1, 0);
    for (int d : stats.poll_degrees) ++stats.poll_histogram[d];
    return stats;
}

}  // namespace pollinet
