#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pollinet/grid2d.hpp"
#include "pollinet/matrix.hpp"

namespace pollinet {

/// Edge-probability function phi: [0,1]^2 -> [0,1]. Constant gives a bipartite
/// Erdos-Renyi graph, Product(x*y) a nested graph, Block a stochastic block
/// model, Tabulated anything continuous (bilinear, clamped to [0,1]).
class GraphonSpec {
  public:
    enum class Kind { Constant, Product, Block, Tabulated };

    static GraphonSpec constant(double phi0);
    static GraphonSpec product();
    static GraphonSpec block(std::vector<double> row_boundaries, std::vector<double> col_boundaries,
                             Matrix block_probs);
    static GraphonSpec tabulated(Grid2d grid);

    Kind kind() const { return kind_; }

    /// phi(x, y); throws std::logic_error if a value escapes [0,1].
    double operator()(double x, double y) const;

    std::string describe() const;

  private:
    GraphonSpec() = default;
    Kind kind_ = Kind::Constant;
    double phi0_ = 0.0;
    std::vector<double> row_bounds_, col_bounds_;
    Matrix block_probs_;
    Grid2d grid_;
};

/// Mean interaction intensity c~(x,y) >= 0. Sampled per-pair weights are
/// c~(x_i, y_j)/(n+m) times a uniform multiplicative perturbation
/// 1 + U[-w, +w]; w <= 1 keeps weights nonnegative and (m+n)^2 Var bounded.
class HarvestSpec {
  public:
    enum class Kind { Constant, ProductXY, ProductXOneMinusY, Tabulated };

    static HarvestSpec constant(double c0, double noise_half_width = 0.0);
    static HarvestSpec product_xy(double noise_half_width = 0.0);
    static HarvestSpec product_x_one_minus_y(double noise_half_width = 0.0);
    static HarvestSpec tabulated(Grid2d grid, double noise_half_width = 0.0);

    Kind kind() const { return kind_; }
    double noise_half_width() const { return noise_; }

    /// The intensity c~(x, y) (not yet divided by n+m).
    double intensity(double x, double y) const;

    std::string describe() const;

  private:
    HarvestSpec() = default;
    Kind kind_ = Kind::Constant;
    double c0_ = 0.0;
    double noise_ = 0.0;
    Grid2d grid_;
};

/// Monotone map [0,1] -> [0,1] used as an inverse trait CDF.
using CdfInverse = std::function<double(double)>;

inline CdfInverse identity_cdf_inverse() {
    return [](double u) { return u; };
}

/// A sampled community: traits, adjacency, and interaction weights. G and C
/// are sampled independently; only the product G_ij * C_ij enters dynamics.
struct Community {
    int n = 0, m = 0;
    std::vector<double> x, y;       // sorted ascending traits in [0,1]
    std::vector<std::uint8_t> g;    // n x m adjacency, row-major
    std::vector<double> c;          // n x m weights, row-major
    std::uint64_t seed = 0;
    std::string spec_description;

    // adjacency compressed by row/column, so resource updates cost O(degree)
    std::vector<std::vector<int>> plant_neighbors;  // per plant: pollinators j with G_ij = 1
    std::vector<std::vector<int>> poll_neighbors;   // per pollinator: plants i with G_ij = 1

    bool edge(int i, int j) const { return g[static_cast<std::size_t>(i) * m + j] != 0; }
    double weight(int i, int j) const { return c[static_cast<std::size_t>(i) * m + j]; }

    void rebuild_neighbor_lists();
};

/// n (resp. m) sorted trait values pulled through the inverse CDFs from one
/// uniform sample each; deterministic given the seed. The inverse CDFs are
/// probed on a grid and must be nondecreasing with values in [0,1].
std::pair<std::vector<double>, std::vector<double>> sample_traits(int n, int m, const CdfInverse& plant_cdf_inverse,
                                                                  const CdfInverse& poll_cdf_inverse,
                                                                  std::uint64_t seed);

/// G_ij ~ Bernoulli(phi(x_i, y_j)), independent entries given the traits.
std::vector<std::uint8_t> sample_graph(const std::vector<double>& x, const std::vector<double>& y,
                                       const GraphonSpec& graphon, std::uint64_t seed);

/// C_ij = [c~(x_i,y_j)/(n+m)] * (1 + U_ij), U_ij iid uniform on [-w, +w].
std::vector<double> sample_weights(const std::vector<double>& x, const std::vector<double>& y,
                                   const HarvestSpec& harvest, std::uint64_t seed);

/// Traits, graph and weights in one call, each on its own RNG sub-stream.
Community sample_community(int n, int m, const GraphonSpec& graphon, const HarvestSpec& harvest,
                           const CdfInverse& plant_cdf_inverse, const CdfInverse& poll_cdf_inverse,
                           std::uint64_t seed);

struct DegreeStats {
    std::vector<int> plant_degrees, poll_degrees;
    std::vector<int> plant_histogram, poll_histogram;  // index = degree
    long long edge_count = 0;
};

DegreeStats degree_stats(const std::vector<std::uint8_t>& g, int n, int m);
inline DegreeStats degree_stats(const Community& community) {
    return degree_stats(community.g, community.n, community.m);
}

}  // namespace pollinet
