#pragma once

#include <cmath>
#include <cstdint>

namespace pollinet {

/// splitmix64 step, used for seed mixing only.
inline std::uint64_t splitmix64(std::uint64_t& s) {
    s += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// PCG64 (XSL-RR 128/64, "setseq" variant). Small state, cross-platform
/// reproducible, and supports independent streams through the increment.
class Pcg64 {
  public:
    using result_type = std::uint64_t;

    Pcg64() : Pcg64(0x853c49e6748fea9bULL, 0xda3e39cb94b95bdbULL) {}

    Pcg64(std::uint64_t seed, std::uint64_t stream) {
        // Expand the two 64-bit inputs to 128-bit initial state / sequence.
        std::uint64_t s = seed;
        std::uint64_t q = stream ^ 0x5851f42d4c957f2dULL;
        const u128 init_state = (u128(splitmix64(s)) << 64) | splitmix64(s);
        const u128 init_seq = (u128(splitmix64(q)) << 64) | splitmix64(q);
        state_ = 0;
        inc_ = (init_seq << 1) | 1;
        step();
        state_ += init_state;
        step();
    }

    std::uint64_t operator()() {
        const u128 old = state_;
        step();
        const std::uint64_t xored = static_cast<std::uint64_t>(old >> 64) ^ static_cast<std::uint64_t>(old);
        const unsigned rot = static_cast<unsigned>(old >> 122);
        return (xored >> rot) | (xored << ((-rot) & 63u));
    }

    static constexpr std::uint64_t min() { return 0; }
    static constexpr std::uint64_t max() { return ~0ULL; }

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Exponential with rate lambda > 0.
    double exponential(double lambda) {
        // 1 - u in (0, 1], so the log is finite.
        return -std::log1p(-uniform01()) / lambda;
    }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Standard normal via Box-Muller (portable, unlike std::normal_distribution).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform01();  // (0, 1]
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    using u128 = unsigned __int128;

    void step() { state_ = state_ * mul() + inc_; }

    static constexpr u128 mul() { return (u128(2549297995355413924ULL) << 64) | 4865540595714422341ULL; }

    u128 state_ = 0;
    u128 inc_ = 1;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Named sub-streams derived from one master seed, so each sampling component
/// is reproducible on its own (resampling the graph does not disturb traits).
enum class Stream : std::uint64_t {
    Traits = 0x7472616974730001ULL,
    Graph = 0x6772617068000002ULL,
    Weights = 0x7765696768740003ULL,
    Dynamics = 0x64796e616d690004ULL,
    Fluctuations = 0x666c7563740005ULL,
    Init = 0x696e69740006ULL,
};

/// RNG for a component of a run. `index` separates replicas or sweep cells
/// within the same component.
inline Pcg64 make_rng(std::uint64_t seed, Stream component, std::uint64_t index = 0) {
    std::uint64_t s = static_cast<std::uint64_t>(component);
    const std::uint64_t stream = splitmix64(s) + 0x9e3779b97f4a7c15ULL * index;
    return Pcg64(seed, stream);
}

}  // namespace pollinet
