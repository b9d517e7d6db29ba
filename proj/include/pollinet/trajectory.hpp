#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pollinet {

enum class ScaleTag { IBM, ODE, OU, Kinetic };

std::string to_string(ScaleTag tag);

/// Time-stamped snapshots of abundance vectors. For the stochastic model the
/// stored values are counts divided by K.
struct Trajectory {
    ScaleTag scale = ScaleTag::ODE;
    int n = 0, m = 0;
    std::vector<double> times;
    std::vector<std::vector<double>> values;  // one row per time, length n+m
    std::uint64_t seed = 0;
    std::string params_digest;

    void validate() const;  // strictly increasing times, rectangular values

    /// Row at the largest recorded time <= t (cadlag convention); linear
    /// interpolation is available separately where smoothness is known.
    const std::vector<double>& at_time(double t) const;

    /// Linear interpolation between stored samples (for C^1 paths).
    std::vector<double> interpolate(double t) const;
};

/// CSV with header `t,P_1..P_n,A_1..A_m`, one row per record time.
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

/// JSON sidecar with scale, dimensions, seed and parameter digest.
void write_trajectory_meta(const Trajectory& traj, const std::string& path);

/// FNV-1a digest of an arbitrary string (used to fingerprint configs).
std::string digest64(const std::string& text);

}  // namespace pollinet
