#include "pollinet/trajectory.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "pollinet/errors.hpp"

namespace pollinet {

std::string to_string(ScaleTag tag) {
    switch (tag) {
        case ScaleTag::IBM: return "IBM";
        case ScaleTag::ODE: return "ODE";
        case ScaleTag::OU: return "OU";
        case ScaleTag::Kinetic: return "KINETIC";
    }
    return "?";
}

void Trajectory::validate() const {
    if (times.size() != values.size()) throw std::logic_error("trajectory: times/values size mismatch");
    for (std::size_t k = 1; k < times.size(); ++k)
        if (!(times[k] > times[k - 1])) throw std::logic_error("trajectory: times must be strictly increasing");
    for (const auto& row : values)
        if (row.size() != values.front().size()) throw std::logic_error("trajectory: ragged value rows");
}

const std::vector<double>& Trajectory::at_time(double t) const {
    if (times.empty()) throw std::logic_error("trajectory: empty");
    auto it = std::upper_bound(times.begin(), times.end(), t + 1e-12);
    if (it == times.begin()) throw AlignmentError("trajectory: time before first sample");
    return values[static_cast<std::size_t>(it - times.begin()) - 1];
}

std::vector<double> Trajectory::interpolate(double t) const {
    if (times.empty()) throw std::logic_error("trajectory: empty");
    if (t <= times.front()) return values.front();
    if (t >= times.back()) return values.back();
    auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t hi = static_cast<std::size_t>(it - times.begin());
    const std::size_t lo = hi - 1;
    const double w = (t - times[lo]) / (times[hi] - times[lo]);
    std::vector<double> out(values[lo].size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (1.0 - w) * values[lo][i] + w * values[hi][i];
    return out;
}

namespace {
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
}  // namespace

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    traj.validate();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "t";
    for (int i = 1; i <= traj.n; ++i) out << ",P_" << i;
    for (int j = 1; j <= traj.m; ++j) out << ",A_" << j;
    out << "\n";
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        out << fmt(traj.times[k]);
        for (double v : traj.values[k]) out << "," << fmt(v);
        out << "\n";
    }
}

void write_trajectory_meta(const Trajectory& traj, const std::string& path) {
    nlohmann::json j;
    j["scale"] = to_string(traj.scale);
    j["n"] = traj.n;
    j["m"] = traj.m;
    j["seed"] = traj.seed;
    j["paramsDigest"] = traj.params_digest;
    j["samples"] = traj.times.size();
    if (!traj.times.empty()) {
        j["tFirst"] = traj.times.front();
        j["tLast"] = traj.times.back();
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << j.dump(2) << "\n";
}

std::string digest64(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace pollinet
