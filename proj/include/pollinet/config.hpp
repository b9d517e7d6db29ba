#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pollinet/mean_field.hpp"
#include "pollinet/network.hpp"
#include "pollinet/rates.hpp"

namespace pollinet {

/// One structured config file drives every subcommand; flags override fields.
/// Accessors throw ConfigError naming the offending field path.
class Config {
  public:
    static Config from_file(const std::string& path);
    static Config from_json_text(const std::string& text, const std::string& origin = "<config>");

    const nlohmann::json& raw() const { return json_; }
    nlohmann::json& raw() { return json_; }

    bool has(const std::string& dotted_path) const;
    const nlohmann::json& node(const std::string& dotted_path) const;  // throws ConfigError when absent

    double number(const std::string& dotted_path) const;
    double number_or(const std::string& dotted_path, double fallback) const;
    long long integer(const std::string& dotted_path) const;
    long long integer_or(const std::string& dotted_path, long long fallback) const;
    std::string text(const std::string& dotted_path) const;
    std::string text_or(const std::string& dotted_path, const std::string& fallback) const;
    std::vector<double> number_list(const std::string& dotted_path) const;
    std::vector<long long> integer_list(const std::string& dotted_path) const;

    void set(const std::string& dotted_path, const nlohmann::json& value);

    // typed sections
    GraphonSpec graphon() const;                  // community.graphon
    HarvestSpec harvest() const;                  // community.harvest
    CdfInverse plant_cdf_inverse() const;         // community.plantTraitCdfInverse (default identity)
    CdfInverse poll_cdf_inverse() const;          // community.pollTraitCdfInverse
    RateParams rates() const;                     // rates.*
    Kernels kernels() const;                      // kernels.plant / kernels.pollinator
    std::uint64_t seed() const;                   // seed
    std::vector<double> record_times(double t_end) const;  // schedule.recordEvery or schedule.recordTimes

    /// Per-species initial abundances: scalar broadcast or explicit array.
    std::vector<double> init_abundances(const std::string& dotted_path, int count) const;

    /// Resolved config text (stable key order) for artifact directories.
    std::string resolved_text() const;

  private:
    const nlohmann::json* find(const std::string& dotted_path) const;
    const nlohmann::json& require(const std::string& dotted_path) const;

    nlohmann::json json_;
};

/// Named 1-d profile: {"kind":"constant","value":v} | {"kind":"linear","a":..,"b":..}
/// | {"kind":"uniformRandom","lo":..,"hi":..} (seeded elsewhere).
struct DensityProfile {
    enum class Kind { Constant, Linear, UniformRandom } kind = Kind::Constant;
    double value = 1.0, a = 0.0, b = 0.0, lo = 0.0, hi = 1.0;

    static DensityProfile parse(const Config& cfg, const std::string& dotted_path);
};

}  // namespace pollinet
