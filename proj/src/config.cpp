#include "pollinet/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "pollinet/errors.hpp"

namespace pollinet {

namespace {
std::vector<std::string> split_path(const std::string& dotted) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : dotted) {
        if (c == '.') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    return parts;
}

[[noreturn]] void parse_failure(const std::string& origin, const std::string& text, std::size_t byte,
                                const std::string& what) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    throw ConfigError(origin + ":" + std::to_string(line) + ": " + what);
}
}  // namespace

Config Config::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str(), path);
}

Config Config::from_json_text(const std::string& text, const std::string& origin) {
    Config cfg;
    try {
        cfg.json_ = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        parse_failure(origin, text, e.byte, e.what());
    }
    if (!cfg.json_.is_object()) throw ConfigError(origin + ": top level must be a JSON object");
    return cfg;
}

const nlohmann::json* Config::find(const std::string& dotted_path) const {
    const nlohmann::json* cur = &json_;
    for (const std::string& key : split_path(dotted_path)) {
        if (!cur->is_object() || !cur->contains(key)) return nullptr;
        cur = &(*cur)[key];
    }
    return cur;
}

const nlohmann::json& Config::require(const std::string& dotted_path) const {
    const nlohmann::json* node = find(dotted_path);
    if (!node) throw ConfigError("missing required field: " + dotted_path);
    return *node;
}

bool Config::has(const std::string& dotted_path) const { return find(dotted_path) != nullptr; }

const nlohmann::json& Config::node(const std::string& dotted_path) const { return require(dotted_path); }

double Config::number(const std::string& dotted_path) const {
    const nlohmann::json& node = require(dotted_path);
    if (!node.is_number()) throw ConfigError("field must be a number: " + dotted_path);
    return node.get<double>();
}

double Config::number_or(const std::string& dotted_path, double fallback) const {
    return has(dotted_path) ? number(dotted_path) : fallback;
}

long long Config::integer(const std::string& dotted_path) const {
    const nlohmann::json& node = require(dotted_path);
    if (!node.is_number_integer()) throw ConfigError("field must be an integer: " + dotted_path);
    return node.get<long long>();
}

long long Config::integer_or(const std::string& dotted_path, long long fallback) const {
    return has(dotted_path) ? integer(dotted_path) : fallback;
}

std::string Config::text(const std::string& dotted_path) const {
    const nlohmann::json& node = require(dotted_path);
    if (!node.is_string()) throw ConfigError("field must be a string: " + dotted_path);
    return node.get<std::string>();
}

std::string Config::text_or(const std::string& dotted_path, const std::string& fallback) const {
    return has(dotted_path) ? text(dotted_path) : fallback;
}

std::vector<double> Config::number_list(const std::string& dotted_path) const {
    const nlohmann::json& node = require(dotted_path);
    if (!node.is_array()) throw ConfigError("field must be an array of numbers: " + dotted_path);
    std::vector<double> out;
    for (const auto& v : node) {
        if (!v.is_number()) throw ConfigError("field must be an array of numbers: " + dotted_path);
        out.push_back(v.get<double>());
    }
    return out;
}

std::vector<long long> Config::integer_list(const std::string& dotted_path) const {
    const nlohmann::json& node = require(dotted_path);
    if (!node.is_array()) throw ConfigError("field must be an array of integers: " + dotted_path);
    std::vector<long long> out;
    for (const auto& v : node) {
        if (!v.is_number_integer()) throw ConfigError("field must be an array of integers: " + dotted_path);
        out.push_back(v.get<long long>());
    }
    return out;
}

void Config::set(const std::string& dotted_path, const nlohmann::json& value) {
    nlohmann::json* cur = &json_;
    const auto parts = split_path(dotted_path);
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) cur = &(*cur)[parts[i]];
    (*cur)[parts.back()] = value;
}

namespace {
Grid2d grid_from_json(const nlohmann::json& node, const std::string& path) {
    if (!node.is_array() || node.empty()) throw ConfigError("field must be a 2-d array: " + path);
    std::size_t cols = 0;
    std::vector<double> values;
    for (const auto& row : node) {
        if (!row.is_array()) throw ConfigError("field must be a 2-d array: " + path);
        if (cols == 0)
            cols = row.size();
        else if (row.size() != cols)
            throw ConfigError("ragged rows in: " + path);
        for (const auto& v : row) values.push_back(v.get<double>());
    }
    return Grid2d(node.size(), cols, std::move(values));
}
}  // namespace

GraphonSpec Config::graphon() const {
    const std::string kind = text("community.graphon.kind");
    if (kind == "constant") return GraphonSpec::constant(number("community.graphon.phi0"));
    if (kind == "product") return GraphonSpec::product();
    if (kind == "block") {
        const auto rows = number_list("community.graphon.rowBoundaries");
        const auto cols = number_list("community.graphon.colBoundaries");
        const nlohmann::json& probs = require("community.graphon.blockProbs");
        Grid2d g = grid_from_json(probs, "community.graphon.blockProbs");
        Matrix mat(g.rows(), g.cols());
        for (std::size_t i = 0; i < g.rows(); ++i)
            for (std::size_t j = 0; j < g.cols(); ++j) mat(i, j) = g.at(i, j);
        return GraphonSpec::block(rows, cols, std::move(mat));
    }
    if (kind == "tabulated")
        return GraphonSpec::tabulated(grid_from_json(require("community.graphon.values"), "community.graphon.values"));
    throw ConfigError("unknown graphon kind: " + kind);
}

HarvestSpec Config::harvest() const {
    const std::string kind = text("community.harvest.kind");
    const double noise = number_or("community.harvest.noiseHalfWidth", 0.0);
    if (kind == "constant") return HarvestSpec::constant(number("community.harvest.c0"), noise);
    if (kind == "product_xy") return HarvestSpec::product_xy(noise);
    if (kind == "product_x_one_minus_y") return HarvestSpec::product_x_one_minus_y(noise);
    if (kind == "tabulated")
        return HarvestSpec::tabulated(grid_from_json(require("community.harvest.values"), "community.harvest.values"),
                                      noise);
    throw ConfigError("unknown harvest kind: " + kind);
}

namespace {
CdfInverse cdf_from_config(const Config& cfg, const std::string& base) {
    if (!cfg.has(base)) return identity_cdf_inverse();
    const std::string kind = cfg.text(base + ".kind");
    if (kind == "identity") return identity_cdf_inverse();
    if (kind == "constant") {
        const double v = cfg.number(base + ".value");
        return [v](double) { return v; };
    }
    if (kind == "power") {
        const double e = cfg.number(base + ".exponent");
        if (!(e > 0.0)) throw ConfigError(base + ".exponent must be positive");
        return [e](double u) { return std::pow(u, e); };
    }
    throw ConfigError("unknown trait CDF kind: " + kind);
}
}  // namespace

CdfInverse Config::plant_cdf_inverse() const { return cdf_from_config(*this, "community.plantTraitCdfInverse"); }
CdfInverse Config::poll_cdf_inverse() const { return cdf_from_config(*this, "community.pollTraitCdfInverse"); }

RateParams Config::rates() const {
    RateParams p;
    p.alpha_p = number("rates.alphaP");
    p.beta_p = number("rates.betaP");
    p.gamma_p = number("rates.gammaP");
    p.d_p = number("rates.dP");
    p.delta_p = number("rates.deltaP");
    p.alpha_a = number("rates.alphaA");
    p.beta_a = number("rates.betaA");
    p.gamma_a = number("rates.gammaA");
    p.d_a = number("rates.dA");
    try {
        p.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("rates: ") + e.what());
    }
    return p;
}

namespace {
KernelSpec kernel_from_config(const Config& cfg, const std::string& base) {
    const std::string kind = cfg.text(base + ".kind");
    if (kind == "constant") return KernelSpec::constant(cfg.number(base + ".value"));
    if (kind == "tabulated") return KernelSpec::tabulated(grid_from_json(cfg.node(base + ".values"), base + ".values"));
    throw ConfigError("unknown kernel kind: " + kind);
}
}  // namespace

Kernels Config::kernels() const {
    Kernels k{kernel_from_config(*this, "kernels.plant"), kernel_from_config(*this, "kernels.pollinator")};
    return k;
}

std::uint64_t Config::seed() const { return static_cast<std::uint64_t>(integer("seed")); }

std::vector<double> Config::record_times(double t_end) const {
    if (has("schedule.recordTimes")) {
        auto times = number_list("schedule.recordTimes");
        for (std::size_t k = 1; k < times.size(); ++k)
            if (!(times[k] > times[k - 1])) throw ConfigError("schedule.recordTimes must increase strictly");
        if (!times.empty() && times.back() > t_end + 1e-12)
            throw ConfigError("schedule.recordTimes exceed schedule.tEnd");
        return times;
    }
    const double every = number_or("schedule.recordEvery", t_end / 100.0);
    if (!(every > 0.0)) throw ConfigError("schedule.recordEvery must be positive");
    std::vector<double> times;
    for (double t = 0.0; t < t_end + 1e-12; t += every) times.push_back(std::min(t, t_end));
    if (times.back() < t_end) times.push_back(t_end);
    return times;
}

std::vector<double> Config::init_abundances(const std::string& dotted_path, int count) const {
    const nlohmann::json& node = require(dotted_path);
    std::vector<double> out;
    if (node.is_number()) {
        out.assign(count, node.get<double>());
    } else if (node.is_array()) {
        for (const auto& v : node) out.push_back(v.get<double>());
        if (out.size() != static_cast<std::size_t>(count))
            throw ConfigError(dotted_path + ": expected " + std::to_string(count) + " entries");
    } else {
        throw ConfigError(dotted_path + " must be a number or an array");
    }
    for (double v : out)
        if (v < 0.0) throw ConfigError(dotted_path + ": abundances must be >= 0");
    return out;
}

std::string Config::resolved_text() const { return json_.dump(2) + "\n"; }

DensityProfile DensityProfile::parse(const Config& cfg, const std::string& dotted_path) {
    DensityProfile prof;
    const std::string kind = cfg.text(dotted_path + ".kind");
    if (kind == "constant") {
        prof.kind = Kind::Constant;
        prof.value = cfg.number(dotted_path + ".value");
        if (prof.value < 0.0) throw ConfigError(dotted_path + ".value must be >= 0");
    } else if (kind == "linear") {
        prof.kind = Kind::Linear;
        prof.a = cfg.number(dotted_path + ".a");
        prof.b = cfg.number(dotted_path + ".b");
        if (prof.a < 0.0 || prof.a + prof.b < 0.0) throw ConfigError(dotted_path + ": profile dips below 0 on [0,1]");
    } else if (kind == "uniformRandom") {
        prof.kind = Kind::UniformRandom;
        prof.lo = cfg.number(dotted_path + ".lo");
        prof.hi = cfg.number(dotted_path + ".hi");
        if (!(0.0 <= prof.lo && prof.lo <= prof.hi)) throw ConfigError(dotted_path + ": need 0 <= lo <= hi");
    } else {
        throw ConfigError("unknown density profile kind: " + kind);
    }
    return prof;
}

}  // namespace pollinet
