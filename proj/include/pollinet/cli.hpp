#pragma once

#include <string>
#include <vector>

#include "pollinet/config.hpp"
#include "pollinet/network.hpp"

namespace pollinet {

/// Entry point behind main(); also used directly by tests.
int run_cli(std::vector<std::string> args);

/// Community from the config: either sampled from specs or given explicitly
/// (community.kind = "explicit" with x, y, adjacency and weights).
Community community_from_config(const Config& cfg);

/// Plant/pollinator initial abundances for dynamic runs (init.plants /
/// init.pollinators, scalar broadcast or arrays).
std::pair<std::vector<double>, std::vector<double>> init_from_config(const Config& cfg, const Community& community);

}  // namespace pollinet
