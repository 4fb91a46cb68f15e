#pragma once

#include <iosfwd>
#include <string>

#include "nctmc/core/network.hpp"
#include "nctmc/core/trajectory.hpp"

namespace nctmc {

// Trajectory files are JSON Lines, one observation per line:
//   {"t": <float>, "state": [<int>, ...], "cov": [<float>, ...], "rho": <int|null>}
// with "rho" the 1-based reaction index, null on the terminal record.

void write_trajectory_jsonl(std::ostream& os, const Trajectory& trajectory);
Trajectory read_trajectory_jsonl(std::istream& is);

std::string trajectory_to_jsonl(const Trajectory& trajectory);

void save_trajectory(const std::string& path, const Trajectory& trajectory);
Trajectory load_trajectory(const std::string& path);

// Network files are JSON:
//   {"species": [...], "reactions": [{"label": ..., "phi": [...], "psi": [...]}, ...]}

std::string network_to_json(const ReactionNetwork& network);
ReactionNetwork network_from_json(const std::string& text);

void save_network(const std::string& path, const ReactionNetwork& network);
ReactionNetwork load_network(const std::string& path);

}  // namespace nctmc
