#include "nctmc/core/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace nctmc {

using nlohmann::json;

namespace {

json observation_to_json(const Observation& o) {
  json j;
  j["t"] = o.time;
  j["state"] = o.state;
  j["cov"] = o.covariates;
  if (o.reaction)
    j["rho"] = *o.reaction + 1;  // files are 1-based
  else
    j["rho"] = nullptr;
  return j;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open '" + path + "' for reading");
  return is;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open '" + path + "' for writing");
  return os;
}

}  // namespace

void write_trajectory_jsonl(std::ostream& os, const Trajectory& trajectory) {
  for (const auto& o : trajectory.observations) os << observation_to_json(o).dump() << '\n';
}

std::string trajectory_to_jsonl(const Trajectory& trajectory) {
  std::ostringstream os;
  write_trajectory_jsonl(os, trajectory);
  return os.str();
}

Trajectory read_trajectory_jsonl(std::istream& is) {
  Trajectory t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    Observation o;
    try {
      const json j = json::parse(line);
      o.time = j.at("t").get<double>();
      o.state = j.at("state").get<State>();
      o.covariates = j.at("cov").get<Covariates>();
      const auto& rho = j.at("rho");
      if (!rho.is_null()) {
        const auto idx = rho.get<std::int64_t>();
        if (idx < 1) throw ConfigError("trajectory rho must be a 1-based index");
        o.reaction = static_cast<std::size_t>(idx - 1);
      }
    } catch (const json::exception& e) {
      std::ostringstream msg;
      msg << "trajectory line " << line_no << ": " << e.what();
      throw ConfigError(msg.str());
    }
    t.observations.push_back(std::move(o));
  }
  return t;
}

void save_trajectory(const std::string& path, const Trajectory& trajectory) {
  auto os = open_out(path);
  write_trajectory_jsonl(os, trajectory);
}

Trajectory load_trajectory(const std::string& path) {
  auto is = open_in(path);
  return read_trajectory_jsonl(is);
}

std::string network_to_json(const ReactionNetwork& network) {
  json j;
  j["species"] = network.species();
  json reactions = json::array();
  for (const auto& r : network.reactions()) {
    json jr;
    jr["label"] = r.label;
    jr["phi"] = r.reactants;
    jr["psi"] = r.products;
    reactions.push_back(std::move(jr));
  }
  j["reactions"] = std::move(reactions);
  return j.dump(2);
}

ReactionNetwork network_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("network json: ") + e.what());
  }
  std::vector<std::string> species = j.at("species").get<std::vector<std::string>>();
  std::vector<ReactionNetwork::Reaction> reactions;
  for (const auto& jr : j.at("reactions")) {
    ReactionNetwork::Reaction r;
    r.label = jr.at("label").get<std::string>();
    r.reactants = jr.at("phi").get<std::vector<std::int64_t>>();
    r.products = jr.at("psi").get<std::vector<std::int64_t>>();
    reactions.push_back(std::move(r));
  }
  return ReactionNetwork(std::move(species), std::move(reactions));
}

void save_network(const std::string& path, const ReactionNetwork& network) {
  open_out(path) << network_to_json(network) << '\n';
}

ReactionNetwork load_network(const std::string& path) {
  auto is = open_in(path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return network_from_json(buf.str());
}

}  // namespace nctmc
