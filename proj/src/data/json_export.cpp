#include "mtlkd/data/json_export.hpp"

#include <json.hpp>

namespace mtlkd::data {

std::string instance_to_json(const Instance& inst, int indent) {
  nlohmann::json j;
  j["name"] = inst.name;
  j["variant"] = inst.variant.name();
  j["capacity"] = inst.capacity;
  j["speed"] = inst.speed;
  j["distance_scale"] = inst.distance_scale;
  if (inst.variant.duration_limit) j["duration_limit"] = inst.duration_limit;
  auto& nodes = j["nodes"] = nlohmann::json::array();
  for (int i = 0; i < inst.num_nodes(); ++i) {
    nlohmann::json node{{"x", inst.coords[i].x},
                        {"y", inst.coords[i].y},
                        {"demand", inst.demand[i]}};
    if (inst.variant.time_window) {
      node["service_time"] = inst.service_time[i];
      node["tw"] = {inst.tw[i].earliest, inst.tw[i].latest};
    }
    nodes.push_back(std::move(node));
  }
  return j.dump(indent);
}

}  // namespace mtlkd::data
