#pragma once

// Serialization of network specs, policies, occupancies and simulation
// metrics. Network spec schema:
//
//   {"M": 2,
//    "sensors": [{"eta": [..], "eps": [..], "omega": [..], "power_budget": 1.5}, ...]}
//
// Numbers are written with %.12g so reruns produce identical bytes.

#include <iosfwd>
#include <span>
#include <string>

#include "json.hpp"

#include "aoisched/model.hpp"
#include "aoisched/simulator.hpp"
#include "aoisched/single_sensor.hpp"

namespace aoi {

/// Throws Error(ParseError) naming the line (for syntax errors) or the
/// field path such as sensors[2].eps[1]. Also runs validate_network.
NetworkSpec parse_network_spec(const std::string& text);
NetworkSpec load_network_spec(const std::string& path);

nlohmann::json network_to_json(const NetworkSpec& network);

/// %.12g
std::string fmt(double v);

/// Rows x, q, mu, y, p for x = 1..X; y is empty at x = X (folded tail).
void write_policy_csv(std::ostream& os, const OccupancyMeasure& occ, const ThresholdPolicy& policy);
nlohmann::json policy_to_json(const OccupancyMeasure& occ, const ThresholdPolicy& policy);

void write_metrics_csv_header(std::ostream& os);
void write_metrics_csv_row(std::ostream& os, int replication, const SimMetrics& m);
nlohmann::json metrics_to_json(const SimMetrics& m);

}  // namespace aoi
