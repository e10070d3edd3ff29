#pragma once

#include <string>
#include <variant>

#include <json.hpp>

#include "graphext/evolution.hpp"

namespace graphext {

using Json = nlohmann::json;

MetricGraphSpec graph_from_json(const Json& j);
Json graph_to_json(const MetricGraphSpec& g);

/// Parse either operator's extension spec, dispatched on the "operator"
/// field ("airy" default, or "schrodinger").
AnyExtensionSpec extension_from_json(const Json& j);
Json extension_to_json(const AnyExtensionSpec& spec);

Scenario scenario_from_json(const Json& j);

Json report_to_json(const ClassificationReport& rep);
Json report_to_json(const DeficiencyReport& rep);
Json report_to_json(const EvolutionReport& rep);
Json report_to_json(const CertifyResult& res);

/// CSV with columns t, norm, boundary_residual, tail_mass.
std::string evolution_csv(const EvolutionReport& rep);

}  // namespace graphext
