#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "sflat/flatness/analysis.hpp"
#include "sflat/planner/planner.hpp"
#include "sflat/prolongation/prolongation.hpp"
#include "sflat/triangular/triangular.hpp"

namespace sflat {

using Json = nlohmann::json;  // std::map objects, so keys serialize sorted

inline constexpr int kReportSchemaVersion = 1;

Json to_json(const TriState& t);
Json to_json(const MultiIndex& m);
Json to_json(const SystemModel& sys);
Json to_json(const AnalysisReport& r);
Json to_json(const SearchResult& r);
Json to_json(const CoordinateChart& c);
Json to_json(const GTF3Form& g);
/// With an operating point each applicable entry also carries its value there.
Json to_json(const RegularityReport& r, const GTF3Form& g, const std::optional<Point>& point = {});
Json to_json(const FlatParameterization& F);
Json plan_summary(const PlanResult& p);

/// Wraps a payload as {"schema_version", "command", <payload keys>}.
Json report_document(const std::string& command, Json payload);

/// Canonical serialization: sorted keys, two-space indent, trailing newline.
std::string emit_report(const Json& doc);

}  // namespace sflat
