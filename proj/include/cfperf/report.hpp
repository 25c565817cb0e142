#pragma once

#include <json.hpp>

#include "cfperf/callgraph.hpp"
#include "cfperf/mining.hpp"
#include "cfperf/perf.hpp"
#include "cfperf/relate.hpp"

namespace cfperf {

using Json = nlohmann::ordered_json;

Json cf_interactions_report(const std::vector<CfInteraction>& ints,
                            const std::vector<CallEdge>& edges,
                            const std::vector<std::string>& diagnostics);

Json influence_report(const InfluenceModel& model, std::optional<double> measured_stddev,
                      double noise, const std::vector<PerfInteraction>& interactions);

Json relation_report(const std::vector<RelationRecord>& records,
                     const std::vector<PerfInteraction>& perf,
                     const std::vector<CfInteraction>& cf);

Json prediction_report_json(const PredictionReport& report);

Json search_space_json(const SearchSpaceResult& result);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace cfperf
