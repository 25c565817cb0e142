#pragma once

#include <vector>

#include "cfperf/callgraph.hpp"
#include "cfperf/perf.hpp"

namespace cfperf {

enum class RelationDirection { PerfSubsetOfCf, CfSubsetOfPerf, Equal };

struct RelationRecord {
    size_t perf_index;
    size_t cf_index;
    RelationDirection direction;
    double jaccard;  // in (0, 1], 1 iff Equal
};

enum class SummarizeBy { Perf, Cf };

struct RelationSummaryRow {
    FeatureSet features;
    double influence = 0.0;     // perf side only
    int occurrences = 0;        // cf side only
    int relations = 0;
    double mean_jaccard = 0.0;  // 0 when relations == 0
    bool overlay = false;       // some related cf interaction came from the overlay
};

// |a ∩ b| / |a ∪ b|; both sets must be nonempty.
double jaccard(const FeatureSet& a, const FeatureSet& b);

// All (perf, cf) pairs where one feature set contains the other.
std::vector<RelationRecord> relate(const std::vector<PerfInteraction>& perf,
                                   const std::vector<CfInteraction>& cf);

// Grouped counts and mean Jaccard. By perf: every perf interaction appears,
// including those with zero relations. By cf: only related cf interactions.
std::vector<RelationSummaryRow> summarize(const std::vector<RelationRecord>& records,
                                          const std::vector<PerfInteraction>& perf,
                                          const std::vector<CfInteraction>& cf, SummarizeBy by);

}  // namespace cfperf
