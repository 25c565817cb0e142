#pragma once

#include <map>
#include <string>
#include <vector>

#include "cfperf/clite.hpp"
#include "cfperf/feature_model.hpp"

namespace cfperf {

using FeatureSet = std::set<std::string>;

struct CallEdge {
    std::string caller;
    std::string callee;
    PcPtr pc;            // caller-def pc ∧ call-site pc ∧ callee-def pc
    Location location;   // {"overlay", 0} for overlay edges
    bool overlay = false;
};

struct CfInteraction {
    FeatureSet features;  // |features| >= 2
    int occurrences = 0;  // == |sites|
    std::vector<Location> sites;

    bool from_overlay() const;  // any site contributed by the overlay
};

struct OverlayEntry {
    std::string caller;
    std::string callee;
    PcPtr pc;
    int occurrences = 1;
};

struct CallGraph {
    std::vector<CallEdge> edges;
    std::vector<std::string> diagnostics;  // calls to undefined functions
};

// One edge per (call site, matching callee definition) pair plus one per
// overlay occurrence; edges whose pc no valid configuration satisfies are
// dropped. Overlay callers/callees must be defined in the AST.
CallGraph build_graph(const VariableAst& ast, const FeatureModel& fm,
                      const std::vector<OverlayEntry>& overlay);

// Groups edges by the positive features of their pc; keeps groups with two
// or more features. Sorted by descending occurrences, then feature set.
std::vector<CfInteraction> derive_cf_interactions(const std::vector<CallEdge>& edges);

// Interaction size distribution; weighted counts each occurrence.
std::map<int, long long> interaction_histogram(const std::vector<CfInteraction>& ints,
                                               bool unique);

// Overlay file: JSON array of {"caller","callee","pc","occurrences"}.
std::vector<OverlayEntry> load_overlay(const std::string& path);

std::string edges_to_dot(const std::vector<CallEdge>& edges);

}  // namespace cfperf
