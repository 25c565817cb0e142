#pragma once

#include <optional>
#include <vector>

#include "cfperf/callgraph.hpp"
#include "cfperf/perf.hpp"

namespace cfperf {

struct Transaction {
    FeatureSet items;  // |items| >= 2
};

struct MinedItemSet {
    FeatureSet items;
    long long support_abs = 0;
    double support_rel = 0.0;  // support_abs / |T|
};

// s >= E decides frequency; the threshold is either an absolute transaction
// count or a fraction of |T|.
struct SupportThreshold {
    bool relative = true;
    double value = 0.0;

    static SupportThreshold absolute(double count) { return {false, count}; }
    static SupportThreshold fraction(double f) { return {true, f}; }
};

struct PredictionReport {
    std::vector<FeatureSet> predicted;
    std::vector<FeatureSet> actual;
    double precision = 0.0;
    double recall = 0.0;
};

struct SearchSpaceResult {
    std::vector<FeatureSet> candidates;
    std::int64_t total = 0;
    std::optional<double> ratio;  // nullopt = infinite (no candidates)
};

// One transaction per interaction occurrence; with unique_sets, one per
// distinct feature set.
std::vector<Transaction> to_transactions(const std::vector<CfInteraction>& cf, bool unique_sets);

// Apriori. Only item sets occurring in at least one transaction are
// enumerated, so a zero threshold yields exactly the occurring item sets.
// Output ordered by size, then lexicographically.
std::vector<MinedItemSet> mine_itemsets(const std::vector<Transaction>& transactions,
                                        SupportThreshold threshold, int min_size = 2);

// The distinct feature sets of the control-flow interactions, unchanged.
std::vector<FeatureSet> predict_direct(const std::vector<CfInteraction>& cf);

// Exact-set matching of predictions against learned performance interactions.
PredictionReport evaluate_prediction(const std::vector<FeatureSet>& predicted,
                                     const std::vector<PerfInteraction>& actual);

// Candidate combinations: all size-restricted subsets of each cf
// interaction's feature set, deduplicated, restricted to combinations
// realizable in some valid configuration.
SearchSpaceResult reduce_search_space(const std::vector<CfInteraction>& cf, const FeatureModel& fm,
                                      const std::set<int>& sizes);

}  // namespace cfperf
