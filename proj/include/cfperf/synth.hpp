#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cfperf/clite.hpp"
#include "cfperf/perf.hpp"

namespace cfperf {

struct CallPlanEntry {
    std::string caller;  // feature owning the calling function
    std::string callee;  // feature owning the called function
    PcPtr pc;            // positive features must include caller and callee
    int occurrences = 1;
};

// A synthetic configurable system: every interaction term in `truth` is
// backed by a call-plan entry whose pc has exactly the term's positive
// features; distractor entries (calls without a performance term) are
// allowed.
struct SyntheticSpec {
    FeatureModel fm;
    InfluenceModel truth;
    std::vector<CallPlanEntry> call_plan;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;

    void validate() const;

    static SyntheticSpec from_json_text(const std::string& text);
    static SyntheticSpec load(const std::string& path);
};

// Feature F owns one function named f_F under #ifdef F; each call-plan entry
// becomes `occurrences` call sites guarded by its pc inside the caller's
// function. Deterministic.
std::vector<SourceUnit> generate_corpus(const SyntheticSpec& spec);

// Name of the function owned by a feature.
std::string feature_function(const std::string& feature);

// For every valid configuration, `reps` rows of predict(truth, c) plus
// seeded gaussian noise, clamped positive.
MeasurementSet simulate_benchmark(const SyntheticSpec& spec, int reps);

}  // namespace cfperf
