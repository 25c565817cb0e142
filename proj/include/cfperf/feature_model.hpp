#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cfperf/presence.hpp"

namespace cfperf {

class ModelError : public std::runtime_error {
public:
    explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

// Total boolean assignment over a feature model's features.
struct Configuration {
    std::map<std::string, bool> assignment;

    bool enabled(const std::string& feature) const;
};

struct FeatureModel {
    std::vector<std::string> features;   // declared order, unique
    std::vector<PcPtr> constraints;

    // Checks name syntax, uniqueness, and that constraints only reference
    // declared features. Throws ModelError.
    void validate() const;

    bool declares(const std::string& feature) const;

    // Parses {"features": [...], "constraints": ["A || B", ...]}.
    static FeatureModel from_json_text(const std::string& text);
    static FeatureModel load(const std::string& path);
    std::string to_json_text() const;
};

// Exhaustive enumeration bound; models above it are rejected.
inline constexpr int kEnumerationFeatureLimit = 30;

// All assignments satisfying every constraint, in lexicographic order of the
// feature bit-vector (declared feature order, disabled < enabled).
std::vector<Configuration> enumerate_valid(const FeatureModel& fm);

// True iff some valid configuration satisfies pc.
bool satisfiable(const FeatureModel& fm, const PcPtr& pc);
bool satisfiable(const std::vector<Configuration>& valid, const PcPtr& pc);

// Number of distinct feature subsets of the given sizes that are enabled
// together in at least one valid configuration. Sizes must all be >= 2.
std::int64_t count_combinations(const FeatureModel& fm, const std::set<int>& sizes);

}  // namespace cfperf
