#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cfperf/callgraph.hpp"
#include "cfperf/feature_model.hpp"

namespace cfperf {

struct MeasurementSet {
    FeatureModel fm;
    std::vector<std::pair<Configuration, double>> rows;  // performance in seconds, > 0
};

struct ModelTerm {
    FeatureSet features;
    double coefficient = 0.0;  // seconds; negative = improvement
};

struct InfluenceModel {
    double intercept = 0.0;
    std::vector<ModelTerm> terms;
    double fit_error = 0.0;  // mean relative error on the training set
};

struct PerfInteraction {
    FeatureSet features;  // |features| >= 2
    double influence = 0.0;
};

struct LearnOptions {
    double error_goal = 0.02;        // stop once mean relative error is at or below this
    double min_improvement = 0.001;  // stop when the best candidate improves less than this
    int max_order = 3;               // largest term size considered
};

// intercept + sum of coefficients of terms fully enabled in c
double predict(const InfluenceModel& m, const Configuration& c);

// Forward feature selection with full least-squares refit per candidate.
// Responses are averaged per configuration before fitting.
InfluenceModel learn(const MeasurementSet& ms, const LearnOptions& opts = {});

// Terms of two or more features with |coefficient| >= noise, by descending
// absolute influence.
std::vector<PerfInteraction> extract_interactions(const InfluenceModel& m, double noise);

// Mean over configurations of the per-configuration sample standard
// deviation; every configuration needs at least two repetitions.
double mean_stddev(const MeasurementSet& ms);

// CSV: header feature_1,...,feature_n,performance_s; one row per repetition;
// feature columns must match fm's feature order.
MeasurementSet load_measurements_csv(const std::string& path, const FeatureModel& fm);
MeasurementSet parse_measurements_csv(const std::string& text, const FeatureModel& fm,
                                      const std::string& origin = "<csv>");
std::string measurements_to_csv(const MeasurementSet& ms);

std::string model_to_json_text(const InfluenceModel& m);
InfluenceModel model_from_json_text(const std::string& text);

}  // namespace cfperf
