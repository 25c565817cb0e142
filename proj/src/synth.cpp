#include "cfperf/synth.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

namespace cfperf {

std::string feature_function(const std::string& feature) { return "f_" + feature; }

void SyntheticSpec::validate() const {
    fm.validate();
    for (const auto& entry : call_plan) {
        if (!fm.declares(entry.caller))
            throw ModelError("call plan references unknown feature: " + entry.caller);
        if (!fm.declares(entry.callee))
            throw ModelError("call plan references unknown feature: " + entry.callee);
        if (entry.occurrences < 1) throw ModelError("call plan occurrences must be >= 1");
        auto positives = positive_features(entry.pc);
        if (!positives.count(entry.caller) || !positives.count(entry.callee))
            throw ModelError("call plan pc must contain caller and callee as positive features: " +
                             to_string(entry.pc));
        for (const auto& f : referenced_features(entry.pc)) {
            if (!fm.declares(f))
                throw ModelError("call plan pc references unknown feature: " + f);
        }
    }
    for (const auto& term : truth.terms) {
        for (const auto& f : term.features)
            if (!fm.declares(f)) throw ModelError("truth term references unknown feature: " + f);
        if (term.features.size() < 2) continue;
        bool backed = std::any_of(call_plan.begin(), call_plan.end(), [&](const CallPlanEntry& e) {
            return positive_features(e.pc) == term.features;
        });
        if (!backed) {
            std::string names;
            for (const auto& f : term.features) names += (names.empty() ? "" : ",") + f;
            throw ModelError("truth interaction {" + names +
                             "} has no call plan entry with a matching presence condition");
        }
    }
    if (noise_sigma < 0) throw ModelError("noise_sigma must be >= 0");
}

SyntheticSpec SyntheticSpec::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ModelError(std::string("synthetic spec is not valid JSON: ") + e.what());
    }
    SyntheticSpec spec;
    try {
        for (const auto& f : j.at("features")) spec.fm.features.push_back(f.get<std::string>());
        if (j.contains("constraints"))
            for (const auto& c : j["constraints"])
                spec.fm.constraints.push_back(parse_pc(c.get<std::string>()));
        spec.truth = model_from_json_text(j.at("truth").dump());
        if (j.contains("call_plan")) {
            for (const auto& e : j["call_plan"]) {
                CallPlanEntry entry;
                entry.caller = e.at("caller").get<std::string>();
                entry.callee = e.at("callee").get<std::string>();
                entry.pc = parse_pc(e.at("pc").get<std::string>());
                entry.occurrences = e.value("occurrences", 1);
                spec.call_plan.push_back(std::move(entry));
            }
        }
        spec.noise_sigma = j.value("noise_sigma", 0.0);
        spec.seed = j.value("seed", std::uint64_t{0});
    } catch (const nlohmann::json::exception& e) {
        throw ModelError(std::string("malformed synthetic spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

SyntheticSpec SyntheticSpec::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open synthetic spec: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

std::vector<SourceUnit> generate_corpus(const SyntheticSpec& spec) {
    spec.validate();
    std::ostringstream src;
    src << "/* generated configurable system */\n";
    for (const auto& feature : spec.fm.features) {
        src << "\n#ifdef " << feature << "\n";
        src << "void " << feature_function(feature) << "(void) {\n";
        for (const auto& entry : spec.call_plan) {
            if (entry.caller != feature) continue;
            src << "#if " << to_string(entry.pc) << "\n";
            for (int i = 0; i < entry.occurrences; ++i)
                src << "  " << feature_function(entry.callee) << "();\n";
            src << "#endif\n";
        }
        src << "}\n";
        src << "#endif\n";
    }
    return {{"synth.c", src.str()}};
}

MeasurementSet simulate_benchmark(const SyntheticSpec& spec, int reps) {
    if (reps < 1) throw ModelError("reps must be >= 1");
    spec.validate();
    MeasurementSet ms;
    ms.fm = spec.fm;
    const auto valid = enumerate_valid(spec.fm);
    for (size_t i = 0; i < valid.size(); ++i) {
        // per-configuration sub-seed keeps rows independent of ordering
        std::mt19937_64 rng(spec.seed ^ (0x9e3779b97f4a7c15ULL * (i + 1)));
        std::normal_distribution<double> noise(0.0, 1.0);
        double base = predict(spec.truth, valid[i]);
        for (int r = 0; r < reps; ++r) {
            double v = base;
            if (spec.noise_sigma > 0) v += spec.noise_sigma * noise(rng);
            ms.rows.emplace_back(valid[i], std::max(v, 1e-9));
        }
    }
    return ms;
}

}  // namespace cfperf
