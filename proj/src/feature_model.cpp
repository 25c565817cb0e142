#include "cfperf/feature_model.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cfperf {

bool Configuration::enabled(const std::string& feature) const {
    auto it = assignment.find(feature);
    if (it == assignment.end())
        throw ModelError("configuration does not cover feature: " + feature);
    return it->second;
}

namespace {

bool valid_feature_name(const std::string& name) {
    if (name.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(name[0])) && name[0] != '_') return false;
    return std::all_of(name.begin() + 1, name.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    });
}

}  // namespace

void FeatureModel::validate() const {
    std::set<std::string> seen;
    for (const auto& f : features) {
        if (!valid_feature_name(f))
            throw ModelError("invalid feature name: \"" + f + "\"");
        if (!seen.insert(f).second)
            throw ModelError("duplicate feature name: " + f);
    }
    for (const auto& c : constraints) {
        for (const auto& f : referenced_features(c)) {
            if (!seen.count(f))
                throw ModelError("constraint references undeclared feature: " + f);
        }
    }
}

bool FeatureModel::declares(const std::string& feature) const {
    return std::find(features.begin(), features.end(), feature) != features.end();
}

FeatureModel FeatureModel::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ModelError(std::string("feature model is not valid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("features") || !j["features"].is_array())
        throw ModelError("feature model must be an object with a \"features\" array");
    FeatureModel fm;
    for (const auto& f : j["features"]) fm.features.push_back(f.get<std::string>());
    if (j.contains("constraints")) {
        for (const auto& c : j["constraints"]) fm.constraints.push_back(parse_pc(c.get<std::string>()));
    }
    fm.validate();
    return fm;
}

FeatureModel FeatureModel::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open feature model file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

std::string FeatureModel::to_json_text() const {
    nlohmann::ordered_json j;
    j["features"] = features;
    j["constraints"] = nlohmann::ordered_json::array();
    for (const auto& c : constraints) j["constraints"].push_back(to_string(c));
    return j.dump(2) + "\n";
}

std::vector<Configuration> enumerate_valid(const FeatureModel& fm) {
    fm.validate();
    const int n = static_cast<int>(fm.features.size());
    if (n > kEnumerationFeatureLimit)
        throw ModelError("feature model has " + std::to_string(n) +
                         " features, above the exhaustive enumeration bound of " +
                         std::to_string(kEnumerationFeatureLimit) +
                         "; use constraint-free counting instead");
    std::vector<Configuration> out;
    const std::uint64_t total = std::uint64_t(1) << n;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        Configuration c;
        for (int i = 0; i < n; ++i) {
            // bit 0 of the lexicographic vector is the first declared feature
            bool on = (mask >> (n - 1 - i)) & 1;
            c.assignment.emplace(fm.features[i], on);
        }
        bool ok = true;
        for (const auto& constraint : fm.constraints) {
            if (!evaluate(constraint, c.assignment)) {
                ok = false;
                break;
            }
        }
        if (ok) out.push_back(std::move(c));
    }
    return out;
}

bool satisfiable(const std::vector<Configuration>& valid, const PcPtr& pc) {
    return std::any_of(valid.begin(), valid.end(), [&](const Configuration& c) {
        return evaluate(pc, c.assignment);
    });
}

bool satisfiable(const FeatureModel& fm, const PcPtr& pc) {
    return satisfiable(enumerate_valid(fm), pc);
}

std::int64_t count_combinations(const FeatureModel& fm, const std::set<int>& sizes) {
    if (sizes.empty()) throw ModelError("count_combinations requires at least one size");
    for (int s : sizes)
        if (s < 2) throw ModelError("combination sizes must be >= 2");

    const int n = static_cast<int>(fm.features.size());
    if (fm.constraints.empty()) {
        // every subset is realizable
        std::int64_t total = 0;
        for (int k : sizes) {
            if (k > n) continue;
            std::int64_t c = 1;
            for (int i = 0; i < k; ++i) c = c * (n - i) / (i + 1);
            total += c;
        }
        return total;
    }

    const auto valid = enumerate_valid(fm);
    std::set<std::vector<int>> combos;
    for (const auto& cfg : valid) {
        std::vector<int> enabled;
        for (int i = 0; i < n; ++i)
            if (cfg.assignment.at(fm.features[i])) enabled.push_back(i);
        for (int k : sizes) {
            if (k > static_cast<int>(enabled.size())) continue;
            // enumerate k-subsets of the enabled indices
            std::vector<int> idx(k);
            for (int i = 0; i < k; ++i) idx[i] = i;
            for (;;) {
                std::vector<int> combo(k);
                for (int i = 0; i < k; ++i) combo[i] = enabled[idx[i]];
                combos.insert(std::move(combo));
                int i = k - 1;
                while (i >= 0 && idx[i] == static_cast<int>(enabled.size()) - k + i) --i;
                if (i < 0) break;
                ++idx[i];
                for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
            }
        }
    }
    return static_cast<std::int64_t>(combos.size());
}

}  // namespace cfperf
