#include <doctest.h>

#include <random>

#include "cfperf/feature_model.hpp"
#include "helpers.hpp"

using namespace cfperf;

namespace {

FeatureModel make_fm(std::vector<std::string> features, std::vector<std::string> constraints = {}) {
    FeatureModel fm;
    fm.features = std::move(features);
    for (const auto& c : constraints) fm.constraints.push_back(parse_pc(c));
    fm.validate();
    return fm;
}

}  // namespace

TEST_CASE("enumerate_valid basic counts") {
    CHECK(enumerate_valid(make_fm({"A", "B", "C", "D", "E"})).size() == 32);
    CHECK(enumerate_valid(make_fm({"A", "B"}, {"A || B"})).size() == 3);

    auto only = enumerate_valid(make_fm({"A"}, {"!A"}));
    REQUIRE(only.size() == 1);
    CHECK_FALSE(only[0].assignment.at("A"));
}

TEST_CASE("enumerate_valid is lexicographic in the feature bit-vector") {
    auto fm = make_fm({"A", "B"});
    auto configs = enumerate_valid(fm);
    REQUIRE(configs.size() == 4);
    auto bits = [&](const Configuration& c) {
        return std::pair{c.assignment.at("A"), c.assignment.at("B")};
    };
    CHECK(bits(configs[0]) == std::pair{false, false});
    CHECK(bits(configs[1]) == std::pair{false, true});
    CHECK(bits(configs[2]) == std::pair{true, false});
    CHECK(bits(configs[3]) == std::pair{true, true});
}

TEST_CASE("feature model validation") {
    FeatureModel dup;
    dup.features = {"A", "A"};
    CHECK_THROWS_AS(dup.validate(), ModelError);

    FeatureModel bad_name;
    bad_name.features = {"9lives"};
    CHECK_THROWS_AS(bad_name.validate(), ModelError);

    FeatureModel empty_name;
    empty_name.features = {""};
    CHECK_THROWS_AS(empty_name.validate(), ModelError);

    FeatureModel undeclared;
    undeclared.features = {"A"};
    undeclared.constraints.push_back(parse_pc("A && B"));
    CHECK_THROWS_AS(undeclared.validate(), ModelError);
}

TEST_CASE("enumeration bound is enforced") {
    std::vector<std::string> many;
    for (int i = 0; i < 31; ++i) many.push_back("F" + std::to_string(i));
    FeatureModel fm;
    fm.features = many;
    CHECK_THROWS_AS(enumerate_valid(fm), ModelError);
}

TEST_CASE("enumerate_valid equals brute force and has no duplicates") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        int n = 2 + static_cast<int>(rng() % 5);
        std::vector<std::string> names;
        for (int i = 0; i < n; ++i) names.push_back("F" + std::to_string(i));
        std::vector<std::string> constraints;
        if (rng() % 2) constraints.push_back(names[rng() % n] + " || " + names[rng() % n]);
        if (rng() % 2) constraints.push_back("!(" + names[rng() % n] + " && " + names[rng() % n] + ")");
        auto fm = make_fm(names, constraints);
        auto valid = enumerate_valid(fm);

        // brute-force count, straight loop over all assignments
        size_t expected = 0;
        for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << n); ++mask) {
            std::map<std::string, bool> env;
            for (int i = 0; i < n; ++i) env[names[i]] = (mask >> i) & 1;
            bool ok = true;
            for (const auto& c : fm.constraints) ok = ok && evaluate(c, env);
            if (ok) ++expected;
        }
        CHECK(valid.size() == expected);

        std::set<std::map<std::string, bool>> unique;
        for (const auto& c : valid) {
            CHECK(unique.insert(c.assignment).second);
            for (const auto& constraint : fm.constraints) CHECK(evaluate(constraint, c.assignment));
        }
    }
}

TEST_CASE("count_combinations examples") {
    auto fm = make_fm({"A", "B", "C", "D", "E"});
    CHECK(count_combinations(fm, {2, 3}) == 20);          // C(5,2) + C(5,3)
    CHECK(count_combinations(fm, {2, 3, 4, 5}) == 26);    // 10 + 10 + 5 + 1

    CHECK(count_combinations(make_fm({"A", "B"}, {"!(A && B)"}), {2}) == 0);

    CHECK_THROWS_AS(count_combinations(fm, {}), ModelError);
    CHECK_THROWS_AS(count_combinations(fm, {1, 2}), ModelError);
}

TEST_CASE("count_combinations of all sizes on an unconstrained model is 2^n - n - 1") {
    for (int n = 2; n <= 8; ++n) {
        std::vector<std::string> names;
        std::set<int> sizes;
        for (int i = 0; i < n; ++i) names.push_back("F" + std::to_string(i));
        for (int k = 2; k <= n; ++k) sizes.insert(k);
        auto fm = make_fm(names);
        CHECK(count_combinations(fm, sizes) == (std::int64_t(1) << n) - n - 1);
    }
}

TEST_CASE("count_combinations matches a subset-by-subset oracle on constrained models") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 3 + static_cast<int>(rng() % 3);
        std::vector<std::string> names;
        for (int i = 0; i < n; ++i) names.push_back("F" + std::to_string(i));
        auto fm = make_fm(names, {"!(" + names[0] + " && " + names[1] + ")",
                                  names[rng() % n] + " || " + names[rng() % n]});
        std::set<int> sizes{2, 3};
        auto valid = enumerate_valid(fm);

        // oracle: test each subset directly against the valid configurations
        std::int64_t expected = 0;
        for (std::uint64_t mask = 1; mask < (std::uint64_t(1) << n); ++mask) {
            int size = __builtin_popcountll(mask);
            if (!sizes.count(size)) continue;
            bool realizable = false;
            for (const auto& c : valid) {
                bool all = true;
                for (int i = 0; i < n; ++i)
                    if ((mask >> i) & 1) all = all && c.assignment.at(names[i]);
                if (all) {
                    realizable = true;
                    break;
                }
            }
            if (realizable) ++expected;
        }
        CHECK(count_combinations(fm, sizes) == expected);
    }
}

TEST_CASE("feature model JSON round trip") {
    auto fm = FeatureModel::from_json_text(
        R"json({"features": ["A", "B"], "constraints": ["A || B", "!(A && B)"]})json");
    CHECK(fm.features == std::vector<std::string>{"A", "B"});
    CHECK(enumerate_valid(fm).size() == 2);

    auto again = FeatureModel::from_json_text(fm.to_json_text());
    CHECK(again.features == fm.features);
    CHECK(enumerate_valid(again).size() == 2);

    CHECK_THROWS_AS(FeatureModel::from_json_text("not json"), ModelError);
    CHECK_THROWS_AS(FeatureModel::from_json_text(R"({"constraints": []})"), ModelError);
}
