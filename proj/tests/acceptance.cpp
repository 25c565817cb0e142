// End-to-end acceptance checks. Each numbered check prints a single PASS or
// FAIL line; the process exits nonzero when any check fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "cfperf/mining.hpp"
#include "cfperf/relate.hpp"
#include "cfperf/report.hpp"
#include "cfperf/synth.hpp"
#include "helpers.hpp"

namespace fs = std::filesystem;
using namespace cfperf;
using namespace cfperf::testing;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail = "") {
    std::cout << (ok ? "PASS" : "FAIL") << ": " << name;
    if (!ok && !detail.empty()) std::cout << " — " << detail;
    std::cout << "\n";
    if (!ok) ++failures;
}

void write_file(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << text;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int run_cli(const std::string& args, const fs::path& stdout_to) {
    std::string cmd = std::string(CFPERF_CLI_PATH) + " " + args + " > " +
                      stdout_to.string() + " 2>&1";
    int rc = std::system(cmd.c_str());
    return rc;
}

fs::path work_dir() {
    auto dir = fs::temp_directory_path() / "cfperf_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// Audio-example inputs on disk for the CLI-driven checks.
struct AudioFixture {
    fs::path root, fm, corpus, overlay, measurements;
};

AudioFixture audio_fixture(const fs::path& root) {
    AudioFixture fx;
    fx.root = root;
    fx.fm = root / "feature_model.json";
    write_file(fx.fm, audio_fm().to_json_text());
    fx.corpus = root / "corpus";
    write_file(fx.corpus / "audio.c", audio_unit().text);
    fx.overlay = root / "overlay.json";
    write_file(fx.overlay,
               R"([{"caller": "compress", "callee": "encrypt", "pc": "Compress && Encrypt"}])"
               "\n");
    SyntheticSpec spec;
    spec.fm = audio_fm();
    spec.truth = audio_truth();
    spec.call_plan = {
        {"AddMetadata", "Encrypt", parse_pc("AddMetadata && Encrypt"), 1},
        {"LogIP", "Encrypt", parse_pc("LogIP && Encrypt"), 1},
        {"Compress", "Encrypt", parse_pc("Compress && Encrypt"), 1},
    };
    fx.measurements = root / "measurements.csv";
    write_file(fx.measurements, measurements_to_csv(simulate_benchmark(spec, 1)));
    return fx;
}

std::string audio_spec_json() {
    return R"({
  "features": ["Compress", "Encrypt", "AddMetadata", "LogIP", "RankContent"],
  "truth": {
    "intercept": 100.0,
    "terms": [
      {"features": ["Compress"], "coefficient": -15.0},
      {"features": ["Encrypt"], "coefficient": -15.0},
      {"features": ["AddMetadata"], "coefficient": -5.0},
      {"features": ["LogIP"], "coefficient": -5.0},
      {"features": ["RankContent"], "coefficient": -5.0},
      {"features": ["AddMetadata", "Encrypt"], "coefficient": -5.0},
      {"features": ["Compress", "Encrypt"], "coefficient": 10.0}
    ]
  },
  "call_plan": [
    {"caller": "AddMetadata", "callee": "Encrypt", "pc": "AddMetadata && Encrypt"},
    {"caller": "LogIP", "callee": "Encrypt", "pc": "LogIP && Encrypt"},
    {"caller": "Compress", "callee": "Encrypt", "pc": "Compress && Encrypt"}
  ],
  "noise_sigma": 0.0,
  "seed": 11
})";
}

// ── 1. audio golden run through the CLI ─────────────────────────────────

void check_audio_golden_run(const AudioFixture& fx) {
    auto out = fx.root / "callgraph.json";
    auto log = fx.root / "callgraph.log";
    auto start = Clock::now();
    int rc = run_cli("callgraph --feature-model " + fx.fm.string() + " --corpus " +
                         fx.corpus.string() + " --overlay " + fx.overlay.string() + " --out " +
                         out.string(),
                     log);
    double seconds = std::chrono::duration<double>(Clock::now() - start).count();

    bool ok = rc == 0 && seconds < 1.0;
    std::string detail;
    if (rc != 0) detail = "exit code " + std::to_string(rc);
    if (seconds >= 1.0) detail = "took " + std::to_string(seconds) + " s";
    if (ok) {
        auto j = nlohmann::json::parse(read_file(out));
        std::set<std::set<std::string>> sets;
        std::set<std::set<std::string>> from_overlay;
        for (const auto& i : j.at("interactions")) {
            std::set<std::string> s(i.at("features").begin(), i.at("features").end());
            sets.insert(s);
            if (i.at("overlay").get<bool>()) from_overlay.insert(s);
        }
        std::set<std::set<std::string>> expected{{"AddMetadata", "Encrypt"},
                                                 {"Compress", "Encrypt"},
                                                 {"Encrypt", "LogIP"}};
        ok = sets == expected &&
             from_overlay == std::set<std::set<std::string>>{{"Compress", "Encrypt"}};
        if (!ok) detail = "reported interaction sets differ";
    }
    report("1 audio golden run: the three known control-flow interactions in < 1 s", ok, detail);
}

// ── 2. model evaluation ─────────────────────────────────────────────────

void check_model_evaluation() {
    auto fm = audio_fm();
    auto truth = audio_truth();
    bool ok = std::abs(predict(truth, make_config(fm, {"Compress"})) - 85.0) <= 1e-9 &&
              std::abs(predict(truth, make_config(fm, {})) - 100.0) <= 1e-9;
    report("2 model evaluation: 85 for {Compress}, 100 for the empty configuration (1e-9)", ok);
}

// ── 3. learner recovery ─────────────────────────────────────────────────

void check_learner_recovery() {
    SyntheticSpec spec;
    spec.fm = audio_fm();
    spec.truth = audio_truth();
    spec.call_plan = {
        {"AddMetadata", "Encrypt", parse_pc("AddMetadata && Encrypt"), 1},
        {"LogIP", "Encrypt", parse_pc("LogIP && Encrypt"), 1},
        {"Compress", "Encrypt", parse_pc("Compress && Encrypt"), 1},
    };

    LearnOptions tight{1e-9, 1e-7, 3};
    auto exact = simulate_benchmark(spec, 1);  // noise 0: one exact row per configuration
    auto model = learn(exact, tight);
    bool noise_free_ok = model.terms.size() == 7;
    auto coefficient_of = [](const InfluenceModel& m, const FeatureSet& features) {
        for (const auto& t : m.terms)
            if (t.features == features) return std::optional<double>(t.coefficient);
        return std::optional<double>();
    };
    for (const auto& term : spec.truth.terms) {
        auto got = coefficient_of(model, term.features);
        noise_free_ok = noise_free_ok && got && std::abs(*got - term.coefficient) <= 1e-6;
    }
    noise_free_ok = noise_free_ok && std::abs(model.intercept - 100.0) <= 1e-6;

    int recovered = 0;
    double worst_trial_seconds = 0.0;
    spec.noise_sigma = 0.5;
    LearnOptions noisy{1e-4, 1e-4, 3};
    for (int trial = 0; trial < 100; ++trial) {
        spec.seed = 1000 + trial;
        auto ms = simulate_benchmark(spec, 30);
        auto start = Clock::now();
        auto m = learn(ms, noisy);
        worst_trial_seconds = std::max(
            worst_trial_seconds, std::chrono::duration<double>(Clock::now() - start).count());
        auto a = coefficient_of(m, {"AddMetadata", "Encrypt"});
        auto b = coefficient_of(m, {"Compress", "Encrypt"});
        if (a && b && std::abs(*a - (-5.0)) <= 1.0 && std::abs(*b - 10.0) <= 1.0) ++recovered;
    }
    bool noisy_ok = recovered >= 95 && worst_trial_seconds < 10.0;

    std::ostringstream detail;
    if (!noise_free_ok) detail << "noise-free recovery incomplete; ";
    detail << "noisy recovery " << recovered << "/100, worst trial " << worst_trial_seconds
           << " s";
    report("3 learner recovery: exact terms noise-free; interaction terms within ±1.0 in ≥ 95 "
           "of 100 noisy trials",
           noise_free_ok && noisy_ok, detail.str());
}

// ── 4. relator properties ───────────────────────────────────────────────

void check_relator_properties() {
    std::mt19937_64 rng(401);
    auto random_set = [&](int max_size) {
        FeatureSet s;
        int size = 1 + static_cast<int>(rng() % max_size);
        while (static_cast<int>(s.size()) < size) s.insert("F" + std::to_string(rng() % 12));
        return s;
    };

    int violations = 0;
    for (int i = 0; i < 1200; ++i) {
        auto a = random_set(6);
        auto b = random_set(6);
        double j = jaccard(a, b);
        if (std::abs(j - jaccard(b, a)) > 1e-12) ++violations;
        if (j < 0.0 || j > 1.0) ++violations;
        if (std::abs(jaccard(a, a) - 1.0) > 1e-12) ++violations;
        if ((j == 1.0) != (a == b)) ++violations;
    }

    for (int trial = 0; trial < 100; ++trial) {
        std::vector<PerfInteraction> perf;
        std::vector<CfInteraction> cf;
        int np = 1 + static_cast<int>(rng() % 6);
        int nc = 1 + static_cast<int>(rng() % 6);
        for (int i = 0; i < np; ++i) perf.push_back({random_set(4), 1.0});
        for (int i = 0; i < nc; ++i) cf.push_back({random_set(4), 1, {{}}});
        std::set<std::pair<size_t, size_t>> got;
        for (const auto& r : relate(perf, cf)) got.insert({r.perf_index, r.cf_index});
        for (size_t p = 0; p < perf.size(); ++p)
            for (size_t c = 0; c < cf.size(); ++c) {
                const auto& ps = perf[p].features;
                const auto& cs = cf[c].features;
                bool related = std::includes(cs.begin(), cs.end(), ps.begin(), ps.end()) ||
                               std::includes(ps.begin(), ps.end(), cs.begin(), cs.end());
                if (got.count({p, c}) != static_cast<size_t>(related)) ++violations;
            }
    }
    report("4 relator properties: jaccard laws and brute-force relate over ≥ 1000 random pairs",
           violations == 0, std::to_string(violations) + " violations");
}

// ── 5. miner properties ─────────────────────────────────────────────────

void check_miner_properties() {
    std::mt19937_64 rng(501);
    int violations = 0;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Transaction> transactions;
        int n = 1 + static_cast<int>(rng() % 50);
        for (int i = 0; i < n; ++i) {
            FeatureSet s;
            int size = 2 + static_cast<int>(rng() % 4);
            while (static_cast<int>(s.size()) < size) s.insert("I" + std::to_string(rng() % 10));
            transactions.push_back({s});
        }

        // brute-force support oracle
        std::map<FeatureSet, long long> supports;
        for (const auto& t : transactions) {
            std::vector<std::string> items(t.items.begin(), t.items.end());
            int k = static_cast<int>(items.size());
            for (std::uint64_t mask = 1; mask < (std::uint64_t(1) << k); ++mask) {
                FeatureSet s;
                for (int b = 0; b < k; ++b)
                    if ((mask >> b) & 1) s.insert(items[b]);
                if (s.size() >= 2) supports[s];  // ensure presence
            }
        }
        for (auto& [s, count] : supports)
            for (const auto& t : transactions)
                if (std::includes(t.items.begin(), t.items.end(), s.begin(), s.end())) ++count;

        long long threshold = 1 + static_cast<long long>(rng() % 4);
        auto mined = mine_itemsets(transactions,
                                   SupportThreshold::absolute(static_cast<double>(threshold)));
        std::map<FeatureSet, long long> got;
        for (const auto& m : mined) got[m.items] = m.support_abs;
        std::map<FeatureSet, long long> expected;
        for (const auto& [s, count] : supports)
            if (count >= threshold) expected[s] = count;
        if (got != expected) ++violations;

        for (const auto& m : mined)
            for (const auto& drop : m.items) {
                FeatureSet sub = m.items;
                sub.erase(drop);
                if (sub.size() >= 2 && supports.at(sub) < m.support_abs) ++violations;
            }

        // threshold monotonicity across a sweep
        std::set<FeatureSet> previous;
        bool first = true;
        for (int step = 0; step < 10; ++step) {
            auto swept = mine_itemsets(transactions, SupportThreshold::fraction(step * 0.1));
            std::set<FeatureSet> now;
            for (const auto& m : swept) now.insert(m.items);
            if (!first &&
                !std::includes(previous.begin(), previous.end(), now.begin(), now.end()))
                ++violations;
            previous = std::move(now);
            first = false;
        }
    }
    report("5 miner properties: brute-force oracle, anti-monotonicity, threshold monotonicity "
           "over ≥ 200 transaction lists",
           violations == 0, std::to_string(violations) + " violations");
}

// ── 6. variability-aware correctness ────────────────────────────────────

void check_variability_correctness() {
    std::mt19937_64 rng(601);
    int corpora = 0;
    long long mismatches = 0;
    while (corpora < 100) {
        auto corpus = random_corpus(rng);
        VariableAst ast;
        try {
            ast = parse_corpus(corpus.units, corpus.fm);
        } catch (const ParseError&) {
            continue;  // generator occasionally emits overlapping redefinitions
        }
        ++corpora;
        for (const auto& c : enumerate_valid(corpus.fm))
            if (configured_calls(ast, c) != preprocessed_calls(corpus.units, corpus.fm, c))
                ++mismatches;
    }
    report("6 variability-aware correctness: 100 random corpora match the preprocessing oracle "
           "in every valid configuration",
           mismatches == 0, std::to_string(mismatches) + " mismatching configurations");
}

// ── 7. search-space reduction closure ───────────────────────────────────

void check_search_space_closure() {
    std::mt19937_64 rng(701);
    int runs = 0;
    int recall_failures = 0;
    int ratio_failures = 0;
    while (runs < 60) {
        bool with_distractors = runs % 2 == 1;
        auto spec = random_spec(rng, with_distractors);
        try {
            spec.validate();
        } catch (const ModelError&) {
            continue;  // degenerate draw (e.g. duplicate random pair)
        }
        ++runs;

        auto ast = parse_corpus(generate_corpus(spec), spec.fm);
        auto cf = derive_cf_interactions(build_graph(ast, spec.fm, {}).edges);
        auto space = reduce_search_space(cf, spec.fm, {2, 3});
        std::set<FeatureSet> candidates(space.candidates.begin(), space.candidates.end());
        for (const auto& term : spec.truth.terms)
            if (term.features.size() >= 2 && !candidates.count(term.features)) ++recall_failures;
        if (!with_distractors && space.ratio && *space.ratio < 1.0) ++ratio_failures;
    }
    report("7 search-space closure: candidate recall 1.0 over ≥ 50 end-to-end runs, ratio ≥ 1 "
           "when distractor-free",
           recall_failures == 0 && ratio_failures == 0,
           std::to_string(recall_failures) + " missed truth sets, " +
               std::to_string(ratio_failures) + " bad ratios");
}

// ── 8. determinism of every subcommand ──────────────────────────────────

void check_determinism(const AudioFixture& fx) {
    auto spec_path = fx.root / "spec.json";
    write_file(spec_path, audio_spec_json());

    bool ok = true;
    std::string detail;
    auto expect_identical = [&](const std::string& name, const fs::path& a, const fs::path& b) {
        if (read_file(a) != read_file(b) || read_file(a).empty()) {
            ok = false;
            detail += name + " differs; ";
        }
    };

    auto run_twice = [&](const std::string& name, const std::string& args) {
        for (int i = 0; i < 2; ++i) {
            auto out = fx.root / (name + "_" + std::to_string(i) + ".json");
            auto log = fx.root / (name + "_" + std::to_string(i) + ".log");
            if (run_cli(args + " --out " + out.string(), log) != 0) {
                ok = false;
                detail += name + " failed; ";
                return;
            }
        }
        expect_identical(name, fx.root / (name + "_0.json"), fx.root / (name + "_1.json"));
    };

    std::string corpus_args = "--feature-model " + fx.fm.string() + " --corpus " +
                              fx.corpus.string() + " --overlay " + fx.overlay.string();
    std::string measure_args = " --measurements " + fx.measurements.string() + " --noise 0.5";
    run_twice("callgraph", "callgraph " + corpus_args);
    run_twice("learn", "learn --feature-model " + fx.fm.string() + measure_args);
    run_twice("relate", "relate " + corpus_args + measure_args);
    run_twice("predict", "predict " + corpus_args + measure_args + " --threshold 0.1");

    // gen and pipeline run twice into the same directory (the output paths are
    // part of the report, so they must match between runs)
    for (const std::string name : {"gen", "pipeline"}) {
        fs::path dir = fx.root / (name + "_out");
        std::vector<std::string> files = {"corpus/synth.c", "feature_model.json",
                                          "measurements.csv", "truth.json"};
        if (name == "pipeline") files.push_back("pipeline_report.json");
        std::map<std::string, std::string> snapshot;
        for (int i = 0; i < 2; ++i) {
            fs::remove_all(dir);
            auto log = fx.root / (name + "_dir_" + std::to_string(i) + ".log");
            if (run_cli(name + " --spec " + spec_path.string() + " --out " + dir.string() +
                            " --reps 2 --seed 77",
                        log) != 0) {
                ok = false;
                detail += name + " failed; ";
            }
            for (const auto& file : files) {
                auto text = read_file(dir / file);
                if (i == 0) {
                    snapshot[file] = text;
                } else if (snapshot[file] != text || text.empty()) {
                    ok = false;
                    detail += name + " " + file + " differs; ";
                }
            }
        }
    }
    report("8 determinism: byte-identical output for every subcommand across two runs", ok,
           detail);
}

}  // namespace

int main() {
    auto root = work_dir();
    auto fx = audio_fixture(root);

    check_audio_golden_run(fx);
    check_model_evaluation();
    check_learner_recovery();
    check_relator_properties();
    check_miner_properties();
    check_variability_correctness();
    check_search_space_closure();
    check_determinism(fx);

    if (failures == 0)
        std::cout << "all acceptance checks passed\n";
    else
        std::cout << failures << " acceptance check(s) failed\n";
    return failures == 0 ? 0 : 1;
}
