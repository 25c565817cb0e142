#pragma once

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cfperf/callgraph.hpp"
#include "cfperf/clite.hpp"
#include "cfperf/perf.hpp"
#include "cfperf/synth.hpp"

namespace cfperf::testing {

// ── audio streaming example ─────────────────────────────────────────────

inline FeatureModel audio_fm() {
    FeatureModel fm;
    fm.features = {"Compress", "Encrypt", "AddMetadata", "LogIP", "RankContent"};
    return fm;
}

inline SourceUnit audio_unit() {
    return {"audio.c", R"(#ifdef Encrypt
void encrypt(payload_t *payload) { }
#endif

#ifdef AddMetadata
void add_meatadata(packet_t *packet) {
#ifdef Encrypt
  encrypt(matadata);
#endif
}
#endif

#ifdef LogIP
void log(char *ip) {
#ifdef Encrypt
  encrypt(log_entry);
#endif
}
#endif

#ifdef Compress
void compress(payload_t *payload) { }
#endif

#ifdef RankContent
void rank() { }
#endif
)"};
}

// 100 - 15*Compress - 15*Encrypt - 5*AddMetadata - 5*LogIP - 5*RankContent
//     - 5*AddMetadata*Encrypt + 10*Compress*Encrypt
inline InfluenceModel audio_truth() {
    InfluenceModel m;
    m.intercept = 100.0;
    m.terms = {
        {{"Compress"}, -15.0},
        {{"Encrypt"}, -15.0},
        {{"AddMetadata"}, -5.0},
        {{"LogIP"}, -5.0},
        {{"RankContent"}, -5.0},
        {{"AddMetadata", "Encrypt"}, -5.0},
        {{"Compress", "Encrypt"}, 10.0},
    };
    return m;
}

inline Configuration make_config(const FeatureModel& fm, const std::set<std::string>& enabled) {
    Configuration c;
    for (const auto& f : fm.features) c.assignment[f] = enabled.count(f) > 0;
    return c;
}

// ── random corpus generation for the variability oracle ─────────────────

struct RandomCorpus {
    FeatureModel fm;
    std::vector<SourceUnit> units;
};

// Emits nested conditionals (#if/#ifdef/#ifndef/#elif/#else), alternative
// function definitions, calls to defined and undefined functions.
inline RandomCorpus random_corpus(std::mt19937_64& rng) {
    auto pick = [&](int n) { return static_cast<int>(rng() % n); };

    RandomCorpus out;
    int nfeatures = 2 + pick(7);  // 2..8
    for (int i = 0; i < nfeatures; ++i) out.fm.features.push_back("F" + std::to_string(i));

    auto feature = [&]() { return out.fm.features[pick(nfeatures)]; };
    auto expr = [&]() {
        switch (pick(4)) {
            case 0: return feature();
            case 1: return "!" + feature();
            case 2: return feature() + " && " + feature();
            default: return feature() + " || !" + feature();
        }
    };

    int nfuncs = 2 + pick(5);  // 2..6
    std::vector<std::string> names;
    for (int i = 0; i < nfuncs; ++i) names.push_back("g" + std::to_string(i));
    auto callee = [&]() { return pick(8) == 0 ? std::string("extlib") : names[pick(nfuncs)]; };

    std::ostringstream src;
    for (int i = 0; i < nfuncs; ++i) {
        int guard = pick(4);
        std::string f = feature();
        bool alternative = pick(5) == 0;

        auto emit_body = [&]() {
            src << "void " << names[i] << "(void) {\n";
            int nstmts = pick(4);
            for (int s = 0; s < nstmts; ++s) {
                switch (pick(4)) {
                    case 0:
                        src << "  " << callee() << "();\n";
                        break;
                    case 1:
                        src << "#if " << expr() << "\n  " << callee() << "();\n#endif\n";
                        break;
                    case 2:
                        src << "#ifdef " << feature() << "\n  " << callee() << "();\n#else\n  "
                            << callee() << "();\n#endif\n";
                        break;
                    default:
                        src << "#if " << expr() << "\n  " << callee() << "();\n#elif " << expr()
                            << "\n  " << callee() << "();\n#else\n  " << callee()
                            << "();\n#endif\n";
                        break;
                }
            }
            src << "}\n";
        };

        if (alternative) {
            src << "#ifdef " << f << "\n";
            emit_body();
            src << "#else\n";
            emit_body();
            src << "#endif\n";
        } else if (guard == 0) {
            emit_body();
        } else if (guard == 1) {
            src << "#ifdef " << f << "\n";
            emit_body();
            src << "#endif\n";
        } else if (guard == 2) {
            src << "#ifndef " << f << "\n";
            emit_body();
            src << "#endif\n";
        } else {
            src << "#if " << expr() << "\n";
            emit_body();
            src << "#endif\n";
        }
    }
    out.units.push_back({"random.c", src.str()});
    return out;
}

// Single-configuration baseline: textual branch selection, then a parse of
// the directive-free result.
inline std::vector<std::pair<std::string, std::string>> preprocessed_calls(
    const std::vector<SourceUnit>& units, const FeatureModel& fm, const Configuration& c) {
    std::vector<SourceUnit> flat;
    for (const auto& unit : units) flat.push_back({unit.path, preprocess(unit, c)});
    VariableAst ast = parse_corpus(flat, fm);
    std::vector<std::pair<std::string, std::string>> calls;
    for (const auto& fn : ast.functions)
        for (const auto& call : fn.calls) calls.emplace_back(fn.name, call.callee);
    return calls;
}

// ── random synthetic specs for end-to-end runs ──────────────────────────

inline SyntheticSpec random_spec(std::mt19937_64& rng, bool with_distractors) {
    auto pick = [&](int n) { return static_cast<int>(rng() % n); };

    SyntheticSpec spec;
    int nfeatures = 3 + pick(4);  // 3..6
    for (int i = 0; i < nfeatures; ++i) spec.fm.features.push_back("F" + std::to_string(i));

    spec.truth.intercept = 50.0 + pick(100);
    std::set<FeatureSet> used;
    int nsingles = 1 + pick(nfeatures);
    for (int i = 0; i < nsingles; ++i) {
        FeatureSet term{spec.fm.features[pick(nfeatures)]};
        if (!used.insert(term).second) continue;
        spec.truth.terms.push_back({term, static_cast<double>(2 + pick(20)) * (pick(2) ? 1 : -1)});
    }
    int npairs = 1 + pick(3);
    for (int i = 0; i < npairs; ++i) {
        int a = pick(nfeatures), b = pick(nfeatures);
        if (a == b) continue;
        FeatureSet term{spec.fm.features[a], spec.fm.features[b]};
        if (!used.insert(term).second) continue;
        double coef = static_cast<double>(2 + pick(15)) * (pick(2) ? 1 : -1);
        spec.truth.terms.push_back({term, coef});
        CallPlanEntry entry;
        entry.caller = spec.fm.features[a];
        entry.callee = spec.fm.features[b];
        entry.pc = parse_pc(spec.fm.features[a] + " && " + spec.fm.features[b]);
        entry.occurrences = 1 + pick(4);
        spec.call_plan.push_back(std::move(entry));
    }
    if (with_distractors) {
        int a = pick(nfeatures), b = pick(nfeatures);
        if (a != b) {
            FeatureSet term{spec.fm.features[a], spec.fm.features[b]};
            if (!used.count(term)) {
                CallPlanEntry entry;
                entry.caller = spec.fm.features[a];
                entry.callee = spec.fm.features[b];
                entry.pc = parse_pc(spec.fm.features[a] + " && " + spec.fm.features[b]);
                entry.occurrences = 1 + pick(3);
                spec.call_plan.push_back(std::move(entry));
            }
        }
    }
    spec.noise_sigma = 0.0;
    spec.seed = rng();
    return spec;
}

}  // namespace cfperf::testing
