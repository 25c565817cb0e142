#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "cfperf/report.hpp"
#include "cfperf/synth.hpp"

namespace fs = std::filesystem;
using namespace cfperf;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAssertion = 1;
constexpr int kExitInput = 2;

struct CommonInputs {
    std::string feature_model;
    std::string corpus;
    std::string overlay;
    std::string allow_list;
    std::string measurements;
    std::string out;
};

struct LearnFlags {
    double error_goal = 0.02;
    double min_improvement = 0.001;
    int max_order = 3;
    double noise = -1.0;  // <0 = derive from mean_stddev

    LearnOptions options() const { return {error_goal, min_improvement, max_order}; }
};

struct PredictFlags {
    double threshold = 0.0;
    bool threshold_absolute = false;
    bool unique = false;
    std::vector<int> sizes = {2, 3};

    SupportThreshold support() const {
        return threshold_absolute ? SupportThreshold::absolute(threshold)
                                  : SupportThreshold::fraction(threshold);
    }
    std::set<int> size_set() const { return {sizes.begin(), sizes.end()}; }
};

std::set<std::string> load_allow_list(const std::string& path) {
    if (path.empty()) return {};
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open allow-list file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ModelError(std::string("allow-list is not valid JSON: ") + e.what());
    }
    if (!j.is_array()) throw ModelError("allow-list must be a JSON array of macro names");
    std::set<std::string> out;
    for (const auto& name : j) out.insert(name.get<std::string>());
    return out;
}

struct CallGraphResult {
    VariableAst ast;
    CallGraph graph;
    std::vector<CfInteraction> interactions;
};

CallGraphResult run_callgraph(const FeatureModel& fm, const CommonInputs& in) {
    CallGraphResult result;
    auto units = load_corpus_dir(in.corpus);
    auto allow = load_allow_list(in.allow_list);
    result.ast = parse_corpus(units, fm, allow);
    std::vector<OverlayEntry> overlay;
    if (!in.overlay.empty()) overlay = load_overlay(in.overlay);
    result.graph = build_graph(result.ast, fm, overlay);
    result.interactions = derive_cf_interactions(result.graph.edges);
    return result;
}

struct LearnResult {
    MeasurementSet measurements;
    InfluenceModel model;
    std::optional<double> measured_stddev;
    double noise = 0.0;
    std::vector<PerfInteraction> interactions;
};

LearnResult run_learn(const FeatureModel& fm, const std::string& measurements_path,
                      const LearnFlags& flags) {
    LearnResult result;
    result.measurements = load_measurements_csv(measurements_path, fm);
    if (flags.noise >= 0) {
        result.noise = flags.noise;
        try {
            result.measured_stddev = mean_stddev(result.measurements);
        } catch (const ModelError&) {
            result.measured_stddev = std::nullopt;  // single repetitions; override given
        }
    } else {
        result.measured_stddev = mean_stddev(result.measurements);
        result.noise = *result.measured_stddev;
    }
    result.model = learn(result.measurements, flags.options());
    result.interactions = extract_interactions(result.model, result.noise);
    return result;
}

Json itemset_prediction(const std::vector<CfInteraction>& cf,
                        const std::vector<PerfInteraction>& actual, const PredictFlags& flags) {
    auto transactions = to_transactions(cf, flags.unique);
    auto mined = mine_itemsets(transactions, flags.support());
    std::vector<FeatureSet> predicted;
    for (const auto& m : mined) predicted.push_back(m.items);
    auto report = evaluate_prediction(predicted, actual);

    Json j;
    j["threshold"] = flags.threshold;
    j["threshold_mode"] = flags.threshold_absolute ? "absolute" : "relative";
    j["transactions"] = transactions.size();
    j["mined"] = Json::array();
    for (const auto& m : mined) {
        Json row;
        row["items"] = std::vector<std::string>(m.items.begin(), m.items.end());
        row["support_abs"] = m.support_abs;
        row["support_rel"] = m.support_rel;
        j["mined"].push_back(std::move(row));
    }
    j["report"] = prediction_report_json(report);

    // threshold sweep over relative supports
    j["sweep"] = Json::array();
    for (int step = 0; step <= 10; ++step) {
        double t = step * 0.05;
        auto swept = mine_itemsets(transactions, SupportThreshold::fraction(t));
        std::vector<FeatureSet> p;
        for (const auto& m : swept) p.push_back(m.items);
        auto r = evaluate_prediction(p, actual);
        Json row;
        row["threshold"] = t;
        row["precision"] = r.precision;
        row["recall"] = r.recall;
        j["sweep"].push_back(std::move(row));
    }
    return j;
}

void emit(const std::string& out_path, const Json& j) {
    std::string text = j.dump(2) + "\n";
    if (out_path.empty())
        std::cout << text;
    else
        write_text_file(out_path, text);
}

int cmd_callgraph(const CommonInputs& in, const std::string& dot_path) {
    FeatureModel fm = FeatureModel::load(in.feature_model);
    auto result = run_callgraph(fm, in);
    emit(in.out, cf_interactions_report(result.interactions, result.graph.edges,
                                        result.graph.diagnostics));
    if (!dot_path.empty()) write_text_file(dot_path, edges_to_dot(result.graph.edges));
    return kExitOk;
}

int cmd_learn(const CommonInputs& in, const LearnFlags& flags) {
    FeatureModel fm = FeatureModel::load(in.feature_model);
    auto result = run_learn(fm, in.measurements, flags);
    emit(in.out,
         influence_report(result.model, result.measured_stddev, result.noise, result.interactions));
    return kExitOk;
}

int cmd_relate(const CommonInputs& in, const LearnFlags& flags) {
    FeatureModel fm = FeatureModel::load(in.feature_model);
    auto cg = run_callgraph(fm, in);
    auto learned = run_learn(fm, in.measurements, flags);
    auto records = relate(learned.interactions, cg.interactions);
    emit(in.out, relation_report(records, learned.interactions, cg.interactions));
    return kExitOk;
}

int cmd_predict(const CommonInputs& in, const LearnFlags& learn_flags,
                const PredictFlags& predict_flags) {
    FeatureModel fm = FeatureModel::load(in.feature_model);
    auto cg = run_callgraph(fm, in);
    auto learned = run_learn(fm, in.measurements, learn_flags);

    Json j;
    auto direct = evaluate_prediction(predict_direct(cg.interactions), learned.interactions);
    j["direct"] = prediction_report_json(direct);
    j["itemsets"] = itemset_prediction(cg.interactions, learned.interactions, predict_flags);
    j["search_space"] =
        search_space_json(reduce_search_space(cg.interactions, fm, predict_flags.size_set()));
    emit(in.out, j);
    return kExitOk;
}

struct GenPaths {
    fs::path corpus_dir;
    fs::path feature_model;
    fs::path measurements;
    fs::path truth;
};

GenPaths materialize(const SyntheticSpec& spec, const std::string& out_dir, int reps) {
    GenPaths paths;
    fs::path root(out_dir);
    paths.corpus_dir = root / "corpus";
    fs::create_directories(paths.corpus_dir);
    for (const auto& unit : generate_corpus(spec))
        write_text_file((paths.corpus_dir / unit.path).string(), unit.text);
    paths.feature_model = root / "feature_model.json";
    write_text_file(paths.feature_model.string(), spec.fm.to_json_text());
    paths.measurements = root / "measurements.csv";
    write_text_file(paths.measurements.string(),
                    measurements_to_csv(simulate_benchmark(spec, reps)));
    paths.truth = root / "truth.json";
    write_text_file(paths.truth.string(), model_to_json_text(spec.truth));
    return paths;
}

int cmd_gen(const std::string& spec_path, const std::string& out_dir, int reps,
            std::optional<std::uint64_t> seed) {
    SyntheticSpec spec = SyntheticSpec::load(spec_path);
    if (seed) spec.seed = *seed;
    auto paths = materialize(spec, out_dir, reps);
    std::cout << "corpus: " << paths.corpus_dir.string() << "\n"
              << "feature model: " << paths.feature_model.string() << "\n"
              << "measurements: " << paths.measurements.string() << "\n"
              << "truth model: " << paths.truth.string() << "\n";
    return kExitOk;
}

int cmd_pipeline(const std::string& spec_path, const std::string& out_dir, int reps,
                 std::optional<std::uint64_t> seed, const LearnFlags& learn_flags,
                 const PredictFlags& predict_flags) {
    SyntheticSpec spec = SyntheticSpec::load(spec_path);
    if (seed) spec.seed = *seed;
    auto paths = materialize(spec, out_dir, reps);

    FeatureModel fm = spec.fm;
    CommonInputs cg_in;
    cg_in.corpus = paths.corpus_dir.string();
    auto cg = run_callgraph(fm, cg_in);

    LearnFlags lf = learn_flags;
    if (lf.noise < 0 && reps < 2) lf.noise = 0.0;  // single repetition, nothing to average
    auto learned = run_learn(fm, paths.measurements.string(), lf);

    auto records = relate(learned.interactions, cg.interactions);
    auto direct = evaluate_prediction(predict_direct(cg.interactions), learned.interactions);
    auto space = reduce_search_space(cg.interactions, fm, predict_flags.size_set());

    std::set<FeatureSet> truth_sets;
    for (const auto& term : spec.truth.terms)
        if (term.features.size() >= 2) truth_sets.insert(term.features);
    std::set<FeatureSet> learned_sets;
    for (const auto& i : learned.interactions) learned_sets.insert(i.features);
    std::set<FeatureSet> candidate_sets(space.candidates.begin(), space.candidates.end());

    size_t truth_in_candidates = 0;
    for (const auto& t : truth_sets) truth_in_candidates += candidate_sets.count(t);
    double candidate_recall =
        truth_sets.empty() ? 1.0
                           : static_cast<double>(truth_in_candidates) /
                                 static_cast<double>(truth_sets.size());
    size_t truth_predicted_directly = 0;
    std::set<FeatureSet> direct_sets(direct.predicted.begin(), direct.predicted.end());
    for (const auto& t : truth_sets) truth_predicted_directly += direct_sets.count(t);
    double direct_truth_recall =
        truth_sets.empty() ? 1.0
                           : static_cast<double>(truth_predicted_directly) /
                                 static_cast<double>(truth_sets.size());

    bool noise_free = spec.noise_sigma == 0.0;
    bool learned_matches_truth = learned_sets == truth_sets;
    bool ok = candidate_recall == 1.0 && direct_truth_recall == 1.0 &&
              (!noise_free || learned_matches_truth);

    Json j;
    j["spec"] = spec_path;
    j["noise_sigma"] = spec.noise_sigma;
    j["cf_interactions"] =
        cf_interactions_report(cg.interactions, cg.graph.edges, cg.graph.diagnostics);
    j["learning"] =
        influence_report(learned.model, learned.measured_stddev, learned.noise,
                         learned.interactions);
    j["relation"] = relation_report(records, learned.interactions, cg.interactions);
    j["direct"] = prediction_report_json(direct);
    j["itemsets"] = itemset_prediction(cg.interactions, learned.interactions, predict_flags);
    j["search_space"] = search_space_json(space);
    Json assertions;
    assertions["candidate_recall"] = candidate_recall;
    assertions["direct_truth_recall"] = direct_truth_recall;
    assertions["learned_matches_truth"] = learned_matches_truth;
    assertions["checked_exact_recovery"] = noise_free;
    assertions["passed"] = ok;
    j["assertions"] = std::move(assertions);
    write_text_file((fs::path(out_dir) / "pipeline_report.json").string(), j.dump(2) + "\n");

    if (!ok) {
        std::cerr << "pipeline assertion failed (see pipeline_report.json)\n";
        return kExitAssertion;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"feature-interaction analysis for preprocessor-configurable systems"};
    app.require_subcommand(1);

    CommonInputs in;
    LearnFlags learn_flags;
    PredictFlags predict_flags;
    std::string dot_path;
    std::string spec_path;
    std::string out_dir;
    int reps = 1;
    std::optional<std::uint64_t> seed;

    auto add_learn_flags = [&](CLI::App* cmd) {
        cmd->add_option("--noise", learn_flags.noise,
                        "noise filter in seconds (default: mean stddev of the measurements)");
        cmd->add_option("--error-goal", learn_flags.error_goal, "target mean relative error");
        cmd->add_option("--min-improvement", learn_flags.min_improvement,
                        "minimum error improvement to keep adding terms");
        cmd->add_option("--max-order", learn_flags.max_order, "largest term size");
    };
    auto add_predict_flags = [&](CLI::App* cmd) {
        cmd->add_option("--threshold", predict_flags.threshold, "support threshold");
        cmd->add_flag("--threshold-absolute", predict_flags.threshold_absolute,
                      "interpret --threshold as an absolute transaction count");
        cmd->add_flag("--unique", predict_flags.unique,
                      "one transaction per distinct interaction set");
        cmd->add_option("--sizes", predict_flags.sizes, "candidate combination sizes")
            ->delimiter(',');
    };
    auto add_corpus_flags = [&](CLI::App* cmd) {
        cmd->add_option("--feature-model", in.feature_model, "feature model JSON")->required();
        cmd->add_option("--corpus", in.corpus, "directory of .c files")->required();
        cmd->add_option("--overlay", in.overlay, "overlay JSON for indirect calls");
        cmd->add_option("--allow-list", in.allow_list, "JSON array of non-feature macros");
    };

    auto* callgraph_cmd = app.add_subcommand("callgraph", "extract control-flow interactions");
    add_corpus_flags(callgraph_cmd);
    callgraph_cmd->add_option("--out", in.out, "report path (default stdout)");
    callgraph_cmd->add_option("--dot", dot_path, "also write the call graph in DOT format");

    auto* learn_cmd = app.add_subcommand("learn", "learn a performance influence model");
    learn_cmd->add_option("--feature-model", in.feature_model, "feature model JSON")->required();
    learn_cmd->add_option("--measurements", in.measurements, "measurements CSV")->required();
    learn_cmd->add_option("--out", in.out, "report path (default stdout)");
    add_learn_flags(learn_cmd);

    auto* relate_cmd = app.add_subcommand("relate", "relate performance and control-flow interactions");
    add_corpus_flags(relate_cmd);
    relate_cmd->add_option("--measurements", in.measurements, "measurements CSV")->required();
    relate_cmd->add_option("--out", in.out, "report path (default stdout)");
    add_learn_flags(relate_cmd);

    auto* predict_cmd = app.add_subcommand("predict", "predict performance interactions");
    add_corpus_flags(predict_cmd);
    predict_cmd->add_option("--measurements", in.measurements, "measurements CSV")->required();
    predict_cmd->add_option("--out", in.out, "report path (default stdout)");
    add_learn_flags(predict_cmd);
    add_predict_flags(predict_cmd);

    auto* gen_cmd = app.add_subcommand("gen", "materialize a synthetic configurable system");
    gen_cmd->add_option("--spec", spec_path, "synthetic spec JSON")->required();
    gen_cmd->add_option("--out", out_dir, "output directory")->required();
    gen_cmd->add_option("--reps", reps, "benchmark repetitions per configuration");
    gen_cmd->add_option("--seed", seed, "override the spec's seed");

    auto* pipeline_cmd = app.add_subcommand("pipeline", "run gen, callgraph, learn, relate, predict");
    pipeline_cmd->add_option("--spec", spec_path, "synthetic spec JSON")->required();
    pipeline_cmd->add_option("--out", out_dir, "output directory")->required();
    pipeline_cmd->add_option("--reps", reps, "benchmark repetitions per configuration");
    pipeline_cmd->add_option("--seed", seed, "override the spec's seed");
    add_learn_flags(pipeline_cmd);
    add_predict_flags(pipeline_cmd);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(callgraph_cmd)) return cmd_callgraph(in, dot_path);
        if (app.got_subcommand(learn_cmd)) return cmd_learn(in, learn_flags);
        if (app.got_subcommand(relate_cmd)) return cmd_relate(in, learn_flags);
        if (app.got_subcommand(predict_cmd)) return cmd_predict(in, learn_flags, predict_flags);
        if (app.got_subcommand(gen_cmd)) return cmd_gen(spec_path, out_dir, reps, seed);
        if (app.got_subcommand(pipeline_cmd)) {
            LearnFlags pf = learn_flags;
            if (!pipeline_cmd->count("--error-goal")) pf.error_goal = 1e-9;
            if (!pipeline_cmd->count("--min-improvement")) pf.min_improvement = 1e-7;
            return cmd_pipeline(spec_path, out_dir, reps, seed, pf, predict_flags);
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const ModelError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const PcError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitOk;
}
