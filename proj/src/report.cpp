#include "cfperf/report.hpp"

#include <fstream>

namespace cfperf {

namespace {

Json feature_list(const FeatureSet& features) {
    return Json(std::vector<std::string>(features.begin(), features.end()));
}

}  // namespace

Json cf_interactions_report(const std::vector<CfInteraction>& ints,
                            const std::vector<CallEdge>& edges,
                            const std::vector<std::string>& diagnostics) {
    Json j;
    j["interactions"] = Json::array();
    for (const auto& i : ints) {
        Json row;
        row["features"] = feature_list(i.features);
        row["occurrences"] = i.occurrences;
        row["overlay"] = i.from_overlay();
        row["sites"] = Json::array();
        for (const auto& site : i.sites) {
            row["sites"].push_back(Json{{"file", site.file}, {"line", site.line}});
        }
        j["interactions"].push_back(std::move(row));
    }
    auto hist_json = [](const std::map<int, long long>& hist) {
        Json out = Json::object();
        for (const auto& [size, count] : hist) out[std::to_string(size)] = count;
        return out;
    };
    j["histogram_unique"] = hist_json(interaction_histogram(ints, true));
    j["histogram_weighted"] = hist_json(interaction_histogram(ints, false));
    j["edges"] = Json::array();
    for (const auto& e : edges) {
        Json row;
        row["caller"] = e.caller;
        row["callee"] = e.callee;
        row["pc"] = to_string(e.pc);
        row["file"] = e.location.file;
        row["line"] = e.location.line;
        row["overlay"] = e.overlay;
        j["edges"].push_back(std::move(row));
    }
    j["diagnostics"] = diagnostics;
    return j;
}

Json influence_report(const InfluenceModel& model, std::optional<double> measured_stddev,
                      double noise, const std::vector<PerfInteraction>& interactions) {
    Json j;
    Json m;
    m["intercept"] = model.intercept;
    m["terms"] = Json::array();
    for (const auto& term : model.terms) {
        Json t;
        t["features"] = feature_list(term.features);
        t["coefficient"] = term.coefficient;
        m["terms"].push_back(std::move(t));
    }
    m["fit_error"] = model.fit_error;
    j["model"] = std::move(m);
    if (measured_stddev)
        j["mean_stddev"] = *measured_stddev;
    else
        j["mean_stddev"] = nullptr;
    j["noise"] = noise;
    j["interactions"] = Json::array();
    for (const auto& i : interactions) {
        Json row;
        row["features"] = feature_list(i.features);
        row["influence"] = i.influence;
        j["interactions"].push_back(std::move(row));
    }
    return j;
}

Json relation_report(const std::vector<RelationRecord>& records,
                     const std::vector<PerfInteraction>& perf,
                     const std::vector<CfInteraction>& cf) {
    Json j;
    j["records"] = Json::array();
    for (const auto& r : records) {
        Json row;
        row["perf_features"] = feature_list(perf[r.perf_index].features);
        row["cf_features"] = feature_list(cf[r.cf_index].features);
        row["direction"] = r.direction == RelationDirection::Equal ? "equal"
                           : r.direction == RelationDirection::PerfSubsetOfCf
                               ? "perf-subset-of-cf"
                               : "cf-subset-of-perf";
        row["jaccard"] = r.jaccard;
        row["overlay"] = cf[r.cf_index].from_overlay();
        j["records"].push_back(std::move(row));
    }
    auto rows_json = [](const std::vector<RelationSummaryRow>& rows, bool perf_side) {
        Json out = Json::array();
        for (const auto& row : rows) {
            Json r;
            r["features"] = feature_list(row.features);
            if (perf_side)
                r["influence"] = row.influence;
            else
                r["occurrences"] = row.occurrences;
            r["relations"] = row.relations;
            r["mean_jaccard"] = row.mean_jaccard;
            r["overlay"] = row.overlay;
            out.push_back(std::move(r));
        }
        return out;
    };
    j["by_perf"] = rows_json(summarize(records, perf, cf, SummarizeBy::Perf), true);
    j["by_cf"] = rows_json(summarize(records, perf, cf, SummarizeBy::Cf), false);
    return j;
}

Json prediction_report_json(const PredictionReport& report) {
    Json j;
    j["predicted"] = Json::array();
    for (const auto& p : report.predicted) j["predicted"].push_back(feature_list(p));
    j["actual"] = Json::array();
    for (const auto& a : report.actual) j["actual"].push_back(feature_list(a));
    j["precision"] = report.precision;
    j["recall"] = report.recall;
    return j;
}

Json search_space_json(const SearchSpaceResult& result) {
    Json j;
    j["candidates"] = Json::array();
    for (const auto& c : result.candidates) j["candidates"].push_back(feature_list(c));
    j["candidate_count"] = result.candidates.size();
    j["total"] = result.total;
    if (result.ratio)
        j["ratio"] = *result.ratio;
    else
        j["ratio"] = "inf";
    return j;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ModelError("cannot write output file: " + path);
    out << text;
}

}  // namespace cfperf
