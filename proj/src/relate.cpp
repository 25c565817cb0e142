#include "cfperf/relate.hpp"

#include <algorithm>

namespace cfperf {

namespace {

bool subset(const FeatureSet& a, const FeatureSet& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

double jaccard(const FeatureSet& a, const FeatureSet& b) {
    if (a.empty() || b.empty()) throw ModelError("jaccard is undefined for empty feature sets");
    size_t inter = 0;
    for (const auto& f : a) inter += b.count(f);
    size_t uni = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<RelationRecord> relate(const std::vector<PerfInteraction>& perf,
                                   const std::vector<CfInteraction>& cf) {
    std::vector<RelationRecord> out;
    for (size_t p = 0; p < perf.size(); ++p) {
        for (size_t c = 0; c < cf.size(); ++c) {
            const FeatureSet& fp = perf[p].features;
            const FeatureSet& fc = cf[c].features;
            bool p_in_c = subset(fp, fc);
            bool c_in_p = subset(fc, fp);
            if (!p_in_c && !c_in_p) continue;
            RelationDirection dir = (p_in_c && c_in_p) ? RelationDirection::Equal
                                    : p_in_c           ? RelationDirection::PerfSubsetOfCf
                                                       : RelationDirection::CfSubsetOfPerf;
            out.push_back({p, c, dir, jaccard(fp, fc)});
        }
    }
    return out;
}

std::vector<RelationSummaryRow> summarize(const std::vector<RelationRecord>& records,
                                          const std::vector<PerfInteraction>& perf,
                                          const std::vector<CfInteraction>& cf, SummarizeBy by) {
    std::vector<RelationSummaryRow> rows;
    if (by == SummarizeBy::Perf) {
        rows.resize(perf.size());
        for (size_t p = 0; p < perf.size(); ++p) {
            rows[p].features = perf[p].features;
            rows[p].influence = perf[p].influence;
        }
        for (const auto& r : records) {
            RelationSummaryRow& row = rows[r.perf_index];
            ++row.relations;
            row.mean_jaccard += r.jaccard;
            row.overlay = row.overlay || cf[r.cf_index].from_overlay();
        }
    } else {
        std::map<size_t, RelationSummaryRow> by_cf;
        for (const auto& r : records) {
            RelationSummaryRow& row = by_cf[r.cf_index];
            row.features = cf[r.cf_index].features;
            row.occurrences = cf[r.cf_index].occurrences;
            row.overlay = cf[r.cf_index].from_overlay();
            ++row.relations;
            row.mean_jaccard += r.jaccard;
        }
        for (auto& [_, row] : by_cf) rows.push_back(std::move(row));
    }
    for (auto& row : rows) {
        if (row.relations > 0) row.mean_jaccard /= row.relations;
    }
    return rows;
}

}  // namespace cfperf
