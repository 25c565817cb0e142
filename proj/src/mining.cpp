#include "cfperf/mining.hpp"

#include <algorithm>
#include <cmath>

namespace cfperf {

namespace {

long long support_of(const std::vector<Transaction>& transactions,
                     const std::vector<std::string>& items) {
    long long count = 0;
    for (const auto& t : transactions) {
        bool contained = std::all_of(items.begin(), items.end(), [&](const std::string& item) {
            return t.items.count(item) > 0;
        });
        if (contained) ++count;
    }
    return count;
}

void subsets_of_size(const std::vector<std::string>& items, int k,
                     std::vector<std::vector<std::string>>& out) {
    const int n = static_cast<int>(items.size());
    if (k > n) return;
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    for (;;) {
        std::vector<std::string> subset(k);
        for (int i = 0; i < k; ++i) subset[i] = items[idx[i]];
        out.push_back(std::move(subset));
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

}  // namespace

std::vector<Transaction> to_transactions(const std::vector<CfInteraction>& cf, bool unique_sets) {
    std::vector<Transaction> out;
    for (const auto& i : cf) {
        int copies = unique_sets ? 1 : i.occurrences;
        for (int k = 0; k < copies; ++k) out.push_back({i.features});
    }
    return out;
}

std::vector<MinedItemSet> mine_itemsets(const std::vector<Transaction>& transactions,
                                        SupportThreshold threshold, int min_size) {
    if (threshold.value < 0) throw ModelError("support threshold must be >= 0");
    if (min_size < 2) throw ModelError("min_size must be >= 2");
    for (const auto& t : transactions)
        if (t.items.size() < 2) throw ModelError("transactions must contain at least 2 items");

    const double total = static_cast<double>(transactions.size());
    // occurring item sets only: the effective absolute threshold is >= 1
    const double min_support =
        std::max(1.0, threshold.relative ? threshold.value * total : threshold.value);
    auto frequent = [&](long long support) {
        return static_cast<double>(support) + 1e-9 >= min_support;
    };

    // level 1
    std::set<std::string> item_base;
    for (const auto& t : transactions) item_base.insert(t.items.begin(), t.items.end());
    std::vector<std::vector<std::string>> level;
    std::map<std::vector<std::string>, long long> supports;
    for (const auto& item : item_base) {
        std::vector<std::string> single{item};
        long long s = support_of(transactions, single);
        if (frequent(s)) {
            supports[single] = s;
            level.push_back(std::move(single));
        }
    }

    std::vector<MinedItemSet> out;
    int k = 1;
    while (!level.empty()) {
        ++k;
        // join step: combine sets sharing the first k-2 items
        std::set<std::vector<std::string>> prev(level.begin(), level.end());
        std::vector<std::vector<std::string>> next;
        for (size_t a = 0; a < level.size(); ++a) {
            for (size_t b = a + 1; b < level.size(); ++b) {
                if (!std::equal(level[a].begin(), level[a].end() - 1, level[b].begin()))
                    continue;
                std::vector<std::string> candidate = level[a];
                candidate.push_back(level[b].back());
                if (candidate[k - 2] > candidate[k - 1])
                    std::swap(candidate[k - 2], candidate[k - 1]);
                // prune by anti-monotonicity: every (k-1)-subset must be frequent
                bool keep = true;
                for (int drop = 0; drop < k && keep; ++drop) {
                    std::vector<std::string> sub;
                    sub.reserve(k - 1);
                    for (int i = 0; i < k; ++i)
                        if (i != drop) sub.push_back(candidate[i]);
                    keep = prev.count(sub) > 0;
                }
                if (!keep) continue;
                long long s = support_of(transactions, candidate);
                if (!frequent(s)) continue;
                supports[candidate] = s;
                next.push_back(std::move(candidate));
            }
        }
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        if (k >= min_size) {
            for (const auto& items : next) {
                MinedItemSet mined;
                mined.items.insert(items.begin(), items.end());
                mined.support_abs = supports[items];
                mined.support_rel = total > 0 ? supports[items] / total : 0.0;
                out.push_back(std::move(mined));
            }
        }
        level = std::move(next);
    }
    return out;
}

std::vector<FeatureSet> predict_direct(const std::vector<CfInteraction>& cf) {
    std::vector<FeatureSet> out;
    std::set<FeatureSet> seen;
    for (const auto& i : cf)
        if (seen.insert(i.features).second) out.push_back(i.features);
    return out;
}

PredictionReport evaluate_prediction(const std::vector<FeatureSet>& predicted,
                                     const std::vector<PerfInteraction>& actual) {
    PredictionReport report;
    std::set<FeatureSet> pred_set(predicted.begin(), predicted.end());
    std::set<FeatureSet> actual_set;
    for (const auto& a : actual) actual_set.insert(a.features);

    report.predicted.assign(pred_set.begin(), pred_set.end());
    report.actual.assign(actual_set.begin(), actual_set.end());

    size_t hits = 0;
    for (const auto& p : pred_set) hits += actual_set.count(p);

    if (pred_set.empty())
        report.precision = actual_set.empty() ? 1.0 : 0.0;
    else
        report.precision = static_cast<double>(hits) / static_cast<double>(pred_set.size());
    if (actual_set.empty())
        report.recall = 1.0;
    else
        report.recall = static_cast<double>(hits) / static_cast<double>(actual_set.size());
    return report;
}

SearchSpaceResult reduce_search_space(const std::vector<CfInteraction>& cf, const FeatureModel& fm,
                                      const std::set<int>& sizes) {
    for (int s : sizes)
        if (s < 2) throw ModelError("search-space sizes must be >= 2");

    SearchSpaceResult result;
    result.total = count_combinations(fm, sizes);

    const auto valid = enumerate_valid(fm);
    std::set<FeatureSet> candidates;
    for (const auto& interaction : cf) {
        std::vector<std::string> items(interaction.features.begin(), interaction.features.end());
        for (int k : sizes) {
            std::vector<std::vector<std::string>> subsets;
            subsets_of_size(items, k, subsets);
            for (auto& subset : subsets) {
                FeatureSet fs(subset.begin(), subset.end());
                if (candidates.count(fs)) continue;
                // realizable: some valid configuration enables all of them
                bool realizable = std::any_of(valid.begin(), valid.end(), [&](const Configuration& c) {
                    return std::all_of(fs.begin(), fs.end(),
                                       [&](const std::string& f) { return c.enabled(f); });
                });
                if (realizable) candidates.insert(std::move(fs));
            }
        }
    }
    result.candidates.assign(candidates.begin(), candidates.end());
    if (!result.candidates.empty())
        result.ratio = static_cast<double>(result.total) /
                       static_cast<double>(result.candidates.size());
    return result;
}

}  // namespace cfperf
