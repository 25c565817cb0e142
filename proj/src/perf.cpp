#include "cfperf/perf.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cfperf {

namespace {

constexpr double kPivotTolerance = 1e-9;

// Solves A x = b by Gaussian elimination with partial pivoting.
// Returns nullopt when a pivot falls below the tolerance (rank deficiency).
std::optional<std::vector<double>> solve_linear(std::vector<std::vector<double>> a,
                                                std::vector<double> b) {
    const size_t n = b.size();
    for (size_t col = 0; col < n; ++col) {
        size_t pivot = col;
        for (size_t r = col + 1; r < n; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
        if (std::fabs(a[pivot][col]) < kPivotTolerance) return std::nullopt;
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (size_t r = col + 1; r < n; ++r) {
            double factor = a[r][col] / a[col][col];
            for (size_t c = col; c < n; ++c) a[r][c] -= factor * a[col][c];
            b[r] -= factor * b[col];
        }
    }
    std::vector<double> x(n);
    for (size_t i = n; i-- > 0;) {
        double acc = b[i];
        for (size_t j = i + 1; j < n; ++j) acc -= a[i][j] * x[j];
        x[i] = acc / a[i][i];
    }
    return x;
}

struct TrainingData {
    std::vector<std::vector<bool>> configs;  // per config, fm feature order
    std::vector<double> responses;           // mean performance per config
};

TrainingData collapse(const MeasurementSet& ms) {
    std::map<std::vector<bool>, std::pair<double, int>> acc;
    for (const auto& [config, perf] : ms.rows) {
        std::vector<bool> key;
        key.reserve(ms.fm.features.size());
        for (const auto& f : ms.fm.features) key.push_back(config.enabled(f));
        auto& [sum, count] = acc[key];
        sum += perf;
        ++count;
    }
    TrainingData data;
    for (const auto& [key, entry] : acc) {
        data.configs.push_back(key);
        data.responses.push_back(entry.first / entry.second);
    }
    return data;
}

// design matrix column for a term: product of its feature indicators
double term_value(const FeatureSet& term, const std::vector<bool>& config,
                  const std::map<std::string, int>& index) {
    for (const auto& f : term)
        if (!config[index.at(f)]) return 0.0;
    return 1.0;
}

struct Fit {
    double intercept;
    std::vector<double> coefficients;
    double error;  // mean relative error
};

// least squares over [1 | terms] via normal equations
std::optional<Fit> fit_terms(const TrainingData& data, const std::vector<FeatureSet>& terms,
                             const std::map<std::string, int>& index) {
    const size_t rows = data.configs.size();
    const size_t cols = terms.size() + 1;
    if (rows < cols) return std::nullopt;

    std::vector<std::vector<double>> x(rows, std::vector<double>(cols));
    for (size_t r = 0; r < rows; ++r) {
        x[r][0] = 1.0;
        for (size_t t = 0; t < terms.size(); ++t)
            x[r][t + 1] = term_value(terms[t], data.configs[r], index);
    }

    std::vector<std::vector<double>> gram(cols, std::vector<double>(cols, 0.0));
    std::vector<double> rhs(cols, 0.0);
    for (size_t r = 0; r < rows; ++r) {
        for (size_t i = 0; i < cols; ++i) {
            rhs[i] += x[r][i] * data.responses[r];
            for (size_t j = 0; j < cols; ++j) gram[i][j] += x[r][i] * x[r][j];
        }
    }

    auto solution = solve_linear(std::move(gram), std::move(rhs));
    if (!solution) return std::nullopt;

    double err = 0.0;
    for (size_t r = 0; r < rows; ++r) {
        double pred = 0.0;
        for (size_t i = 0; i < cols; ++i) pred += x[r][i] * (*solution)[i];
        err += std::fabs(pred - data.responses[r]) / std::fabs(data.responses[r]);
    }
    err /= static_cast<double>(rows);

    Fit fit;
    fit.intercept = (*solution)[0];
    fit.coefficients.assign(solution->begin() + 1, solution->end());
    fit.error = err;
    return fit;
}

// candidate order doubles as the tie-break: smaller term first, then
// lexicographic feature order
bool candidate_before(const FeatureSet& a, const FeatureSet& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

}  // namespace

double predict(const InfluenceModel& m, const Configuration& c) {
    double value = m.intercept;
    for (const auto& term : m.terms) {
        bool all = std::all_of(term.features.begin(), term.features.end(),
                               [&](const std::string& f) { return c.enabled(f); });
        if (all) value += term.coefficient;
    }
    return value;
}

InfluenceModel learn(const MeasurementSet& ms, const LearnOptions& opts) {
    if (ms.rows.empty()) throw ModelError("cannot learn from an empty measurement set");
    const TrainingData data = collapse(ms);
    std::map<std::string, int> index;
    for (size_t i = 0; i < ms.fm.features.size(); ++i)
        index[ms.fm.features[i]] = static_cast<int>(i);

    std::vector<FeatureSet> selected;
    auto base = fit_terms(data, selected, index);
    // intercept-only fit cannot be rank deficient with >= 1 row
    double error = base->error;
    Fit best_fit = *base;

    for (;;) {
        if (error <= opts.error_goal) break;
        if (data.configs.size() < selected.size() + 2) break;  // rank guard

        // candidate pool: singles plus one-feature extensions of selected terms
        std::set<FeatureSet> pool;
        for (const auto& f : ms.fm.features) {
            FeatureSet single{f};
            pool.insert(std::move(single));
        }
        for (const auto& term : selected) {
            if (static_cast<int>(term.size()) >= opts.max_order) continue;
            for (const auto& f : ms.fm.features) {
                if (term.count(f)) continue;
                FeatureSet grown = term;
                grown.insert(f);
                pool.insert(std::move(grown));
            }
        }
        for (const auto& term : selected) pool.erase(term);

        std::vector<FeatureSet> candidates(pool.begin(), pool.end());
        std::sort(candidates.begin(), candidates.end(), candidate_before);

        std::optional<Fit> round_best;
        std::optional<FeatureSet> round_term;
        for (const auto& candidate : candidates) {
            std::vector<FeatureSet> trial = selected;
            trial.push_back(candidate);
            auto fit = fit_terms(data, trial, index);
            if (!fit) continue;  // rank-deficient candidate
            if (!round_best || fit->error < round_best->error) {
                round_best = fit;
                round_term = candidate;
            }
        }
        if (!round_best) break;  // pool exhausted or nothing fittable
        double improvement = error - round_best->error;
        if (improvement < opts.min_improvement) break;

        selected.push_back(*round_term);
        best_fit = *round_best;
        error = best_fit.error;
    }

    InfluenceModel model;
    model.intercept = best_fit.intercept;
    for (size_t i = 0; i < selected.size(); ++i)
        model.terms.push_back({selected[i], best_fit.coefficients[i]});
    model.fit_error = error;
    return model;
}

std::vector<PerfInteraction> extract_interactions(const InfluenceModel& m, double noise) {
    if (noise < 0) throw ModelError("noise threshold must be >= 0");
    std::vector<PerfInteraction> out;
    for (const auto& term : m.terms) {
        if (term.features.size() < 2) continue;
        if (std::fabs(term.coefficient) < noise) continue;
        out.push_back({term.features, term.coefficient});
    }
    std::sort(out.begin(), out.end(), [](const PerfInteraction& a, const PerfInteraction& b) {
        double ma = std::fabs(a.influence), mb = std::fabs(b.influence);
        if (ma != mb) return ma > mb;
        return a.features < b.features;
    });
    return out;
}

double mean_stddev(const MeasurementSet& ms) {
    std::map<std::vector<bool>, std::vector<double>> groups;
    for (const auto& [config, perf] : ms.rows) {
        std::vector<bool> key;
        for (const auto& f : ms.fm.features) key.push_back(config.enabled(f));
        groups[key].push_back(perf);
    }
    if (groups.empty()) throw ModelError("empty measurement set");
    double sum = 0.0;
    for (const auto& [_, values] : groups) {
        if (values.size() < 2)
            throw ModelError("mean_stddev requires at least 2 repetitions per configuration");
        double mean = 0.0;
        for (double v : values) mean += v;
        mean /= static_cast<double>(values.size());
        double ss = 0.0;
        for (double v : values) ss += (v - mean) * (v - mean);
        sum += std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return sum / static_cast<double>(groups.size());
}

MeasurementSet parse_measurements_csv(const std::string& text, const FeatureModel& fm,
                                      const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ModelError(origin + ": empty measurements file");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::vector<std::string> header;
    {
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) header.push_back(cell);
    }
    if (header.size() != fm.features.size() + 1 || header.back() != "performance_s")
        throw ModelError(origin + ": header must be <features...>,performance_s");
    for (size_t i = 0; i < fm.features.size(); ++i) {
        if (header[i] != fm.features[i])
            throw ModelError(origin + ": feature column " + std::to_string(i + 1) + " is \"" +
                             header[i] + "\" but the feature model declares \"" + fm.features[i] +
                             "\"");
    }

    MeasurementSet ms;
    ms.fm = fm;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream cells(line);
        std::string cell;
        std::vector<std::string> row;
        while (std::getline(cells, cell, ',')) row.push_back(cell);
        if (row.size() != header.size())
            throw ModelError(origin + ":" + std::to_string(lineno) + ": wrong column count");
        Configuration c;
        for (size_t i = 0; i < fm.features.size(); ++i) {
            if (row[i] != "0" && row[i] != "1")
                throw ModelError(origin + ":" + std::to_string(lineno) +
                                 ": feature columns must be 0 or 1");
            c.assignment[fm.features[i]] = row[i] == "1";
        }
        double perf;
        try {
            perf = std::stod(row.back());
        } catch (const std::exception&) {
            throw ModelError(origin + ":" + std::to_string(lineno) + ": bad performance value");
        }
        if (!(perf > 0))
            throw ModelError(origin + ":" + std::to_string(lineno) +
                             ": performance must be positive");
        for (const auto& constraint : fm.constraints) {
            if (!evaluate(constraint, c.assignment))
                throw ModelError(origin + ":" + std::to_string(lineno) +
                                 ": configuration violates feature-model constraint " +
                                 to_string(constraint));
        }
        ms.rows.emplace_back(std::move(c), perf);
    }
    return ms;
}

MeasurementSet load_measurements_csv(const std::string& path, const FeatureModel& fm) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open measurements file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_measurements_csv(buf.str(), fm, path);
}

std::string measurements_to_csv(const MeasurementSet& ms) {
    std::ostringstream out;
    for (const auto& f : ms.fm.features) out << f << ',';
    out << "performance_s\n";
    out.precision(17);
    for (const auto& [config, perf] : ms.rows) {
        for (const auto& f : ms.fm.features) out << (config.enabled(f) ? '1' : '0') << ',';
        out << perf << '\n';
    }
    return out.str();
}

std::string model_to_json_text(const InfluenceModel& m) {
    nlohmann::ordered_json j;
    j["intercept"] = m.intercept;
    j["terms"] = nlohmann::ordered_json::array();
    for (const auto& term : m.terms) {
        nlohmann::ordered_json t;
        t["features"] = std::vector<std::string>(term.features.begin(), term.features.end());
        t["coefficient"] = term.coefficient;
        j["terms"].push_back(std::move(t));
    }
    j["fit_error"] = m.fit_error;
    return j.dump(2) + "\n";
}

InfluenceModel model_from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ModelError(std::string("model is not valid JSON: ") + e.what());
    }
    InfluenceModel m;
    try {
        m.intercept = j.at("intercept").get<double>();
        for (const auto& t : j.at("terms")) {
            ModelTerm term;
            for (const auto& f : t.at("features")) term.features.insert(f.get<std::string>());
            if (term.features.empty()) throw ModelError("model term with empty feature set");
            term.coefficient = t.at("coefficient").get<double>();
            m.terms.push_back(std::move(term));
        }
        m.fit_error = j.value("fit_error", 0.0);
    } catch (const nlohmann::json::exception& e) {
        throw ModelError(std::string("malformed influence model: ") + e.what());
    }
    return m;
}

}  // namespace cfperf
