#include "cfperf/callgraph.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cfperf {

bool CfInteraction::from_overlay() const {
    return std::any_of(sites.begin(), sites.end(),
                       [](const Location& l) { return l.file == "overlay"; });
}

CallGraph build_graph(const VariableAst& ast, const FeatureModel& fm,
                      const std::vector<OverlayEntry>& overlay) {
    const auto valid = enumerate_valid(fm);
    CallGraph graph;

    for (const auto& fn : ast.functions) {
        for (const auto& call : fn.calls) {
            auto defs = ast.definitions_of(call.callee);
            if (defs.empty()) {
                graph.diagnostics.push_back("call to undefined function " + call.callee + " at " +
                                            call.location.file + ":" +
                                            std::to_string(call.location.line));
                continue;
            }
            for (const FunctionDef* callee : defs) {
                PcPtr pc = Pc::conjunction(Pc::conjunction(fn.pc(), call.pc()), callee->pc());
                if (!satisfiable(valid, pc)) continue;
                graph.edges.push_back({fn.name, call.callee, pc, call.location, false});
            }
        }
    }

    for (const auto& entry : overlay) {
        if (!ast.defines(entry.caller))
            throw ModelError("overlay references unknown function: " + entry.caller);
        if (!ast.defines(entry.callee))
            throw ModelError("overlay references unknown function: " + entry.callee);
        for (const FunctionDef* caller : ast.definitions_of(entry.caller)) {
            for (const FunctionDef* callee : ast.definitions_of(entry.callee)) {
                PcPtr pc = Pc::conjunction(Pc::conjunction(caller->pc(), entry.pc), callee->pc());
                if (!satisfiable(valid, pc)) continue;
                for (int i = 0; i < entry.occurrences; ++i)
                    graph.edges.push_back({entry.caller, entry.callee, pc, {"overlay", 0}, true});
            }
        }
    }
    return graph;
}

std::vector<CfInteraction> derive_cf_interactions(const std::vector<CallEdge>& edges) {
    std::map<FeatureSet, CfInteraction> groups;
    for (const auto& edge : edges) {
        FeatureSet features = positive_features(edge.pc);
        if (features.size() < 2) continue;
        CfInteraction& group = groups[features];
        group.features = features;
        ++group.occurrences;
        group.sites.push_back(edge.location);
    }
    std::vector<CfInteraction> out;
    out.reserve(groups.size());
    for (auto& [_, group] : groups) {
        std::sort(group.sites.begin(), group.sites.end());
        out.push_back(std::move(group));
    }
    std::sort(out.begin(), out.end(), [](const CfInteraction& a, const CfInteraction& b) {
        if (a.occurrences != b.occurrences) return a.occurrences > b.occurrences;
        return a.features < b.features;
    });
    return out;
}

std::map<int, long long> interaction_histogram(const std::vector<CfInteraction>& ints,
                                               bool unique) {
    std::map<int, long long> hist;
    for (const auto& i : ints)
        hist[static_cast<int>(i.features.size())] += unique ? 1 : i.occurrences;
    return hist;
}

std::vector<OverlayEntry> load_overlay(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open overlay file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ModelError(std::string("overlay is not valid JSON: ") + e.what());
    }
    if (!j.is_array()) throw ModelError("overlay must be a JSON array");
    std::vector<OverlayEntry> out;
    for (const auto& item : j) {
        OverlayEntry e;
        e.caller = item.at("caller").get<std::string>();
        e.callee = item.at("callee").get<std::string>();
        e.pc = parse_pc(item.at("pc").get<std::string>());
        e.occurrences = item.value("occurrences", 1);
        if (e.occurrences < 1) throw ModelError("overlay occurrences must be >= 1");
        out.push_back(std::move(e));
    }
    return out;
}

std::string edges_to_dot(const std::vector<CallEdge>& edges) {
    std::ostringstream out;
    out << "digraph callgraph {\n";
    for (const auto& e : edges) {
        out << "  \"" << e.caller << "\" -> \"" << e.callee << "\" [label=\"" << to_string(e.pc)
            << "\"";
        if (e.overlay) out << ", style=dashed";
        out << "];\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace cfperf
