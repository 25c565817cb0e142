#pragma once

#include <string>
#include <vector>

#include "cfperf/feature_model.hpp"
#include "cfperf/presence.hpp"

namespace cfperf {

struct SourceUnit {
    std::string path;
    std::string text;
};

struct Location {
    std::string file;
    int line = 0;

    bool operator==(const Location&) const = default;
    auto operator<=>(const Location&) const = default;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& file, int line, const std::string& what)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + what),
          file(file),
          line(line) {}

    std::string file;
    int line;
};

struct CallSite {
    std::string callee;
    // Conjuncts of the presence condition, one per enclosing conditional
    // branch from outermost to innermost (includes the conditionals
    // enclosing the containing function).
    std::vector<PcPtr> pc_stack;
    Location location;

    PcPtr pc() const;  // conjunction of pc_stack, TRUE if empty
};

struct FunctionDef {
    std::string name;
    std::vector<PcPtr> pc_stack;  // conditionals enclosing the definition
    std::vector<CallSite> calls;
    Location location;

    PcPtr pc() const;
};

struct VariableAst {
    std::vector<FunctionDef> functions;

    std::vector<const FunctionDef*> definitions_of(const std::string& name) const;
    bool defines(const std::string& name) const;
};

// Parses a corpus of C-lite translation units into one variable AST.
// Conditional directives: #if/#ifdef/#ifndef/#elif/#else/#endif with the
// constraint expression grammar plus defined(X). Identifiers used in
// conditionals must be declared features or listed in `allow` (treated as
// always-true macros). #include/#define/#undef/#pragma lines are skipped.
VariableAst parse_corpus(const std::vector<SourceUnit>& units, const FeatureModel& fm,
                         const std::set<std::string>& allow = {});

// Call pairs (caller, callee) whose presence conditions hold under c,
// in AST order.
std::vector<std::pair<std::string, std::string>> configured_calls(const VariableAst& ast,
                                                                  const Configuration& c);

// Selects conditional branches for a single configuration and returns the
// directive-free source text. Used as the single-configuration baseline
// against the variability-aware path.
std::string preprocess(const SourceUnit& unit, const Configuration& c,
                       const std::set<std::string>& allow = {});

// Reads every *.c file under dir (sorted by path).
std::vector<SourceUnit> load_corpus_dir(const std::string& dir);

}  // namespace cfperf
