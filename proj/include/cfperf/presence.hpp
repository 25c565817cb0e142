#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <set>
#include <string>
#include <string_view>

namespace cfperf {

// Propositional formula over feature names. Immutable after construction;
// shared subtrees are fine because nodes are never mutated.
class Pc;
using PcPtr = std::shared_ptr<const Pc>;

class Pc {
public:
    enum class Kind { True, False, Feature, Not, And, Or };

    Kind kind;
    std::string feature;  // Kind::Feature only
    PcPtr lhs;            // Not: operand; And/Or: left
    PcPtr rhs;            // And/Or: right

    static PcPtr constant(bool value);
    static PcPtr make_feature(std::string name);
    static PcPtr negate(PcPtr operand);
    static PcPtr conjunction(PcPtr a, PcPtr b);
    static PcPtr disjunction(PcPtr a, PcPtr b);
};

// Thrown on malformed formulas and on evaluation against an assignment
// that does not cover a referenced feature.
class PcError : public std::runtime_error {
public:
    explicit PcError(const std::string& what) : std::runtime_error(what) {}
};

// Standard propositional evaluation. The assignment must be total over the
// features referenced by the formula.
bool evaluate(const PcPtr& pc, const std::map<std::string, bool>& assignment);

// Features occurring under an even number of negations after pushing NOT
// down to the literals. Negated-only features are dropped.
std::set<std::string> positive_features(const PcPtr& pc);

// Every feature name mentioned anywhere in the formula.
std::set<std::string> referenced_features(const PcPtr& pc);

std::string to_string(const PcPtr& pc);

// Grammar: `!`, `&&`, `||`, parentheses, identifiers, `defined(X)` (same as
// a bare X), `true`/`false`/`1`/`0`. Precedence ! > && > ||.
PcPtr parse_pc(std::string_view text);

}  // namespace cfperf
