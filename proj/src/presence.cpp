#include "cfperf/presence.hpp"

#include <cctype>

namespace cfperf {

PcPtr Pc::constant(bool value) {
    auto node = std::make_shared<Pc>();
    node->kind = value ? Kind::True : Kind::False;
    return node;
}

PcPtr Pc::make_feature(std::string name) {
    auto node = std::make_shared<Pc>();
    node->kind = Kind::Feature;
    node->feature = std::move(name);
    return node;
}

PcPtr Pc::negate(PcPtr operand) {
    auto node = std::make_shared<Pc>();
    node->kind = Kind::Not;
    node->lhs = std::move(operand);
    return node;
}

PcPtr Pc::conjunction(PcPtr a, PcPtr b) {
    auto node = std::make_shared<Pc>();
    node->kind = Kind::And;
    node->lhs = std::move(a);
    node->rhs = std::move(b);
    return node;
}

PcPtr Pc::disjunction(PcPtr a, PcPtr b) {
    auto node = std::make_shared<Pc>();
    node->kind = Kind::Or;
    node->lhs = std::move(a);
    node->rhs = std::move(b);
    return node;
}

bool evaluate(const PcPtr& pc, const std::map<std::string, bool>& assignment) {
    switch (pc->kind) {
        case Pc::Kind::True:
            return true;
        case Pc::Kind::False:
            return false;
        case Pc::Kind::Feature: {
            auto it = assignment.find(pc->feature);
            if (it == assignment.end())
                throw PcError("unknown feature in presence condition: " + pc->feature);
            return it->second;
        }
        case Pc::Kind::Not:
            return !evaluate(pc->lhs, assignment);
        case Pc::Kind::And:
            return evaluate(pc->lhs, assignment) && evaluate(pc->rhs, assignment);
        case Pc::Kind::Or:
            return evaluate(pc->lhs, assignment) || evaluate(pc->rhs, assignment);
    }
    throw PcError("corrupt presence condition node");
}

namespace {

void collect_polarity(const PcPtr& pc, bool negated, std::set<std::string>& positives) {
    switch (pc->kind) {
        case Pc::Kind::True:
        case Pc::Kind::False:
            return;
        case Pc::Kind::Feature:
            if (!negated) positives.insert(pc->feature);
            return;
        case Pc::Kind::Not:
            collect_polarity(pc->lhs, !negated, positives);
            return;
        case Pc::Kind::And:
        case Pc::Kind::Or:
            collect_polarity(pc->lhs, negated, positives);
            collect_polarity(pc->rhs, negated, positives);
            return;
    }
}

void collect_all(const PcPtr& pc, std::set<std::string>& out) {
    switch (pc->kind) {
        case Pc::Kind::True:
        case Pc::Kind::False:
            return;
        case Pc::Kind::Feature:
            out.insert(pc->feature);
            return;
        case Pc::Kind::Not:
            collect_all(pc->lhs, out);
            return;
        case Pc::Kind::And:
        case Pc::Kind::Or:
            collect_all(pc->lhs, out);
            collect_all(pc->rhs, out);
            return;
    }
}

void render(const PcPtr& pc, std::string& out, int parent_prec) {
    // precedence: Or=1, And=2, Not=3, atoms=4
    switch (pc->kind) {
        case Pc::Kind::True:
            out += "true";
            return;
        case Pc::Kind::False:
            out += "false";
            return;
        case Pc::Kind::Feature:
            out += pc->feature;
            return;
        case Pc::Kind::Not:
            out += '!';
            render(pc->lhs, out, 3);
            return;
        case Pc::Kind::And: {
            bool paren = parent_prec > 2;
            if (paren) out += '(';
            render(pc->lhs, out, 2);
            out += " && ";
            render(pc->rhs, out, 2);
            if (paren) out += ')';
            return;
        }
        case Pc::Kind::Or: {
            bool paren = parent_prec > 1;
            if (paren) out += '(';
            render(pc->lhs, out, 1);
            out += " || ";
            render(pc->rhs, out, 1);
            if (paren) out += ')';
            return;
        }
    }
}

struct PcParser {
    std::string_view text;
    size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& msg) {
        throw PcError(msg + " at offset " + std::to_string(pos) + " in \"" + std::string(text) + "\"");
    }

    std::string identifier() {
        skip_ws();
        size_t start = pos;
        if (pos < text.size() &&
            (std::isalpha(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
            ++pos;
            while (pos < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
                ++pos;
        }
        if (start == pos) fail("expected identifier");
        return std::string(text.substr(start, pos - start));
    }

    PcPtr atom() {
        skip_ws();
        if (pos >= text.size()) fail("unexpected end of formula");
        char c = text[pos];
        if (c == '(') {
            ++pos;
            PcPtr inner = or_expr();
            if (!eat(')')) fail("expected ')'");
            return inner;
        }
        if (c == '!') {
            ++pos;
            return Pc::negate(atom());
        }
        if (c == '0' || c == '1') {
            ++pos;
            return Pc::constant(c == '1');
        }
        std::string id = identifier();
        if (id == "true") return Pc::constant(true);
        if (id == "false") return Pc::constant(false);
        if (id == "defined") {
            if (!eat('(')) fail("expected '(' after defined");
            std::string name = identifier();
            if (!eat(')')) fail("expected ')' after defined(...");
            return Pc::make_feature(std::move(name));
        }
        return Pc::make_feature(std::move(id));
    }

    PcPtr and_expr() {
        PcPtr left = atom();
        for (;;) {
            skip_ws();
            if (pos + 1 < text.size() && text[pos] == '&' && text[pos + 1] == '&') {
                pos += 2;
                left = Pc::conjunction(std::move(left), atom());
            } else {
                return left;
            }
        }
    }

    PcPtr or_expr() {
        PcPtr left = and_expr();
        for (;;) {
            skip_ws();
            if (pos + 1 < text.size() && text[pos] == '|' && text[pos + 1] == '|') {
                pos += 2;
                left = Pc::disjunction(std::move(left), and_expr());
            } else {
                return left;
            }
        }
    }
};

}  // namespace

std::set<std::string> positive_features(const PcPtr& pc) {
    std::set<std::string> out;
    collect_polarity(pc, false, out);
    return out;
}

std::set<std::string> referenced_features(const PcPtr& pc) {
    std::set<std::string> out;
    collect_all(pc, out);
    return out;
}

std::string to_string(const PcPtr& pc) {
    std::string out;
    render(pc, out, 0);
    return out;
}

PcPtr parse_pc(std::string_view text) {
    PcParser parser{text};
    PcPtr result = parser.or_expr();
    parser.skip_ws();
    if (parser.pos != text.size()) parser.fail("trailing input");
    return result;
}

}  // namespace cfperf
