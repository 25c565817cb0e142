#include "cfperf/clite.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace cfperf {

namespace {

PcPtr conjunction_of(const std::vector<PcPtr>& stack) {
    if (stack.empty()) return Pc::constant(true);
    PcPtr out = stack.front();
    for (size_t i = 1; i < stack.size(); ++i) out = Pc::conjunction(out, stack[i]);
    return out;
}

const std::unordered_set<std::string>& keywords() {
    static const std::unordered_set<std::string> kw = {
        "if",     "else",   "while",    "for",     "do",     "switch", "case",
        "default","return", "break",    "continue","goto",   "sizeof", "typedef",
        "struct", "union",  "enum",     "void",    "int",    "char",   "long",
        "short",  "float",  "double",   "unsigned","signed", "const",  "volatile",
        "static", "extern", "inline",   "register","auto",
    };
    return kw;
}

// Replaces comments and string/char literal contents with spaces, keeping
// line structure intact so reported line numbers match the input.
std::string blank_noise(const std::string& text, const std::string& file) {
    std::string out = text;
    enum class State { Code, Line, Block, Str, Chr } state = State::Code;
    int line = 1;
    for (size_t i = 0; i < out.size(); ++i) {
        char c = out[i];
        if (c == '\n') {
            ++line;
            if (state == State::Line) state = State::Code;
            continue;
        }
        switch (state) {
            case State::Code:
                if (c == '/' && i + 1 < out.size() && out[i + 1] == '/') {
                    state = State::Line;
                    out[i] = out[i + 1] = ' ';
                } else if (c == '/' && i + 1 < out.size() && out[i + 1] == '*') {
                    state = State::Block;
                    out[i] = out[i + 1] = ' ';
                    ++i;
                } else if (c == '"') {
                    state = State::Str;
                } else if (c == '\'') {
                    state = State::Chr;
                }
                break;
            case State::Line:
                out[i] = ' ';
                break;
            case State::Block:
                if (c == '*' && i + 1 < out.size() && out[i + 1] == '/') {
                    out[i] = out[i + 1] = ' ';
                    ++i;
                    state = State::Code;
                } else {
                    out[i] = ' ';
                }
                break;
            case State::Str:
                if (c == '\\' && i + 1 < out.size()) {
                    out[i] = out[i + 1] = ' ';
                    ++i;
                } else if (c == '"') {
                    state = State::Code;
                } else {
                    out[i] = ' ';
                }
                break;
            case State::Chr:
                if (c == '\\' && i + 1 < out.size()) {
                    out[i] = out[i + 1] = ' ';
                    ++i;
                } else if (c == '\'') {
                    state = State::Code;
                } else {
                    out[i] = ' ';
                }
                break;
        }
    }
    if (state == State::Block)
        throw ParseError(file, line, "unterminated block comment");
    return out;
}

struct Directive {
    enum class Kind { If, Ifdef, Ifndef, Elif, Else, Endif, Skip, None } kind = Kind::None;
    std::string argument;  // expression text or macro name
};

Directive classify_directive(const std::string& line, const std::string& file, int lineno) {
    size_t i = 0;
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size() || line[i] != '#') return {};
    ++i;
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    size_t start = i;
    while (i < line.size() && std::isalpha(static_cast<unsigned char>(line[i]))) ++i;
    std::string name = line.substr(start, i - start);
    std::string rest = line.substr(i);
    // trim
    size_t a = rest.find_first_not_of(" \t");
    size_t b = rest.find_last_not_of(" \t");
    rest = (a == std::string::npos) ? "" : rest.substr(a, b - a + 1);

    Directive d;
    if (name == "if") d.kind = Directive::Kind::If;
    else if (name == "ifdef") d.kind = Directive::Kind::Ifdef;
    else if (name == "ifndef") d.kind = Directive::Kind::Ifndef;
    else if (name == "elif") d.kind = Directive::Kind::Elif;
    else if (name == "else") d.kind = Directive::Kind::Else;
    else if (name == "endif") d.kind = Directive::Kind::Endif;
    else if (name == "include" || name == "define" || name == "undef" || name == "pragma" ||
             name == "error" || name == "warning")
        d.kind = Directive::Kind::Skip;
    else
        throw ParseError(file, lineno, "unsupported preprocessor directive #" + name);
    d.argument = rest;
    return d;
}

// Allow-listed macros are not variability: they are substituted as
// undefined (include-guard semantics). Everything else must be a declared
// feature.
PcPtr resolve_condition(const PcPtr& pc, const FeatureModel& fm, const std::set<std::string>& allow,
                        const std::string& file, int lineno) {
    switch (pc->kind) {
        case Pc::Kind::True:
        case Pc::Kind::False:
            return pc;
        case Pc::Kind::Feature:
            if (allow.count(pc->feature)) return Pc::constant(false);
            if (!fm.declares(pc->feature))
                throw ParseError(file, lineno,
                                 "conditional references undeclared feature: " + pc->feature);
            return pc;
        case Pc::Kind::Not:
            return Pc::negate(resolve_condition(pc->lhs, fm, allow, file, lineno));
        case Pc::Kind::And:
            return Pc::conjunction(resolve_condition(pc->lhs, fm, allow, file, lineno),
                                   resolve_condition(pc->rhs, fm, allow, file, lineno));
        case Pc::Kind::Or:
            return Pc::disjunction(resolve_condition(pc->lhs, fm, allow, file, lineno),
                                   resolve_condition(pc->rhs, fm, allow, file, lineno));
    }
    throw ParseError(file, lineno, "corrupt condition");
}

PcPtr parse_condition(const Directive& d, const FeatureModel& fm, const std::set<std::string>& allow,
                      const std::string& file, int lineno) {
    PcPtr raw;
    try {
        switch (d.kind) {
            case Directive::Kind::If:
            case Directive::Kind::Elif:
                raw = parse_pc(d.argument);
                break;
            case Directive::Kind::Ifdef:
                raw = Pc::make_feature(d.argument);
                break;
            case Directive::Kind::Ifndef:
                raw = Pc::negate(Pc::make_feature(d.argument));
                break;
            default:
                throw ParseError(file, lineno, "directive has no condition");
        }
    } catch (const PcError& e) {
        throw ParseError(file, lineno, std::string("bad conditional expression: ") + e.what());
    }
    if ((d.kind == Directive::Kind::Ifdef || d.kind == Directive::Kind::Ifndef)) {
        const std::string& name = d.argument;
        bool ok = !name.empty() &&
                  (std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_') &&
                  std::all_of(name.begin(), name.end(), [](char c) {
                      return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
                  });
        if (!ok) throw ParseError(file, lineno, "bad macro name in #ifdef/#ifndef: \"" + name + "\"");
    }
    return resolve_condition(raw, fm, allow, file, lineno);
}

struct Frame {
    std::vector<PcPtr> prior;  // branch conditions already taken in this group
    PcPtr current;             // TRUE for #else
    bool saw_else = false;
    int open_line = 0;

    PcPtr effective() const {
        PcPtr out;
        for (const auto& p : prior) {
            PcPtr neg = Pc::negate(p);
            out = out ? Pc::conjunction(out, neg) : neg;
        }
        if (out)
            return current->kind == Pc::Kind::True ? out : Pc::conjunction(out, current);
        return current;
    }
};

struct Token {
    enum class Kind { Ident, Number, Punct } kind;
    std::string text;
    int line;
    std::vector<PcPtr> pc_stack;
};

std::vector<Token> tokenize_unit(const SourceUnit& unit, const FeatureModel& fm,
                                 const std::set<std::string>& allow) {
    const std::string clean = blank_noise(unit.text, unit.path);
    std::vector<Token> tokens;
    std::vector<Frame> frames;

    std::istringstream lines(clean);
    std::string line;
    int lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        Directive d = classify_directive(line, unit.path, lineno);
        if (d.kind != Directive::Kind::None) {
            switch (d.kind) {
                case Directive::Kind::Skip:
                    break;
                case Directive::Kind::If:
                case Directive::Kind::Ifdef:
                case Directive::Kind::Ifndef: {
                    Frame f;
                    f.current = parse_condition(d, fm, allow, unit.path, lineno);
                    f.open_line = lineno;
                    frames.push_back(std::move(f));
                    break;
                }
                case Directive::Kind::Elif: {
                    if (frames.empty())
                        throw ParseError(unit.path, lineno, "#elif without matching #if");
                    Frame& f = frames.back();
                    if (f.saw_else) throw ParseError(unit.path, lineno, "#elif after #else");
                    f.prior.push_back(f.current);
                    f.current = parse_condition(d, fm, allow, unit.path, lineno);
                    break;
                }
                case Directive::Kind::Else: {
                    if (frames.empty())
                        throw ParseError(unit.path, lineno, "#else without matching #if");
                    Frame& f = frames.back();
                    if (f.saw_else) throw ParseError(unit.path, lineno, "duplicate #else");
                    f.prior.push_back(f.current);
                    f.current = Pc::constant(true);
                    f.saw_else = true;
                    break;
                }
                case Directive::Kind::Endif:
                    if (frames.empty())
                        throw ParseError(unit.path, lineno, "#endif without matching #if");
                    frames.pop_back();
                    break;
                case Directive::Kind::None:
                    break;
            }
            continue;
        }

        std::vector<PcPtr> stack;
        stack.reserve(frames.size());
        for (const auto& f : frames) stack.push_back(f.effective());

        size_t i = 0;
        while (i < line.size()) {
            char c = line[i];
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++i;
                continue;
            }
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                size_t start = i;
                while (i < line.size() && (std::isalnum(static_cast<unsigned char>(line[i])) ||
                                           line[i] == '_'))
                    ++i;
                tokens.push_back({Token::Kind::Ident, line.substr(start, i - start), lineno, stack});
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                size_t start = i;
                while (i < line.size() && (std::isalnum(static_cast<unsigned char>(line[i])) ||
                                           line[i] == '.'))
                    ++i;
                tokens.push_back({Token::Kind::Number, line.substr(start, i - start), lineno, stack});
            } else {
                tokens.push_back({Token::Kind::Punct, std::string(1, c), lineno, stack});
                ++i;
            }
        }
    }
    if (!frames.empty())
        throw ParseError(unit.path, frames.back().open_line, "unbalanced #if: missing #endif");
    return tokens;
}

bool stacks_prefix(const std::vector<PcPtr>& outer, const std::vector<PcPtr>& inner) {
    if (inner.size() < outer.size()) return false;
    for (size_t i = 0; i < outer.size(); ++i) {
        if (outer[i] != inner[i] && to_string(outer[i]) != to_string(inner[i])) return false;
    }
    return true;
}

void parse_unit(const SourceUnit& unit, const FeatureModel& fm, const std::set<std::string>& allow,
                std::vector<FunctionDef>& out) {
    const std::vector<Token> tokens = tokenize_unit(unit, fm, allow);
    const size_t n = tokens.size();
    size_t i = 0;

    auto err = [&](size_t at, const std::string& msg) -> ParseError {
        int line = at < n ? tokens[at].line : (n ? tokens[n - 1].line : 1);
        return ParseError(unit.path, line, msg);
    };

    auto skip_balanced = [&](size_t& pos, const char* open, const char* close) {
        int depth = 0;
        size_t open_at = pos;
        do {
            if (pos >= n) throw err(open_at, std::string("unterminated '") + open + "'");
            if (tokens[pos].kind == Token::Kind::Punct) {
                if (tokens[pos].text == open) ++depth;
                else if (tokens[pos].text == close) --depth;
            }
            ++pos;
        } while (depth > 0);
    };

    while (i < n) {
        // gather a declaration head up to the first '(' , ';' or '{'
        size_t j = i;
        size_t paren = n, semi = n, brace = n;
        while (j < n) {
            if (tokens[j].kind == Token::Kind::Punct) {
                const std::string& t = tokens[j].text;
                if (t == "(") { paren = j; break; }
                if (t == ";") { semi = j; break; }
                if (t == "{") { brace = j; break; }
                if (t == "}") throw err(j, "unexpected '}' at top level");
            }
            ++j;
        }
        if (j >= n) {
            if (i < n) throw err(i, "unterminated declaration at end of file");
            break;
        }

        if (semi < n) {  // plain declaration / opaque statement
            i = semi + 1;
            continue;
        }
        if (brace < n && brace < paren) {  // struct/union/enum body or initializer
            size_t pos = brace;
            skip_balanced(pos, "{", "}");
            if (pos < n && tokens[pos].kind == Token::Kind::Punct && tokens[pos].text == ";") ++pos;
            i = pos;
            continue;
        }

        // head ends at '('
        if (paren == i) throw err(paren, "expected declaration at top level");
        const Token& name_tok = tokens[paren - 1];
        if (name_tok.kind != Token::Kind::Ident)
            throw err(paren, "expected identifier before '('");
        bool has_type = false;
        for (size_t k = i; k < paren - 1; ++k) {
            if (tokens[k].kind == Token::Kind::Ident) has_type = true;
        }
        if (keywords().count(name_tok.text) || !has_type) {
            if (!has_type)
                throw err(paren, "function call outside of any function: " + name_tok.text);
            // e.g. `int (*fp)(void);` — opaque declaration, skip to ';'
            size_t pos = paren;
            while (pos < n && !(tokens[pos].kind == Token::Kind::Punct && tokens[pos].text == ";"))
                ++pos;
            if (pos >= n) throw err(paren, "unterminated declaration");
            i = pos + 1;
            continue;
        }

        size_t pos = paren;
        skip_balanced(pos, "(", ")");
        if (pos >= n) throw err(paren, "unexpected end of file after parameter list");
        if (tokens[pos].kind == Token::Kind::Punct && tokens[pos].text == ";") {  // prototype
            i = pos + 1;
            continue;
        }
        if (!(tokens[pos].kind == Token::Kind::Punct && tokens[pos].text == "{"))
            throw err(pos, "expected ';' or '{' after parameter list of " + name_tok.text);

        FunctionDef def;
        def.name = name_tok.text;
        def.pc_stack = name_tok.pc_stack;
        def.location = {unit.path, name_tok.line};

        size_t body_start = pos;
        int depth = 0;
        do {
            if (pos >= n) throw err(body_start, "unterminated function body of " + def.name);
            const Token& t = tokens[pos];
            if (t.kind == Token::Kind::Punct) {
                if (t.text == "{") ++depth;
                else if (t.text == "}") --depth;
            } else if (t.kind == Token::Kind::Ident && !keywords().count(t.text) &&
                       pos + 1 < n && tokens[pos + 1].kind == Token::Kind::Punct &&
                       tokens[pos + 1].text == "(") {
                if (!stacks_prefix(def.pc_stack, t.pc_stack))
                    throw err(pos, "conditional block crosses the boundary of function " + def.name);
                def.calls.push_back({t.text, t.pc_stack, {unit.path, t.line}});
            }
            ++pos;
        } while (depth > 0);

        out.push_back(std::move(def));
        i = pos;
    }
}

bool mutually_exclusive(const PcPtr& a, const PcPtr& b) {
    std::set<std::string> feats = referenced_features(a);
    for (const auto& f : referenced_features(b)) feats.insert(f);
    std::vector<std::string> names(feats.begin(), feats.end());
    const size_t k = names.size();
    for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << k); ++mask) {
        std::map<std::string, bool> assignment;
        for (size_t i = 0; i < k; ++i) assignment[names[i]] = (mask >> i) & 1;
        if (evaluate(a, assignment) && evaluate(b, assignment)) return false;
    }
    return true;
}

}  // namespace

PcPtr CallSite::pc() const { return conjunction_of(pc_stack); }

PcPtr FunctionDef::pc() const { return conjunction_of(pc_stack); }

std::vector<const FunctionDef*> VariableAst::definitions_of(const std::string& name) const {
    std::vector<const FunctionDef*> out;
    for (const auto& f : functions)
        if (f.name == name) out.push_back(&f);
    return out;
}

bool VariableAst::defines(const std::string& name) const {
    return !definitions_of(name).empty();
}

VariableAst parse_corpus(const std::vector<SourceUnit>& units, const FeatureModel& fm,
                         const std::set<std::string>& allow) {
    VariableAst ast;
    for (const auto& unit : units) parse_unit(unit, fm, allow, ast.functions);

    // alternative definitions of one name must be mutually exclusive
    for (size_t a = 0; a < ast.functions.size(); ++a) {
        for (size_t b = a + 1; b < ast.functions.size(); ++b) {
            if (ast.functions[a].name != ast.functions[b].name) continue;
            if (!mutually_exclusive(ast.functions[a].pc(), ast.functions[b].pc()))
                throw ParseError(ast.functions[b].location.file, ast.functions[b].location.line,
                                 "redefinition of " + ast.functions[b].name +
                                     " with overlapping presence condition (first defined at " +
                                     ast.functions[a].location.file + ":" +
                                     std::to_string(ast.functions[a].location.line) + ")");
        }
    }
    return ast;
}

std::vector<std::pair<std::string, std::string>> configured_calls(const VariableAst& ast,
                                                                  const Configuration& c) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& fn : ast.functions) {
        if (!evaluate(fn.pc(), c.assignment)) continue;
        for (const auto& call : fn.calls) {
            if (evaluate(call.pc(), c.assignment)) out.emplace_back(fn.name, call.callee);
        }
    }
    return out;
}

std::string preprocess(const SourceUnit& unit, const Configuration& c,
                       const std::set<std::string>& allow) {
    // n.b. directive conditions are evaluated directly against the
    // configuration; no presence-condition stacks are involved.
    struct Branch {
        bool parent_active;
        bool taken_before;  // some earlier branch of this group was selected
        bool active;
        bool saw_else = false;
    };
    std::vector<Branch> stack;
    std::string out;

    // allow-listed macros evaluate as undefined, matching parse_corpus
    auto eval_expr = [&](const PcPtr& pc, int lineno) {
        std::map<std::string, bool> env = c.assignment;
        for (const auto& m : allow) env[m] = false;
        try {
            return evaluate(pc, env);
        } catch (const PcError& e) {
            throw ParseError(unit.path, lineno, e.what());
        }
    };

    const std::string clean = blank_noise(unit.text, unit.path);
    std::istringstream lines(clean);
    std::string line;
    int lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        Directive d = classify_directive(line, unit.path, lineno);
        bool active = stack.empty() || stack.back().active;
        switch (d.kind) {
            case Directive::Kind::None:
                if (active) {
                    out += line;
                    out += '\n';
                }
                break;
            case Directive::Kind::Skip:
                break;
            case Directive::Kind::If:
            case Directive::Kind::Ifdef:
            case Directive::Kind::Ifndef: {
                PcPtr cond;
                try {
                    switch (d.kind) {
                        case Directive::Kind::If: cond = parse_pc(d.argument); break;
                        case Directive::Kind::Ifdef: cond = Pc::make_feature(d.argument); break;
                        default: cond = Pc::negate(Pc::make_feature(d.argument)); break;
                    }
                } catch (const PcError& e) {
                    throw ParseError(unit.path, lineno, e.what());
                }
                bool taken = active && eval_expr(cond, lineno);
                stack.push_back({active, taken, taken});
                break;
            }
            case Directive::Kind::Elif: {
                if (stack.empty()) throw ParseError(unit.path, lineno, "#elif without #if");
                Branch& b = stack.back();
                if (b.saw_else) throw ParseError(unit.path, lineno, "#elif after #else");
                PcPtr cond;
                try {
                    cond = parse_pc(d.argument);
                } catch (const PcError& e) {
                    throw ParseError(unit.path, lineno, e.what());
                }
                b.active = b.parent_active && !b.taken_before && eval_expr(cond, lineno);
                b.taken_before = b.taken_before || b.active;
                break;
            }
            case Directive::Kind::Else: {
                if (stack.empty()) throw ParseError(unit.path, lineno, "#else without #if");
                Branch& b = stack.back();
                if (b.saw_else) throw ParseError(unit.path, lineno, "duplicate #else");
                b.active = b.parent_active && !b.taken_before;
                b.taken_before = true;
                b.saw_else = true;
                break;
            }
            case Directive::Kind::Endif:
                if (stack.empty()) throw ParseError(unit.path, lineno, "#endif without #if");
                stack.pop_back();
                break;
        }
    }
    if (!stack.empty()) throw ParseError(unit.path, lineno, "unbalanced #if: missing #endif");
    return out;
}

std::vector<SourceUnit> load_corpus_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw ModelError("corpus directory does not exist: " + dir);
    std::vector<fs::path> paths;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".c")
            paths.push_back(entry.path());
    }
    std::sort(paths.begin(), paths.end());
    std::vector<SourceUnit> units;
    for (const auto& p : paths) {
        std::ifstream in(p);
        std::stringstream buf;
        buf << in.rdbuf();
        units.push_back({p.string(), buf.str()});
    }
    return units;
}

}  // namespace cfperf
