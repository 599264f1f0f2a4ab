#include "tamc/parser.hpp"

#include <cctype>
#include <map>
#include <sstream>

namespace tamc {

namespace {

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

enum class Tok {
    Ident,
    Nat,
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Semi,
    Comma,
    Dot,
    Hash,
    Bang,
    Question,
    Equals,
    Plus,
    Minus,
    Arrow,   // ->
    Ge,      // >=
    Le,      // <=
    AndAnd,  // &&
    Lt,
    Gt,
    End,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int line = 1;
    int col = 1;
    int end_col = 1;
};

/// In model/property files '#' starts a line comment. Plan lines carry '#'
/// inside edge addresses, so the plan parser strips comments itself and
/// lexes with hash_is_token = true.
class Lexer {
public:
    Lexer(const std::string& text, std::string filename, int start_line = 1,
          bool hash_is_token = false)
        : text_(text),
          filename_(std::move(filename)),
          line_(start_line),
          hash_is_token_(hash_is_token) {}

    std::vector<Token> run() {
        std::vector<Token> tokens;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '\n') {
                ++line_;
                col_ = 1;
                ++pos_;
                continue;
            }
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
                continue;
            }
            if (c == '#' && !hash_is_token_) {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
                continue;
            }
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                Token t = start(Tok::Ident);
                while (pos_ < text_.size() &&
                       (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                        text_[pos_] == '_')) {
                    t.text += text_[pos_];
                    advance();
                }
                t.end_col = col_;
                tokens.push_back(std::move(t));
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c))) {
                Token t = start(Tok::Nat);
                while (pos_ < text_.size() &&
                       std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                    t.text += text_[pos_];
                    advance();
                }
                t.end_col = col_;
                tokens.push_back(std::move(t));
                continue;
            }
            Token t = start(Tok::End);
            auto two = [&](char second, Tok kind) {
                if (pos_ + 1 < text_.size() && text_[pos_ + 1] == second) {
                    t.kind = kind;
                    t.text = std::string(1, c) + second;
                    advance();
                    advance();
                    t.end_col = col_;
                    tokens.push_back(t);
                    return true;
                }
                return false;
            };
            switch (c) {
                case '{': single(tokens, t, Tok::LBrace, c); break;
                case '}': single(tokens, t, Tok::RBrace, c); break;
                case '(': single(tokens, t, Tok::LParen, c); break;
                case ')': single(tokens, t, Tok::RParen, c); break;
                case '[': single(tokens, t, Tok::LBracket, c); break;
                case ']': single(tokens, t, Tok::RBracket, c); break;
                case ';': single(tokens, t, Tok::Semi, c); break;
                case ',': single(tokens, t, Tok::Comma, c); break;
                case '.': single(tokens, t, Tok::Dot, c); break;
                case '#': single(tokens, t, Tok::Hash, c); break;
                case '!': single(tokens, t, Tok::Bang, c); break;
                case '?': single(tokens, t, Tok::Question, c); break;
                case '=': single(tokens, t, Tok::Equals, c); break;
                case '+': single(tokens, t, Tok::Plus, c); break;
                case '-':
                    if (!two('>', Tok::Arrow)) single(tokens, t, Tok::Minus, c);
                    break;
                case '>':
                    if (!two('=', Tok::Ge)) single(tokens, t, Tok::Gt, c);
                    break;
                case '<':
                    if (!two('=', Tok::Le)) single(tokens, t, Tok::Lt, c);
                    break;
                case '&':
                    if (!two('&', Tok::AndAnd))
                        throw Error(ErrorKind::Parse, "stray '&'", span_here());
                    break;
                default:
                    throw Error(ErrorKind::Parse,
                                std::string("unexpected character '") + c + "'", span_here());
            }
        }
        Token end;
        end.kind = Tok::End;
        end.line = line_;
        end.col = col_;
        end.end_col = col_;
        tokens.push_back(end);
        return tokens;
    }

private:
    Token start(Tok kind) {
        Token t;
        t.kind = kind;
        t.line = line_;
        t.col = col_;
        return t;
    }
    void single(std::vector<Token>& tokens, Token& t, Tok kind, char c) {
        t.kind = kind;
        t.text = std::string(1, c);
        advance();
        t.end_col = col_;
        tokens.push_back(t);
    }
    void advance() {
        ++pos_;
        ++col_;
    }
    SourceSpan span_here() const { return {filename_, line_, col_, line_, col_ + 1}; }

    const std::string& text_;
    std::string filename_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    bool hash_is_token_;
};

// ---------------------------------------------------------------------------
// Token stream helpers
// ---------------------------------------------------------------------------

class Cursor {
public:
    Cursor(std::vector<Token> tokens, std::string filename)
        : tokens_(std::move(tokens)), filename_(std::move(filename)) {}

    const Token& peek(int ahead = 0) const {
        std::size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
        return tokens_[i];
    }
    const Token& next() {
        const Token& t = tokens_[std::min(pos_, tokens_.size() - 1)];
        if (pos_ < tokens_.size() - 1) ++pos_;
        return t;
    }
    bool at(Tok kind) const { return peek().kind == kind; }
    bool at_keyword(const std::string& kw) const {
        return peek().kind == Tok::Ident && peek().text == kw;
    }
    bool eat(Tok kind) {
        if (!at(kind)) return false;
        next();
        return true;
    }
    bool eat_keyword(const std::string& kw) {
        if (!at_keyword(kw)) return false;
        next();
        return true;
    }
    Token expect(Tok kind, const std::string& what) {
        if (!at(kind)) throw Error(ErrorKind::Parse, "expected " + what + describe(), span());
        return next();
    }
    Token expect_keyword(const std::string& kw) {
        if (!at_keyword(kw))
            throw Error(ErrorKind::Parse, "expected '" + kw + "'" + describe(), span());
        return next();
    }
    SourceSpan span() const { return span_of(peek()); }
    SourceSpan span_of(const Token& t) const {
        return {filename_, t.line, t.col, t.line, t.end_col};
    }

    std::string describe() const {
        const Token& t = peek();
        if (t.kind == Tok::End) return " but reached end of input";
        return ", found '" + (t.text.empty() ? "?" : t.text) + "'";
    }

private:
    std::vector<Token> tokens_;
    std::string filename_;
    std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Model parsing
// ---------------------------------------------------------------------------

struct AutomatonParse {
    Automaton automaton;
    std::vector<Diagnostic> diagnostics;
};

int parse_nat(Cursor& c) {
    Token t = c.expect(Tok::Nat, "a natural number");
    return std::stoi(t.text);
}

std::vector<ClockAtom> parse_conjunction(Cursor& c, const Automaton& a,
                                         std::vector<Diagnostic>& diags) {
    std::vector<ClockAtom> atoms;
    while (true) {
        Token clock = c.expect(Tok::Ident, "a clock name");
        CmpOp op;
        if (c.eat(Tok::Ge))
            op = CmpOp::Ge;
        else if (c.eat(Tok::Le))
            op = CmpOp::Le;
        else
            throw Error(ErrorKind::Parse, "expected '>=' or '<='" + c.describe(), c.span());
        int bound = parse_nat(c);
        int idx = a.clock_index(clock.text);
        if (idx < 0)
            diags.push_back({Severity::Error, "undeclared clock '" + clock.text + "'",
                             c.span_of(clock), a.name});
        else
            atoms.push_back({idx, op, bound});
        if (!c.eat(Tok::AndAnd)) break;
    }
    return atoms;
}

AutomatonParse parse_automaton_body(Cursor& c) {
    AutomatonParse result;
    Automaton& a = result.automaton;
    auto& diags = result.diagnostics;

    Token name = c.expect(Tok::Ident, "an automaton name");
    a.name = name.text;
    c.expect(Tok::LBrace, "'{'");

    c.expect_keyword("clock");
    do {
        Token clock = c.expect(Tok::Ident, "a clock name");
        a.clocks.push_back(clock.text);
    } while (c.eat(Tok::Comma));
    c.expect(Tok::Semi, "';'");

    c.expect_keyword("init");
    Token init = c.expect(Tok::Ident, "the initial location name");
    c.expect(Tok::Semi, "';'");

    while (c.at_keyword("loc")) {
        c.next();
        Token lname = c.expect(Tok::Ident, "a location name");
        Location loc;
        loc.name = lname.text;
        if (c.eat(Tok::LBrace)) {
            c.expect_keyword("inv");
            loc.invariant = parse_conjunction(c, a, diags);
            c.expect(Tok::Semi, "';'");
            c.expect(Tok::RBrace, "'}'");
        }
        c.expect(Tok::Semi, "';'");
        a.locations.push_back(std::move(loc));
    }

    while (c.at_keyword("edge")) {
        c.next();
        Token src = c.expect(Tok::Ident, "a source location");
        c.expect(Tok::Arrow, "'->'");
        Token tgt = c.expect(Tok::Ident, "a target location");
        c.expect(Tok::LBrace, "'{'");

        Edge e;
        e.source = a.location_index(src.text);
        e.target = a.location_index(tgt.text);
        if (e.source < 0)
            diags.push_back({Severity::Error, "undeclared location '" + src.text + "'",
                             c.span_of(src), a.name});
        if (e.target < 0)
            diags.push_back({Severity::Error, "undeclared location '" + tgt.text + "'",
                             c.span_of(tgt), a.name});

        if (c.at_keyword("guard")) {
            c.next();
            e.guard = parse_conjunction(c, a, diags);
            c.expect(Tok::Semi, "';'");
        }
        if (c.at_keyword("sync")) {
            c.next();
            Token channel = c.expect(Tok::Ident, "a channel name");
            if (c.eat(Tok::Bang))
                e.action = {ActionKind::Send, channel.text};
            else if (c.eat(Tok::Question))
                e.action = {ActionKind::Receive, channel.text};
            else
                throw Error(ErrorKind::Parse, "expected '!' or '?'" + c.describe(), c.span());
            c.expect(Tok::Semi, "';'");
        }
        if (c.at_keyword("reset")) {
            c.next();
            do {
                Token clock = c.expect(Tok::Ident, "a clock name");
                int idx = a.clock_index(clock.text);
                if (idx < 0)
                    diags.push_back({Severity::Error, "undeclared clock '" + clock.text + "'",
                                     c.span_of(clock), a.name});
                else
                    e.resets.push_back(idx);
            } while (c.eat(Tok::Comma));
            c.expect(Tok::Semi, "';'");
        }
        c.expect(Tok::RBrace, "'}'");
        c.expect(Tok::Semi, "';'");
        if (e.source >= 0 && e.target >= 0) a.edges.push_back(std::move(e));
    }

    c.expect(Tok::RBrace, "'}'");

    a.initial = a.location_index(init.text);
    if (a.initial < 0) {
        diags.push_back({Severity::Error, "initial location '" + init.text + "' is not declared",
                         c.span_of(init), a.name});
        a.initial = 0;
    }
    return result;
}

}  // namespace

ParsedModel parse_model(const std::string& text, const std::string& filename) {
    ParsedModel result;
    std::vector<Token> tokens;
    try {
        tokens = Lexer(text, filename).run();
    } catch (const Error& err) {
        result.diagnostics.push_back({Severity::Error, err.what(), err.span(), std::nullopt});
        return result;
    }
    Cursor c(std::move(tokens), filename);

    auto recover = [&]() {
        int depth = 0;
        while (!c.at(Tok::End)) {
            if (c.at(Tok::LBrace)) ++depth;
            if (c.at(Tok::RBrace) && depth > 0) --depth;
            if (depth == 0 && (c.at_keyword("automaton") || c.at_keyword("chan") ||
                               c.at_keyword("broadcast") || c.at_keyword("system")))
                return;
            c.next();
        }
    };

    while (!c.at(Tok::End)) {
        try {
            if (c.at_keyword("chan") || c.at_keyword("broadcast")) {
                ChannelDecl decl;
                if (c.eat_keyword("broadcast")) {
                    decl.kind = ChannelKind::Broadcast;
                    c.expect_keyword("chan");
                } else {
                    c.expect_keyword("chan");
                }
                if (c.eat_keyword("observable")) decl.observable = true;
                Token name = c.expect(Tok::Ident, "a channel name");
                decl.name = name.text;
                c.expect(Tok::Semi, "';'");
                result.network.channels.push_back(std::move(decl));
            } else if (c.at_keyword("automaton")) {
                c.next();
                AutomatonParse sub = parse_automaton_body(c);
                for (auto& d : sub.diagnostics) result.diagnostics.push_back(std::move(d));
                result.network.automata.push_back(std::move(sub.automaton));
            } else if (c.at_keyword("system")) {
                c.next();
                do {
                    Token name = c.expect(Tok::Ident, "an automaton name");
                    result.network.system.push_back(name.text);
                } while (c.eat(Tok::Comma));
                c.expect(Tok::Semi, "';'");
            } else {
                throw Error(ErrorKind::Parse,
                            "expected a channel, automaton or system declaration" + c.describe(),
                            c.span());
            }
        } catch (const Error& err) {
            result.diagnostics.push_back({Severity::Error, err.what(), err.span(), std::nullopt});
            c.next();
            recover();
        }
    }

    if (!has_errors(result.diagnostics)) {
        auto validated = validate_network(result.network);
        result.network = std::move(validated.normalized);
        for (auto& d : validated.diagnostics) result.diagnostics.push_back(std::move(d));
    }
    return result;
}

// ---------------------------------------------------------------------------
// Unparsing
// ---------------------------------------------------------------------------

namespace {

void unparse_conjunction(std::ostream& os, const Automaton& a,
                         const std::vector<ClockAtom>& atoms) {
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (i) os << " && ";
        os << a.clocks[atoms[i].clock] << (atoms[i].op == CmpOp::Ge ? " >= " : " <= ")
           << atoms[i].bound;
    }
}

}  // namespace

std::string unparse_model(const Network& n) {
    std::ostringstream os;
    for (const auto& ch : n.channels) {
        if (ch.kind == ChannelKind::Broadcast) os << "broadcast ";
        os << "chan ";
        if (ch.observable) os << "observable ";
        os << ch.name << ";\n";
    }
    for (const auto& a : n.automata) {
        os << "\nautomaton " << a.name << " {\n  clock ";
        for (std::size_t i = 0; i < a.clocks.size(); ++i) {
            if (i) os << ", ";
            os << a.clocks[i];
        }
        os << ";\n  init " << a.locations[a.initial].name << ";\n";
        for (const auto& loc : a.locations) {
            os << "  loc " << loc.name;
            if (!loc.invariant.empty()) {
                os << " { inv ";
                unparse_conjunction(os, a, loc.invariant);
                os << "; }";
            }
            os << ";\n";
        }
        for (const auto& e : a.edges) {
            os << "  edge " << a.locations[e.source].name << " -> " << a.locations[e.target].name
               << " {";
            if (!e.guard.empty()) {
                os << " guard ";
                unparse_conjunction(os, a, e.guard);
                os << ";";
            }
            if (e.action.kind != ActionKind::Internal)
                os << " sync " << e.action.channel
                   << (e.action.kind == ActionKind::Send ? "!" : "?") << ";";
            if (!e.resets.empty()) {
                os << " reset ";
                for (std::size_t i = 0; i < e.resets.size(); ++i) {
                    if (i) os << ", ";
                    os << a.clocks[e.resets[i]];
                }
                os << ";";
            }
            os << " };\n";
        }
        os << "}\n";
    }
    if (!n.system.empty()) {
        os << "\nsystem ";
        for (std::size_t i = 0; i < n.system.size(); ++i) {
            if (i) os << ", ";
            os << n.system[i];
        }
        os << ";\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Property parsing
// ---------------------------------------------------------------------------

SafetyProperty parse_property(const std::string& text, const std::string& filename) {
    Cursor c(Lexer(text, filename).run(), filename);

    if (!c.at_keyword("A"))
        throw Error(ErrorKind::Parse,
                    "unsupported TCTL fragment: expected 'A[] not (...)'" + c.describe(),
                    c.span());
    c.next();
    if (!c.eat(Tok::LBracket) || !c.eat(Tok::RBracket))
        throw Error(ErrorKind::Parse, "unsupported TCTL fragment: expected '[]' after 'A'",
                    c.span());
    c.expect_keyword("not");
    c.expect(Tok::LParen, "'('");

    SafetyProperty prop;
    while (true) {
        Token automaton = c.expect(Tok::Ident, "an automaton name");
        c.expect(Tok::Dot, "'.'");
        Token location = c.expect(Tok::Ident, "a location name");
        prop.forbidden.push_back({automaton.text, location.text});
        if (c.at_keyword("and")) {
            c.next();
            continue;
        }
        break;
    }
    c.expect(Tok::RParen, "')'");
    if (!c.at(Tok::End))
        throw Error(ErrorKind::Parse, "unexpected trailing input" + c.describe(), c.span());
    return prop;
}

// ---------------------------------------------------------------------------
// Plan parsing
// ---------------------------------------------------------------------------

namespace {

std::string parse_edge_address(Cursor& c) {
    Token automaton = c.expect(Tok::Ident, "an automaton name");
    c.expect(Tok::Dot, "'.'");
    Token source = c.expect(Tok::Ident, "a source location");
    c.expect(Tok::Arrow, "'->'");
    Token target = c.expect(Tok::Ident, "a target location");
    c.expect(Tok::Hash, "'#'");
    int ordinal = parse_nat(c);
    return automaton.text + "." + source.text + "->" + target.text + "#" +
           std::to_string(ordinal);
}

std::string parse_location_address(Cursor& c) {
    Token automaton = c.expect(Tok::Ident, "an automaton name");
    c.expect(Tok::Dot, "'.'");
    Token location = c.expect(Tok::Ident, "a location name");
    return automaton.text + "." + location.text;
}

// A '#' is a comment start unless immediately followed by a digit (edge
// address ordinals).
std::string strip_plan_comment(const std::string& line) {
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] != '#') continue;
        if (i + 1 < line.size() && std::isdigit(static_cast<unsigned char>(line[i + 1])))
            continue;
        return line.substr(0, i);
    }
    return line;
}

}  // namespace

std::vector<RuleApplication> parse_plan(const std::string& text, const std::string& filename) {
    std::vector<RuleApplication> plan;
    std::vector<std::string> known;

    std::istringstream lines(text);
    std::string line;
    int line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        std::string stripped = strip_plan_comment(line);
        bool blank = true;
        for (char ch : stripped)
            if (!std::isspace(static_cast<unsigned char>(ch))) blank = false;
        if (blank) continue;

        Cursor c(Lexer(stripped, filename, line_no, /*hash_is_token=*/true).run(), filename);
        RuleApplication app;
        Token node = c.expect(Tok::Ident, "a node name");
        app.output = node.text;
        c.expect(Tok::Equals, "'='");

        auto require_known = [&](const Token& t) {
            for (const auto& k : known)
                if (k == t.text) return;
            throw Error(ErrorKind::Parse, "reference to undeclared node '" + t.text + "'",
                        c.span_of(t));
        };

        Token rule = c.expect(Tok::Ident, "a rule name (base, r1, r2 or r3)");
        if (rule.text == "base") {
            // The file name is taken raw up to the closing parenthesis.
            auto lparen = stripped.find('(');
            auto rparen = stripped.rfind(')');
            if (lparen == std::string::npos || rparen == std::string::npos || rparen <= lparen)
                throw Error(ErrorKind::Parse, "expected base(FILE)",
                            SourceSpan{filename, line_no, 1, line_no,
                                       static_cast<int>(stripped.size()) + 1});
            std::string file = stripped.substr(lparen + 1, rparen - lparen - 1);
            auto first = file.find_first_not_of(" \t");
            auto last = file.find_last_not_of(" \t");
            if (first == std::string::npos)
                throw Error(ErrorKind::Parse, "empty file name in base(...)",
                            SourceSpan{filename, line_no, 1, line_no,
                                       static_cast<int>(stripped.size()) + 1});
            app.rule = RuleKind::Base;
            app.file = file.substr(first, last - first + 1);
            std::string tail = stripped.substr(rparen + 1);
            for (char ch : tail)
                if (!std::isspace(static_cast<unsigned char>(ch)))
                    throw Error(ErrorKind::Parse, "unexpected trailing input after base(...)",
                                SourceSpan{filename, line_no, 1, line_no,
                                           static_cast<int>(stripped.size()) + 1});
        } else if (rule.text == "r1") {
            app.rule = RuleKind::R1;
            c.expect(Tok::LParen, "'('");
            Token input = c.expect(Tok::Ident, "an input node");
            require_known(input);
            app.inputs.push_back(input.text);
            c.expect(Tok::RParen, "')'");
            while (!c.at(Tok::End)) {
                if (c.eat_keyword("guard")) {
                    std::string address = parse_edge_address(c);
                    Token clock = c.expect(Tok::Ident, "a clock name");
                    c.expect(Tok::Minus, "'-' (guard deltas lower the bound)");
                    int delta = parse_nat(c);
                    app.deltas.guard_deltas[address][clock.text] += delta;
                } else if (c.eat_keyword("inv")) {
                    std::string address = parse_location_address(c);
                    Token clock = c.expect(Tok::Ident, "a clock name");
                    c.expect(Tok::Plus, "'+' (invariant deltas raise the bound)");
                    int delta = parse_nat(c);
                    app.deltas.inv_deltas[address][clock.text] += delta;
                } else {
                    throw Error(ErrorKind::Parse, "expected 'guard' or 'inv'" + c.describe(),
                                c.span());
                }
            }
        } else if (rule.text == "r2") {
            app.rule = RuleKind::R2;
            c.expect(Tok::LParen, "'('");
            Token left = c.expect(Tok::Ident, "an input node");
            require_known(left);
            c.expect(Tok::Comma, "','");
            Token right = c.expect(Tok::Ident, "an input node");
            require_known(right);
            c.expect(Tok::RParen, "')'");
            app.inputs = {left.text, right.text};
            if (!c.at(Tok::End))
                throw Error(ErrorKind::Parse, "unexpected trailing input" + c.describe(),
                            c.span());
        } else if (rule.text == "r3") {
            app.rule = RuleKind::R3;
            c.expect(Tok::LParen, "'('");
            Token input = c.expect(Tok::Ident, "an input node");
            require_known(input);
            c.expect(Tok::Comma, "','");
            Token channel = c.expect(Tok::Ident, "a channel name");
            c.expect(Tok::RParen, "')'");
            app.inputs = {input.text};
            app.channel = channel.text;
            if (!c.at(Tok::End))
                throw Error(ErrorKind::Parse, "unexpected trailing input" + c.describe(),
                            c.span());
        } else {
            throw Error(ErrorKind::Parse, "unknown rule '" + rule.text + "'", c.span_of(rule));
        }

        for (const auto& k : known)
            if (k == app.output)
                throw Error(ErrorKind::Parse, "node '" + app.output + "' defined twice",
                            c.span_of(node));
        known.push_back(app.output);
        plan.push_back(std::move(app));
    }
    return plan;
}

}  // namespace tamc
