#include "tpdareach/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_set>

namespace tpdareach::dsl {

ParseError::ParseError(std::size_t line, std::size_t column, std::string token, const std::string &message)
    : ModelError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message +
                 (token.empty() ? std::string() : " (at '" + token + "')")),
      line_(line), column_(column), token_(std::move(token)) {}

namespace {

struct Token {
    enum class Kind { Ident, Number, Punct, End } kind = Kind::End;
    std::string text;
    std::size_t line = 0;
    std::size_t column = 0;
};

std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    std::size_t line = 1, col = 1, i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < src.size()) {
        const char c = src[i];
        if (c == '#') {
            while (i < src.size() && src[i] != '\n')
                advance(1);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        Token t;
        t.line = line;
        t.column = col;
        std::size_t n = 1;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            t.kind = Token::Kind::Ident;
            while (i + n < src.size() && (std::isalnum(static_cast<unsigned char>(src[i + n])) || src[i + n] == '_'))
                ++n;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            t.kind = Token::Kind::Number;
            while (i + n < src.size() && std::isdigit(static_cast<unsigned char>(src[i + n])))
                ++n;
        } else if (c == '-' && i + 1 < src.size() && src[i + 1] == '>') {
            t.kind = Token::Kind::Punct;
            n = 2;
        } else if (std::string_view(";:()[],").find(c) != std::string_view::npos) {
            t.kind = Token::Kind::Punct;
        } else {
            throw ParseError(line, col, std::string(1, c), "unexpected character");
        }
        t.text = std::string(src.substr(i, n));
        advance(n);
        out.push_back(std::move(t));
    }
    Token end;
    end.line = line;
    end.column = col;
    out.push_back(end);
    return out;
}

struct NameUse {
    std::string name;
    std::size_t line, column;
    enum class Kind { State, Clock, Symbol } kind;
};

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    Model parse() {
        const Token &head = next();
        if (head.kind != Token::Kind::Ident || (head.text != "tpda" && head.text != "pda"))
            throw error(head, "expected header 'tpda' or 'pda'");
        timed_ = head.text == "tpda";
        accept(";");

        tpda::Tpda t;
        PdaModel p;
        bool have_states = false, have_init = false, have_clocks = false, have_alphabet = false;
        while (peek().kind != Token::Kind::End) {
            const Token &kw = next();
            if (kw.kind != Token::Kind::Ident)
                throw error(kw, "expected a declaration or rule");
            if (kw.text == "states") {
                once(kw, have_states);
                t.states = p.states = names(kw);
            } else if (kw.text == "init") {
                once(kw, have_init);
                const Token &n = ident("state name");
                uses_.push_back({n.text, n.line, n.column, NameUse::Kind::State});
                t.init = p.init = n.text;
                expect(";");
            } else if (kw.text == "clocks") {
                if (!timed_)
                    throw error(kw, "pda models have no clocks");
                once(kw, have_clocks);
                t.clocks = names(kw);
            } else if (kw.text == "alphabet") {
                once(kw, have_alphabet);
                t.alphabet = p.alphabet = names(kw);
            } else if (kw.text == "rule") {
                rule(t, p);
            } else {
                throw error(kw, "unknown keyword");
            }
        }
        if (!have_states)
            throw error(peek(), "missing 'states' declaration");
        if (!have_init)
            throw error(peek(), "missing 'init' declaration");

        check_declared(t.states, t.clocks, t.alphabet);
        if (timed_)
            return t;
        return p;
    }

private:
    const Token &peek() const { return toks_[pos_]; }
    const Token &next() {
        const Token &t = toks_[pos_];
        if (t.kind != Token::Kind::End)
            ++pos_;
        return t;
    }

    ParseError error(const Token &t, const std::string &msg) const { return ParseError(t.line, t.column, t.text, msg); }

    bool accept(const char *p) {
        if (peek().kind == Token::Kind::Punct && peek().text == p) {
            next();
            return true;
        }
        return false;
    }

    void expect(const char *p) {
        if (!accept(p))
            throw error(peek(), std::string("expected '") + p + "'");
    }

    const Token &ident(const char *what) {
        const Token &t = next();
        if (t.kind != Token::Kind::Ident)
            throw error(t, std::string("expected ") + what);
        return t;
    }

    void once(const Token &kw, bool &seen) {
        if (seen)
            throw error(kw, "duplicate '" + kw.text + "' declaration");
        seen = true;
    }

    std::vector<std::string> names(const Token &kw) {
        std::vector<std::string> out;
        std::unordered_set<std::string> seen;
        while (!accept(";")) {
            const Token &n = ident("a name or ';'");
            if (!seen.insert(n.text).second)
                throw error(n, "'" + n.text + "' declared twice in '" + kw.text + "'");
            out.push_back(n.text);
        }
        return out;
    }

    std::uint32_t number() {
        const Token &t = next();
        if (t.kind != Token::Kind::Number)
            throw error(t, "expected a natural number");
        if (t.text.size() > 9)
            throw error(t, "constant too large");
        return static_cast<std::uint32_t>(std::stoul(t.text));
    }

    Interval interval() {
        Interval iv;
        const Token &open = next();
        if (open.text != "[" && open.text != "(")
            throw error(open, "expected '[' or '(' to open an interval");
        iv.lo_closed = open.text == "[";
        iv.lo = number();
        expect(":");
        if (peek().kind == Token::Kind::Ident && peek().text == "inf") {
            next();
            iv.hi.reset();
        } else {
            iv.hi = number();
        }
        const Token &close = next();
        if (close.text != "]" && close.text != ")")
            throw error(close, "expected ']' or ')' to close an interval");
        iv.hi_closed = close.text == "]";
        if (!iv.hi && iv.hi_closed)
            throw error(close, "infinite upper bound must be open");
        if (!iv.well_formed())
            throw error(open, "empty interval " + iv.to_string());
        return iv;
    }

    void rule(tpda::Tpda &t, PdaModel &p) {
        const Token &src = ident("source state");
        expect("->");
        const Token &dst = ident("target state");
        expect(":");
        uses_.push_back({src.text, src.line, src.column, NameUse::Kind::State});
        uses_.push_back({dst.text, dst.line, dst.column, NameUse::Kind::State});

        const Token &op = ident("an operation");
        tpda::TpdaOp top;
        PdaModelRule prule{src.text, pda::StackOp::Kind::Nop, {}, dst.text};
        if (op.text == "nop") {
            top = tpda::TpdaOp::nop();
        } else if (op.text == "test" || op.text == "reset" || op.text == "push" || op.text == "pop") {
            const bool on_clock = op.text == "test" || op.text == "reset";
            if (on_clock && !timed_)
                throw error(op, "'" + op.text + "' needs a tpda model");
            expect("(");
            const Token &name = ident(on_clock ? "a clock" : "a stack symbol");
            uses_.push_back({name.text, name.line, name.column,
                             on_clock ? NameUse::Kind::Clock : NameUse::Kind::Symbol});
            Interval iv = Interval::any();
            if (timed_) {
                expect(",");
                iv = interval();
            }
            expect(")");
            top.name = name.text;
            top.interval = iv;
            if (op.text == "test")
                top.kind = tpda::TpdaOp::Kind::Test;
            else if (op.text == "reset")
                top.kind = tpda::TpdaOp::Kind::Reset;
            else if (op.text == "push")
                top.kind = tpda::TpdaOp::Kind::Push;
            else
                top.kind = tpda::TpdaOp::Kind::Pop;
            prule.kind = op.text == "push" ? pda::StackOp::Kind::Push : pda::StackOp::Kind::Pop;
            prule.symbol = name.text;
        } else {
            throw error(op, "unknown operation");
        }
        expect(";");
        t.rules.push_back({src.text, top, dst.text});
        p.rules.push_back(prule);
    }

    void check_declared(const std::vector<std::string> &states, const std::vector<std::string> &clocks,
                        const std::vector<std::string> &alphabet) const {
        auto has = [](const std::vector<std::string> &v, const std::string &n) {
            return std::find(v.begin(), v.end(), n) != v.end();
        };
        for (const auto &u : uses_) {
            switch (u.kind) {
            case NameUse::Kind::State:
                if (!has(states, u.name))
                    throw ParseError(u.line, u.column, u.name, "undeclared state '" + u.name + "'");
                break;
            case NameUse::Kind::Clock:
                if (!has(clocks, u.name))
                    throw ParseError(u.line, u.column, u.name, "undeclared clock '" + u.name + "'");
                break;
            case NameUse::Kind::Symbol:
                if (!has(alphabet, u.name))
                    throw ParseError(u.line, u.column, u.name, "undeclared stack symbol '" + u.name + "'");
                break;
            }
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    bool timed_ = true;
    std::vector<NameUse> uses_;
};

std::string join(const std::vector<std::string> &v) {
    std::string out;
    for (const auto &s : v)
        out += " " + s;
    return out;
}

std::uint32_t index_of(const std::vector<std::string> &v, const std::string &n) {
    return static_cast<std::uint32_t>(std::find(v.begin(), v.end(), n) - v.begin());
}

} // namespace

Model parse_model(std::string_view source) { return Parser(lex(source)).parse(); }

Model load_model(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw ModelError("cannot open model file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str());
}

std::string render_model(const Model &m) {
    std::ostringstream out;
    if (const auto *t = std::get_if<tpda::Tpda>(&m)) {
        out << "tpda\n";
        out << "states" << join(t->states) << ";\n";
        out << "init " << t->init << ";\n";
        out << "clocks" << join(t->clocks) << ";\n";
        out << "alphabet" << join(t->alphabet) << ";\n";
        for (const auto &r : t->rules)
            out << "rule " << tpda::to_string(r) << ";\n";
        return out.str();
    }
    const auto &p = std::get<PdaModel>(m);
    out << "pda\n";
    out << "states" << join(p.states) << ";\n";
    out << "init " << p.init << ";\n";
    out << "alphabet" << join(p.alphabet) << ";\n";
    for (const auto &r : p.rules) {
        out << "rule " << r.src << " -> " << r.dst << " : ";
        switch (r.kind) {
        case pda::StackOp::Kind::Push:
            out << "push(" << r.symbol << ")";
            break;
        case pda::StackOp::Kind::Pop:
            out << "pop(" << r.symbol << ")";
            break;
        case pda::StackOp::Kind::Nop:
            out << "nop";
            break;
        }
        out << ";\n";
    }
    return out.str();
}

pda::Pda compile(const PdaModel &m) {
    std::vector<pda::PdaRule> rules;
    for (const auto &r : m.rules) {
        pda::PdaRule pr;
        pr.src = pda::StateId{index_of(m.states, r.src)};
        pr.dst = pda::StateId{index_of(m.states, r.dst)};
        switch (r.kind) {
        case pda::StackOp::Kind::Push:
            pr.op = pda::StackOp::push(pda::SymbolId{index_of(m.alphabet, r.symbol)});
            break;
        case pda::StackOp::Kind::Pop:
            pr.op = pda::StackOp::pop(pda::SymbolId{index_of(m.alphabet, r.symbol)});
            break;
        case pda::StackOp::Kind::Nop:
            pr.op = pda::StackOp::nop();
            break;
        }
        rules.push_back(pr);
    }
    return pda::Pda::from_rules(m.states.size(), pda::StateId{index_of(m.states, m.init)}, m.alphabet.size(),
                                std::move(rules));
}

std::optional<pda::StateId> state_id(const PdaModel &m, const std::string &name) {
    const auto idx = index_of(m.states, name);
    if (idx >= m.states.size())
        return std::nullopt;
    return pda::StateId{idx};
}

std::string render_rule(const PdaModel &m, const pda::PdaRule &r) {
    std::string op = "nop";
    if (r.op.kind == pda::StackOp::Kind::Push)
        op = "push(" + m.alphabet.at(r.op.symbol.value) + ")";
    else if (r.op.kind == pda::StackOp::Kind::Pop)
        op = "pop(" + m.alphabet.at(r.op.symbol.value) + ")";
    return m.states.at(r.src.value) + " -> " + m.states.at(r.dst.value) + " : " + op;
}

} // namespace tpdareach::dsl
