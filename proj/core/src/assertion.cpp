#include "secov/assertion.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <cstring>
#include <sstream>

namespace secov {

int Expr::size() const {
    int s = 1;
    if (kind == ExprKind::EqConst) s += static_cast<int>(pattern.size());
    if (kind == ExprKind::OneHot0) s += 3; // placeholder weight; width-resolved later
    for (const auto& a : args) s += a->size();
    return s;
}

int AssertionAst::size() const {
    int s = 1;
    if (lhs) s += lhs->size();
    if (rhs) s += rhs->size();
    if (disable) s += disable->size();
    return s;
}

namespace {

struct Tok {
    enum Kind { Ident, Number, VLit, Op, End } kind = End;
    std::string text;            // Ident/Op spelling
    std::vector<bool> bits;      // VLit pattern msb-first
    long number = 0;             // Number
    int line = 1, col = 1;
};

class AsrLexer {
  public:
    AsrLexer(std::string_view src, int line0) : src_(src), line_(line0) { advance(); }

    const Tok& peek() const { return tok_; }
    Tok take() {
        Tok t = tok_;
        advance();
        return t;
    }

  private:
    void advance() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
            bump();
        tok_ = Tok{};
        tok_.line = line_;
        tok_.col = col_;
        if (pos_ >= src_.size()) return;
        char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
            std::string s;
            while (pos_ < src_.size()) {
                char d = src_[pos_];
                if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '$' ||
                    d == '.') {
                    s += d;
                    bump();
                } else break;
            }
            tok_.kind = Tok::Ident;
            tok_.text = std::move(s);
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            long num = 0;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                num = num * 10 + (src_[pos_] - '0');
                bump();
            }
            if (pos_ < src_.size() && src_[pos_] == '\'') {
                bump();
                if (pos_ >= src_.size() || (src_[pos_] != 'b' && src_[pos_] != 'B'))
                    throw ParseError("only binary literals (N'b...) are supported", line_, col_);
                bump();
                std::vector<bool> bits;
                while (pos_ < src_.size() && (src_[pos_] == '0' || src_[pos_] == '1')) {
                    bits.push_back(src_[pos_] == '1');
                    bump();
                }
                if (bits.empty()) throw ParseError("empty binary literal", line_, col_);
                if (static_cast<long>(bits.size()) > num)
                    throw ParseError("literal wider than its declared size", line_, col_);
                while (static_cast<long>(bits.size()) < num)
                    bits.insert(bits.begin(), false);
                tok_.kind = Tok::VLit;
                tok_.bits = std::move(bits);
                return;
            }
            tok_.kind = Tok::Number;
            tok_.number = num;
            return;
        }
        // operators, longest match first
        static const char* ops[] = {"|->", "|=>", "!==", "===", "&&", "||",
                                    "->",  "==",  "!=",  "(",  ")",  "{",
                                    "}",   ";",   "!",   "@",  ","};
        for (const char* op : ops) {
            std::size_t len = std::strlen(op);
            if (src_.substr(pos_, len) == op) {
                tok_.kind = Tok::Op;
                tok_.text = op;
                for (std::size_t i = 0; i < len; ++i) bump();
                return;
            }
        }
        throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
    }

    void bump() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else ++col_;
        ++pos_;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_;
    int col_ = 1;
    Tok tok_;
};

std::unique_ptr<Expr> mk(ExprKind k) {
    auto e = std::make_unique<Expr>();
    e->kind = k;
    return e;
}

class AsrParser {
  public:
    AsrParser(std::string_view src, const ConstantTable& constants, int line0)
        : constants_(constants) {
        AsrLexer lex(src, line0);
        while (lex.peek().kind != Tok::End) toks_.push_back(lex.take());
        toks_.push_back(lex.take()); // End marker
    }

    AssertionAst parse() {
        AssertionAst ast;
        bool sva_form = false;
        if (at_ident("assert")) {
            take();
            if (at_ident("property")) {
                take();
                sva_form = true;
                ast.always = true;
                expect_op("(");
                if (at_op("@")) {
                    take();
                    expect_op("(");
                    expect_ident("posedge");
                    ast.clock = expect_any_ident().text;
                    expect_op(")");
                }
                if (at_ident("disable")) {
                    take();
                    expect_ident("iff");
                    expect_op("(");
                    ast.disable = parse_expr();
                    expect_op(")");
                }
                parse_stmt(ast);
                expect_op(")");
                accept_op(";");
            } else {
                if (at_ident("always")) {
                    take();
                    ast.always = true;
                } else {
                    ast.always = false;
                }
                expect_op("{");
                parse_seq(ast);
                expect_op("}");
                accept_op(";");
            }
        } else {
            parse_stmt(ast);
            accept_op(";");
        }
        (void)sva_form;
        parse_suffixes(ast);
        if (peek().kind != Tok::End)
            fail("unexpected trailing text", peek());
        return ast;
    }

  private:
    [[noreturn]] void fail(const std::string& msg, const Tok& t) {
        std::string near = t.kind == Tok::End ? "" : " near '" + t.text + "'";
        throw ParseError(msg + near, t.line, t.col);
    }

    bool at_ident(const char* s) const {
        return peek().kind == Tok::Ident && peek().text == s;
    }
    bool at_op(const char* s) const {
        return peek().kind == Tok::Op && peek().text == s;
    }
    void expect_op(const char* s) {
        if (!at_op(s)) fail(std::string("expected '") + s + "'", peek());
        take();
    }
    bool accept_op(const char* s) {
        if (at_op(s)) {
            take();
            return true;
        }
        return false;
    }
    void expect_ident(const char* s) {
        if (!at_ident(s)) fail(std::string("expected '") + s + "'", peek());
        take();
    }
    Tok expect_any_ident() {
        if (peek().kind != Tok::Ident) fail("expected identifier", peek());
        return take();
    }

    void parse_stmt(AssertionAst& ast) {
        if (at_ident("always")) {
            take();
            ast.always = true;
        }
        parse_seq(ast);
    }

    // true when the '(' at pos_ wraps an implication; then the parens are
    // statement grouping, not expression grouping
    bool paren_wraps_implication() const {
        if (!(toks_[pos_].kind == Tok::Op && toks_[pos_].text == "(")) return false;
        int depth = 0;
        for (std::size_t i = pos_; i < toks_.size(); ++i) {
            const Tok& t = toks_[i];
            if (t.kind != Tok::Op) continue;
            if (t.text == "(") ++depth;
            else if (t.text == ")") {
                if (--depth == 0) return false; // closed without an implication
            } else if (depth == 1 &&
                       (t.text == "->" || t.text == "|->" || t.text == "|=>")) {
                return true;
            }
        }
        return false;
    }

    void parse_seq(AssertionAst& ast) {
        if (paren_wraps_implication()) {
            expect_op("(");
            parse_seq(ast);
            expect_op(")");
            return;
        }
        auto lhs = parse_expr();
        if (at_op("->") || at_op("|->") || at_op("|=>")) {
            std::string op = take().text;
            ast.prop = op == "|=>" ? PropKind::NonOverlapImply : PropKind::Imply;
            ast.lhs = std::move(lhs);
            ast.rhs = parse_expr();
        } else {
            ast.prop = PropKind::Plain;
            ast.rhs = std::move(lhs);
        }
    }

    std::unique_ptr<Expr> parse_expr() { return parse_or(); }

    std::unique_ptr<Expr> parse_or() {
        auto e = parse_and();
        while (at_op("||")) {
            take();
            auto n = mk(ExprKind::Or);
            n->args.push_back(std::move(e));
            n->args.push_back(parse_and());
            e = std::move(n);
        }
        return e;
    }

    std::unique_ptr<Expr> parse_and() {
        auto e = parse_cmp();
        while (at_op("&&")) {
            take();
            auto n = mk(ExprKind::And);
            n->args.push_back(std::move(e));
            n->args.push_back(parse_cmp());
            e = std::move(n);
        }
        return e;
    }

    // comparison of a unary operand with a constant
    std::unique_ptr<Expr> parse_cmp() {
        const Tok before = peek();
        auto e = parse_unary();
        if (at_op("==") || at_op("!=") || at_op("===") || at_op("!==")) {
            std::string op = take().text;
            bool negated = op == "!=" || op == "!==";
            std::vector<bool> bits = parse_const_pattern();
            if (bits.size() == 1) {
                // boolean comparison folds to the operand or its negation
                bool want_true = bits[0] != negated;
                if (want_true) return e;
                auto n = mk(ExprKind::Not);
                n->args.push_back(std::move(e));
                return n;
            }
            if (e->kind != ExprKind::Signal)
                fail("bus comparison requires a plain bus name", before);
            auto n = mk(ExprKind::EqConst);
            n->name = e->name;
            n->pattern = std::move(bits);
            n->negated = negated;
            return n;
        }
        return e;
    }

    std::vector<bool> parse_const_pattern() {
        const Tok& t = peek();
        if (t.kind == Tok::VLit) return take().bits;
        if (t.kind == Tok::Number) {
            Tok n = take();
            if (n.number != 0 && n.number != 1)
                fail("bare numeric constants must be 0 or 1", n);
            return {n.number == 1};
        }
        if (t.kind == Tok::Ident) {
            Tok id = take();
            auto it = constants_.find(id.text);
            if (it == constants_.end())
                fail("unknown constant mnemonic '" + id.text + "'", id);
            return it->second;
        }
        fail("expected a constant", t);
    }

    std::unique_ptr<Expr> parse_unary() {
        if (at_op("!")) {
            take();
            auto n = mk(ExprKind::Not);
            n->args.push_back(parse_unary());
            return n;
        }
        return parse_primary();
    }

    std::unique_ptr<Expr> parse_primary() {
        const Tok& t = peek();
        if (at_op("(")) {
            take();
            auto e = parse_expr();
            expect_op(")");
            return e;
        }
        if (t.kind == Tok::VLit) {
            Tok v = take();
            if (v.bits.size() != 1) fail("multi-bit literal outside a comparison", v);
            auto e = mk(ExprKind::Const);
            e->cval = v.bits[0];
            return e;
        }
        if (t.kind == Tok::Number) {
            Tok v = take();
            if (v.number != 0 && v.number != 1) fail("bare numeric constants must be 0 or 1", v);
            auto e = mk(ExprKind::Const);
            e->cval = v.number == 1;
            return e;
        }
        if (t.kind == Tok::Ident) {
            Tok id = take();
            if (id.text == "$rose") {
                expect_op("(");
                auto e = mk(ExprKind::Rose);
                e->args.push_back(parse_expr());
                expect_op(")");
                return e;
            }
            if (id.text == "$onehot0") {
                expect_op("(");
                auto e = mk(ExprKind::OneHot0);
                e->name = expect_any_ident().text;
                expect_op(")");
                return e;
            }
            if (id.text[0] == '$')
                fail("unsupported construct '" + id.text + "'", id);
            auto it = constants_.find(id.text);
            if (it != constants_.end()) {
                if (it->second.size() != 1)
                    fail("multi-bit constant '" + id.text + "' outside a comparison", id);
                auto e = mk(ExprKind::Const);
                e->cval = it->second[0];
                return e;
            }
            auto e = mk(ExprKind::Signal);
            e->name = id.text;
            return e;
        }
        fail("expected an expression", t);
    }

    void parse_suffixes(AssertionAst& ast) {
        for (;;) {
            if (at_op("@")) {
                Tok at = take();
                Tok kw = expect_any_ident();
                if (kw.text != "clock") fail("expected 'clock' after '@'", at);
                ast.clock = expect_any_ident().text;
            } else if (at_ident("disable")) {
                Tok kw = take();
                if (ast.disable) fail("duplicate disable condition", kw);
                expect_op("(");
                ast.disable = parse_expr();
                expect_op(")");
            } else {
                break;
            }
        }
    }

    const Tok& peek() const { return toks_[pos_]; }
    Tok take() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

    std::vector<Tok> toks_;
    std::size_t pos_ = 0;
    const ConstantTable& constants_;
};

void collect_signals(const Expr& e, std::set<std::string>& scalars,
                     std::map<std::string, int>& buses) {
    switch (e.kind) {
        case ExprKind::Signal: scalars.insert(e.name); break;
        case ExprKind::EqConst: {
            int w = static_cast<int>(e.pattern.size());
            auto [it, fresh] = buses.emplace(e.name, w);
            if (!fresh && it->second != 0 && it->second != w)
                throw Error("bus '" + e.name + "' referenced with conflicting widths");
            if (!fresh && it->second == 0) it->second = w;
            break;
        }
        case ExprKind::OneHot0: buses.emplace(e.name, 0); break;
        default: break;
    }
    for (const auto& a : e.args) collect_signals(*a, scalars, buses);
}

} // namespace

AssertionAst parse_assertion(const AssertionSpec& spec, const ConstantTable& constants) {
    if (spec.source.empty()) throw Error("assertion '" + spec.name + "' has empty source");
    AsrParser p(spec.source, constants, 1);
    AssertionAst ast = p.parse();
    ast.name = spec.name;
    // cross-checks: a name cannot be both scalar and bus
    auto refs = referenced_signals(ast);
    for (const auto& s : refs.scalars)
        if (refs.buses.count(s))
            throw Error("'" + s + "' used both as scalar and bus in assertion '" + spec.name +
                        "'");
    return ast;
}

ReferencedSignals referenced_signals(const AssertionAst& ast) {
    std::set<std::string> scalars;
    std::map<std::string, int> buses;
    if (ast.lhs) collect_signals(*ast.lhs, scalars, buses);
    if (ast.rhs) collect_signals(*ast.rhs, scalars, buses);
    if (ast.disable) collect_signals(*ast.disable, scalars, buses);
    ReferencedSignals out;
    out.scalars.assign(scalars.begin(), scalars.end());
    out.buses = std::move(buses);
    return out;
}

// --- assertion file --------------------------------------------------------

AssertionFile parse_assertion_file(std::string_view text) {
    AssertionFile file;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string trimmed = line;
        auto first = trimmed.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        trimmed = trimmed.substr(first);
        if (trimmed.empty() || trimmed[0] == '#') continue;
        if (trimmed.rfind("//", 0) == 0) continue;
        if (trimmed.rfind("const ", 0) == 0) {
            // const NAME = <pattern>
            std::istringstream cs(trimmed.substr(6));
            std::string name, eq, value;
            cs >> name >> eq >> value;
            if (name.empty() || eq != "=" || value.empty())
                throw ParseError("malformed constant line (const NAME = N'b...)", line_no, 1);
            std::vector<bool> bits;
            auto tick = value.find('\'');
            std::string digits;
            long width = -1;
            if (tick != std::string::npos) {
                width = std::stol(value.substr(0, tick));
                if (tick + 1 >= value.size() ||
                    (value[tick + 1] != 'b' && value[tick + 1] != 'B'))
                    throw ParseError("constants must use binary N'b... form", line_no, 1);
                digits = value.substr(tick + 2);
            } else {
                digits = value;
            }
            for (char c : digits) {
                if (c == '_') continue;
                if (c != '0' && c != '1')
                    throw ParseError("constants must be binary patterns", line_no, 1);
                bits.push_back(c == '1');
            }
            if (bits.empty()) throw ParseError("empty constant pattern", line_no, 1);
            if (width > 0) {
                if (static_cast<long>(bits.size()) > width)
                    throw ParseError("constant wider than its declared size", line_no, 1);
                while (static_cast<long>(bits.size()) < width) bits.insert(bits.begin(), false);
            }
            if (!file.constants.emplace(name, std::move(bits)).second)
                throw ParseError("duplicate constant '" + name + "'", line_no, 1);
            continue;
        }
        auto colon = trimmed.find(':');
        if (colon == std::string::npos)
            throw ParseError("expected 'name: <assertion text>'", line_no, 1);
        AssertionSpec spec;
        spec.name = trimmed.substr(0, colon);
        while (!spec.name.empty() && std::isspace(static_cast<unsigned char>(spec.name.back())))
            spec.name.pop_back();
        if (spec.name.empty()) throw ParseError("empty assertion name", line_no, 1);
        spec.source = trimmed.substr(colon + 1);
        for (const auto& a : file.assertions)
            if (a.name == spec.name)
                throw ParseError("duplicate assertion name '" + spec.name + "'", line_no, 1);
        file.assertions.push_back(std::move(spec));
    }
    return file;
}

// --- interpreter -----------------------------------------------------------

namespace {

class TraceEval {
  public:
    TraceEval(const SignalTrace& trace) : trace_(trace) {
        for (std::size_t i = 0; i < trace.signals.size(); ++i)
            index_[trace.signals[i]] = i;
    }

    bool signal(const std::string& name, std::size_t t) const {
        auto it = index_.find(name);
        if (it == index_.end()) throw Error("missing signal in trace: '" + name + "'");
        return trace_.values[t][it->second] != 0;
    }

    int bus_width(const std::string& base) const {
        int w = 0;
        while (index_.count(base + "[" + std::to_string(w) + "]")) ++w;
        if (w == 0) throw Error("missing signal in trace: '" + base + "[0]'");
        return w;
    }

    bool eval(const Expr& e, std::size_t t) const {
        switch (e.kind) {
            case ExprKind::Const: return e.cval;
            case ExprKind::Signal: return signal(e.name, t);
            case ExprKind::Not: return !eval(*e.args[0], t);
            case ExprKind::And: return eval(*e.args[0], t) && eval(*e.args[1], t);
            case ExprKind::Or: return eval(*e.args[0], t) || eval(*e.args[1], t);
            case ExprKind::EqConst: {
                int w = static_cast<int>(e.pattern.size());
                bool eq = true;
                for (int i = 0; i < w; ++i) {
                    bool bit = signal(e.name + "[" + std::to_string(w - 1 - i) + "]", t);
                    if (bit != e.pattern[i]) { eq = false; break; }
                }
                return e.negated ? !eq : eq;
            }
            case ExprKind::OneHot0: {
                int w = bus_width(e.name);
                int ones = 0;
                for (int i = 0; i < w; ++i)
                    if (signal(e.name + "[" + std::to_string(i) + "]", t)) ++ones;
                return ones <= 1;
            }
            case ExprKind::Rose: {
                if (t == 0) return false;
                return !eval(*e.args[0], t - 1) && eval(*e.args[0], t);
            }
        }
        throw Error("unreachable expression kind");
    }

  private:
    const SignalTrace& trace_;
    std::map<std::string, std::size_t> index_;
};

} // namespace

std::vector<Verdict> interpret(const AssertionAst& ast, const SignalTrace& trace) {
    TraceEval ev(trace);
    std::size_t cycles = trace.cycle_count();
    std::vector<Verdict> out(cycles, Verdict::Pass);
    bool pending = false; // |=> attempt armed on the previous cycle
    for (std::size_t t = 0; t < cycles; ++t) {
        bool dis = ast.disable && ev.eval(*ast.disable, t);
        bool attempt = ast.always || t == 0;
        bool viol = false;
        switch (ast.prop) {
            case PropKind::Plain:
                viol = attempt && !ev.eval(*ast.rhs, t);
                break;
            case PropKind::Imply:
                viol = attempt && ev.eval(*ast.lhs, t) && !ev.eval(*ast.rhs, t);
                break;
            case PropKind::NonOverlapImply:
                viol = pending && !ev.eval(*ast.rhs, t);
                pending = attempt && !dis && ev.eval(*ast.lhs, t);
                break;
        }
        if (dis) out[t] = Verdict::Disabled;
        else if (viol) out[t] = Verdict::Fail;
    }
    return out;
}

} // namespace secov
