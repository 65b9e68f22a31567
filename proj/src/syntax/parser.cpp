#include "codeplan/errors.hpp"
#include "codeplan/parser.hpp"

#include <algorithm>
#include <array>

namespace codeplan {

namespace {

constexpr std::array<std::string_view, 35> kKeywords = {
    "False", "None",   "True",   "and",    "as",     "assert", "async",  "await",  "break",
    "class", "continue", "def",  "del",    "elif",   "else",   "except", "finally", "for",
    "from",  "global", "if",     "import", "in",     "is",     "lambda", "nonlocal", "not",
    "or",    "pass",   "raise",  "return", "try",    "while",  "with",   "yield"};

constexpr std::array<std::string_view, 12> kAugOps = {"+=", "-=", "*=", "/=", "//=", "%=",
                                                      "**=", ">>=", "<<=", "&=", "|=", "^="};

using ast::Expr;
using ast::ExprKind;
using ast::ExprPtr;
using ast::Stmt;
using ast::StmtKind;
using ast::StmtPtr;

class Parser {
public:
    Parser(std::string_view text, const std::string& file)
        : text_(text), file_(file), toks_(tokenize(text, file)) {}

    ast::Module module() {
        ast::Module m;
        while (!at(TokenType::End)) {
            if (at(TokenType::Newline)) {
                ++i_;
                continue;
            }
            parse_statement(m.body);
        }
        return m;
    }

    ExprPtr single_expression() {
        ExprPtr e = testlist();
        while (at(TokenType::Newline)) ++i_;
        if (!at(TokenType::End)) fail("unexpected trailing tokens in expression");
        return e;
    }

private:
    // ---- token helpers -------------------------------------------------

    const Token& peek(std::size_t k = 0) const { return toks_[std::min(i_ + k, toks_.size() - 1)]; }
    bool at(TokenType t) const { return peek().type == t; }
    bool at_op(std::string_view op, std::size_t k = 0) const {
        return peek(k).type == TokenType::Op && peek(k).text == op;
    }
    bool at_kw(std::string_view kw, std::size_t k = 0) const {
        return peek(k).type == TokenType::Name && peek(k).text == kw;
    }

    const Token& advance() {
        const Token& t = toks_[i_];
        if (t.type != TokenType::Newline && t.type != TokenType::Indent && t.type != TokenType::Dedent &&
            t.type != TokenType::End) {
            last_end_ = t.end;
            last_line_ = t.line + static_cast<int>(std::count(text_.begin() + t.start, text_.begin() + t.end, '\n'));
        }
        ++i_;
        return t;
    }

    [[noreturn]] void fail(const std::string& message) const { throw ParseError(file_, peek().line, message); }

    void expect_op(std::string_view op) {
        if (!at_op(op)) fail("expected '" + std::string(op) + "'" + got());
        advance();
    }
    void expect_kw(std::string_view kw) {
        if (!at_kw(kw)) fail("expected '" + std::string(kw) + "'" + got());
        advance();
    }
    std::string expect_name() {
        if (!at(TokenType::Name) || is_keyword(peek().text)) fail("expected identifier" + got());
        return advance().text;
    }
    std::string got() const {
        switch (peek().type) {
        case TokenType::Newline: return ", found end of line";
        case TokenType::Indent: return ", found unexpected indent";
        case TokenType::Dedent: return ", found dedent";
        case TokenType::End: return ", found end of file";
        default: return ", found '" + peek().text + "'";
        }
    }

    ast::Span span_from(const Token& first) const {
        ast::Span s;
        s.start = first.start;
        s.end = last_end_;
        s.start_line = first.line;
        s.end_line = last_line_;
        return s;
    }

    std::string text_of(const ast::Span& s) const { return std::string(text_.substr(s.start, s.end - s.start)); }

    std::size_t line_start_of(std::size_t offset) const {
        if (offset == 0) return 0;
        const std::size_t nl = text_.rfind('\n', offset - 1);
        return nl == std::string_view::npos ? 0 : nl + 1;
    }

    ExprPtr make(ExprKind kind, const Token& first, std::string text = {}) {
        auto e = std::make_unique<Expr>();
        e->kind = kind;
        e->text = std::move(text);
        e->span.start = first.start;
        e->span.start_line = first.line;
        return e;
    }
    ExprPtr finish(ExprPtr e) {
        e->span.end = last_end_;
        e->span.end_line = last_line_;
        return e;
    }

    // ---- statements ----------------------------------------------------

    void parse_statement(std::vector<StmtPtr>& out) {
        const Token& first = peek();
        if (first.type == TokenType::Indent) fail("unexpected indent");
        if (first.type == TokenType::Dedent) fail("unexpected dedent");
        if (at_op("@")) fail("decorators are not supported");
        if (first.type == TokenType::Name) {
            const std::string& w = first.text;
            if (w == "def") return out.push_back(funcdef());
            if (w == "class") return out.push_back(classdef());
            if (w == "if" || w == "while" || w == "for" || w == "with" || w == "try") {
                return out.push_back(compound());
            }
            if (w == "async") fail("async definitions are not supported");
        }
        simple_statements(out);
    }

    void simple_statements(std::vector<StmtPtr>& out) {
        for (;;) {
            out.push_back(small_statement());
            if (at_op(";")) {
                advance();
                if (at(TokenType::Newline)) break;
                continue;
            }
            break;
        }
        if (at(TokenType::End)) return;
        if (!at(TokenType::Newline)) fail("expected end of statement" + got());
        advance();
    }

    StmtPtr begin_stmt(StmtKind kind, const Token& first) {
        auto s = std::make_unique<Stmt>();
        s->kind = kind;
        s->indent = first.col;
        s->line_start = line_start_of(first.start);
        return s;
    }

    StmtPtr small_statement() {
        const Token first = peek();
        if (first.type != TokenType::Name && first.type != TokenType::Op && first.type != TokenType::Number &&
            first.type != TokenType::String) {
            fail("expected statement" + got());
        }
        const std::string w = first.type == TokenType::Name ? first.text : std::string();
        StmtPtr s;
        if (w == "pass" || w == "break" || w == "continue") {
            s = begin_stmt(w == "pass" ? StmtKind::Pass : w == "break" ? StmtKind::Break : StmtKind::Continue, first);
            advance();
        } else if (w == "return") {
            s = begin_stmt(StmtKind::Return, first);
            advance();
            if (!at(TokenType::Newline) && !at_op(";") && !at(TokenType::End)) s->value = testlist_star();
        } else if (w == "raise") {
            s = begin_stmt(StmtKind::Raise, first);
            advance();
            if (!at(TokenType::Newline) && !at_op(";") && !at(TokenType::End)) {
                s->value = test();
                if (at_kw("from")) {
                    advance();
                    s->extra.push_back(test());
                }
            }
        } else if (w == "global" || w == "nonlocal") {
            s = begin_stmt(w == "global" ? StmtKind::Global : StmtKind::Nonlocal, first);
            advance();
            s->names.push_back(expect_name());
            while (at_op(",")) {
                advance();
                s->names.push_back(expect_name());
            }
        } else if (w == "del") {
            s = begin_stmt(StmtKind::Delete, first);
            advance();
            s->targets.push_back(exprlist());
        } else if (w == "assert") {
            s = begin_stmt(StmtKind::Assert, first);
            advance();
            s->value = test();
            if (at_op(",")) {
                advance();
                s->extra.push_back(test());
            }
        } else if (w == "import") {
            s = begin_stmt(StmtKind::Import, first);
            advance();
            do {
                if (!s->imports.empty()) advance();
                ast::ImportName n;
                n.name = dotted_name();
                if (at_kw("as")) {
                    advance();
                    n.alias = expect_name();
                }
                s->imports.push_back(std::move(n));
            } while (at_op(","));
        } else if (w == "from") {
            s = begin_stmt(StmtKind::FromImport, first);
            advance();
            std::string mod;
            while (at_op(".") || at_op("...")) mod += advance().text;
            if (!at_kw("import")) mod += dotted_name();
            s->module = mod;
            expect_kw("import");
            if (at_op("*")) {
                advance();
                s->imports.push_back({"*", ""});
            } else {
                const bool paren = at_op("(");
                if (paren) advance();
                for (;;) {
                    ast::ImportName n;
                    n.name = expect_name();
                    if (at_kw("as")) {
                        advance();
                        n.alias = expect_name();
                    }
                    s->imports.push_back(std::move(n));
                    if (!at_op(",")) break;
                    advance();
                    if (paren && at_op(")")) break;
                }
                if (paren) expect_op(")");
            }
        } else if (w == "yield") {
            fail("yield is not supported");
        } else {
            s = expression_statement(first);
        }
        s->span = span_from(first);
        return s;
    }

    StmtPtr expression_statement(const Token& first) {
        ExprPtr lhs = testlist_star();
        if (at_op(":")) {
            auto s = begin_stmt(StmtKind::AnnAssign, first);
            advance();
            s->annotation = test();
            s->targets.push_back(std::move(lhs));
            if (at_op("=")) {
                advance();
                s->value = testlist_star();
            }
            return s;
        }
        for (std::string_view op : kAugOps) {
            if (at_op(op)) {
                auto s = begin_stmt(StmtKind::AugAssign, first);
                s->op = advance().text;
                s->targets.push_back(std::move(lhs));
                s->value = testlist();
                return s;
            }
        }
        if (at_op("=")) {
            auto s = begin_stmt(StmtKind::Assign, first);
            std::vector<ExprPtr> chain;
            chain.push_back(std::move(lhs));
            while (at_op("=")) {
                advance();
                chain.push_back(testlist_star());
            }
            s->value = std::move(chain.back());
            chain.pop_back();
            s->targets = std::move(chain);
            return s;
        }
        auto s = begin_stmt(StmtKind::Expr, first);
        s->value = std::move(lhs);
        return s;
    }

    std::string dotted_name() {
        std::string n = expect_name();
        while (at_op(".")) {
            advance();
            n += "." + expect_name();
        }
        return n;
    }

    void suite(std::vector<StmtPtr>& body) {
        expect_op(":");
        if (at(TokenType::Newline)) {
            advance();
            if (!at(TokenType::Indent)) fail("expected an indented block");
            advance();
            while (!at(TokenType::Dedent) && !at(TokenType::End)) {
                if (at(TokenType::Newline)) {
                    advance();
                    continue;
                }
                parse_statement(body);
            }
            if (at(TokenType::Dedent)) advance();
        } else {
            simple_statements(body);
        }
    }

    void close_header(Stmt& s, const Token& first) {
        s.header = span_from(first);
    }

    StmtPtr funcdef() {
        const Token first = peek();
        auto s = begin_stmt(StmtKind::FunctionDef, first);
        advance();
        s->name = expect_name();
        expect_op("(");
        bool seen_default = false;
        while (!at_op(")")) {
            ast::Param p;
            const Token pfirst = peek();
            if (at_op("**")) {
                advance();
                p.kind = ast::Param::Kind::KwArgs;
                p.name = expect_name();
            } else if (at_op("*")) {
                advance();
                if (at_op(",") || at_op(")")) {
                    p.kind = ast::Param::Kind::KwOnlyMarker;
                } else {
                    p.kind = ast::Param::Kind::VarArgs;
                    p.name = expect_name();
                }
            } else if (at_op("/")) {
                advance();
                if (!at_op(")")) expect_op(",");
                continue;
            } else {
                p.name = expect_name();
            }
            if (p.kind != ast::Param::Kind::KwOnlyMarker && at_op(":")) {
                advance();
                p.annotation = test();
                p.annotation_text = text_of(p.annotation->span);
            }
            if (p.kind == ast::Param::Kind::Normal && at_op("=")) {
                advance();
                p.default_value = test();
                seen_default = true;
            } else if (p.kind == ast::Param::Kind::Normal && seen_default && kwonly_ == 0) {
                fail("non-default parameter follows default parameter");
            }
            if (p.kind == ast::Param::Kind::KwOnlyMarker || p.kind == ast::Param::Kind::VarArgs) ++kwonly_;
            p.span = span_from(pfirst);
            s->params.push_back(std::move(p));
            if (!at_op(")")) expect_op(",");
        }
        kwonly_ = 0;
        advance();
        if (at_op("->")) {
            advance();
            s->returns = test();
            s->returns_text = text_of(s->returns->span);
        }
        if (!at_op(":")) fail("expected ':'" + got());
        advance();
        close_header(*s, first);
        --i_;  // re-read ':' in suite()
        suite(s->body);
        s->span = span_from(first);
        return s;
    }

    StmtPtr classdef() {
        const Token first = peek();
        auto s = begin_stmt(StmtKind::ClassDef, first);
        advance();
        s->name = expect_name();
        if (at_op("(")) {
            advance();
            while (!at_op(")")) {
                if (at(TokenType::Name) && at_op("=", 1)) fail("class keywords are not supported");
                ExprPtr b = test();
                s->base_texts.push_back(text_of(b->span));
                s->bases.push_back(std::move(b));
                if (!at_op(")")) expect_op(",");
            }
            advance();
            if (s->bases.size() > 1) fail("multiple inheritance is not supported");
        }
        if (!at_op(":")) fail("expected ':'" + got());
        advance();
        close_header(*s, first);
        --i_;
        suite(s->body);
        s->span = span_from(first);
        return s;
    }

    StmtPtr compound() {
        const Token first = peek();
        const std::string w = first.text;
        StmtPtr s;
        if (w == "if" || w == "while") {
            s = begin_stmt(w == "if" ? StmtKind::If : StmtKind::While, first);
            advance();
            s->value = test();
            header_then_suite(*s, first, s->body);
            while (w == "if" && at_kw("elif")) {
                ast::Clause c;
                const Token cf = peek();
                c.keyword = advance().text;
                c.exprs.push_back(test());
                clause_suite(c, cf);
                s->clauses.push_back(std::move(c));
            }
            else_clause(*s);
        } else if (w == "for") {
            s = begin_stmt(StmtKind::For, first);
            advance();
            s->targets.push_back(exprlist());
            expect_kw("in");
            s->value = testlist();
            header_then_suite(*s, first, s->body);
            else_clause(*s);
        } else if (w == "with") {
            s = begin_stmt(StmtKind::With, first);
            advance();
            for (;;) {
                s->extra.push_back(test());
                if (at_kw("as")) {
                    advance();
                    s->targets.push_back(expr());
                }
                if (!at_op(",")) break;
                advance();
            }
            header_then_suite(*s, first, s->body);
        } else {
            s = begin_stmt(StmtKind::Try, first);
            advance();
            header_then_suite(*s, first, s->body);
            bool handlers = false;
            while (at_kw("except")) {
                handlers = true;
                ast::Clause c;
                const Token cf = peek();
                c.keyword = advance().text;
                if (!at_op(":")) {
                    c.exprs.push_back(test());
                    if (at_kw("as")) {
                        advance();
                        c.bound_name = expect_name();
                    }
                }
                clause_suite(c, cf);
                s->clauses.push_back(std::move(c));
            }
            if (handlers) else_clause(*s);
            bool fin = false;
            if (at_kw("finally")) {
                fin = true;
                ast::Clause c;
                const Token cf = peek();
                c.keyword = advance().text;
                clause_suite(c, cf);
                s->clauses.push_back(std::move(c));
            }
            if (!handlers && !fin) fail("expected 'except' or 'finally' block");
        }
        s->span = span_from(first);
        return s;
    }

    void header_then_suite(Stmt& s, const Token& first, std::vector<StmtPtr>& body) {
        if (!at_op(":")) fail("expected ':'" + got());
        advance();
        close_header(s, first);
        --i_;
        suite(body);
    }

    void clause_suite(ast::Clause& c, const Token& first) {
        if (!at_op(":")) fail("expected ':'" + got());
        advance();
        c.header = span_from(first);
        --i_;
        suite(c.body);
    }

    void else_clause(Stmt& s) {
        if (!at_kw("else")) return;
        ast::Clause c;
        const Token cf = peek();
        c.keyword = advance().text;
        clause_suite(c, cf);
        s.clauses.push_back(std::move(c));
    }

    // ---- expressions ---------------------------------------------------

    bool starts_expression() const {
        const Token& t = peek();
        if (t.type == TokenType::Name) {
            return !is_keyword(t.text) || t.text == "None" || t.text == "True" || t.text == "False" ||
                   t.text == "not" || t.text == "lambda" || t.text == "await";
        }
        if (t.type == TokenType::Number || t.type == TokenType::String) return true;
        if (t.type == TokenType::Op) {
            return t.text == "(" || t.text == "[" || t.text == "{" || t.text == "-" || t.text == "+" ||
                   t.text == "~" || t.text == "..." || t.text == "*";
        }
        return false;
    }

    ExprPtr tuple_of(const Token& first, ExprPtr head, bool allow_star, bool tests) {
        if (!at_op(",")) return head;
        auto t = make(ExprKind::Tuple, first);
        t->children.push_back(std::move(head));
        while (at_op(",")) {
            advance();
            if (!starts_expression()) break;
            t->children.push_back(allow_star && at_op("*") ? star_expr() : tests ? test() : expr());
        }
        return finish(std::move(t));
    }

    ExprPtr testlist_star() {
        const Token first = peek();
        ExprPtr head = at_op("*") ? star_expr() : test();
        return tuple_of(first, std::move(head), true, true);
    }
    ExprPtr testlist() {
        const Token first = peek();
        return tuple_of(first, test(), false, true);
    }
    ExprPtr exprlist() {
        const Token first = peek();
        ExprPtr head = at_op("*") ? star_expr() : expr();
        return tuple_of(first, std::move(head), true, false);
    }

    ExprPtr star_expr() {
        const Token first = peek();
        expect_op("*");
        auto e = make(ExprKind::Starred, first);
        e->children.push_back(expr());
        return finish(std::move(e));
    }

    ExprPtr test() {
        const Token first = peek();
        if (at_kw("lambda")) {
            advance();
            auto e = make(ExprKind::Lambda, first);
            while (!at_op(":")) {
                if (at_op("*") || at_op("**")) advance();
                e->lambda_params.push_back(expect_name());
                if (at_op("=")) {
                    advance();
                    e->children.push_back(test());
                }
                if (!at_op(":")) expect_op(",");
            }
            advance();
            e->children.insert(e->children.begin(), test());
            return finish(std::move(e));
        }
        ExprPtr cond = or_test();
        if (at_kw("if") && !in_comp_if_) {
            advance();
            auto e = make(ExprKind::IfExp, first);
            e->children.push_back(std::move(cond));
            e->children.push_back(or_test());
            expect_kw("else");
            e->children.push_back(test());
            return finish(std::move(e));
        }
        return cond;
    }

    ExprPtr or_test() { return bool_chain("or", [this] { return and_test(); }); }
    ExprPtr and_test() { return bool_chain("and", [this] { return not_test(); }); }

    template <typename F>
    ExprPtr bool_chain(std::string_view kw, F next) {
        const Token first = peek();
        ExprPtr lhs = next();
        if (!at_kw(kw)) return lhs;
        auto e = make(ExprKind::BoolOp, first, std::string(kw));
        e->children.push_back(std::move(lhs));
        while (at_kw(kw)) {
            advance();
            e->children.push_back(next());
        }
        return finish(std::move(e));
    }

    ExprPtr not_test() {
        const Token first = peek();
        if (at_kw("not")) {
            advance();
            auto e = make(ExprKind::UnaryOp, first, "not");
            e->children.push_back(not_test());
            return finish(std::move(e));
        }
        return comparison();
    }

    bool at_compare_op() const {
        if (peek().type == TokenType::Op) {
            const std::string& t = peek().text;
            return t == "<" || t == ">" || t == "==" || t == ">=" || t == "<=" || t == "!=";
        }
        return at_kw("in") || at_kw("is") || (at_kw("not") && at_kw("in", 1));
    }

    ExprPtr comparison() {
        const Token first = peek();
        ExprPtr lhs = expr();
        if (!at_compare_op()) return lhs;
        auto e = make(ExprKind::Compare, first);
        e->children.push_back(std::move(lhs));
        while (at_compare_op()) {
            std::string op = advance().text;
            if (op == "not") op += " " + advance().text;
            else if (op == "is" && at_kw("not")) op += " " + advance().text;
            e->text += (e->text.empty() ? "" : " ") + op;
            e->children.push_back(expr());
        }
        return finish(std::move(e));
    }

    template <typename F>
    ExprPtr binary(std::initializer_list<std::string_view> ops, F next) {
        const Token first = peek();
        ExprPtr lhs = next();
        for (;;) {
            const bool match = peek().type == TokenType::Op &&
                               std::find(ops.begin(), ops.end(), std::string_view(peek().text)) != ops.end();
            if (!match) return lhs;
            auto e = make(ExprKind::BinOp, first, advance().text);
            e->children.push_back(std::move(lhs));
            e->children.push_back(next());
            lhs = finish(std::move(e));
        }
    }

    ExprPtr expr() { return binary({"|"}, [this] { return xor_expr(); }); }
    ExprPtr xor_expr() { return binary({"^"}, [this] { return and_expr(); }); }
    ExprPtr and_expr() { return binary({"&"}, [this] { return shift_expr(); }); }
    ExprPtr shift_expr() { return binary({"<<", ">>"}, [this] { return arith_expr(); }); }
    ExprPtr arith_expr() { return binary({"+", "-"}, [this] { return term(); }); }
    ExprPtr term() { return binary({"*", "/", "//", "%", "@"}, [this] { return factor(); }); }

    ExprPtr factor() {
        const Token first = peek();
        if (at_op("+") || at_op("-") || at_op("~")) {
            auto e = make(ExprKind::UnaryOp, first, advance().text);
            e->children.push_back(factor());
            return finish(std::move(e));
        }
        return power();
    }

    ExprPtr power() {
        const Token first = peek();
        ExprPtr base;
        if (at_kw("await")) {
            advance();
            base = make(ExprKind::Await, first);
            base->children.push_back(atom_expr());
            base = finish(std::move(base));
        } else {
            base = atom_expr();
        }
        if (at_op("**")) {
            auto e = make(ExprKind::BinOp, first, advance().text);
            e->children.push_back(std::move(base));
            e->children.push_back(factor());
            return finish(std::move(e));
        }
        return base;
    }

    ExprPtr atom_expr() {
        const Token first = peek();
        ExprPtr e = atom();
        for (;;) {
            if (at_op("(")) {
                advance();
                auto call = make(ExprKind::Call, first);
                call->children.push_back(std::move(e));
                arguments(*call);
                expect_op(")");
                e = finish(std::move(call));
            } else if (at_op("[")) {
                advance();
                auto sub = make(ExprKind::Subscript, first);
                sub->children.push_back(std::move(e));
                sub->children.push_back(subscript_list());
                expect_op("]");
                e = finish(std::move(sub));
            } else if (at_op(".")) {
                advance();
                auto attr = make(ExprKind::Attribute, first);
                attr->children.push_back(std::move(e));
                attr->text = expect_name();
                e = finish(std::move(attr));
            } else {
                return e;
            }
        }
    }

    void arguments(Expr& call) {
        while (!at_op(")")) {
            const Token first = peek();
            if (at_op("**")) {
                advance();
                call.keywords.push_back({"", test()});
            } else if (at_op("*")) {
                call.children.push_back(star_expr());
            } else if (peek().type == TokenType::Name && at_op("=", 1)) {
                std::string name = expect_name();
                advance();
                call.keywords.push_back({std::move(name), test()});
            } else {
                ExprPtr arg = test();
                if (at_kw("for")) arg = comprehension(first, std::move(arg), nullptr, false);
                if (!call.keywords.empty()) fail("positional argument follows keyword argument");
                call.children.push_back(std::move(arg));
            }
            if (!at_op(")")) expect_op(",");
        }
    }

    ExprPtr subscript_list() {
        const Token first = peek();
        ExprPtr head = subscript();
        if (!at_op(",")) return head;
        auto t = make(ExprKind::Tuple, first);
        t->children.push_back(std::move(head));
        while (at_op(",")) {
            advance();
            if (at_op("]")) break;
            t->children.push_back(subscript());
        }
        return finish(std::move(t));
    }

    ExprPtr subscript() {
        const Token first = peek();
        ExprPtr lo;
        if (!at_op(":")) {
            lo = test();
            if (!at_op(":")) return lo;
        }
        auto s = make(ExprKind::Slice, first);
        s->children.push_back(std::move(lo));
        advance();
        s->children.push_back(at_op("]") || at_op(":") || at_op(",") ? nullptr : test());
        if (at_op(":")) {
            advance();
            s->children.push_back(at_op("]") || at_op(",") ? nullptr : test());
        }
        return finish(std::move(s));
    }

    ExprPtr comprehension(const Token& first, ExprPtr element, ExprPtr value, bool dict) {
        auto c = make(ExprKind::Comprehension, first);
        c->dict_comp = dict;
        c->children.push_back(std::move(element));
        if (value) c->children.push_back(std::move(value));
        while (at_kw("for")) {
            advance();
            ast::CompFor g;
            g.target = exprlist();
            expect_kw("in");
            g.iter = or_test();
            while (at_kw("if")) {
                advance();
                in_comp_if_ = true;
                g.conditions.push_back(or_test());
                in_comp_if_ = false;
            }
            c->generators.push_back(std::move(g));
        }
        return finish(std::move(c));
    }

    ExprPtr atom() {
        const Token first = peek();
        switch (first.type) {
        case TokenType::Number:
            advance();
            return finish(make(ExprKind::Constant, first, first.text));
        case TokenType::String: {
            auto e = make(ExprKind::Constant, first, advance().text);
            while (at(TokenType::String)) e->text += advance().text;
            return finish(std::move(e));
        }
        case TokenType::Name:
            if (first.text == "None" || first.text == "True" || first.text == "False") {
                advance();
                return finish(make(ExprKind::Constant, first, first.text));
            }
            if (is_keyword(first.text)) fail("unexpected keyword '" + first.text + "'");
            advance();
            return finish(make(ExprKind::Name, first, first.text));
        case TokenType::Op:
            break;
        default:
            fail("expected expression" + got());
        }
        if (at_op("...")) {
            advance();
            return finish(make(ExprKind::Constant, first, "..."));
        }
        if (at_op("(")) {
            advance();
            if (at_op(")")) {
                advance();
                return finish(make(ExprKind::Tuple, first));
            }
            ExprPtr head = at_op("*") ? star_expr() : test();
            if (at_kw("for")) {
                ExprPtr c = comprehension(first, std::move(head), nullptr, false);
                expect_op(")");
                return finish(std::move(c));
            }
            if (!at_op(",")) {
                expect_op(")");
                return head;
            }
            auto t = make(ExprKind::Tuple, first);
            t->children.push_back(std::move(head));
            while (at_op(",")) {
                advance();
                if (at_op(")")) break;
                t->children.push_back(at_op("*") ? star_expr() : test());
            }
            expect_op(")");
            return finish(std::move(t));
        }
        if (at_op("[")) {
            advance();
            auto l = make(ExprKind::List, first);
            if (!at_op("]")) {
                ExprPtr head = at_op("*") ? star_expr() : test();
                if (at_kw("for")) {
                    ExprPtr c = comprehension(first, std::move(head), nullptr, false);
                    expect_op("]");
                    return finish(std::move(c));
                }
                l->children.push_back(std::move(head));
                while (at_op(",")) {
                    advance();
                    if (at_op("]")) break;
                    l->children.push_back(at_op("*") ? star_expr() : test());
                }
            }
            expect_op("]");
            return finish(std::move(l));
        }
        if (at_op("{")) {
            advance();
            if (at_op("}")) {
                advance();
                return finish(make(ExprKind::Dict, first));
            }
            if (at_op("**")) return dict_rest(first, nullptr, nullptr);
            ExprPtr key = at_op("*") ? star_expr() : test();
            if (at_op(":")) {
                advance();
                ExprPtr value = test();
                if (at_kw("for")) {
                    ExprPtr c = comprehension(first, std::move(key), std::move(value), true);
                    expect_op("}");
                    return finish(std::move(c));
                }
                return dict_rest(first, std::move(key), std::move(value));
            }
            if (at_kw("for")) {
                ExprPtr c = comprehension(first, std::move(key), nullptr, false);
                expect_op("}");
                return finish(std::move(c));
            }
            auto s = make(ExprKind::Set, first);
            s->children.push_back(std::move(key));
            while (at_op(",")) {
                advance();
                if (at_op("}")) break;
                s->children.push_back(test());
            }
            expect_op("}");
            return finish(std::move(s));
        }
        fail("expected expression" + got());
    }

    ExprPtr dict_rest(const Token& first, ExprPtr key, ExprPtr value) {
        auto d = make(ExprKind::Dict, first);
        auto entry = [&](ExprPtr k, ExprPtr v) {
            d->children.push_back(std::move(k));
            d->children.push_back(std::move(v));
        };
        if (value) {
            entry(std::move(key), std::move(value));
        } else {
            advance();  // '**'
            entry(nullptr, expr());
        }
        while (at_op(",")) {
            advance();
            if (at_op("}")) break;
            if (at_op("**")) {
                advance();
                entry(nullptr, expr());
                continue;
            }
            ExprPtr k = test();
            expect_op(":");
            entry(std::move(k), test());
        }
        expect_op("}");
        return finish(std::move(d));
    }

    std::string_view text_;
    const std::string& file_;
    std::vector<Token> toks_;
    std::size_t i_ = 0;
    std::size_t last_end_ = 0;
    int last_line_ = 1;
    int kwonly_ = 0;
    bool in_comp_if_ = false;
};

} // namespace

bool is_keyword(std::string_view word) {
    return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

ast::Module parse_module(std::string_view text, const std::string& file) {
    return Parser(text, file).module();
}

ast::ExprPtr parse_expression(std::string_view text, const std::string& file) {
    return Parser(text, file).single_expression();
}

} // namespace codeplan
