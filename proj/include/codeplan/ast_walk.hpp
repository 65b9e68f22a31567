#pragma once

#include "codeplan/ast.hpp"

namespace codeplan::ast {

// Pre-order walk over an expression tree, including comprehension parts and
// call keywords. Null children (open slice bounds, ** dict entries) skipped.
template <typename F>
void walk_expr(const Expr* e, F&& f) {
    if (!e) return;
    f(*e);
    for (const auto& c : e->children) walk_expr(c.get(), f);
    for (const auto& k : e->keywords) walk_expr(k.value.get(), f);
    for (const auto& g : e->generators) {
        walk_expr(g.target.get(), f);
        walk_expr(g.iter.get(), f);
        for (const auto& c : g.conditions) walk_expr(c.get(), f);
    }
}

// Expressions owned directly by a statement (not by nested statements).
template <typename F>
void for_each_own_expr(const Stmt& s, F&& f) {
    for (const auto& t : s.targets) f(t.get());
    if (s.value) f(s.value.get());
    if (s.annotation) f(s.annotation.get());
    for (const auto& x : s.extra) f(x.get());
    for (const auto& c : s.clauses)
        for (const auto& x : c.exprs) f(x.get());
}

// Walk every expression in a statement and all nested statements. Function
// and class definitions nested inside are included (defaults, bases, bodies).
template <typename F>
void walk_stmt_exprs(const Stmt& s, F&& f) {
    for_each_own_expr(s, [&](const Expr* e) { walk_expr(e, f); });
    for (const auto& p : s.params) {
        walk_expr(p.annotation.get(), f);
        walk_expr(p.default_value.get(), f);
    }
    walk_expr(s.returns.get(), f);
    for (const auto& b : s.bases) walk_expr(b.get(), f);
    for (const auto& c : s.body) walk_stmt_exprs(*c, f);
    for (const auto& cl : s.clauses)
        for (const auto& c : cl.body) walk_stmt_exprs(*c, f);
}

// Every statement nested in a body, pre-order.
template <typename F>
void walk_stmts(const std::vector<StmtPtr>& body, F&& f) {
    for (const auto& s : body) {
        f(*s);
        walk_stmts(s->body, f);
        for (const auto& cl : s->clauses) walk_stmts(cl.body, f);
    }
}

} // namespace codeplan::ast
