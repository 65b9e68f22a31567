#include "codeplan/ast_walk.hpp"
#include "codeplan/change.hpp"
#include "codeplan/parser.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace codeplan {

namespace {

const std::set<std::string>& builtin_names() {
    static const std::set<std::string> names = {
        "abs", "all", "any", "bool", "bytes", "callable", "chr", "dict", "dir", "divmod", "enumerate", "filter",
        "float", "format", "frozenset", "getattr", "hasattr", "hash", "hex", "id", "int", "isinstance",
        "issubclass", "iter", "len", "list", "map", "max", "min", "next", "object", "open", "ord", "pow", "print",
        "range", "repr", "reversed", "round", "set", "setattr", "slice", "sorted", "str", "sum", "super", "tuple",
        "type", "zip", "None", "True", "False", "Exception", "ValueError", "TypeError", "KeyError", "IndexError",
        "RuntimeError", "NotImplementedError", "AttributeError", "StopIteration"};
    return names;
}

std::string dedent(const std::string& text) {
    std::size_t indent = 0;
    while (indent < text.size() && (text[indent] == ' ' || text[indent] == '\t')) ++indent;
    if (indent == 0) return text;
    std::istringstream in(text);
    std::string line, out;
    while (std::getline(in, line)) {
        std::size_t k = 0;
        while (k < indent && k < line.size() && (line[k] == ' ' || line[k] == '\t')) ++k;
        out += line.substr(k);
        out += '\n';
    }
    return out;
}

// One diffable unit: a simple statement, or the header of a compound
// statement / clause.
struct Unit {
    std::string norm;
    std::vector<std::string> local_seq;
    const ast::Stmt* stmt = nullptr;
    const ast::Clause* clause = nullptr;
    bool header = false;
};

struct Def {
    std::string text;
    ast::Module mod;
    const ast::Stmt* def = nullptr;
    std::vector<Token> toks;
    std::set<std::string> params;
    std::set<std::string> locals;
    std::vector<Unit> units;
};

void target_names(const ast::Expr* t, std::set<std::string>& out) {
    if (!t) return;
    if (t->kind == ast::ExprKind::Name) out.insert(t->text);
    else if (t->kind == ast::ExprKind::Tuple || t->kind == ast::ExprKind::List || t->kind == ast::ExprKind::Starred)
        for (const auto& c : t->children) target_names(c.get(), out);
}

void collect_locals(const ast::Stmt& def, std::set<std::string>& locals) {
    std::set<std::string> globals;
    ast::walk_stmts(def.body, [&](const ast::Stmt& s) {
        switch (s.kind) {
        case ast::StmtKind::Global:
        case ast::StmtKind::Nonlocal: globals.insert(s.names.begin(), s.names.end()); break;
        case ast::StmtKind::FunctionDef:
        case ast::StmtKind::ClassDef: locals.insert(s.name); break;
        case ast::StmtKind::Import:
        case ast::StmtKind::FromImport:
            for (const auto& n : s.imports) locals.insert(n.alias.empty() ? n.name.substr(0, n.name.find('.')) : n.alias);
            break;
        default:
            if (s.kind != ast::StmtKind::Delete && s.kind != ast::StmtKind::Expr)
                for (const auto& t : s.targets) target_names(t.get(), locals);
            break;
        }
        for (const auto& c : s.clauses)
            if (!c.bound_name.empty()) locals.insert(c.bound_name);
        ast::walk_stmt_exprs(s, [&](const ast::Expr& e) {
            for (const auto& g : e.generators) target_names(g.target.get(), locals);
            for (const auto& p : e.lambda_params) locals.insert(p);
        });
    });
    for (const auto& g : globals) locals.erase(g);
}

// Unit text with every local collapsed to one placeholder; the locals
// themselves are kept in order so renames can be checked for consistency.
void normalize(const Def& d, std::size_t start, std::size_t end, Unit& u) {
    for (const Token& t : d.toks) {
        if (t.start < start || t.end > end) continue;
        if (t.type == TokenType::Newline || t.type == TokenType::Indent || t.type == TokenType::Dedent ||
            t.type == TokenType::End)
            continue;
        if (t.type == TokenType::Name && d.locals.count(t.text)) {
            u.norm += "_v ";
            u.local_seq.push_back(t.text);
        } else {
            u.norm += t.text;
            u.norm += ' ';
        }
    }
}

void flatten(Def& d, const std::vector<ast::StmtPtr>& body) {
    for (const auto& s : body) {
        const bool compound = !s->body.empty() || !s->clauses.empty();
        Unit u;
        u.stmt = s.get();
        u.header = compound;
        if (compound) normalize(d, s->header.start, s->header.end, u);
        else normalize(d, s->span.start, s->span.end, u);
        d.units.push_back(std::move(u));
        flatten(d, s->body);
        for (const auto& c : s->clauses) {
            Unit cu;
            cu.stmt = s.get();
            cu.clause = &c;
            cu.header = true;
            normalize(d, c.header.start, c.header.end, cu);
            d.units.push_back(std::move(cu));
            flatten(d, c.body);
        }
    }
}

bool load(const std::string& text, Def& d) {
    d.text = dedent(text);
    try {
        d.mod = parse_module(d.text, "<escape>");
        d.toks = tokenize(d.text, "<escape>");
    } catch (const std::exception&) {
        return false;
    }
    if (d.mod.body.size() != 1 || d.mod.body.front()->kind != ast::StmtKind::FunctionDef) return false;
    d.def = d.mod.body.front().get();
    for (const auto& p : d.def->params)
        if (!p.name.empty()) d.params.insert(p.name);
    collect_locals(*d.def, d.locals);
    for (const auto& p : d.params) d.locals.erase(p);
    flatten(d, d.def->body);
    return true;
}

const ast::Expr* root_of(const ast::Expr* e) {
    while (e && (e->kind == ast::ExprKind::Attribute || e->kind == ast::ExprKind::Subscript ||
                 e->kind == ast::ExprKind::Call) && !e->children.empty())
        e = e->children[0].get();
    return e;
}

// Expressions evaluated by the unit itself (not by nested statements).
template <typename F>
void unit_exprs(const Unit& u, F&& f) {
    if (u.clause) {
        for (const auto& x : u.clause->exprs) f(x.get());
        return;
    }
    ast::for_each_own_expr(*u.stmt, [&](const ast::Expr* e) {
        if (e) f(e);
    });
}

class Scanner {
public:
    explicit Scanner(const Def& d) : d_(d) {}

    // Observable effect of the unit regardless of data flow.
    bool sink(const Unit& u) const {
        if (!u.clause) {
            switch (u.stmt->kind) {
            case ast::StmtKind::Return:
            case ast::StmtKind::Raise:
            case ast::StmtKind::Global:
            case ast::StmtKind::Nonlocal: return true;
            default: break;
            }
        }
        bool hit = false;
        unit_exprs(u, [&](const ast::Expr* e) { hit = hit || expr_escapes(e); });
        return hit;
    }

    // A compound header steers its whole body.
    bool body_sink(const Unit& u) const {
        const std::vector<ast::StmtPtr>& body = u.clause ? u.clause->body : u.stmt->body;
        bool hit = false;
        std::vector<Unit> nested;
        ast::walk_stmts(body, [&](const ast::Stmt& s) {
            Unit n;
            n.stmt = &s;
            if (sink(n)) hit = true;
            for (const auto& c : s.clauses) {
                Unit cn;
                cn.stmt = &s;
                cn.clause = &c;
                if (sink(cn)) hit = true;
            }
        });
        if (!u.clause && u.stmt->kind == ast::StmtKind::If) {
            for (const auto& c : u.stmt->clauses) {
                ast::walk_stmts(c.body, [&](const ast::Stmt& s) {
                    Unit n;
                    n.stmt = &s;
                    if (sink(n)) hit = true;
                });
            }
        }
        return hit;
    }

    std::set<std::string> reads(const Unit& u) const {
        std::set<std::string> out;
        unit_exprs(u, [&](const ast::Expr* e) {
            ast::walk_expr(e, [&](const ast::Expr& x) {
                if (x.kind == ast::ExprKind::Name && d_.locals.count(x.text)) out.insert(x.text);
            });
        });
        return out;
    }

    std::set<std::string> writes(const Unit& u) const {
        std::set<std::string> out;
        if (u.clause) {
            if (!u.clause->bound_name.empty()) out.insert(u.clause->bound_name);
            return out;
        }
        for (const auto& t : u.stmt->targets) target_names(t.get(), out);
        for (auto it = out.begin(); it != out.end();) it = d_.locals.count(*it) ? std::next(it) : out.erase(it);
        return out;
    }

private:
    bool expr_escapes(const ast::Expr* e) const {
        bool hit = false;
        walk(e, false, hit);
        return hit;
    }

    void walk(const ast::Expr* e, bool callee, bool& hit) const {
        if (!e || hit) return;
        switch (e->kind) {
        case ast::ExprKind::Name:
            if (!d_.locals.count(e->text) && !d_.params.count(e->text) && !builtin_names().count(e->text) && !callee)
                hit = true;
            return;
        case ast::ExprKind::Attribute:
        case ast::ExprKind::Subscript: {
            const ast::Expr* r = root_of(e);
            if (r && r->kind == ast::ExprKind::Name && d_.params.count(r->text)) {
                hit = true;
                return;
            }
            walk(e->children[0].get(), callee && e->kind == ast::ExprKind::Attribute, hit);
            for (std::size_t i = 1; i < e->children.size(); ++i) walk(e->children[i].get(), false, hit);
            return;
        }
        case ast::ExprKind::Call:
            walk(e->children[0].get(), true, hit);
            for (std::size_t i = 1; i < e->children.size(); ++i) walk(e->children[i].get(), false, hit);
            for (const auto& k : e->keywords) walk(k.value.get(), false, hit);
            return;
        default:
            for (const auto& c : e->children) walk(c.get(), false, hit);
            for (const auto& k : e->keywords) walk(k.value.get(), false, hit);
            for (const auto& g : e->generators) {
                walk(g.iter.get(), false, hit);
                for (const auto& c : g.conditions) walk(c.get(), false, hit);
            }
            return;
        }
    }

    const Def& d_;
};

// Indices of units outside a longest common subsequence.
void lcs_changes(const std::vector<Unit>& a, const std::vector<Unit>& b, std::vector<bool>& ca,
                 std::vector<bool>& cb) {
    const std::size_t n = a.size(), m = b.size();
    std::vector<std::vector<int>> t(n + 1, std::vector<int>(m + 1, 0));
    for (std::size_t i = n; i-- > 0;)
        for (std::size_t j = m; j-- > 0;)
            t[i][j] = a[i].norm == b[j].norm ? t[i + 1][j + 1] + 1 : std::max(t[i + 1][j], t[i][j + 1]);
    ca.assign(n, true);
    cb.assign(m, true);
    std::size_t i = 0, j = 0;
    while (i < n && j < m) {
        if (a[i].norm == b[j].norm) {
            ca[i++] = false;
            cb[j++] = false;
        } else if (t[i + 1][j] >= t[i][j + 1]) {
            ++i;
        } else {
            ++j;
        }
    }
}

// Matched units must rename locals one-to-one across the whole body; a pair
// that breaks the bijection is treated as changed.
void consistent_renames(const std::vector<Unit>& a, const std::vector<Unit>& b, std::vector<bool>& ca,
                        std::vector<bool>& cb) {
    std::map<std::string, std::string> fwd, back;
    std::size_t j = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (ca[i]) continue;
        while (cb[j]) ++j;
        bool ok = true;
        for (std::size_t k = 0; k < a[i].local_seq.size() && ok; ++k) {
            const std::string& x = a[i].local_seq[k];
            const std::string& y = b[j].local_seq[k];
            const auto f = fwd.find(x);
            const auto r = back.find(y);
            ok = (f == fwd.end() || f->second == y) && (r == back.end() || r->second == x);
            if (ok) {
                fwd[x] = y;
                back[y] = x;
            }
        }
        if (!ok) ca[i] = cb[j] = true;
        ++j;
    }
}

} // namespace

bool escapes(const std::string& before_def, const std::string& after_def) {
    Def b, a;
    if (!load(before_def, b) || !load(after_def, a)) return true;

    std::vector<bool> cb, ca;
    lcs_changes(b.units, a.units, cb, ca);
    consistent_renames(b.units, a.units, cb, ca);

    const Scanner sb(b), sa(a);
    for (std::size_t i = 0; i < b.units.size(); ++i) {
        if (!cb[i]) continue;
        if (sb.sink(b.units[i]) || (b.units[i].header && sb.body_sink(b.units[i]))) return true;
    }

    // Changed statements on the new side, plus locals they taint flowing
    // into later observable statements.
    std::set<std::string> tainted;
    for (std::size_t i = 0; i < a.units.size(); ++i) {
        if (!ca[i]) continue;
        if (sa.sink(a.units[i]) || (a.units[i].header && sa.body_sink(a.units[i]))) return true;
        for (const auto& w : sa.writes(a.units[i])) tainted.insert(w);
    }
    // Loops may carry taint backwards, so iterate to a fixpoint.
    for (bool grew = true; grew && !tainted.empty();) {
        grew = false;
        for (std::size_t i = 0; i < a.units.size(); ++i) {
            const std::set<std::string> r = sa.reads(a.units[i]);
            const bool reads_taint = std::any_of(r.begin(), r.end(), [&](const std::string& n) { return tainted.count(n); });
            if (!reads_taint) continue;
            if (sa.sink(a.units[i])) return true;
            if (a.units[i].header && sa.body_sink(a.units[i])) return true;
            for (const auto& w : sa.writes(a.units[i]))
                if (tainted.insert(w).second) grew = true;
        }
    }
    return false;
}

} // namespace codeplan
