#include "codeplan/analysis.hpp"
#include "codeplan/parser.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace codeplan {

namespace {

const std::set<std::string>& builtins() {
    static const std::set<std::string> names = {
        "abs", "all", "any", "ascii", "bin", "bool", "breakpoint", "bytearray", "bytes", "callable", "chr",
        "classmethod", "compile", "complex", "delattr", "dict", "dir", "divmod", "enumerate", "eval", "exec",
        "filter", "float", "format", "frozenset", "getattr", "globals", "hasattr", "hash", "help", "hex", "id",
        "input", "int", "isinstance", "issubclass", "iter", "len", "list", "locals", "map", "max", "memoryview",
        "min", "next", "object", "oct", "open", "ord", "pow", "print", "property", "range", "repr", "reversed",
        "round", "set", "setattr", "slice", "sorted", "staticmethod", "str", "sum", "super", "tuple", "type",
        "vars", "zip", "__name__", "__file__", "__doc__", "None", "True", "False", "NotImplemented", "Ellipsis",
        "Exception", "BaseException", "ValueError", "TypeError", "KeyError", "IndexError", "AttributeError",
        "RuntimeError", "NotImplementedError", "StopIteration", "AssertionError", "ImportError", "OSError",
        "IOError", "FileNotFoundError", "ZeroDivisionError", "ArithmeticError", "LookupError", "NameError",
        "KeyboardInterrupt", "SystemExit", "PermissionError", "TimeoutError", "UnicodeError", "OverflowError",
        "RecursionError", "Warning", "DeprecationWarning", "UserWarning"};
    return names;
}

struct Ty {
    enum class K { Unknown, Instance, ClassObj, Function, Module, Super };
    K k = K::Unknown;
    std::string name;    // class / function qname, module name
    bool bound = false;  // Function reached through an instance or super()

    static Ty unknown() { return {}; }
    static Ty of(K k, std::string n, bool bound = false) { return Ty{k, std::move(n), bound}; }
};

struct MemberHit {
    const ClassInfo* owner = nullptr;
    const FieldInfo* field = nullptr;
    const FunctionInfo* method = nullptr;
    bool complete = true;  // hierarchy fully inside the repository
};

using Scope = std::map<std::string, Ty>;

class Analyzer {
public:
    Analyzer(const SymbolIndex& ix, const ModuleInfo& mod, const CodeBlock& blk, BlockAnalysis& out)
        : ix_(ix), mod_(mod), blk_(blk), out_(out) {}

    void run() {
        const ast::Stmt& s = *blk_.node;
        switch (blk_.kind) {
        case BlockKind::Class: class_block(s); break;
        case BlockKind::Method:
        case BlockKind::Constructor: function_block(s); break;
        case BlockKind::Field: field_block(s); break;
        case BlockKind::Statement: statements_at_module(s); break;
        case BlockKind::Import: import_block(s); break;
        default: break;
        }
        std::sort(edges_.begin(), edges_.end());
        edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
        out_.edges = std::move(edges_);
    }

private:
    // -- helpers ---------------------------------------------------------

    void edge(RelationLabel l, const BlockId& dst) {
        if (!dst.empty() && dst != blk_.id) edges_.emplace_back(l, dst);
    }
    void touch(const std::string& key) { out_.footprint.insert(key); }

    void report(Finding::Kind k, int line, std::string msg) {
        if (line <= 0) return;
        out_.findings.push_back(Finding{k, mod_.file, line, std::move(msg)});
    }

    const ClassInfo* enclosing_class() const {
        if (!blk_.parent) return nullptr;
        for (const auto& [n, cq] : mod_.classes) {
            const ClassInfo* ci = ix_.cls(cq);
            if (ci && ci->block == *blk_.parent) return ci;
        }
        return nullptr;
    }

    // Walks the class chain from cls upward looking for attr.
    MemberHit lookup_member(const std::string& cls, const std::string& attr) {
        MemberHit hit;
        std::set<std::string> seen;
        for (std::string c = cls; !c.empty() && seen.insert(c).second; c = ix_.base_of(c)) {
            touch("member:" + c + "." + attr);
            touch("class:" + c);
            const ClassInfo* ci = ix_.cls(c);
            if (!ci) {
                hit.complete = false;
                return hit;
            }
            if (auto it = ci->methods.find(attr); it != ci->methods.end()) {
                hit.owner = ci;
                hit.method = ix_.function(it->second);
                return hit;
            }
            if (auto it = ci->fields.find(attr); it != ci->fields.end()) {
                hit.owner = ci;
                hit.field = &it->second;
                return hit;
            }
            if (ix_.has_external_base(c)) hit.complete = false;
        }
        return hit;
    }

    // Transitive subclasses; records the lookups so hierarchy edits
    // re-trigger this analysis.
    std::vector<std::string> all_subclasses(const std::string& cls) {
        std::vector<std::string> out;
        std::vector<std::string> work{cls};
        std::set<std::string> seen{cls};
        while (!work.empty()) {
            const std::string c = work.back();
            work.pop_back();
            touch("subclasses:" + c);
            for (const auto& s : ix_.direct_subclasses(c)) {
                if (!seen.insert(s).second) continue;
                out.push_back(s);
                work.push_back(s);
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    Ty symbol_in_module(const std::string& module, const std::string& sym, bool own_import_edge, int line,
                        int depth = 0) {
        touch("module:" + module);
        const ModuleInfo* m = ix_.module(module);
        if (!m) {
            // Could be a package whose submodule is asked for.
            if (ix_.module(module + "." + sym)) return Ty::of(Ty::K::Module, module + "." + sym);
            return Ty::unknown();  // external library
        }
        touch("symbol:" + module + "." + sym);
        if (auto it = m->functions.find(sym); it != m->functions.end()) return Ty::of(Ty::K::Function, it->second);
        if (auto it = m->classes.find(sym); it != m->classes.end()) return Ty::of(Ty::K::ClassObj, it->second);
        if (auto it = m->imports.find(sym); it != m->imports.end()) {
            if (own_import_edge) edge(RelationLabel::Imports, it->second.block);
            if (depth > 8) return Ty::unknown();
            return follow_import(it->second, line, depth + 1);
        }
        if (m->globals.count(sym)) return Ty::unknown();
        touch("module:" + module + "." + sym);
        if (ix_.module(module + "." + sym)) return Ty::of(Ty::K::Module, module + "." + sym);
        report(Finding::Kind::UnresolvedName, line, "module '" + module + "' has no attribute '" + sym + "'");
        return Ty::unknown();
    }

    Ty follow_import(const ImportBinding& ib, int line, int depth) {
        if (ib.symbol.empty()) {
            touch("module:" + ib.module);
            return ix_.module(ib.module) ? Ty::of(Ty::K::Module, ib.module) : Ty::unknown();
        }
        return symbol_in_module(ib.module, ib.symbol, false, line, depth);
    }

    bool is_local(const std::string& name) const {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it)
            if (it->count(name)) return true;
        return false;
    }

    // Module-scope lookup in this block's module. Adds the Imports edge when
    // own is set (the expression belongs to this block).
    Ty module_name(const std::string& name, int line, bool own) {
        touch("symbol:" + mod_.name + "." + name);
        if (auto it = mod_.functions.find(name); it != mod_.functions.end())
            return Ty::of(Ty::K::Function, it->second);
        if (auto it = mod_.classes.find(name); it != mod_.classes.end()) return Ty::of(Ty::K::ClassObj, it->second);
        if (auto it = mod_.imports.find(name); it != mod_.imports.end()) {
            if (own) edge(RelationLabel::Imports, it->second.block);
            return follow_import(it->second, line, 0);
        }
        if (mod_.globals.count(name)) return Ty::unknown();
        if (builtins().count(name)) return Ty::unknown();
        if (own) report(Finding::Kind::UnresolvedName, line, "name '" + name + "' is not defined");
        return Ty::unknown();
    }

    Ty name(const std::string& n, int line) {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
            auto f = it->find(n);
            if (f != it->end()) return f->second;
        }
        return module_name(n, line, true);
    }

    // Annotation expression to an instance type. Resolved in the module
    // that declares it; foreign annotations never add edges.
    Ty annotation(const ast::Expr* e, const ModuleInfo& where, bool own) {
        if (!e) return Ty::unknown();
        switch (e->kind) {
        case ast::ExprKind::Constant: {
            if (e->text.size() < 2 || (e->text.front() != '"' && e->text.front() != '\'')) return Ty::unknown();
            try {
                ast::ExprPtr inner = parse_expression(e->text.substr(1, e->text.size() - 2), where.file);
                // Spans of the re-parsed text are meaningless; type only.
                return annotation(inner.get(), where, own);
            } catch (const std::exception&) {
                return Ty::unknown();
            }
        }
        case ast::ExprKind::Name: {
            if (&where == &mod_) {
                Ty t = module_name(e->text, e->span.start_line, own);
                return t.k == Ty::K::ClassObj ? Ty::of(Ty::K::Instance, t.name) : Ty::unknown();
            }
            Ty t = foreign_name(where, e->text);
            return t.k == Ty::K::ClassObj ? Ty::of(Ty::K::Instance, t.name) : Ty::unknown();
        }
        case ast::ExprKind::Attribute: {
            Ty base = Ty::unknown();
            if (e->children[0]->kind == ast::ExprKind::Name) {
                base = &where == &mod_ ? module_name(e->children[0]->text, e->span.start_line, own)
                                       : foreign_name(where, e->children[0]->text);
            }
            if (base.k != Ty::K::Module) return Ty::unknown();
            Ty t = symbol_in_module(base.name, e->text, false, e->span.start_line);
            return t.k == Ty::K::ClassObj ? Ty::of(Ty::K::Instance, t.name) : Ty::unknown();
        }
        case ast::ExprKind::Subscript: {
            // Optional[X] resolves to X; anything else is opaque.
            const ast::Expr* head = e->children[0].get();
            const std::string& h = head->text;
            if ((head->kind == ast::ExprKind::Name || head->kind == ast::ExprKind::Attribute) && h == "Optional")
                return annotation(e->children[1].get(), where, own);
            return Ty::unknown();
        }
        default: return Ty::unknown();
        }
    }

    Ty foreign_name(const ModuleInfo& where, const std::string& n) {
        touch("symbol:" + where.name + "." + n);
        if (auto it = where.classes.find(n); it != where.classes.end()) return Ty::of(Ty::K::ClassObj, it->second);
        if (auto it = where.imports.find(n); it != where.imports.end()) return follow_import(it->second, 0, 0);
        return Ty::unknown();
    }

    const ModuleInfo& module_of(const std::string& module) const {
        const ModuleInfo* m = ix_.module(module);
        return m ? *m : mod_;
    }

    Ty return_type(const FunctionInfo& f) {
        return annotation(f.returns, module_of(f.module), false);
    }

    std::string display(const FunctionInfo& f) const {
        if (f.owner.empty()) return f.name;
        const ClassInfo* c = ix_.cls(f.owner);
        const std::string cn = c ? c->name : f.owner;
        return f.is_constructor ? cn : cn + "." + f.name;
    }

    void check_arity(const std::vector<ParamInfo>& params, const std::string& what, const ast::Expr& call) {
        const int line = call.span.start_line;
        bool star = false;
        int positional = 0;
        for (std::size_t i = 1; i < call.children.size(); ++i) {
            if (call.children[i]->kind == ast::ExprKind::Starred) star = true;
            else ++positional;
        }
        bool kw_splat = false;
        for (const auto& k : call.keywords)
            if (k.name.empty()) kw_splat = true;

        bool has_var = false, has_kw = false;
        std::vector<const ParamInfo*> pos;
        for (const auto& p : params) {
            if (p.var_args) has_var = true;
            else if (p.kw_args) has_kw = true;
            else if (!p.kw_only) pos.push_back(&p);
        }
        std::set<std::string> bound;
        if (!star) {
            if (positional > static_cast<int>(pos.size()) && !has_var) {
                report(Finding::Kind::TooManyArguments, line,
                       "call to '" + what + "' takes " + std::to_string(pos.size()) + " positional argument" +
                           (pos.size() == 1 ? "" : "s") + " but " + std::to_string(positional) + " were given");
            }
            for (int i = 0; i < positional && i < static_cast<int>(pos.size()); ++i) bound.insert(pos[i]->name);
        }
        for (const auto& k : call.keywords) {
            if (k.name.empty()) continue;
            const bool known = std::any_of(params.begin(), params.end(), [&](const ParamInfo& p) {
                return !p.var_args && !p.kw_args && p.name == k.name;
            });
            if (known) bound.insert(k.name);
            else if (!has_kw)
                report(Finding::Kind::UnexpectedKeyword, line,
                       "call to '" + what + "' got an unexpected keyword argument '" + k.name + "'");
        }
        if (star || kw_splat) return;
        for (const auto& p : params) {
            if (p.var_args || p.kw_args || bound.count(p.name)) continue;
            if (!p.has_default) {
                report(Finding::Kind::MissingArgument, line,
                       "call to '" + what + "' is missing required argument '" + p.name + "'");
            } else {
                report(Finding::Kind::OmittedDefault, line,
                       "call to '" + what + "' omits defaulted argument '" + p.name + "'");
            }
        }
    }

    // -- expressions -----------------------------------------------------

    Ty expr(const ast::Expr* e) {
        if (!e) return Ty::unknown();
        switch (e->kind) {
        case ast::ExprKind::Name: return name(e->text, e->span.start_line);
        case ast::ExprKind::Attribute: return attribute(*e, false);
        case ast::ExprKind::Call: return call(*e);
        case ast::ExprKind::Subscript: {
            Ty v = expr(e->children[0].get());
            expr(e->children[1].get());
            if (v.k == Ty::K::Instance) {
                MemberHit h = lookup_member(v.name, "__getitem__");
                if (!h.method && h.complete) {
                    const ClassInfo* c = ix_.cls(v.name);
                    report(Finding::Kind::NotSubscriptable, e->span.start_line,
                           "'" + (c ? c->name : v.name) + "' object is not subscriptable");
                }
            }
            return Ty::unknown();
        }
        case ast::ExprKind::Lambda: {
            Scope s;
            for (const auto& p : e->lambda_params) s[p] = Ty::unknown();
            scopes_.push_back(std::move(s));
            expr(e->children[0].get());
            scopes_.pop_back();
            return Ty::unknown();
        }
        case ast::ExprKind::Comprehension: {
            scopes_.emplace_back();
            for (const auto& g : e->generators) {
                expr(g.iter.get());
                std::set<std::string> bound;
                collect_target_names(g.target.get(), bound);
                for (const auto& n : bound) scopes_.back()[n] = Ty::unknown();
                for (const auto& c : g.conditions) expr(c.get());
            }
            for (const auto& c : e->children) expr(c.get());
            scopes_.pop_back();
            return Ty::unknown();
        }
        default:
            for (const auto& c : e->children) expr(c.get());
            for (const auto& k : e->keywords) expr(k.value.get());
            return Ty::unknown();
        }
    }

    Ty attribute_of(const Ty& v, const std::string& attr, int line, bool store) {
        switch (v.k) {
        case Ty::K::Instance:
        case Ty::K::ClassObj: {
            MemberHit h = lookup_member(v.name, attr);
            if (h.field) {
                if (!h.field->block.empty()) edge(RelationLabel::Uses, h.field->block);
                return annotation(h.field->annotation, module_of(h.owner->module), false);
            }
            if (h.method) return Ty::of(Ty::K::Function, h.method->qname, v.k == Ty::K::Instance);
            if (h.complete && !store && !(attr.size() > 4 && attr.rfind("__", 0) == 0)) {
                const ClassInfo* c = ix_.cls(v.name);
                const std::string cn = c ? c->name : v.name;
                report(Finding::Kind::UnknownAttribute, line,
                       v.k == Ty::K::Instance ? "'" + cn + "' object has no attribute '" + attr + "'"
                                              : "type object '" + cn + "' has no attribute '" + attr + "'");
            }
            return Ty::unknown();
        }
        case Ty::K::Module: return symbol_in_module(v.name, attr, false, line);
        case Ty::K::Super: {
            const std::string base = ix_.base_of(v.name);
            touch("class:" + v.name);
            if (base.empty()) return Ty::unknown();
            MemberHit h = lookup_member(base, attr);
            if (h.method) return Ty::of(Ty::K::Function, h.method->qname, true);
            if (h.field && !h.field->block.empty()) edge(RelationLabel::Uses, h.field->block);
            return Ty::unknown();
        }
        default: return Ty::unknown();
        }
    }

    Ty attribute(const ast::Expr& e, bool store) {
        Ty v = expr(e.children[0].get());
        return attribute_of(v, e.text, e.span.start_line, store);
    }

    Ty call(const ast::Expr& e) {
        for (std::size_t i = 1; i < e.children.size(); ++i) expr(e.children[i].get());
        for (const auto& k : e.keywords) expr(k.value.get());
        const ast::Expr& fn = *e.children[0];

        if (fn.kind == ast::ExprKind::Name && fn.text == "super" && !is_local("super")) {
            const ClassInfo* c = enclosing_class();
            return c ? Ty::of(Ty::K::Super, c->qname) : Ty::unknown();
        }

        Ty receiver;
        Ty callee;
        if (fn.kind == ast::ExprKind::Attribute) {
            receiver = expr(fn.children[0].get());
            callee = attribute_of(receiver, fn.text, fn.span.start_line, false);
        } else {
            callee = expr(&fn);
        }

        switch (callee.k) {
        case Ty::K::Function: {
            const FunctionInfo* f = ix_.function(callee.name);
            if (!f) return Ty::unknown();
            edge(RelationLabel::Calls, f->block);
            // Class-hierarchy analysis: any override below the static
            // receiver type may be the runtime target.
            if (receiver.k == Ty::K::Instance && callee.bound) {
                for (const auto& sub : all_subclasses(receiver.name)) {
                    touch("member:" + sub + "." + f->name);
                    const ClassInfo* sc = ix_.cls(sub);
                    if (!sc) continue;
                    if (auto it = sc->methods.find(f->name); it != sc->methods.end())
                        if (const FunctionInfo* o = ix_.function(it->second)) edge(RelationLabel::Calls, o->block);
                }
            }
            if (f->owner.empty() || callee.bound) check_arity(f->params, display(*f), e);
            return return_type(*f);
        }
        case Ty::K::ClassObj: {
            const ClassInfo* c = ix_.cls(callee.name);
            if (!c) return Ty::unknown();
            edge(RelationLabel::Instantiates, c->block);
            MemberHit h = lookup_member(c->qname, "__init__");
            if (h.method) check_arity(h.method->params, c->name, e);
            else if (h.complete) check_arity({}, c->name, e);
            return Ty::of(Ty::K::Instance, c->qname);
        }
        default: return Ty::unknown();
        }
    }

    // -- statements ------------------------------------------------------

    static void collect_target_names(const ast::Expr* t, std::set<std::string>& out) {
        if (!t) return;
        if (t->kind == ast::ExprKind::Name) out.insert(t->text);
        else if (t->kind == ast::ExprKind::Tuple || t->kind == ast::ExprKind::List ||
                 t->kind == ast::ExprKind::Starred)
            for (const auto& c : t->children) collect_target_names(c.get(), out);
    }

    void bind_target(const ast::Expr* t, const Ty& type, bool annotate_only) {
        if (!t) return;
        switch (t->kind) {
        case ast::ExprKind::Name:
            if (!scopes_.empty() && !globals_.count(t->text)) {
                for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
                    if (it->count(t->text) || std::next(it) == scopes_.rend()) {
                        (*it)[t->text] = type;
                        break;
                    }
                }
            } else if (annotate_only) {
                touch("symbol:" + mod_.name + "." + t->text);
            }
            break;
        case ast::ExprKind::Attribute: attribute(*t, true); break;
        case ast::ExprKind::Subscript:
            expr(t->children[0].get());
            expr(t->children[1].get());
            break;
        case ast::ExprKind::Tuple:
        case ast::ExprKind::List:
            for (const auto& c : t->children) bind_target(c.get(), Ty::unknown(), annotate_only);
            break;
        case ast::ExprKind::Starred: bind_target(t->children[0].get(), Ty::unknown(), annotate_only); break;
        default: expr(t); break;
        }
    }

    void stmts(const std::vector<ast::StmtPtr>& body) {
        for (const auto& s : body) stmt(*s);
    }

    void stmt(const ast::Stmt& s) {
        switch (s.kind) {
        case ast::StmtKind::Assign: {
            Ty t = expr(s.value.get());
            for (const auto& target : s.targets) bind_target(target.get(), t, false);
            break;
        }
        case ast::StmtKind::AnnAssign: {
            Ty a = annotation(s.annotation.get(), mod_, true);
            Ty v = expr(s.value.get());
            for (const auto& target : s.targets) bind_target(target.get(), a.k == Ty::K::Unknown ? v : a, true);
            break;
        }
        case ast::StmtKind::AugAssign:
            for (const auto& target : s.targets) expr(target.get());
            expr(s.value.get());
            break;
        case ast::StmtKind::For:
            expr(s.value.get());
            for (const auto& target : s.targets) bind_target(target.get(), Ty::unknown(), false);
            stmts(s.body);
            for (const auto& c : s.clauses) stmts(c.body);
            break;
        case ast::StmtKind::With:
            for (const auto& x : s.extra) expr(x.get());
            for (const auto& target : s.targets) bind_target(target.get(), Ty::unknown(), false);
            stmts(s.body);
            break;
        case ast::StmtKind::Try:
            stmts(s.body);
            for (const auto& c : s.clauses) {
                for (const auto& x : c.exprs) expr(x.get());
                if (!c.bound_name.empty() && !scopes_.empty()) scopes_.back()[c.bound_name] = Ty::unknown();
                stmts(c.body);
            }
            break;
        case ast::StmtKind::If:
        case ast::StmtKind::While:
            expr(s.value.get());
            stmts(s.body);
            for (const auto& c : s.clauses) {
                for (const auto& x : c.exprs) expr(x.get());
                stmts(c.body);
            }
            break;
        case ast::StmtKind::FunctionDef: {
            for (const auto& p : s.params) {
                annotation(p.annotation.get(), mod_, true);
                expr(p.default_value.get());
            }
            annotation(s.returns.get(), mod_, true);
            if (!scopes_.empty()) scopes_.back()[s.name] = Ty::unknown();
            Scope inner;
            for (const auto& p : s.params)
                if (!p.name.empty()) inner[p.name] = Ty::unknown();
            collect_locals(s.body, inner);
            scopes_.push_back(std::move(inner));
            stmts(s.body);
            scopes_.pop_back();
            break;
        }
        case ast::StmtKind::ClassDef:
            for (const auto& b : s.bases) expr(b.get());
            if (!scopes_.empty()) scopes_.back()[s.name] = Ty::unknown();
            stmts(s.body);
            break;
        case ast::StmtKind::Import:
        case ast::StmtKind::FromImport:
            if (!scopes_.empty())
                for (const auto& n : s.imports)
                    scopes_.back()[n.alias.empty() ? n.name.substr(0, n.name.find('.')) : n.alias] = Ty::unknown();
            break;
        case ast::StmtKind::Global:
        case ast::StmtKind::Nonlocal:
        case ast::StmtKind::Pass:
        case ast::StmtKind::Break:
        case ast::StmtKind::Continue: break;
        default:
            for (const auto& target : s.targets) expr(target.get());
            expr(s.value.get());
            for (const auto& x : s.extra) expr(x.get());
            break;
        }
    }

    // Names bound anywhere in a function body are local throughout it.
    void collect_locals(const std::vector<ast::StmtPtr>& body, Scope& scope) {
        std::set<std::string> names;
        std::set<std::string> globals;
        auto targets = [&](const ast::Expr* t) { collect_target_names(t, names); };
        std::function<void(const std::vector<ast::StmtPtr>&)> walk = [&](const std::vector<ast::StmtPtr>& b) {
            for (const auto& s : b) {
                switch (s->kind) {
                case ast::StmtKind::Assign:
                case ast::StmtKind::AnnAssign:
                case ast::StmtKind::AugAssign:
                case ast::StmtKind::For:
                case ast::StmtKind::With:
                    for (const auto& t : s->targets) targets(t.get());
                    break;
                case ast::StmtKind::FunctionDef:
                case ast::StmtKind::ClassDef: names.insert(s->name); continue;
                case ast::StmtKind::Import:
                case ast::StmtKind::FromImport:
                    for (const auto& n : s->imports)
                        names.insert(n.alias.empty() ? n.name.substr(0, n.name.find('.')) : n.alias);
                    break;
                case ast::StmtKind::Global:
                    for (const auto& n : s->names) globals.insert(n);
                    break;
                case ast::StmtKind::Nonlocal:
                    for (const auto& n : s->names) globals.insert(n);
                    break;
                default: break;
                }
                walk(s->body);
                for (const auto& c : s->clauses) {
                    if (!c.bound_name.empty()) names.insert(c.bound_name);
                    walk(c.body);
                }
            }
        };
        walk(body);
        for (const auto& g : globals) {
            names.erase(g);
            globals_.insert(g);
        }
        for (const auto& n : names) scope.emplace(n, Ty::unknown());
    }

    // -- block kinds -----------------------------------------------------

    void function_block(const ast::Stmt& def) {
        const ClassInfo* cls = enclosing_class();
        Scope scope;
        for (std::size_t i = 0; i < def.params.size(); ++i) {
            const ast::Param& p = def.params[i];
            if (p.name.empty()) continue;
            Ty t = annotation(p.annotation.get(), mod_, true);
            if (i == 0 && cls && p.kind == ast::Param::Kind::Normal) t = Ty::of(Ty::K::Instance, cls->qname);
            scope[p.name] = t;
            expr(p.default_value.get());
        }
        annotation(def.returns.get(), mod_, true);
        collect_locals(def.body, scope);
        // Parameters keep their annotated types even if reassigned later.
        for (const auto& p : def.params)
            if (!p.name.empty() && !scope.count(p.name)) scope[p.name] = Ty::unknown();
        scopes_.push_back(std::move(scope));
        stmts(def.body);
        scopes_.pop_back();

        if (cls && blk_.kind == BlockKind::Method) {
            touch("class:" + cls->qname);
            std::set<std::string> seen{cls->qname};
            for (std::string b = ix_.base_of(cls->qname); !b.empty() && seen.insert(b).second; b = ix_.base_of(b)) {
                touch("member:" + b + "." + def.name);
                touch("class:" + b);
                const ClassInfo* bc = ix_.cls(b);
                if (!bc) break;
                if (auto it = bc->methods.find(def.name); it != bc->methods.end()) {
                    if (const FunctionInfo* o = ix_.function(it->second)) edge(RelationLabel::Overrides, o->block);
                    break;
                }
            }
        }
    }

    void class_block(const ast::Stmt& s) {
        touch("class:" + blk_.qualified_name);
        if (s.bases.empty()) return;
        const ast::Expr* b = s.bases.front().get();
        if (b->kind == ast::ExprKind::Name && b->text == "object") return;
        expr(b);
        const std::string base = ix_.base_of(blk_.qualified_name);
        if (const ClassInfo* bc = base.empty() ? nullptr : ix_.cls(base)) edge(RelationLabel::BaseClassOf, bc->block);
    }

    void field_block(const ast::Stmt& s) {
        annotation(s.annotation.get(), mod_, true);
        expr(s.value.get());
    }

    void statements_at_module(const ast::Stmt& s) { stmt(s); }

    void import_block(const ast::Stmt& s) {
        if (s.kind != ast::StmtKind::FromImport) return;
        for (const auto& n : s.imports) {
            if (n.name == "*") continue;
            ImportBinding ib;
            ib.module = mod_.imports.count(n.alias.empty() ? n.name : n.alias)
                            ? mod_.imports.at(n.alias.empty() ? n.name : n.alias).module
                            : s.module;
            ib.symbol = n.name;
            follow_import(ib, s.span.start_line, 0);
        }
    }

    const SymbolIndex& ix_;
    const ModuleInfo& mod_;
    const CodeBlock& blk_;
    BlockAnalysis& out_;
    std::vector<std::pair<RelationLabel, BlockId>> edges_;
    std::vector<Scope> scopes_;
    std::set<std::string> globals_;
};

} // namespace

BlockAnalysis analyze_block(const CodeBlock& block, const SymbolIndex& index) {
    BlockAnalysis out;
    if (!block.node || block.kind == BlockKind::Module) return out;
    const ModuleInfo* mod = index.module_of_file(block.file);
    if (!mod) return out;
    Analyzer(index, *mod, block, out).run();
    return out;
}

} // namespace codeplan
