#include "codeplan/analysis.hpp"
#include "codeplan/ast_walk.hpp"

namespace codeplan {

namespace {

std::vector<ParamInfo> param_infos(const ast::Stmt& def, bool skip_receiver) {
    std::vector<ParamInfo> out;
    bool kw_only = false;
    bool skipped = !skip_receiver;
    for (const auto& p : def.params) {
        if (!skipped && p.kind == ast::Param::Kind::Normal) {
            skipped = true;
            continue;
        }
        if (p.kind == ast::Param::Kind::KwOnlyMarker) {
            kw_only = true;
            continue;
        }
        ParamInfo pi;
        pi.name = p.name;
        pi.has_default = p.default_value != nullptr;
        pi.kw_only = kw_only;
        pi.var_args = p.kind == ast::Param::Kind::VarArgs;
        pi.kw_args = p.kind == ast::Param::Kind::KwArgs;
        pi.annotation = p.annotation.get();
        if (pi.var_args) kw_only = true;
        out.push_back(std::move(pi));
    }
    return out;
}

// "from ..x import y" inside package a.b.c resolves against a.b.
std::string absolute_module(const std::string& current, const std::string& target) {
    if (target.empty() || target[0] != '.') return target;
    std::size_t dots = 0;
    while (dots < target.size() && target[dots] == '.') ++dots;
    std::string pkg = current;
    for (std::size_t i = 0; i < dots; ++i) {
        const std::size_t cut = pkg.rfind('.');
        pkg = cut == std::string::npos ? std::string() : pkg.substr(0, cut);
    }
    const std::string rest = target.substr(dots);
    if (pkg.empty()) return rest;
    return rest.empty() ? pkg : pkg + "." + rest;
}

void collect_assigned_names(const ast::Expr* t, std::set<std::string>& out) {
    if (!t) return;
    switch (t->kind) {
    case ast::ExprKind::Name: out.insert(t->text); break;
    case ast::ExprKind::Tuple:
    case ast::ExprKind::List:
    case ast::ExprKind::Starred:
        for (const auto& c : t->children) collect_assigned_names(c.get(), out);
        break;
    default: break;
    }
}

// Module-level names bound by plain statements, including those nested in
// module-level if/try/for/with bodies.
void collect_globals(const std::vector<ast::StmtPtr>& body, std::set<std::string>& out, bool top) {
    for (const auto& s : body) {
        switch (s->kind) {
        case ast::StmtKind::Assign:
        case ast::StmtKind::AnnAssign:
        case ast::StmtKind::AugAssign:
        case ast::StmtKind::For:
        case ast::StmtKind::With:
            for (const auto& t : s->targets) collect_assigned_names(t.get(), out);
            break;
        case ast::StmtKind::FunctionDef:
        case ast::StmtKind::ClassDef:
            if (!top) out.insert(s->name);
            break;
        case ast::StmtKind::Import:
        case ast::StmtKind::FromImport:
            if (!top)
                for (const auto& n : s->imports) out.insert(n.alias.empty() ? n.name : n.alias);
            break;
        default: break;
        }
        if (s->kind == ast::StmtKind::FunctionDef || s->kind == ast::StmtKind::ClassDef) {
            // `global x` inside a function also binds a module name.
            ast::walk_stmts(s->body, [&](const ast::Stmt& inner) {
                if (inner.kind == ast::StmtKind::Global)
                    for (const auto& n : inner.names) out.insert(n);
            });
            continue;
        }
        collect_globals(s->body, out, false);
        for (const auto& c : s->clauses) {
            if (!c.bound_name.empty()) out.insert(c.bound_name);
            collect_globals(c.body, out, false);
        }
    }
}

} // namespace

std::shared_ptr<const SymbolIndex> SymbolIndex::build(const Repository& repo) {
    auto ix = std::make_shared<SymbolIndex>();
    for (const auto& [path, pf] : repo.files()) {
        if (!pf->tree) continue;
        ModuleInfo mi;
        mi.name = pf->module_name;
        mi.file = path;
        mi.parsed = pf;
        std::map<const ast::Stmt*, const CodeBlock*> by_node;
        for (const auto& b : pf->blocks)
            if (b.node) by_node[b.node] = &b;

        for (const auto& s : pf->tree->body) {
            const CodeBlock* blk = by_node.count(s.get()) ? by_node[s.get()] : nullptr;
            switch (s->kind) {
            case ast::StmtKind::FunctionDef: {
                FunctionInfo fi;
                fi.block = blk->id;
                fi.qname = blk->qualified_name;
                fi.module = mi.name;
                fi.name = s->name;
                fi.params = param_infos(*s, false);
                fi.returns = s->returns.get();
                mi.functions[s->name] = fi.qname;
                ix->functions_[fi.qname] = std::move(fi);
                break;
            }
            case ast::StmtKind::ClassDef: {
                ClassInfo ci;
                ci.block = blk->id;
                ci.qname = blk->qualified_name;
                ci.module = mi.name;
                ci.name = s->name;
                ci.base = s->bases.empty() ? nullptr : s->bases.front().get();
                for (const auto& m : s->body) {
                    const CodeBlock* mb = by_node.count(m.get()) ? by_node[m.get()] : nullptr;
                    if (!mb) continue;
                    if (mb->kind == BlockKind::Method || mb->kind == BlockKind::Constructor) {
                        FunctionInfo fi;
                        fi.block = mb->id;
                        fi.qname = mb->qualified_name;
                        fi.module = mi.name;
                        fi.name = m->name;
                        fi.owner = ci.qname;
                        fi.params = param_infos(*m, true);
                        fi.returns = m->returns.get();
                        fi.is_constructor = mb->kind == BlockKind::Constructor;
                        ci.methods[m->name] = fi.qname;
                        ix->functions_[fi.qname] = std::move(fi);
                    } else if (mb->kind == BlockKind::Field) {
                        FieldInfo f;
                        f.block = mb->id;
                        f.name = mb->name;
                        f.annotation = m->annotation.get();
                        f.value = m->value.get();
                        ci.fields[f.name] = f;
                    }
                }
                // Attributes created through the receiver inside methods.
                for (const auto& m : s->body) {
                    if (m->kind != ast::StmtKind::FunctionDef || m->params.empty()) continue;
                    const std::string self = m->params.front().name;
                    ast::walk_stmts(m->body, [&](const ast::Stmt& st) {
                        for (const auto& t : st.targets) {
                            if (t->kind == ast::ExprKind::Attribute && t->children[0]->kind == ast::ExprKind::Name &&
                                t->children[0]->text == self && !ci.fields.count(t->text) &&
                                !ci.methods.count(t->text)) {
                                FieldInfo f;
                                f.name = t->text;
                                if (st.kind == ast::StmtKind::AnnAssign) f.annotation = st.annotation.get();
                                ci.fields[f.name] = f;
                            }
                        }
                    });
                }
                mi.classes[s->name] = ci.qname;
                ix->classes_[ci.qname] = std::move(ci);
                break;
            }
            case ast::StmtKind::Import:
                for (const auto& n : s->imports) {
                    ImportBinding ib;
                    ib.block = blk->id;
                    if (n.alias.empty()) {
                        ib.module = n.name.substr(0, n.name.find('.'));
                        mi.imports[ib.module] = ib;
                    } else {
                        ib.module = n.name;
                        mi.imports[n.alias] = ib;
                    }
                }
                break;
            case ast::StmtKind::FromImport:
                for (const auto& n : s->imports) {
                    ImportBinding ib;
                    ib.block = blk->id;
                    ib.module = absolute_module(mi.name, s->module);
                    ib.symbol = n.name;
                    mi.imports[n.alias.empty() ? n.name : n.alias] = ib;
                }
                break;
            default: break;
            }
        }
        collect_globals(pf->tree->body, mi.globals, true);
        ix->file_to_module_[path] = mi.name;
        const std::string name = mi.name;
        ix->modules_[name] = std::move(mi);
    }
    ix->finish();
    return ix;
}

void SymbolIndex::finish() {
    // Base resolution: follow the base expression through the declaring
    // module's names and imports.
    for (auto& [qn, ci] : classes_) {
        if (!ci.base) continue;
        if (ci.base->kind == ast::ExprKind::Name && ci.base->text == "object") continue;
        const ModuleInfo& mi = modules_.at(ci.module);
        std::string resolved;
        const ast::Expr* b = ci.base;
        auto lookup = [&](const std::string& mod, const std::string& sym) -> std::string {
            std::string m = mod, s = sym;
            for (int hop = 0; hop < 8; ++hop) {
                const ModuleInfo* target = module(m);
                if (!target) return {};
                if (auto it = target->classes.find(s); it != target->classes.end()) return it->second;
                auto imp = target->imports.find(s);
                if (imp == target->imports.end() || imp->second.symbol.empty()) return {};
                m = imp->second.module;
                s = imp->second.symbol;
            }
            return {};
        };
        if (b->kind == ast::ExprKind::Name) {
            if (auto it = mi.classes.find(b->text); it != mi.classes.end()) {
                resolved = it->second;
            } else if (auto imp = mi.imports.find(b->text); imp != mi.imports.end() && !imp->second.symbol.empty()) {
                resolved = lookup(imp->second.module, imp->second.symbol);
            }
        } else if (b->kind == ast::ExprKind::Attribute && b->children[0]->kind == ast::ExprKind::Name) {
            if (auto imp = mi.imports.find(b->children[0]->text); imp != mi.imports.end()) {
                const std::string mod =
                    imp->second.symbol.empty() ? imp->second.module : imp->second.module + "." + imp->second.symbol;
                resolved = lookup(mod, b->text);
            }
        }
        if (resolved.empty() || resolved == qn) {
            external_base_.insert(qn);
        } else {
            base_[qn] = resolved;
            subclasses_[resolved].push_back(qn);
        }
    }

    auto sig_of = [&](const std::string& fq) {
        const FunctionInfo& f = functions_.at(fq);
        const ModuleInfo& mi = modules_.at(f.module);
        std::string s = "def(";
        for (const auto& p : f.params) {
            s += p.var_args ? "*" : p.kw_args ? "**" : "";
            s += p.name;
            if (p.annotation) s += ":" + std::string(ast::slice(mi.parsed->source.text, p.annotation->span));
            if (p.has_default) s += "=";
            if (p.kw_only) s += "/kw";
            s += ",";
        }
        s += ")";
        if (f.returns) s += "->" + std::string(ast::slice(mi.parsed->source.text, f.returns->span));
        return s + "@" + f.block.str();
    };

    for (const auto& [name, mi] : modules_) {
        fingerprints_["module:" + name] = mi.file;
        for (const auto& [n, fq] : mi.functions) fingerprints_["symbol:" + name + "." + n] = sig_of(fq);
        for (const auto& [n, cq] : mi.classes) fingerprints_["symbol:" + name + "." + n] = "class@" + cq;
        for (const auto& [n, ib] : mi.imports)
            fingerprints_["symbol:" + name + "." + n] = "import:" + ib.module + ":" + ib.symbol + "@" + ib.block.str();
        for (const auto& n : mi.globals) {
            const std::string key = "symbol:" + name + "." + n;
            if (!fingerprints_.count(key)) fingerprints_[key] = "var";
        }
    }
    for (const auto& [qn, ci] : classes_) {
        const ModuleInfo& mi = modules_.at(ci.module);
        std::string base = base_of(qn);
        if (external_base_.count(qn)) base = "?" + std::string(ast::slice(mi.parsed->source.text, ci.base->span));
        fingerprints_["class:" + qn] = "base=" + base + "@" + ci.block.str();
        for (const auto& [n, fq] : ci.methods) fingerprints_["member:" + qn + "." + n] = sig_of(fq);
        for (const auto& [n, f] : ci.fields) {
            std::string fp = f.block.empty() ? "implicit" : "field@" + f.block.str();
            if (f.annotation) fp += ":" + std::string(ast::slice(mi.parsed->source.text, f.annotation->span));
            fingerprints_.emplace("member:" + qn + "." + n, fp);
        }
        std::string subs;
        if (auto it = subclasses_.find(qn); it != subclasses_.end())
            for (const auto& s : it->second) subs += s + ",";
        fingerprints_["subclasses:" + qn] = subs;
    }
}

const ModuleInfo* SymbolIndex::module(const std::string& name) const {
    auto it = modules_.find(name);
    return it == modules_.end() ? nullptr : &it->second;
}

const ModuleInfo* SymbolIndex::module_of_file(const std::string& file) const {
    auto it = file_to_module_.find(file);
    return it == file_to_module_.end() ? nullptr : module(it->second);
}

const ClassInfo* SymbolIndex::cls(const std::string& qname) const {
    auto it = classes_.find(qname);
    return it == classes_.end() ? nullptr : &it->second;
}

const FunctionInfo* SymbolIndex::function(const std::string& qname) const {
    auto it = functions_.find(qname);
    return it == functions_.end() ? nullptr : &it->second;
}

std::string SymbolIndex::base_of(const std::string& cls) const {
    auto it = base_.find(cls);
    return it == base_.end() ? std::string() : it->second;
}

bool SymbolIndex::has_external_base(const std::string& cls) const { return external_base_.count(cls) > 0; }

const std::vector<std::string>& SymbolIndex::direct_subclasses(const std::string& cls) const {
    static const std::vector<std::string> none;
    auto it = subclasses_.find(cls);
    return it == subclasses_.end() ? none : it->second;
}

} // namespace codeplan
