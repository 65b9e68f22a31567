#include "codeplan/ast_walk.hpp"
#include "codeplan/errors.hpp"
#include "codeplan/parser.hpp"
#include "codeplan/syntax.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace codeplan {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kKindNames[] = {"Module", "Class", "Method", "Constructor", "Field", "Import", "Statement"};

class BlockExtractor {
public:
    BlockExtractor(ParsedFile& pf) : pf_(pf), text_(pf.source.text) {}

    void run() {
        const ast::Module& m = *pf_.tree;
        collect_module_names(m);
        for (const auto& s : m.body) top_level(*s);
    }

private:
    void collect_module_names(const ast::Module& m) {
        for (const auto& s : m.body) {
            switch (s->kind) {
            case ast::StmtKind::FunctionDef:
            case ast::StmtKind::ClassDef: module_names_.insert(s->name); break;
            case ast::StmtKind::Import:
                for (const auto& n : s->imports) {
                    module_names_.insert(n.alias.empty() ? n.name.substr(0, n.name.find('.')) : n.alias);
                }
                break;
            case ast::StmtKind::FromImport:
                for (const auto& n : s->imports) module_names_.insert(n.alias.empty() ? n.name : n.alias);
                break;
            default: break;
            }
        }
    }

    std::string unique(const std::string& qn, BlockKind kind) {
        const std::string key = std::string(to_string(kind)) + ":" + qn;
        const int n = ++seen_[key];
        return n == 1 ? qn : qn + "#" + std::to_string(n);
    }

    CodeBlock& add(BlockKind kind, std::string qn, std::string name, const ast::Stmt& s, const BlockId& parent) {
        CodeBlock b;
        b.kind = kind;
        b.file = pf_.source.path;
        b.qualified_name = std::move(qn);
        b.name = std::move(name);
        b.id = BlockId::make(b.file, kind, b.qualified_name);
        b.span = s.span;
        b.span.start = s.line_start;
        b.text = text_.substr(b.span.start, b.span.end - b.span.start);
        b.parent = parent;
        b.node = &s;
        pf_.blocks.push_back(std::move(b));
        return pf_.blocks.back();
    }

    // A module-level statement is tracked when it reaches outside itself:
    // a call, an attribute access, or a reference to a module-level
    // definition or import.
    bool references_non_local(const ast::Stmt& s) const {
        bool found = false;
        ast::walk_stmt_exprs(s, [&](const ast::Expr& e) {
            if (e.kind == ast::ExprKind::Call || e.kind == ast::ExprKind::Attribute) found = true;
            if (e.kind == ast::ExprKind::Name && module_names_.count(e.text)) found = true;
        });
        return found;
    }

    void top_level(const ast::Stmt& s) {
        const BlockId root = pf_.blocks.front().id;
        const std::string& mod = pf_.module_name;
        switch (s.kind) {
        case ast::StmtKind::Import:
        case ast::StmtKind::FromImport: {
            const std::string target = s.kind == ast::StmtKind::Import ? s.imports.front().name : s.module;
            add(BlockKind::Import, unique(mod + ".import:" + target, BlockKind::Import), target, s, root);
            break;
        }
        case ast::StmtKind::FunctionDef:
            add(BlockKind::Method, unique(mod + "." + s.name, BlockKind::Method), s.name, s, root);
            break;
        case ast::StmtKind::ClassDef: class_def(s, root); break;
        default:
            if (references_non_local(s)) {
                const int ordinal = statement_ordinal_++;
                CodeBlock& b = add(BlockKind::Statement, mod + "#" + std::to_string(ordinal), "", s, root);
                b.ordinal = ordinal;
            }
            break;
        }
    }

    void class_def(const ast::Stmt& s, const BlockId& root) {
        const std::string qn = unique(pf_.module_name + "." + s.name, BlockKind::Class);
        const BlockId cls = add(BlockKind::Class, qn, s.name, s, root).id;
        for (const auto& m : s.body) {
            switch (m->kind) {
            case ast::StmtKind::FunctionDef: {
                const BlockKind k = m->name == "__init__" ? BlockKind::Constructor : BlockKind::Method;
                add(k, unique(qn + "." + m->name, k), m->name, *m, cls);
                break;
            }
            case ast::StmtKind::AnnAssign:
            case ast::StmtKind::Assign: {
                const ast::Expr* t = m->targets.empty() ? nullptr : m->targets.front().get();
                if (t && t->kind == ast::ExprKind::Name && m->targets.size() == 1) {
                    add(BlockKind::Field, unique(qn + "." + t->text, BlockKind::Field), t->text, *m, cls);
                }
                break;
            }
            case ast::StmtKind::ClassDef:
                throw ParseError(pf_.source.path, m->span.start_line, "nested classes are not supported");
            default: break;
            }
        }
    }

    ParsedFile& pf_;
    const std::string& text_;
    std::set<std::string> module_names_;
    std::map<std::string, int> seen_;
    int statement_ordinal_ = 0;
};

int count_lines(std::string_view text) {
    if (text.empty()) return 0;
    int n = static_cast<int>(std::count(text.begin(), text.end(), '\n'));
    return text.back() == '\n' ? n : n + 1;
}

} // namespace

std::string_view to_string(BlockKind kind) { return kKindNames[static_cast<int>(kind)]; }

std::optional<BlockKind> block_kind_from_string(std::string_view s) {
    for (int i = 0; i < 7; ++i) {
        if (kKindNames[i] == s) return static_cast<BlockKind>(i);
    }
    return std::nullopt;
}

BlockId BlockId::make(std::string_view file, BlockKind kind, std::string_view qualified_name) {
    std::string v;
    v.reserve(file.size() + qualified_name.size() + 16);
    v.append(file).append("::").append(to_string(kind)).append("::").append(qualified_name);
    return BlockId(std::move(v));
}

std::string module_name_for(std::string_view path) {
    std::string p(path);
    if (p.size() > 3 && p.compare(p.size() - 3, 3, ".py") == 0) p.resize(p.size() - 3);
    if (p == "__init__") return "__init__";
    if (p.size() > 9 && p.compare(p.size() - 9, 9, "/__init__") == 0) p.resize(p.size() - 9);
    std::replace(p.begin(), p.end(), '/', '.');
    return p;
}

std::shared_ptr<const ParsedFile> parse_file(std::string path, std::string text) {
    auto pf = std::make_shared<ParsedFile>();
    pf->source.path = std::move(path);
    pf->source.text = std::move(text);
    pf->module_name = module_name_for(pf->source.path);

    CodeBlock root;
    root.kind = BlockKind::Module;
    root.file = pf->source.path;
    root.qualified_name = pf->module_name;
    root.name = pf->module_name;
    root.id = BlockId::make(root.file, BlockKind::Module, root.qualified_name);
    root.span.start = 0;
    root.span.end = pf->source.text.size();
    root.span.start_line = 1;
    root.span.end_line = std::max(1, count_lines(pf->source.text));
    root.text = pf->source.text;
    pf->blocks.push_back(root);

    try {
        pf->tree = parse_module(pf->source.text, pf->source.path);
        BlockExtractor(*pf).run();
    } catch (const ParseError& e) {
        pf->tree.reset();
        pf->blocks.resize(1);
        pf->error = FileDiagnostic{pf->source.path, e.line(), e.detail()};
    }
    return pf;
}

Repository Repository::from_sources(const std::map<std::string, std::string>& files) {
    Repository r;
    for (const auto& [path, text] : files) r.files_[path] = parse_file(path, text);
    r.reindex();
    return r;
}

void Repository::reindex() {
    index_.clear();
    for (const auto& [path, pf] : files_) {
        for (std::size_t i = 0; i < pf->blocks.size(); ++i) index_[pf->blocks[i].id.str()] = {pf.get(), i};
    }
}

std::vector<std::string> Repository::paths() const {
    std::vector<std::string> out;
    out.reserve(files_.size());
    for (const auto& [p, _] : files_) out.push_back(p);
    return out;
}

const ParsedFile& Repository::file(const std::string& path) const {
    const ParsedFile* pf = find_file(path);
    if (!pf) throw NotFoundError("no such file in repository: " + path);
    return *pf;
}

const ParsedFile* Repository::find_file(const std::string& path) const {
    auto it = files_.find(path);
    return it == files_.end() ? nullptr : it->second.get();
}

const CodeBlock* Repository::find(const BlockId& id) const {
    auto it = index_.find(id.str());
    if (it == index_.end()) return nullptr;
    return &it->second.first->blocks[it->second.second];
}

const CodeBlock& Repository::at(const BlockId& id) const {
    const CodeBlock* b = find(id);
    if (!b) throw NotFoundError("unknown or stale block: " + id.str());
    return *b;
}

std::vector<const CodeBlock*> Repository::blocks() const {
    std::vector<const CodeBlock*> out;
    out.reserve(index_.size());
    for (const auto& [_, pf] : files_)
        for (const auto& b : pf->blocks) out.push_back(&b);
    return out;
}

std::size_t Repository::block_count() const { return index_.size(); }

Repository Repository::with_file(const std::string& path, std::string text) const {
    Repository r = *this;
    r.files_[path] = parse_file(path, std::move(text));
    r.reindex();
    return r;
}

Repository Repository::without_file(const std::string& path) const {
    Repository r = *this;
    r.files_.erase(path);
    r.reindex();
    return r;
}

std::map<std::string, std::string> Repository::sources() const {
    std::map<std::string, std::string> out;
    for (const auto& [p, pf] : files_) out[p] = pf->source.text;
    return out;
}

std::vector<FileDiagnostic> Repository::parse_errors() const {
    std::vector<FileDiagnostic> out;
    for (const auto& [_, pf] : files_)
        if (pf->error) out.push_back(*pf->error);
    return out;
}

Repository parse_repository(const fs::path& root, const std::string& language) {
    if (language != "python") throw ConfigError("unsupported language: " + language);
    if (!fs::is_directory(root)) throw IoError("not a directory: " + root.string());
    std::vector<fs::path> found;
    for (auto it = fs::recursive_directory_iterator(root); it != fs::recursive_directory_iterator(); ++it) {
        const std::string name = it->path().filename().string();
        if (it->is_directory() && !name.empty() && name[0] == '.') {
            it.disable_recursion_pending();
            continue;
        }
        if (it->is_regular_file() && it->path().extension() == ".py") found.push_back(it->path());
    }
    std::sort(found.begin(), found.end());
    std::map<std::string, std::string> files;
    for (const auto& p : found) {
        std::ifstream in(p, std::ios::binary);
        if (!in) throw IoError("cannot read " + p.string());
        std::ostringstream ss;
        ss << in.rdbuf();
        if (in.bad()) throw IoError("cannot read " + p.string());
        files[fs::relative(p, root).generic_string()] = ss.str();
    }
    return Repository::from_sources(files);
}

void write_repository(const Repository& repo, const fs::path& dir) {
    for (const auto& [path, text] : repo.sources()) {
        const fs::path out = dir / path;
        fs::create_directories(out.parent_path());
        std::ofstream f(out, std::ios::binary);
        if (!f) throw IoError("cannot write " + out.string());
        f << text;
    }
}

nlohmann::json blocks_to_json(const Repository& repo) {
    nlohmann::json arr = nlohmann::json::array();
    for (const CodeBlock* b : repo.blocks()) {
        arr.push_back({{"id", b->id.str()},
                       {"kind", to_string(b->kind)},
                       {"file", b->file},
                       {"qualified_name", b->qualified_name},
                       {"span",
                        {{"start_byte", b->span.start},
                         {"end_byte", b->span.end},
                         {"start_line", b->span.start_line},
                         {"end_line", b->span.end_line}}},
                       {"parent", b->parent ? nlohmann::json(b->parent->str()) : nlohmann::json(nullptr)}});
    }
    return arr;
}

} // namespace codeplan
