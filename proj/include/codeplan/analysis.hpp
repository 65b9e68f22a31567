#pragma once

// Static name and type resolution over a parsed repository: declaration
// index, class hierarchy, and a per-block analyzer producing relation edges,
// lookup footprints and checker findings.

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "codeplan/depgraph.hpp"
#include "codeplan/syntax.hpp"

namespace codeplan {

struct ParamInfo {
    std::string name;
    bool has_default = false;
    bool kw_only = false;
    bool var_args = false;
    bool kw_args = false;
    const ast::Expr* annotation = nullptr;
};

struct FunctionInfo {
    BlockId block;
    std::string qname;      // module.func or module.Class.method
    std::string module;
    std::string name;
    std::string owner;      // class qname for methods, empty for functions
    std::vector<ParamInfo> params;  // receiver excluded for methods
    const ast::Expr* returns = nullptr;
    bool is_constructor = false;
};

struct FieldInfo {
    BlockId block;          // empty for implicit self.x attributes
    std::string name;
    const ast::Expr* annotation = nullptr;
    const ast::Expr* value = nullptr;
};

struct ClassInfo {
    BlockId block;
    std::string qname;
    std::string module;
    std::string name;
    const ast::Expr* base = nullptr;           // null when the class has no base
    std::map<std::string, std::string> methods;  // name -> function qname
    std::map<std::string, FieldInfo> fields;     // declared (block) and implicit
};

struct ImportBinding {
    BlockId block;
    std::string module;  // target module, as written (leading dots resolved)
    std::string symbol;  // empty for `import m`
};

struct ModuleInfo {
    std::string name;
    std::string file;
    std::shared_ptr<const ParsedFile> parsed;  // keeps AST pointers alive
    std::map<std::string, std::string> functions;  // name -> qname
    std::map<std::string, std::string> classes;    // name -> qname
    std::map<std::string, ImportBinding> imports;   // bound name -> binding
    std::set<std::string> globals;                  // other module-level names
};

// Repository-wide declaration index. Built once per repository snapshot;
// cheap enough to rebuild after every merge.
class SymbolIndex {
public:
    static std::shared_ptr<const SymbolIndex> build(const Repository& repo);

    const ModuleInfo* module(const std::string& name) const;
    const ModuleInfo* module_of_file(const std::string& file) const;
    const ClassInfo* cls(const std::string& qname) const;
    const FunctionInfo* function(const std::string& qname) const;

    // Resolved base class qname, or empty (no base / external / unresolved).
    std::string base_of(const std::string& cls) const;
    // True when the base expression exists but does not resolve in the repo.
    bool has_external_base(const std::string& cls) const;
    const std::vector<std::string>& direct_subclasses(const std::string& cls) const;

    // Declaration fingerprints keyed like the analyzer's footprint entries.
    // A key whose value differs between two snapshots is a changed
    // declaration.
    const std::map<std::string, std::string>& fingerprints() const { return fingerprints_; }

    const std::map<std::string, ModuleInfo>& modules() const { return modules_; }
    const std::map<std::string, ClassInfo>& classes() const { return classes_; }

private:
    void finish();

    std::map<std::string, ModuleInfo> modules_;
    std::map<std::string, std::string> file_to_module_;
    std::map<std::string, ClassInfo> classes_;
    std::map<std::string, FunctionInfo> functions_;
    std::map<std::string, std::string> base_;
    std::set<std::string> external_base_;
    std::map<std::string, std::vector<std::string>> subclasses_;
    std::map<std::string, std::string> fingerprints_;
};

// Something the internal checker may report.
struct Finding {
    enum class Kind {
        UnresolvedName,
        UnknownAttribute,
        NotSubscriptable,
        MissingArgument,
        TooManyArguments,
        UnexpectedKeyword,
        OmittedDefault,  // reported only in strict mode
    };
    Kind kind;
    std::string file;
    int line = 0;
    std::string message;
};

struct BlockAnalysis {
    std::vector<std::pair<RelationLabel, BlockId>> edges;  // forward, non-structural
    std::set<std::string> footprint;
    std::vector<Finding> findings;
};

// Analyzes one block against the index. Module and Import blocks produce
// nothing. Safe to call concurrently for different blocks.
BlockAnalysis analyze_block(const CodeBlock& block, const SymbolIndex& index);

} // namespace codeplan
