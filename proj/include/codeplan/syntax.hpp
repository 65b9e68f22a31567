#pragma once

#include <compare>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "codeplan/ast.hpp"

namespace codeplan {

enum class BlockKind { Module, Class, Method, Constructor, Field, Import, Statement };

std::string_view to_string(BlockKind kind);
std::optional<BlockKind> block_kind_from_string(std::string_view s);

// Stable identifier: "<file>::<Kind>::<qualified name>". Statements carry
// their ordinal inside the qualified name ("<module>#<k>").
class BlockId {
public:
    BlockId() = default;
    explicit BlockId(std::string value) : value_(std::move(value)) {}

    static BlockId make(std::string_view file, BlockKind kind, std::string_view qualified_name);

    const std::string& str() const { return value_; }
    bool empty() const { return value_.empty(); }

    auto operator<=>(const BlockId&) const = default;
    bool operator==(const BlockId&) const = default;

private:
    std::string value_;
};

struct CodeBlock {
    BlockId id;
    BlockKind kind = BlockKind::Module;
    std::string file;
    std::string qualified_name;
    std::string name;  // last path component (function, class, field name)
    ast::Span span;    // starts at the beginning of the block's first line
    std::optional<BlockId> parent;
    std::string text;
    int ordinal = -1;  // statements only
    const ast::Stmt* node = nullptr;  // owned by the ParsedFile; null for Module blocks
};

struct SourceFile {
    std::string path;
    std::string text;
    std::string language = "python";
};

struct FileDiagnostic {
    std::string file;
    int line = 0;
    std::string message;
};

struct ParsedFile {
    SourceFile source;
    std::string module_name;
    std::optional<ast::Module> tree;  // empty when the file failed to parse
    std::optional<FileDiagnostic> error;
    std::vector<CodeBlock> blocks;    // pre-order; blocks[0] is the Module block
};

std::string module_name_for(std::string_view path);

// Parses one file. Never throws on syntax errors: the result carries the
// diagnostic and a lone Module block.
std::shared_ptr<const ParsedFile> parse_file(std::string path, std::string text);

// Immutable snapshot of repository sources plus the block forest. Copies are
// cheap: parsed files are shared.
class Repository {
public:
    Repository() = default;

    static Repository from_sources(const std::map<std::string, std::string>& files);

    std::vector<std::string> paths() const;
    bool has_file(const std::string& path) const { return files_.count(path) > 0; }
    const ParsedFile& file(const std::string& path) const;
    const ParsedFile* find_file(const std::string& path) const;
    const std::map<std::string, std::shared_ptr<const ParsedFile>>& files() const { return files_; }

    const CodeBlock* find(const BlockId& id) const;
    const CodeBlock& at(const BlockId& id) const;  // NotFoundError when stale
    bool contains(const BlockId& id) const { return find(id) != nullptr; }

    // Every block of every parsed file in (path, pre-order) order.
    std::vector<const CodeBlock*> blocks() const;
    std::size_t block_count() const;

    // Returns a copy with one file replaced (or added) and re-parsed.
    Repository with_file(const std::string& path, std::string text) const;
    Repository without_file(const std::string& path) const;

    std::map<std::string, std::string> sources() const;
    std::vector<FileDiagnostic> parse_errors() const;

    bool same_sources(const Repository& other) const { return sources() == other.sources(); }

private:
    void reindex();

    std::map<std::string, std::shared_ptr<const ParsedFile>> files_;
    std::unordered_map<std::string, std::pair<const ParsedFile*, std::size_t>> index_;
};

// Reads every *.py file under root (recursively, sorted). Unreadable files
// raise IoError; unparseable files are kept with a diagnostic.
Repository parse_repository(const std::filesystem::path& root, const std::string& language = "python");

void write_repository(const Repository& repo, const std::filesystem::path& dir);

nlohmann::json blocks_to_json(const Repository& repo);

// ---------------------------------------------------------------------------
// Sketched fragments

struct FoldEntry {
    std::string marker;  // "<folded:k>"
    BlockId folded;
    std::string body;    // original body text, restored on merge
};

struct Fragment {
    BlockId subject;
    BlockId region;            // block whose span the sketch replaces on merge
    std::string file;
    std::string sketch_text;
    std::string subject_text;  // subject in full as it appears inside the sketch
    std::vector<FoldEntry> fold_map;
};

Fragment extract_fragment(const BlockId& block, const Repository& repo);

struct MergeResult {
    Repository repo;
    std::string before_text;
    std::string after_text;
};

// Restores folded bodies, splices the region back, re-parses the file.
// Throws MergeRejected when the text does not parse or names an unknown
// placeholder; the input repository is never modified.
MergeResult merge_fragment(const std::string& new_text, const Fragment& fragment, const Repository& repo);

// Line used in sketches for a folded body.
std::string folded_placeholder(std::string_view indent, std::string_view marker);

} // namespace codeplan

template <>
struct std::hash<codeplan::BlockId> {
    std::size_t operator()(const codeplan::BlockId& id) const noexcept { return std::hash<std::string>()(id.str()); }
};
