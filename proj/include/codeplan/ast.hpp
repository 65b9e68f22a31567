#pragma once

// Syntax tree for the analyzed Python-like subset: modules, imports, classes
// with single inheritance, functions/methods, and ordinary statements.

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace codeplan::ast {

struct Span {
    std::size_t start = 0;  // byte offset, inclusive
    std::size_t end = 0;    // byte offset, exclusive
    int start_line = 0;     // 1-based
    int end_line = 0;
};

enum class ExprKind {
    Name,
    Attribute,   // value.attr        (children[0] = value, text = attr)
    Call,        // func(args...)     (children[0] = func, rest = positional args)
    Subscript,   // value[index]      (children[0] = value, children[1] = index)
    Constant,    // number / string / None / True / False / ...
    Tuple,
    List,
    Set,
    Dict,        // children alternate key, value; a null key marks **expr
    BinOp,
    UnaryOp,
    BoolOp,
    Compare,
    IfExp,
    Lambda,      // params in lambda_params, children[0] = body
    Comprehension,  // children[0] = element (or key), [1] = value for dict comps, generators in comp
    Starred,
    Slice,
    Await,
};

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Keyword {
    std::string name;  // empty for **expr
    ExprPtr value;
};

struct CompFor {
    ExprPtr target;
    ExprPtr iter;
    std::vector<ExprPtr> conditions;
};

struct Expr {
    ExprKind kind = ExprKind::Name;
    std::string text;  // identifier, attribute name, operator, or constant literal
    std::vector<ExprPtr> children;
    std::vector<Keyword> keywords;          // Call only
    std::vector<std::string> lambda_params; // Lambda only
    std::vector<CompFor> generators;        // Comprehension only
    bool dict_comp = false;
    Span span;
};

struct Param {
    enum class Kind { Normal, VarArgs, KwArgs, KwOnlyMarker };
    Kind kind = Kind::Normal;
    std::string name;
    ExprPtr annotation;
    ExprPtr default_value;
    std::string annotation_text;
    Span span;
};

struct ImportName {
    std::string name;   // dotted module (import) or symbol (from-import)
    std::string alias;  // empty when none
};

enum class StmtKind {
    Expr,
    Assign,
    AnnAssign,
    AugAssign,
    Return,
    Raise,
    Pass,
    Break,
    Continue,
    Global,
    Nonlocal,
    Delete,
    Assert,
    Import,
    FromImport,
    FunctionDef,
    ClassDef,
    If,
    While,
    For,
    With,
    Try,
};

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

// An extra clause of a compound statement: elif/else/except/finally.
struct Clause {
    std::string keyword;
    std::vector<ExprPtr> exprs;  // condition / exception type
    std::string bound_name;      // except E as name
    std::vector<StmtPtr> body;
    Span header;
};

struct Stmt {
    StmtKind kind = StmtKind::Pass;
    Span span;          // first token .. last token of the whole statement
    Span header;        // compound statements: keyword .. ':' (inclusive)
    std::size_t line_start = 0;  // byte offset of the start of the first line
    int indent = 0;     // column of the first token

    // Simple statements.
    std::vector<ExprPtr> targets;  // Assign (one per '='), AugAssign, For target, Delete
    ExprPtr value;                 // Assign/AnnAssign/AugAssign/Return/Raise/Expr/If/While/For iter
    ExprPtr annotation;            // AnnAssign
    std::vector<ExprPtr> extra;    // Assert message, Raise cause, With items, With targets
    std::vector<std::string> names;  // Global/Nonlocal
    std::string op;                // AugAssign operator

    // Imports.
    std::string module;            // FromImport source module (leading dots kept)
    std::vector<ImportName> imports;

    // Definitions.
    std::string name;
    std::vector<Param> params;
    ExprPtr returns;
    std::string returns_text;
    std::vector<ExprPtr> bases;
    std::vector<std::string> base_texts;

    std::vector<StmtPtr> body;
    std::vector<Clause> clauses;
};

struct Module {
    std::vector<StmtPtr> body;
};

// Slice of the source covered by a span.
inline std::string_view slice(std::string_view text, const Span& s) {
    return text.substr(s.start, s.end - s.start);
}

} // namespace codeplan::ast
