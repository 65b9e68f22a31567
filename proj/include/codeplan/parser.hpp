#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "codeplan/ast.hpp"

namespace codeplan {

enum class TokenType { Name, Number, String, Op, Newline, Indent, Dedent, End };

struct Token {
    TokenType type = TokenType::End;
    std::string text;
    std::size_t start = 0;
    std::size_t end = 0;
    int line = 0;
    int col = 0;
};

// Python-style tokenization: implicit line joining inside brackets, backslash
// continuation, INDENT/DEDENT from a column stack. Comments are dropped.
// Throws ParseError on unterminated strings, unbalanced brackets or a dedent
// to a column that was never opened.
std::vector<Token> tokenize(std::string_view text, const std::string& file);

// Parses a whole file of the demo subset. Throws ParseError naming the first
// offending line.
ast::Module parse_module(std::string_view text, const std::string& file);

// Parses one expression; used for annotations and rule templates.
ast::ExprPtr parse_expression(std::string_view text, const std::string& file);

bool is_keyword(std::string_view word);

} // namespace codeplan
