#include "codeplan/errors.hpp"
#include "codeplan/parser.hpp"

#include <array>
#include <cctype>

namespace codeplan {

namespace {

constexpr std::array<std::string_view, 23> kThreeOrTwoCharOps = {
    "**=", "//=", ">>=", "<<=", "...", "->", "==", "!=", "<=", ">=", "**", "//",
    "<<",  ">>",  "+=",  "-=",  "*=",  "/=", "%=", "&=", "|=", "^=", ":="};

bool is_name_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool is_name_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

class Tokenizer {
public:
    Tokenizer(std::string_view text, const std::string& file) : text_(text), file_(file) {}

    std::vector<Token> run() {
        indents_.push_back(0);
        bool line_start = true;
        bool logical_has_tokens = false;

        while (pos_ < text_.size()) {
            if (line_start && depth_ == 0) {
                int col = 0;
                std::size_t p = pos_;
                while (p < text_.size() && (text_[p] == ' ' || text_[p] == '\t' || text_[p] == '\f')) {
                    col = text_[p] == '\t' ? (col / 8 + 1) * 8 : col + 1;
                    ++p;
                }
                // Blank and comment-only lines do not affect indentation.
                if (p >= text_.size() || text_[p] == '\n' || text_[p] == '\r' || text_[p] == '#') {
                    while (p < text_.size() && text_[p] != '\n') ++p;
                    if (p < text_.size()) {
                        ++p;
                        ++line_;
                    }
                    pos_ = p;
                    continue;
                }
                pos_ = p;
                if (col > indents_.back()) {
                    indents_.push_back(col);
                    emit(TokenType::Indent, "", pos_, pos_, col);
                } else {
                    while (col < indents_.back()) {
                        indents_.pop_back();
                        emit(TokenType::Dedent, "", pos_, pos_, col);
                    }
                    if (col != indents_.back()) fail("unindent does not match any outer indentation level");
                }
                line_start = false;
            }

            const char c = text_[pos_];
            if (c == ' ' || c == '\t' || c == '\f' || c == '\r') {
                ++pos_;
                continue;
            }
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
                continue;
            }
            if (c == '\\') {
                std::size_t p = pos_ + 1;
                if (p < text_.size() && text_[p] == '\r') ++p;
                if (p < text_.size() && text_[p] == '\n') {
                    pos_ = p + 1;
                    ++line_;
                    continue;
                }
                fail("unexpected character after line continuation");
            }
            if (c == '\n') {
                if (depth_ == 0 && logical_has_tokens) {
                    emit(TokenType::Newline, "", pos_, pos_ + 1, column(pos_));
                    logical_has_tokens = false;
                }
                ++pos_;
                ++line_;
                line_start = depth_ == 0;
                continue;
            }

            logical_has_tokens = true;
            if (starts_string(pos_)) {
                read_string();
                continue;
            }
            if (is_name_start(static_cast<unsigned char>(c))) {
                std::size_t s = pos_;
                while (pos_ < text_.size() && is_name_char(static_cast<unsigned char>(text_[pos_]))) ++pos_;
                emit(TokenType::Name, std::string(text_.substr(s, pos_ - s)), s, pos_, column(s));
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c)) ||
                (c == '.' && pos_ + 1 < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
                read_number();
                continue;
            }
            read_operator();
        }

        if (depth_ > 0) {
            throw ParseError(file_, bracket_lines_.front(), std::string("'") + brackets_.front() + "' was never closed");
        }
        if (logical_has_tokens) emit(TokenType::Newline, "", pos_, pos_, column(pos_));
        while (indents_.size() > 1) {
            indents_.pop_back();
            emit(TokenType::Dedent, "", pos_, pos_, 0);
        }
        emit(TokenType::End, "", pos_, pos_, 0);
        return std::move(tokens_);
    }

private:
    [[noreturn]] void fail(const std::string& message) const { throw ParseError(file_, line_, message); }

    int column(std::size_t p) const {
        if (p == 0) return 0;
        const std::size_t nl = text_.rfind('\n', p - 1);
        const std::size_t ls = nl == std::string_view::npos ? 0 : nl + 1;
        return static_cast<int>(p - ls);
    }

    void emit(TokenType type, std::string text, std::size_t s, std::size_t e, int col) {
        Token t;
        t.type = type;
        t.text = std::move(text);
        t.start = s;
        t.end = e;
        t.line = token_line_ > 0 ? token_line_ : line_;
        t.col = col;
        token_line_ = 0;
        tokens_.push_back(std::move(t));
    }

    bool starts_string(std::size_t p) const {
        std::size_t q = p;
        int prefix = 0;
        while (q < text_.size() && prefix < 2 && std::string_view("rRbBuUfF").find(text_[q]) != std::string_view::npos) {
            ++q;
            ++prefix;
        }
        return q < text_.size() && (text_[q] == '"' || text_[q] == '\'');
    }

    void read_string() {
        const std::size_t s = pos_;
        const int start_line = line_;
        while (text_[pos_] != '"' && text_[pos_] != '\'') ++pos_;
        const char quote = text_[pos_];
        const bool triple = pos_ + 2 < text_.size() && text_[pos_ + 1] == quote && text_[pos_ + 2] == quote;
        pos_ += triple ? 3 : 1;
        for (;;) {
            if (pos_ >= text_.size()) fail("unterminated string literal");
            const char c = text_[pos_];
            if (c == '\\') {
                if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '\n') ++line_;
                pos_ += 2;
                continue;
            }
            if (c == '\n') {
                if (!triple) fail("unterminated string literal");
                ++line_;
                ++pos_;
                continue;
            }
            if (c == quote) {
                if (!triple) {
                    ++pos_;
                    break;
                }
                if (pos_ + 2 < text_.size() && text_[pos_ + 1] == quote && text_[pos_ + 2] == quote) {
                    pos_ += 3;
                    break;
                }
            }
            ++pos_;
        }
        token_line_ = start_line;
        emit(TokenType::String, std::string(text_.substr(s, pos_ - s)), s, pos_, column(s));
    }

    void read_number() {
        const std::size_t s = pos_;
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.') {
                ++pos_;
            } else if ((c == '+' || c == '-') && (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E') &&
                       !(text_.substr(s, 2) == "0x" || text_.substr(s, 2) == "0X")) {
                ++pos_;
            } else {
                break;
            }
        }
        emit(TokenType::Number, std::string(text_.substr(s, pos_ - s)), s, pos_, column(s));
    }

    void read_operator() {
        const std::size_t s = pos_;
        for (std::string_view op : kThreeOrTwoCharOps) {
            if (text_.substr(pos_, op.size()) == op) {
                pos_ += op.size();
                emit(TokenType::Op, std::string(op), s, pos_, column(s));
                return;
            }
        }
        const char c = text_[pos_];
        if (std::string_view("()[]{}:,;.+-*/%@=<>&|^~!").find(c) == std::string_view::npos) {
            fail(std::string("unexpected character '") + c + "'");
        }
        if (c == '(' || c == '[' || c == '{') {
            brackets_.push_back(c);
            bracket_lines_.push_back(line_);
            ++depth_;
        } else if (c == ')' || c == ']' || c == '}') {
            const char open = c == ')' ? '(' : c == ']' ? '[' : '{';
            if (brackets_.empty() || brackets_.back() != open) fail(std::string("unmatched '") + c + "'");
            brackets_.pop_back();
            bracket_lines_.pop_back();
            --depth_;
        }
        ++pos_;
        emit(TokenType::Op, std::string(1, c), s, pos_, column(s));
    }

    std::string_view text_;
    const std::string& file_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int token_line_ = 0;
    int depth_ = 0;
    std::string brackets_;
    std::vector<int> bracket_lines_;
    std::vector<int> indents_;
    std::vector<Token> tokens_;
};

} // namespace

std::vector<Token> tokenize(std::string_view text, const std::string& file) {
    return Tokenizer(text, file).run();
}

} // namespace codeplan
