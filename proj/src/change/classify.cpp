#include "codeplan/change.hpp"
#include "codeplan/errors.hpp"
#include "codeplan/parser.hpp"

#include <algorithm>
#include <map>

namespace codeplan {

namespace {

constexpr std::string_view kLabelNames[] = {"MMB", "MMS", "MF", "MC",  "MCC", "MI", "AM", "AF",
                                            "AC",  "ACC", "AI", "DM",  "DF",  "DC", "DCC", "DI"};

std::string file_of(const BlockId& id) {
    const std::size_t cut = id.str().find("::");
    return cut == std::string::npos ? id.str() : id.str().substr(0, cut);
}

// Token texts inside [start, end), layout tokens kept as markers so that
// re-indentation of a body counts as a change but comments do not.
std::vector<std::string> tokens_in(const std::vector<Token>& toks, std::size_t start, std::size_t end,
                                   std::size_t skip_start = 0, std::size_t skip_end = 0) {
    std::vector<std::string> out;
    for (const Token& t : toks) {
        if (t.start < start || t.end > end || t.type == TokenType::End) continue;
        if (skip_end > skip_start && t.start >= skip_start && t.end <= skip_end) continue;
        switch (t.type) {
        case TokenType::Newline: out.emplace_back("<nl>"); break;
        case TokenType::Indent: out.emplace_back("<in>"); break;
        case TokenType::Dedent: out.emplace_back("<de>"); break;
        default: out.push_back(t.text); break;
        }
    }
    // Layout at either edge depends on the neighbours, not on the element.
    auto layout = [](const std::string& t) { return t == "<nl>" || t == "<in>" || t == "<de>"; };
    while (!out.empty() && layout(out.back())) out.pop_back();
    const auto first = std::find_if_not(out.begin(), out.end(), layout);
    out.erase(out.begin(), first);
    return out;
}

struct Side {
    std::shared_ptr<const ParsedFile> pf;
    std::vector<Token> toks;
    std::map<std::pair<BlockKind, std::string>, const CodeBlock*> by_key;
};

Side load(const std::string& file, const std::string& text) {
    Side s;
    s.pf = parse_file(file, text);
    if (s.pf->error) throw ParseError(file, s.pf->error->line, s.pf->error->message);
    s.toks = tokenize(text, file);
    for (const auto& b : s.pf->blocks) {
        if (b.kind == BlockKind::Module || b.kind == BlockKind::Statement) continue;
        s.by_key[{b.kind, b.qualified_name}] = &b;
    }
    return s;
}

std::vector<std::string> header_tokens(const Side& s, const CodeBlock& b) {
    return tokens_in(s.toks, b.node->header.start, b.node->header.end);
}

// Body tokens of a def, docstring excluded.
std::vector<std::string> body_tokens(const Side& s, const CodeBlock& b) {
    const ast::Stmt& def = *b.node;
    std::size_t ds = 0, de = 0;
    if (!def.body.empty()) {
        const ast::Stmt& first = *def.body.front();
        if (first.kind == ast::StmtKind::Expr && first.value && first.value->kind == ast::ExprKind::Constant &&
            !first.value->text.empty() && (first.value->text.back() == '"' || first.value->text.back() == '\'')) {
            ds = first.span.start;
            de = first.span.end;
        }
    }
    return tokens_in(s.toks, def.header.end, def.span.end, ds, de);
}

std::vector<std::string> all_tokens(const Side& s, const CodeBlock& b) {
    return tokens_in(s.toks, b.node->span.start, b.node->span.end);
}

ChangeLabel addition_for(BlockKind k) {
    switch (k) {
    case BlockKind::Method: return ChangeLabel::AM;
    case BlockKind::Constructor: return ChangeLabel::ACC;
    case BlockKind::Field: return ChangeLabel::AF;
    case BlockKind::Class: return ChangeLabel::AC;
    default: return ChangeLabel::AI;
    }
}

ChangeLabel deletion_for(BlockKind k) {
    switch (k) {
    case BlockKind::Method: return ChangeLabel::DM;
    case BlockKind::Constructor: return ChangeLabel::DCC;
    case BlockKind::Field: return ChangeLabel::DF;
    case BlockKind::Class: return ChangeLabel::DC;
    default: return ChangeLabel::DI;
    }
}

} // namespace

std::string_view to_string(ChangeLabel l) { return kLabelNames[static_cast<int>(l)]; }

std::optional<ChangeLabel> change_label_from_string(std::string_view s) {
    for (int i = 0; i < kChangeLabelCount; ++i)
        if (kLabelNames[i] == s) return static_cast<ChangeLabel>(i);
    return std::nullopt;
}

bool is_addition(ChangeLabel l) { return l >= ChangeLabel::AM && l <= ChangeLabel::AI; }
bool is_deletion(ChangeLabel l) { return l >= ChangeLabel::DM; }

nlohmann::json to_json(const AtomicChange& c) {
    nlohmann::json j = {{"label", to_string(c.label)}, {"subject", c.subject.str()}};
    if (c.escaping) j["escaping"] = *c.escaping;
    return j;
}

std::vector<AtomicChange> classify_changes(const std::string& before, const std::string& after,
                                           const BlockId& subject) {
    const std::string file = file_of(subject);
    const Side b = load(file, before);
    const Side a = load(file, after);

    std::vector<AtomicChange> out;
    auto modified = [&](ChangeLabel l, const CodeBlock& old_b, const CodeBlock& new_b) {
        AtomicChange c;
        c.label = l;
        c.subject = new_b.id;
        c.before_text = old_b.text;
        c.after_text = new_b.text;
        if (l == ChangeLabel::MMB) c.escaping = escapes(old_b.text, new_b.text);
        out.push_back(std::move(c));
    };

    for (const auto& nb : a.pf->blocks) {
        if (nb.kind == BlockKind::Module || nb.kind == BlockKind::Statement) continue;
        auto it = b.by_key.find({nb.kind, nb.qualified_name});
        if (it == b.by_key.end()) {
            AtomicChange c;
            c.label = addition_for(nb.kind);
            c.subject = nb.id;
            c.after_text = nb.text;
            out.push_back(std::move(c));
            continue;
        }
        const CodeBlock& ob = *it->second;
        switch (nb.kind) {
        case BlockKind::Method:
        case BlockKind::Constructor:
            if (header_tokens(b, ob) != header_tokens(a, nb))
                modified(nb.kind == BlockKind::Constructor ? ChangeLabel::MCC : ChangeLabel::MMS, ob, nb);
            if (body_tokens(b, ob) != body_tokens(a, nb)) modified(ChangeLabel::MMB, ob, nb);
            break;
        case BlockKind::Field:
            if (all_tokens(b, ob) != all_tokens(a, nb)) modified(ChangeLabel::MF, ob, nb);
            break;
        case BlockKind::Class:
            if (header_tokens(b, ob) != header_tokens(a, nb)) modified(ChangeLabel::MC, ob, nb);
            break;
        case BlockKind::Import:
            if (all_tokens(b, ob) != all_tokens(a, nb)) modified(ChangeLabel::MI, ob, nb);
            break;
        default: break;
        }
    }
    for (const auto& ob : b.pf->blocks) {
        if (ob.kind == BlockKind::Module || ob.kind == BlockKind::Statement) continue;
        if (a.by_key.count({ob.kind, ob.qualified_name})) continue;
        AtomicChange c;
        c.label = deletion_for(ob.kind);
        c.subject = ob.id;
        c.before_text = ob.text;
        out.push_back(std::move(c));
    }
    return out;
}

} // namespace codeplan
