#include "codeplan/errors.hpp"
#include "codeplan/syntax.hpp"

#include <algorithm>
#include <set>

namespace codeplan {

namespace {

constexpr std::string_view kMarkerOpen = "# <folded:";

struct FoldRegion {
    std::size_t start;  // relative to the region text
    std::size_t end;
    std::string indent;
    BlockId folded;
};

std::size_t line_start_of(std::string_view text, std::size_t offset) {
    if (offset == 0) return 0;
    const std::size_t nl = text.rfind('\n', offset - 1);
    return nl == std::string_view::npos ? 0 : nl + 1;
}

// Body of a def can be folded when it starts on a line after the header.
std::optional<FoldRegion> fold_region(const CodeBlock& member, const std::string& file_text, std::size_t base) {
    const ast::Stmt* def = member.node;
    if (!def || def->kind != ast::StmtKind::FunctionDef || def->body.empty()) return std::nullopt;
    const ast::Stmt& first = *def->body.front();
    if (first.span.start_line <= def->header.end_line) return std::nullopt;
    const std::size_t ls = line_start_of(file_text, first.span.start);
    FoldRegion r;
    r.start = ls - base;
    r.end = def->span.end - base;
    r.indent = file_text.substr(ls, first.span.start - ls);
    r.folded = member.id;
    return r;
}

} // namespace

std::string folded_placeholder(std::string_view indent, std::string_view marker) {
    std::string s(indent);
    s += "...  # ";
    s += marker;
    return s;
}

Fragment extract_fragment(const BlockId& id, const Repository& repo) {
    const CodeBlock& block = repo.at(id);
    const ParsedFile& pf = repo.file(block.file);
    Fragment frag;
    frag.subject = id;
    frag.file = block.file;

    const CodeBlock* cls = nullptr;
    if (block.kind == BlockKind::Class) {
        cls = &block;
    } else if (block.parent) {
        const CodeBlock& p = repo.at(*block.parent);
        if (p.kind == BlockKind::Class) cls = &p;
    }
    if (!cls) {
        frag.region = id;
        frag.sketch_text = block.text;
        frag.subject_text = block.text;
        return frag;
    }

    frag.region = cls->id;
    const std::string& text = pf.source.text;
    const std::size_t base = cls->span.start;
    std::vector<FoldRegion> regions;
    for (const CodeBlock& m : pf.blocks) {
        if (!m.parent || *m.parent != cls->id || m.id == id) continue;
        if (m.kind != BlockKind::Method && m.kind != BlockKind::Constructor) continue;
        if (auto r = fold_region(m, text, base)) regions.push_back(std::move(*r));
    }
    std::sort(regions.begin(), regions.end(), [](const auto& a, const auto& b) { return a.start < b.start; });

    const std::string_view cls_text(cls->text);
    std::size_t cursor = 0;
    int k = 0;
    for (const FoldRegion& r : regions) {
        FoldEntry e;
        e.marker = "<folded:" + std::to_string(++k) + ">";
        e.folded = r.folded;
        e.body = std::string(cls_text.substr(r.start, r.end - r.start));
        frag.sketch_text.append(cls_text.substr(cursor, r.start - cursor));
        frag.sketch_text += folded_placeholder(r.indent, e.marker);
        cursor = r.end;
        frag.fold_map.push_back(std::move(e));
    }
    frag.sketch_text.append(cls_text.substr(cursor));
    frag.subject_text = block.kind == BlockKind::Class ? frag.sketch_text : block.text;
    return frag;
}

MergeResult merge_fragment(const std::string& new_text, const Fragment& fragment, const Repository& repo) {
    const CodeBlock* region = repo.find(fragment.region);
    if (!region) throw MergeRejected("fragment region no longer exists: " + fragment.region.str());

    std::string edited = new_text;
    while (!edited.empty() && (edited.back() == '\n' || edited.back() == '\r' || edited.back() == ' ' ||
                               edited.back() == '\t')) {
        edited.pop_back();
    }

    std::string restored;
    std::set<std::string> used;
    std::size_t cursor = 0;
    for (std::size_t pos = edited.find(kMarkerOpen); pos != std::string::npos;
         pos = edited.find(kMarkerOpen, pos + 1)) {
        const std::size_t close = edited.find('>', pos);
        if (close == std::string::npos) throw MergeRejected("malformed placeholder");
        const std::string marker = edited.substr(pos + 2, close - pos - 1);
        auto it = std::find_if(fragment.fold_map.begin(), fragment.fold_map.end(),
                               [&](const FoldEntry& e) { return e.marker == marker; });
        if (it == fragment.fold_map.end()) throw MergeRejected("unknown placeholder " + marker);
        if (!used.insert(marker).second) throw MergeRejected("placeholder used twice: " + marker);

        const std::size_t ls = line_start_of(edited, pos);
        std::string_view lead(edited.data() + ls, pos - ls);
        const std::size_t dots = lead.find("...");
        const bool ok = dots != std::string_view::npos &&
                        lead.find_first_not_of(" \t") == dots &&
                        lead.substr(dots + 3).find_first_not_of(" \t") == std::string_view::npos;
        if (!ok) throw MergeRejected("placeholder " + marker + " is not on its own '...' line");
        if (ls < cursor) throw MergeRejected("overlapping placeholders");
        restored.append(edited, cursor, ls - cursor);
        restored += it->body;
        cursor = close + 1;
    }
    restored.append(edited, cursor, std::string::npos);

    const std::string& old_text = repo.file(fragment.file).source.text;
    std::string file_text = old_text.substr(0, region->span.start);
    file_text += restored;
    file_text.append(old_text, region->span.end, std::string::npos);

    Repository next = repo.with_file(fragment.file, std::move(file_text));
    if (const ParsedFile& pf = next.file(fragment.file); pf.error) {
        throw MergeRejected("edited fragment does not parse: line " + std::to_string(pf.error->line) + ": " +
                            pf.error->message);
    }
    return MergeResult{std::move(next), fragment.sketch_text, edited};
}

} // namespace codeplan
