#include "codeplan/metrics.hpp"

namespace codeplan {

namespace {

std::vector<std::string> split_lines(const std::string& s) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        const std::size_t nl = s.find('\n', pos);
        if (nl == std::string::npos) {
            out.push_back(s.substr(pos));
            break;
        }
        out.push_back(s.substr(pos, nl - pos));
        pos = nl + 1;
    }
    return out;
}

enum class Op { Keep, Del, Ins };

// Greedy Myers with a per-d snapshot of V for the backtrack.
std::vector<Op> myers(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    const int n = static_cast<int>(a.size()), m = static_cast<int>(b.size());
    const int max = n + m;
    const int off = max + 1;
    std::vector<int> v(2 * max + 3, 0);
    std::vector<std::vector<int>> trace;
    for (int d = 0; d <= max; ++d) {
        trace.push_back(v);
        bool done = false;
        for (int k = -d; k <= d; k += 2) {
            int x = (k == -d || (k != d && v[off + k - 1] < v[off + k + 1])) ? v[off + k + 1] : v[off + k - 1] + 1;
            int y = x - k;
            while (x < n && y < m && a[x] == b[y]) ++x, ++y;
            v[off + k] = x;
            if (x >= n && y >= m) {
                done = true;
                break;
            }
        }
        if (done) break;
    }
    std::vector<Op> ops;
    int x = n, y = m;
    for (int d = static_cast<int>(trace.size()) - 1; d >= 0; --d) {
        const std::vector<int>& tv = trace[d];
        const int k = x - y;
        if (d == 0) {
            while (x > 0 && y > 0) ops.push_back(Op::Keep), --x, --y;
            break;
        }
        const bool down = k == -d || (k != d && tv[off + k - 1] < tv[off + k + 1]);
        const int pk = down ? k + 1 : k - 1;
        const int px = tv[off + pk];
        const int py = px - pk;
        while (x > px + (down ? 0 : 1) && y > py + (down ? 1 : 0)) ops.push_back(Op::Keep), --x, --y;
        ops.push_back(down ? Op::Ins : Op::Del);
        x = px;
        y = py;
    }
    return {ops.rbegin(), ops.rend()};
}

} // namespace

std::vector<DiffLine> line_diff(const std::string& a, const std::string& b) {
    const auto la = split_lines(a), lb = split_lines(b);
    std::vector<DiffLine> out;
    std::size_t i = 0, j = 0;
    for (const Op op : myers(la, lb)) {
        switch (op) {
        case Op::Keep: ++i, ++j; break;
        case Op::Del: out.push_back({'-', la[i++]}); break;
        case Op::Ins: out.push_back({'+', lb[j++]}); break;
        }
    }
    return out;
}

std::string unified_diff(const std::string& a, const std::string& b, const std::string& path) {
    const auto la = split_lines(a), lb = split_lines(b);
    const auto ops = myers(la, lb);
    std::string out;
    std::size_t i = 0, j = 0, k = 0;
    while (k < ops.size()) {
        if (ops[k] == Op::Keep) {
            ++i, ++j, ++k;
            continue;
        }
        const std::size_t i0 = i, j0 = j;
        std::string body;
        while (k < ops.size() && ops[k] != Op::Keep) {
            if (ops[k] == Op::Del) body += "-" + la[i++] + "\n";
            else body += "+" + lb[j++] + "\n";
            ++k;
        }
        const std::size_t dl = i - i0, il = j - j0;
        out += "@@ -" + std::to_string(dl ? i0 + 1 : i0) + "," + std::to_string(dl) + " +" +
               std::to_string(il ? j0 + 1 : j0) + "," + std::to_string(il) + " @@\n" + body;
    }
    if (out.empty()) return out;
    return "--- a/" + path + "\n+++ b/" + path + "\n" + out;
}

} // namespace codeplan
