// Serial vs OpenMP kernels on a synthetic repository. Arg = number of files.

#include <benchmark/benchmark.h>

#include "codeplan/depgraph.hpp"
#include "codeplan/metrics.hpp"
#include "codeplan/syntax.hpp"

#include <map>
#include <string>

using namespace codeplan;

namespace {

// Each module holds a small class hierarchy and free functions that call into
// the previous module, so the graph has cross-file edges.
std::string module_text(int i, bool edited) {
    std::string s;
    if (i > 0) s += "import m" + std::to_string(i - 1) + "\n\n\n";
    s += "class Base" + std::to_string(i) + ":\n    size: int = 1\n\n"
         "    def __init__(self, w):\n        self.w = w\n\n"
         "    def area(self):\n        return self.size * self.w\n\n\n";
    s += "class Leaf" + std::to_string(i) + "(Base" + std::to_string(i) + "):\n"
         "    def area(self):\n        return self.w * " + (edited ? "3" : "2") + "\n\n\n";
    for (int f = 0; f < 8; ++f) {
        s += "def f" + std::to_string(f) + "(x" + (edited && f % 3 == 0 ? ", y=0" : "") + "):\n";
        s += "    b = Leaf" + std::to_string(i) + "(x)\n";
        if (i > 0) s += "    m" + std::to_string(i - 1) + ".f" + std::to_string(f) + "(x)\n";
        s += "    return b.area() + " + std::to_string(f) + "\n\n\n";
    }
    return s;
}

Repository synthetic(int files, bool edited) {
    std::map<std::string, std::string> src;
    for (int i = 0; i < files; ++i) src["m" + std::to_string(i) + ".py"] = module_text(i, edited && i % 2 == 0);
    return Repository::from_sources(src);
}

void BM_GraphSerial(benchmark::State& st) {
    const Repository r = synthetic(static_cast<int>(st.range(0)), false);
    for (auto _ : st) benchmark::DoNotOptimize(construct_dependency_graph_serial(r));
}

void BM_GraphParallel(benchmark::State& st) {
    const Repository r = synthetic(static_cast<int>(st.range(0)), false);
    for (auto _ : st) benchmark::DoNotOptimize(construct_dependency_graph(r));
}

void BM_LevenshteinSerial(benchmark::State& st) {
    const Repository a = synthetic(static_cast<int>(st.range(0)), false), b = synthetic(static_cast<int>(st.range(0)), true);
    for (auto _ : st) benchmark::DoNotOptimize(levenshtein_distance_serial(a, b));
}

void BM_LevenshteinParallel(benchmark::State& st) {
    const Repository a = synthetic(static_cast<int>(st.range(0)), false), b = synthetic(static_cast<int>(st.range(0)), true);
    for (auto _ : st) benchmark::DoNotOptimize(levenshtein_distance(a, b));
}

void BM_DiffBleuSerial(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    const Repository s = synthetic(n, false), t = synthetic(n, true);
    for (auto _ : st) benchmark::DoNotOptimize(diff_bleu_serial(s, t, t));
}

void BM_DiffBleuParallel(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    const Repository s = synthetic(n, false), t = synthetic(n, true);
    for (auto _ : st) benchmark::DoNotOptimize(diff_bleu(s, t, t));
}

} // namespace

BENCHMARK(BM_GraphSerial)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GraphParallel)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LevenshteinSerial)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LevenshteinParallel)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DiffBleuSerial)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DiffBleuParallel)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
