#include <benchmark/benchmark.h>

#include <memory>

#include "sopgraph/bench.hpp"
#include "sopgraph/case_spec.hpp"
#include "sopgraph/engine.hpp"
#include "sopgraph/oracle.hpp"
#include "sopgraph/parser.hpp"
#include "sopgraph/sampler.hpp"
#include "sopgraph/serializer.hpp"

#include "../tests/test_util.hpp"

namespace {

void BM_ParseRefinedSop(benchmark::State& state) {
    const std::string text =
        test_util::read_file(test_util::sop_fixture("service_interruption_refined"));
    for (auto _ : state) {
        benchmark::DoNotOptimize(sop::parse_sop(text));
    }
}
BENCHMARK(BM_ParseRefinedSop);

void BM_ParseAlfworldSop(benchmark::State& state) {
    const std::string text = test_util::read_file(test_util::sop_fixture("alfworld"));
    for (auto _ : state) {
        benchmark::DoNotOptimize(sop::parse_sop(text));
    }
}
BENCHMARK(BM_ParseAlfworldSop);

void BM_SerializeAlfworldSop(benchmark::State& state) {
    const sop::SopDocument doc = sop::parse_sop_file(test_util::sop_fixture("alfworld"));
    for (auto _ : state) {
        benchmark::DoNotOptimize(sop::serialize(doc));
    }
}
BENCHMARK(BM_SerializeAlfworldSop);

void BM_BuildGraphAndStats(benchmark::State& state) {
    const sop::SopDocument doc = sop::parse_sop_file(test_util::sop_fixture("alfworld"));
    for (auto _ : state) {
        benchmark::DoNotOptimize(sop::build_graph(doc).compute_stats());
    }
}
BENCHMARK(BM_BuildGraphAndStats);

void BM_SampleEnvironment(benchmark::State& state) {
    const sop::CaseSpec spec =
        sop::load_case_file(test_util::case_fixture("service_interruption"));
    const sop::DecisionGraph graph = sop::build_graph(spec.sop);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sop::sample_environment(spec, graph, seed++));
    }
}
BENCHMARK(BM_SampleEnvironment);

void BM_OracleRun(benchmark::State& state) {
    const sop::CaseSpec spec =
        sop::load_case_file(test_util::case_fixture("service_interruption"));
    const sop::DecisionGraph graph = sop::build_graph(spec.sop);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        const sop::Environment env = sop::sample_environment(spec, graph, seed++);
        auto log = std::make_shared<sop::ObservationLog>();
        sop::EnvironmentExecutor executor(env, log);
        sop::OracleDecider decider(log);
        benchmark::DoNotOptimize(sop::run(graph, decider, executor));
    }
}
BENCHMARK(BM_OracleRun);

}  // namespace

BENCHMARK_MAIN();
