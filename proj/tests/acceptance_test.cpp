// Acceptance suite: one check per release criterion, one PASS/FAIL line
// each, nonzero exit when anything fails. Network-dependent checks are
// skipped unless an endpoint is configured in the environment.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "sopgraph/bench.hpp"
#include "sopgraph/case_spec.hpp"
#include "sopgraph/engine.hpp"
#include "sopgraph/environment.hpp"
#include "sopgraph/graph.hpp"
#include "sopgraph/ground_truth.hpp"
#include "sopgraph/oracle.hpp"
#include "sopgraph/parser.hpp"
#include "sopgraph/sampler.hpp"
#include "sopgraph/scoring.hpp"
#include "sopgraph/scripted.hpp"
#include "sopgraph/serializer.hpp"
#include "sopgraph/validator.hpp"

#include "test_util.hpp"

using namespace sop;

namespace {

int failures = 0;
int skips = 0;

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

void report(int number, const std::string& name, bool ok, const std::string& detail = "") {
    std::printf("%s  criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", number, name.c_str(),
                detail.empty() ? "" : " — ", detail.c_str());
    if (!ok) ++failures;
}

void report_skip(int number, const std::string& name, const std::string& why) {
    std::printf("SKIP  criterion %d: %s — %s\n", number, name.c_str(), why.c_str());
    ++skips;
}

struct Check {
    bool ok = true;
    std::string detail;

    void expect(bool condition, const std::string& message) {
        if (!condition && ok) {
            ok = false;
            detail = message;
        }
    }
};

// Independent counting route: walks the parse tree directly, never the
// decision graph, so the two implementations check each other.
struct TreeCounts {
    int nodes = 0;
    int leaves = 0;
    std::vector<std::string> tool_names;
};

void count_tree(const NodeSpec& node, TreeCounts& counts) {
    counts.nodes += 1;
    if (node.children.empty()) counts.leaves += 1;
    if (node.tool) counts.tool_names.push_back(node.tool->name);
    for (const NodeSpec& child : node.children) count_tree(child, counts);
}

TreeCounts count_document(const SopDocument& doc) {
    TreeCounts counts;
    for (const NodeSpec& root : doc.roots) count_tree(root, counts);
    std::sort(counts.tool_names.begin(), counts.tool_names.end());
    counts.tool_names.erase(std::unique(counts.tool_names.begin(), counts.tool_names.end()),
                            counts.tool_names.end());
    return counts;
}

void criterion_1_parser_corpus() {
    Check check;
    Timer timer;
    for (const std::string& name : test_util::corpus()) {
        const SopDocument doc = parse_sop_file(test_util::sop_fixture(name));
        check.expect(validate(doc).empty(), name + " has validation findings");
        const SopDocument reparsed = parse_sop(serialize(doc), name);
        check.expect(doc == reparsed, name + " does not round-trip");
    }

    const SopDocument refined =
        parse_sop_file(test_util::sop_fixture("service_interruption_refined"));
    const TreeCounts counts = count_document(refined);
    const GraphStats stats = build_graph(refined).compute_stats();
    check.expect(counts.nodes == 14 && stats.node_count == 14,
                 "node count: tree=" + std::to_string(counts.nodes) +
                     " graph=" + std::to_string(stats.node_count) + ", want 14");
    check.expect(counts.leaves == 6 && stats.leaf_count == 6,
                 "leaf count: tree=" + std::to_string(counts.leaves) +
                     " graph=" + std::to_string(stats.leaf_count) + ", want 6");
    check.expect(static_cast<int>(counts.tool_names.size()) == 9 && stats.unique_tool_count == 9,
                 "unique tools: tree=" + std::to_string(counts.tool_names.size()) +
                     " graph=" + std::to_string(stats.unique_tool_count) + ", want 9");

    const double elapsed = timer.seconds();
    check.expect(elapsed < 1.0, "corpus pass took " + std::to_string(elapsed) + "s, budget 1s");
    report(1, "parser corpus round-trips with the counted statistics", check.ok, check.detail);
}

const char* kBooleanWeightedCase = R"(name: boolean_weighted
tool_outputs:
    check_flag: {"type": "boolean"}
sop:
- flag_workflow:
    condition: "always"
    API: {"name": "FlagFlow", "description": "Boolean branching workflow."}
    Instructions:
    - always check the flag:
        condition: "always"
        API: {"name": "check_flag", "description": "Report the flag."}
        Instructions:
        - if the flag is true, explore the wide side:
            condition: {"API": "check_flag", "variable": "flag", "condition_type": "is", "value": true}
            Instructions:
            - first wide outcome:
                condition: "always"
            - second wide outcome:
                condition: "always"
            - third wide outcome:
                condition: "always"
        - if the flag is false, explore the narrow side:
            condition: {"API": "check_flag", "variable": "flag", "condition_type": "is", "value": false}
)";

void criterion_2_leaf_weighted_sampling() {
    Check check;
    Timer timer;
    const CaseSpec spec = load_case(kBooleanWeightedCase);
    const DecisionGraph graph = build_graph(spec.sop);
    check.expect(graph.leaf_count_below(graph.roots()[0]) == 4, "fixture should have 4 leaves");

    const int draws = 20000;
    int trues = 0;
    for (int seed = 0; seed < draws; ++seed) {
        const Environment env = sample_environment(spec, graph, static_cast<std::uint64_t>(seed));
        const Observation& obs = env.outputs.at("check_flag").front();
        if (canonical_text(obs.at("flag")) == "true") ++trues;
    }
    const double p_true = static_cast<double>(trues) / draws;
    check.expect(std::fabs(p_true - 0.75) <= 0.02,
                 "P(true) = " + std::to_string(p_true) + ", want 0.75 +/- 0.02");

    const double elapsed = timer.seconds();
    check.expect(elapsed < 5.0, "sampling took " + std::to_string(elapsed) + "s, budget 5s");
    report(2, "leaf-weighted sampling hits the three-quarters split", check.ok,
           check.ok ? "P(true) = " + std::to_string(p_true) : check.detail);
}

void criterion_3_oracle_equivalence() {
    Check check;
    Timer timer;
    const CaseSpec spec = load_case_file(test_util::case_fixture("service_interruption"));
    const DecisionGraph graph = build_graph(spec.sop);

    for (std::uint64_t seed = 0; seed < 200 && check.ok; ++seed) {
        const Environment env = sample_environment(spec, graph, seed);
        const GroundTruth truth = ground_truth_trajectory(graph, env);

        auto log = std::make_shared<ObservationLog>();
        EnvironmentExecutor executor(env, log);
        OracleDecider decider(log);
        const RunResult result = run(graph, decider, executor);

        check.expect(result.completed(), "seed " + std::to_string(seed) + " failed: " +
                                             (result.failure ? result.failure->detail : ""));
        check.expect(result.trajectory == truth.calls,
                     "seed " + std::to_string(seed) + " trajectory diverges from ground truth");
    }

    BenchOptions options;
    options.runs_per_case = 200;
    options.seed = 0;
    const BenchReport report_data = run_benchmark({spec}, oracle_decider_factory(), options);
    check.expect(report_data.cases.size() == 1 && report_data.cases[0].path_accuracy() == 1.0,
                 "benchmark path accuracy is not 1.000");
    check.expect(report_data.cases[0].leaf_accuracy() == 1.0,
                 "benchmark leaf accuracy is not 1.000");

    const double elapsed = timer.seconds();
    check.expect(elapsed < 10.0, "equivalence pass took " + std::to_string(elapsed) + "s, budget 10s");
    report(3, "oracle trajectories equal ground truth over 200 seeds", check.ok, check.detail);
}

void criterion_4_query_costs() {
    Check check;

    const DecisionGraph distinct = build_graph(parse_sop(
        "- router:\n"
        "    condition: \"always\"\n"
        "    Instructions:\n"
        "    - if case one applies, run probe one:\n"
        "        condition_type: if\n"
        "        API: fn_A\n"
        "    - if case two applies, run probe two:\n"
        "        condition_type: if\n"
        "        API: fn_B\n"
        "    - if case three applies, run probe three:\n"
        "        condition_type: if\n"
        "        API: fn_C\n"));
    {
        DeciderResponse pick;
        pick.selections.push_back(Selection{"fn_B", {}});
        ScriptedDecider decider({pick});
        EchoExecutor executor;
        const RunResult result = run(distinct, decider, executor);
        check.expect(result.completed(), "distinguishable run failed");
        check.expect(!result.trace.empty() && result.trace[0].queries_used == 1,
                     "distinguishable branching should cost exactly 1 query");
    }

    const DecisionGraph shared = build_graph(parse_sop(
        "- router:\n"
        "    condition: \"always\"\n"
        "    Instructions:\n"
        "    - if the record is fresh, refresh it:\n"
        "        condition_type: if\n"
        "        API: fn_A\n"
        "    - if the record is stale, rebuild it:\n"
        "        condition_type: if\n"
        "        API: fn_A\n"
        "    - if nothing matches, skip it:\n"
        "        condition_type: if\n"));
    auto indistinguishable_cost = [&](std::vector<std::string> dummies, int arg_queries) {
        DeciderResponse pick;
        for (const std::string& dummy : dummies) pick.selections.push_back(Selection{dummy, {}});
        std::vector<ScriptStep> plan{pick};
        DeciderResponse arg;
        arg.selections.push_back(Selection{"fn_A", {}});
        for (int i = 0; i < arg_queries; ++i) plan.push_back(arg);

        ScriptedDecider decider(plan);
        EchoExecutor executor;
        const RunResult result = run(shared, decider, executor);
        if (!result.completed() || result.trace.empty()) return -1;
        return result.trace[0].queries_used;
    };
    check.expect(indistinguishable_cost({"explore_subtree_C"}, 0) == 1,
                 "k=0 should cost 1 query");
    check.expect(indistinguishable_cost({"explore_subtree_A"}, 1) == 2,
                 "k=1 should cost 1+1 queries");
    check.expect(indistinguishable_cost({"explore_subtree_A", "explore_subtree_B"}, 2) == 3,
                 "k=2 should cost 1+2 queries");

    report(4, "query accounting: 1 query distinguishable, 1+k with dummy branching", check.ok,
           check.detail);
}

const char* kActingOnlyCase = R"(name: refund_acting_only
tool_outputs:
    check_order: {"type": "categorical", "candidates": ["refundable", "not refundable"]}
    start_refunding_procedure: {"type": "categorical", "candidates": ["refund started"], "variable": "refund_status"}
    notify_customer: {"type": "categorical", "candidates": ["notified"], "variable": "notify_status"}
sop:
- refund_handling:
    condition: "always"
    API: {"name": "RefundFlow", "description": "Refund handling SOP."}
    Instructions:
    - always look up the order status:
        condition: "always"
        API: {"name": "check_order", "description": "Look up the order."}
        Instructions:
        - if the order is refundable, start the refunding procedure:
            condition: {"API": "check_order", "variable": "order_status", "condition_type": "is", "value": "refundable"}
            API: {"name": "start_refunding_procedure", "description": "Begin the refund."}
            Instructions:
            - always notify the customer of the refund outcome:
                condition: "always"
                API: {"name": "notify_customer", "description": "Send the outcome."}
        - if the order is not refundable, notify the customer that no refund applies:
            condition: {"API": "check_order", "variable": "order_status", "condition_type": "is", "value": "not refundable"}
            API: {"name": "notify_customer", "description": "Send the outcome."}
)";

void criterion_5_metric_semantics() {
    Check check;

    const CaseSpec spec = load_case(kActingOnlyCase);
    DeciderFactory skipping = [](const BenchRunContext&) {
        DeciderResponse first;
        first.selections.push_back(Selection{"check_order", {}});
        DeciderResponse second;
        second.selections.push_back(Selection{"notify_customer", {}});
        return std::make_unique<ScriptedDecider>(std::vector<ScriptStep>{first, second});
    };
    BenchOptions options;
    options.runs_per_case = 100;
    options.seed = 2;
    const BenchReport report_data = run_benchmark({spec}, skipping, options);
    check.expect(report_data.cases[0].leaf_accuracy() == 1.0, "leaf accuracy should stay 1.0");
    check.expect(report_data.cases[0].path_accuracy() < 1.0, "path accuracy should drop below 1.0");
    check.expect(report_data.cases[0].failures == 0, "skipping runs must not fail");

    SplitMix64 rng(99);
    const std::vector<std::string> pool = {"fn_a", "fn_b", "fn_c", "fn_d"};
    bool implication_holds = true;
    int exact_pairs = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        GroundTruth truth;
        const std::size_t len = 1 + rng.next() % 5;
        for (std::size_t i = 0; i < len; ++i) truth.calls.push_back(pool[rng.next() % pool.size()]);
        truth.leaf_calls.push_back(truth.calls[rng.next() % truth.calls.size()]);

        Trajectory predicted;
        if (rng.next() % 3 == 0) {
            predicted = truth.calls;
            ++exact_pairs;
        } else {
            const std::size_t plen = rng.next() % 5;
            for (std::size_t i = 0; i < plen; ++i) predicted.push_back(pool[rng.next() % pool.size()]);
        }
        const RunScore score = score_run(predicted, truth);
        if (score.path_match && !score.leaf_match) implication_holds = false;
    }
    check.expect(implication_holds, "path_match implied leaf_match was violated");
    check.expect(exact_pairs > 1000, "generator produced too few exact pairs");

    report(5, "metric semantics: skipped acting-only call and the path=>leaf implication",
           check.ok, check.detail);
}

void criterion_6_determinism() {
    Check check;
    const std::string report_a = test_util::temp_path("acc_report_a");
    const std::string report_b = test_util::temp_path("acc_report_b");
    const std::string trace_a = test_util::temp_path("acc_trace_a");
    const std::string trace_b = test_util::temp_path("acc_trace_b");

    const std::string base = "bench --case " + test_util::case_fixture("service_interruption") +
                             " --decider oracle --runs 50 --seed 17 ";
    const auto first = test_util::run_cli(base + "--out " + report_a + " --trace-out " + trace_a);
    const auto second = test_util::run_cli(base + "--out " + report_b + " --trace-out " + trace_b);
    check.expect(first.exit_code == 0 && second.exit_code == 0, "bench invocations failed");
    check.expect(test_util::read_file(report_a) == test_util::read_file(report_b),
                 "report files differ between identical invocations");
    check.expect(test_util::read_file(trace_a) == test_util::read_file(trace_b),
                 "trace files differ between identical invocations");
    check.expect(!test_util::read_file(trace_a).empty(), "trace file is empty");

    for (const std::string& p : {report_a, report_b, trace_a, trace_b}) std::remove(p.c_str());
    report(6, "identical bench invocations are byte-identical", check.ok, check.detail);
}

void criterion_7_fault_handling() {
    Check check;
    const CaseSpec spec = load_case_file(test_util::case_fixture("service_interruption"));
    const DecisionGraph graph = build_graph(spec.sop);

    // direct run: the unregistered tool name fails with the
    // hallucination class and an empty trajectory
    {
        DeciderResponse bad;
        bad.selections.push_back(Selection{"tool_that_does_not_exist", {}});
        ScriptedDecider decider({bad});
        auto log = std::make_shared<ObservationLog>();
        EnvironmentExecutor executor(sample_environment(spec, graph, 0), log);
        const RunResult result = run(graph, decider, executor);
        check.expect(!result.completed(), "hallucinated call should fail the run");
        check.expect(result.failure && result.failure->kind == FailureKind::HallucinatedCall,
                     "failure class should be hallucinated-call");
        check.expect(result.trajectory.empty(), "trajectory should be empty");
    }

    DeciderFactory hallucinating = [](const BenchRunContext&) {
        DeciderResponse bad;
        bad.selections.push_back(Selection{"tool_that_does_not_exist", {}});
        return std::make_unique<ScriptedDecider>(std::vector<ScriptStep>{bad});
    };
    BenchOptions options;
    options.runs_per_case = 20;
    const BenchReport report_data = run_benchmark({spec}, hallucinating, options);
    check.expect(report_data.cases[0].failures == 20, "all runs should be tallied as failures");
    check.expect(report_data.cases[0].path_accuracy() == 0.0 &&
                     report_data.cases[0].leaf_accuracy() == 0.0,
                 "failed runs must score {false, false}");

    report(7, "hallucinated calls fail the run and are tallied as failures", check.ok,
           check.detail);
}

void criterion_8_refinement_harness() {
    Check check;
    const std::string case_path = test_util::case_fixture("service_interruption");

    const auto clean = test_util::run_cli("refine-check --case " + case_path +
                                          " --decider oracle --runs 20 --seed 0");
    check.expect(clean.exit_code == 0, "oracle refine-check should exit 0");
    check.expect(clean.output.find("needs_refinement=false") != std::string::npos,
                 "oracle refine-check should report no refinement");

    // inject a divergence on seed 7 only: contradict that seed's truth
    const CaseSpec spec = load_case_file(case_path);
    const DecisionGraph graph = build_graph(spec.sop);
    const GroundTruth truth7 = ground_truth_trajectory(graph, sample_environment(spec, graph, 7));
    const std::string wrong_turn =
        truth7.calls.size() <= 1 ? R"({"select": [{"tool": "verify_customer_account"}]})"
                                 : R"({"no_call": true})";

    const std::string script_path = test_util::temp_path("divergent") + ".json";
    test_util::write_file(script_path, std::string(R"({
        "fallback": "oracle",
        "seeds": { "7": [ {"defer": true}, )") + wrong_turn + " ] }\n}\n");

    const auto faulty = test_util::run_cli("refine-check --case " + case_path +
                                           " --decider scripted --script " + script_path +
                                           " --runs 20 --seed 0");
    check.expect(faulty.exit_code == 1, "injected divergence should exit 1");
    check.expect(faulty.output.find("needs_refinement=true") != std::string::npos,
                 "divergence should be reported");
    check.expect(faulty.output.find("seed=7") != std::string::npos,
                 "the divergent seed should be named");
    check.expect(faulty.output.find("seed=8") == std::string::npos,
                 "only seed 7 should be reported");
    std::remove(script_path.c_str());

    report(8, "refinement harness: clean oracle pass, localized injected divergence", check.ok,
           check.detail);
}

void criterion_9_live_llm() {
    const char* endpoint = std::getenv("SOP_LLM_ENDPOINT");
    const char* model = std::getenv("SOP_LLM_MODEL");
    const bool has_token =
        (std::getenv("SOP_LLM_TOKEN") != nullptr) || (std::getenv("OPENAI_API_KEY") != nullptr);
    if (!endpoint || !model || !has_token) {
        report_skip(9, "live LLM run over the refined service SOP",
                    "set SOP_LLM_ENDPOINT, SOP_LLM_MODEL and SOP_LLM_TOKEN to enable");
        return;
    }

    Check check;
    const std::string trace_path = test_util::temp_path("llm_trace") + ".txt";
    const auto result = test_util::run_cli(
        "run --sop " + test_util::sop_fixture("service_interruption_refined") +
        " --decider llm --llm-endpoint " + std::string(endpoint) + " --llm-model " +
        std::string(model) + " --env " + test_util::env_fixture("service_interruption_full_path") +
        " --out " + trace_path);
    check.expect(result.exit_code == 0, "live run did not complete: " + result.output);
    if (result.exit_code == 0) {
        const std::string trace = test_util::read_file(trace_path);
        check.expect(trace.find("step=0") != std::string::npos &&
                         trace.find("queries_used=") != std::string::npos,
                     "trace is not schema-valid");
    }
    std::remove(trace_path.c_str());
    report(9, "live LLM run over the refined service SOP", check.ok, check.detail);
}

}  // namespace

int main() {
    Timer total;
    criterion_1_parser_corpus();
    criterion_2_leaf_weighted_sampling();
    criterion_3_oracle_equivalence();
    criterion_4_query_costs();
    criterion_5_metric_semantics();
    criterion_6_determinism();
    criterion_7_fault_handling();
    criterion_8_refinement_harness();
    criterion_9_live_llm();

    std::printf("----\n%d failed, %d skipped, total %.2fs\n", failures, skips, total.seconds());
    return failures == 0 ? 0 : 1;
}
