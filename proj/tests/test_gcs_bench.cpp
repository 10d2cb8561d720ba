#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <memory>
#include <set>

#include "sopgraph/bench.hpp"
#include "sopgraph/case_spec.hpp"
#include "sopgraph/condition_eval.hpp"
#include "sopgraph/environment.hpp"
#include "sopgraph/ground_truth.hpp"
#include "sopgraph/oracle.hpp"
#include "sopgraph/sampler.hpp"
#include "sopgraph/scoring.hpp"
#include "sopgraph/scripted.hpp"

#include "test_util.hpp"

using namespace sop;

namespace {

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

const char* kCategoricalEvenCase = R"(name: categorical_even
tool_outputs:
    check_kind: {"type": "categorical", "candidates": ["alpha", "beta", "gamma"]}
sop:
- kind_workflow:
    condition: "always"
    API: {"name": "KindFlow", "description": "Categorical branching workflow."}
    Instructions:
    - always check the kind:
        condition: "always"
        API: {"name": "check_kind", "description": "Report the kind."}
        Instructions:
        - if the kind is alpha, take the alpha pair:
            condition: {"API": "check_kind", "variable": "kind", "condition_type": "is", "value": "alpha"}
            Instructions:
            - first alpha outcome:
                condition: "always"
            - second alpha outcome:
                condition: "always"
        - if the kind is beta, take the beta pair:
            condition: {"API": "check_kind", "variable": "kind", "condition_type": "is", "value": "beta"}
            Instructions:
            - first beta outcome:
                condition: "always"
            - second beta outcome:
                condition: "always"
        - if the kind is gamma, take the gamma pair:
            condition: {"API": "check_kind", "variable": "kind", "condition_type": "is", "value": "gamma"}
            Instructions:
            - first gamma outcome:
                condition: "always"
            - second gamma outcome:
                condition: "always"
)";

const char* kNumericalCase = R"(name: numerical_threshold
tool_outputs:
    check_amount: {"type": "numerical"}
sop:
- amount_workflow:
    condition: "always"
    API: {"name": "AmountFlow", "description": "Numerical branching workflow."}
    Instructions:
    - always check the amount:
        condition: "always"
        API: {"name": "check_amount", "description": "Report the amount."}
        Instructions:
        - if the amount exceeds the threshold, take the wide side:
            condition: {"API": "check_amount", "variable": "amount", "condition_type": "gt", "value": 50}
            Instructions:
            - first high outcome:
                condition: "always"
            - second high outcome:
                condition: "always"
            - third high outcome:
                condition: "always"
        - if the amount is at or below the threshold, take the narrow side:
            condition: {"API": "check_amount", "variable": "amount", "condition_type": "le", "value": 50}
)";

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

const Value& single_value(const Environment& env, const std::string& tool,
                          const std::string& variable) {
    const auto& queue = env.outputs.at(tool);
    REQUIRE(queue.size() == 1);
    return queue.front().at(variable);
}

}  // namespace

TEST_CASE("load_case parses the bundled service-interruption case") {
    const CaseSpec spec = load_case_file(test_util::case_fixture("service_interruption"));
    CHECK(spec.name == "service_interruption");
    CHECK(spec.tool_outputs.size() == 8);
    REQUIRE(spec.output_for("authenticate_customer") != nullptr);
    CHECK(spec.output_for("authenticate_customer")->schema.kind == OutputSchema::Kind::Categorical);
    REQUIRE(spec.output_for("check_outage_resolution_time") != nullptr);
    CHECK(spec.output_for("check_outage_resolution_time")->schema.range ==
          std::make_pair(1.0, 24.0));
    CHECK(spec.sop.roots.size() == 1);
    // all five observable condition tools are covered
    CHECK(spec.output_for("query_problem_resolution_status") != nullptr);
}

TEST_CASE("load_case rejects the forced error shapes") {
    SUBCASE("condition tool without a schema") {
        const std::string text = R"(name: broken
tool_outputs:
    other_tool: {"type": "boolean"}
sop:
- w:
    condition: "always"
    Instructions:
    - always probe:
        condition: "always"
        API: x
        Instructions:
        - if x says yes, stop:
            condition: {"API": "x", "variable": "v", "condition_type": "is", "value": "yes"}
)";
        CHECK_THROWS_WITH_AS(load_case(text), doctest::Contains("no output schema"), CaseError);
    }
    SUBCASE("goto edges are loops and loops are not allowed") {
        const std::string text = R"(name: loopy
tool_outputs:
    x: {"type": "boolean"}
sop:
- w:
    condition: "always"
    label: top
    Instructions:
    - always jump back:
        condition: "always"
        goto: top
)";
        CHECK_THROWS_WITH_AS(load_case(text), doctest::Contains("loop not allowed"), CaseError);
    }
    SUBCASE("missing sop section") {
        CHECK_THROWS_AS(load_case("name: empty\n"), CaseError);
    }
    SUBCASE("textual conditions cannot be simulated") {
        const std::string text = R"(name: textual
tool_outputs:
    x: {"type": "boolean"}
sop:
- w:
    condition: "always"
    Instructions:
    - if it looks fine, stop:
        condition_type: if
)";
        CHECK_THROWS_AS(load_case(text), CaseError);
    }
}

TEST_CASE("sampler reproduces the three-quarters boolean split") {
    const CaseSpec spec = load_case(kBooleanWeightedCase);
    const DecisionGraph graph = build_graph(spec.sop);

    const int draws = 20000;
    int trues = 0;
    for (int seed = 0; seed < draws; ++seed) {
        const Environment env =
            sample_environment(spec, graph, static_cast<std::uint64_t>(seed));
        if (canonical_text(single_value(env, "check_flag", "flag")) == "true") ++trues;
    }
    const double p_true = static_cast<double>(trues) / draws;
    CHECK(std::fabs(p_true - 0.75) <= 0.02);
}

TEST_CASE("sampler spreads evenly over equal-leaf categorical branches") {
    const CaseSpec spec = load_case(kCategoricalEvenCase);
    const DecisionGraph graph = build_graph(spec.sop);

    const int draws = 20000;
    std::map<std::string, int> counts;
    for (int seed = 0; seed < draws; ++seed) {
        const Environment env =
            sample_environment(spec, graph, static_cast<std::uint64_t>(seed));
        counts[canonical_text(single_value(env, "check_kind", "kind"))] += 1;
    }
    REQUIRE(counts.size() == 3);
    for (const auto& [value, count] : counts) {
        CAPTURE(value);
        CHECK(std::fabs(static_cast<double>(count) / draws - 1.0 / 3.0) <= 0.02);
    }
}

TEST_CASE("sampler weights numerical sides by leaf counts over an auto range") {
    const CaseSpec spec = load_case(kNumericalCase);
    const DecisionGraph graph = build_graph(spec.sop);

    const int draws = 20000;
    int high = 0;
    for (int seed = 0; seed < draws; ++seed) {
        const Environment env =
            sample_environment(spec, graph, static_cast<std::uint64_t>(seed));
        const double amount = *value_as_number(single_value(env, "check_amount", "amount"));
        // auto range straddles the threshold by max(1, |50|)
        CHECK(amount >= 0.0);
        CHECK(amount <= 100.0);
        CHECK(amount != 50.0);
        if (amount > 50.0) ++high;
    }
    CHECK(std::fabs(static_cast<double>(high) / draws - 0.75) <= 0.02);
}

TEST_CASE("single-candidate categorical draws that value with probability one") {
    const std::string text = R"(name: single
tool_outputs:
    announce: {"type": "categorical", "candidates": ["done"], "variable": "status"}
sop:
- w:
    condition: "always"
    Instructions:
    - always announce:
        condition: "always"
        API: announce
)";
    const CaseSpec spec = load_case(text);
    const DecisionGraph graph = build_graph(spec.sop);
    for (int seed = 0; seed < 64; ++seed) {
        const Environment env = sample_environment(spec, graph, static_cast<std::uint64_t>(seed));
        CHECK(canonical_text(single_value(env, "announce", "status")) == "done");
    }
}

TEST_CASE("unclaimed candidates keep unit weight and raise a warning") {
    // candidates: refundable (1 leaf), not refundable (1 leaf), lost (unclaimed)
    const std::string text = R"(name: residual
tool_outputs:
    check_order: {"type": "categorical", "candidates": ["refundable", "not refundable", "lost"]}
sop:
- w:
    condition: "always"
    Instructions:
    - always look up the order:
        condition: "always"
        API: check_order
        Instructions:
        - if the order is refundable, refund it:
            condition: {"API": "check_order", "variable": "order_status", "condition_type": "is", "value": "refundable"}
        - if the order is not refundable, explain why:
            condition: {"API": "check_order", "variable": "order_status", "condition_type": "is", "value": "not refundable"}
)";
    const CaseSpec spec = load_case(text);
    const DecisionGraph graph = build_graph(spec.sop);

    std::vector<SamplerWarning> warnings;
    sample_environment(spec, graph, 0, &warnings);
    REQUIRE_FALSE(warnings.empty());
    CHECK(warnings[0].message.find("lost") != std::string::npos);

    const int draws = 20000;
    int lost = 0;
    for (int seed = 0; seed < draws; ++seed) {
        const Environment env = sample_environment(spec, graph, static_cast<std::uint64_t>(seed));
        if (canonical_text(single_value(env, "check_order", "order_status")) == "lost") ++lost;
    }
    CHECK(std::fabs(static_cast<double>(lost) / draws - 1.0 / 3.0) <= 0.02);
}

TEST_CASE("sampling is a pure function of case and seed") {
    const CaseSpec spec = load_case_file(test_util::case_fixture("service_interruption"));
    const DecisionGraph graph = build_graph(spec.sop);

    CHECK(environment_to_json(sample_environment(spec, graph, 41)) ==
          environment_to_json(sample_environment(spec, graph, 41)));

    std::set<std::string> distinct;
    for (std::uint64_t seed = 0; seed < 32; ++seed) {
        distinct.insert(environment_to_json(sample_environment(spec, graph, seed)));
    }
    CHECK(distinct.size() > 1);
}

TEST_CASE("ground truth trajectories for the service-interruption case") {
    const CaseSpec spec = load_case_file(test_util::case_fixture("service_interruption"));
    const DecisionGraph graph = build_graph(spec.sop);

    auto env_with = [](std::initializer_list<std::pair<std::string, Observation>> entries) {
        Environment env;
        for (const auto& [tool, obs] : entries) env.outputs[tool].push_back(obs);
        return env;
    };

    SUBCASE("failed authentication") {
        const GroundTruth truth = ground_truth_trajectory(
            graph, env_with({{"authenticate_customer",
                              {{"authentication_status", std::string("failed")}}}}));
        CHECK(truth.calls == Trajectory{"authenticate_customer"});
        CHECK(truth.leaf_calls == std::vector<std::string>{"authenticate_customer"});
    }
    SUBCASE("inactive account") {
        const GroundTruth truth = ground_truth_trajectory(
            graph,
            env_with({{"authenticate_customer", {{"authentication_status", std::string("success")}}},
                      {"verify_customer_account",
                       {{"account_status", std::string("inactive due to unpaid bill")}}}}));
        CHECK(truth.calls == Trajectory{"authenticate_customer", "verify_customer_account"});
    }
    SUBCASE("full troubleshooting path") {
        const GroundTruth truth = ground_truth_trajectory(
            graph,
            env_with(
                {{"authenticate_customer", {{"authentication_status", std::string("success")}}},
                 {"verify_customer_account", {{"account_status", std::string("active")}}},
                 {"check_area_outages", {{"outage_status", std::string("none")}}},
                 {"assess_line_connection_status", {{"connection_status", std::string("operational")}}},
                 {"check_interruption_troubleshooting_guide",
                  {{"guide_status", std::string("guide provided")}}},
                 {"query_problem_resolution_status", {{"problem_status", std::string("resolved")}}}}));
        CHECK(truth.calls == Trajectory{"authenticate_customer", "verify_customer_account",
                                        "check_area_outages", "assess_line_connection_status",
                                        "check_interruption_troubleshooting_guide",
                                        "query_problem_resolution_status"});
        CHECK(truth.leaf_calls == std::vector<std::string>{"query_problem_resolution_status"});
    }
    SUBCASE("missing observation surfaces") {
        CHECK_THROWS_AS((ground_truth_trajectory(graph, Environment{})), EvalError);
    }
    SUBCASE("derivation depends only on graph and environment") {
        const Environment env = sample_environment(spec, graph, 123);
        const GroundTruth a = ground_truth_trajectory(graph, env);
        const GroundTruth b = ground_truth_trajectory(graph, env);
        CHECK(a.calls == b.calls);
        CHECK(a.leaf_calls == b.leaf_calls);
    }
}

TEST_CASE("ground truth cascades over always-guarded siblings") {
    const CaseSpec spec = load_case(kBooleanWeightedCase);
    const DecisionGraph graph = build_graph(spec.sop);
    Environment env;
    env.outputs["check_flag"].push_back({{"flag", true}});

    const GroundTruth truth = ground_truth_trajectory(graph, env);
    CHECK(truth.calls == Trajectory{"check_flag"});
    // three wide-side paths all end after the same call
    CHECK(truth.leaf_calls ==
          std::vector<std::string>{"check_flag", "check_flag", "check_flag"});
    CHECK_FALSE(truth.ambiguous);
}

TEST_CASE("ground truth reports ambiguity and keeps the first structured branch") {
    const std::string text = R"(name: ambiguous
tool_outputs:
    probe: {"type": "numerical"}
sop:
- w:
    condition: "always"
    Instructions:
    - always probe:
        condition: "always"
        API: probe
        Instructions:
        - if the value is above one, first reading:
            condition: {"API": "probe", "variable": "v", "condition_type": "gt", "value": 1}
        - if the value is above two, second reading:
            condition: {"API": "probe", "variable": "v", "condition_type": "gt", "value": 2}
)";
    const CaseSpec spec = load_case(text);
    const DecisionGraph graph = build_graph(spec.sop);
    Environment env;
    env.outputs["probe"].push_back({{"v", 10.0}});

    const GroundTruth truth = ground_truth_trajectory(graph, env);
    CHECK(truth.ambiguous);
    CHECK(truth.calls == Trajectory{"probe"});
}

TEST_CASE("score_run definitions") {
    GroundTruth truth;
    truth.calls = {"check_order", "start_refunding_procedure", "notify_customer"};
    truth.leaf_calls = {"notify_customer"};

    SUBCASE("exact match") {
        const RunScore score = score_run(truth.calls, truth);
        CHECK(score.path_match);
        CHECK(score.leaf_match);
    }
    SUBCASE("dropped acting-only intermediate keeps leaf accuracy") {
        const RunScore score = score_run({"check_order", "notify_customer"}, truth);
        CHECK_FALSE(score.path_match);
        CHECK(score.leaf_match);
    }
    SUBCASE("missing leaf call fails both") {
        const RunScore score = score_run({"check_order", "start_refunding_procedure"}, truth);
        CHECK_FALSE(score.path_match);
        CHECK_FALSE(score.leaf_match);
    }
}

TEST_CASE("property: path_match implies leaf_match over randomized pairs") {
    SplitMix64 rng(2024);
    const std::vector<std::string> pool = {"fn_a", "fn_b", "fn_c", "fn_d", "fn_e"};
    int path_matches = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        GroundTruth truth;
        const std::size_t len = 1 + rng.next() % 6;
        for (std::size_t i = 0; i < len; ++i) truth.calls.push_back(pool[rng.next() % pool.size()]);
        // leaf calls are always drawn from the truth calls, as derivation guarantees
        const std::size_t leaves = 1 + rng.next() % 2;
        for (std::size_t i = 0; i < leaves; ++i) {
            truth.leaf_calls.push_back(truth.calls[rng.next() % truth.calls.size()]);
        }

        Trajectory predicted;
        switch (rng.next() % 3) {
            case 0: predicted = truth.calls; break;  // exact
            case 1: {  // random drop
                predicted = truth.calls;
                predicted.erase(predicted.begin() +
                                static_cast<std::ptrdiff_t>(rng.next() % predicted.size()));
                break;
            }
            default: {  // unrelated
                const std::size_t plen = rng.next() % 6;
                for (std::size_t i = 0; i < plen; ++i) {
                    predicted.push_back(pool[rng.next() % pool.size()]);
                }
                break;
            }
        }
        const RunScore score = score_run(predicted, truth);
        if (score.path_match) {
            ++path_matches;
            CHECK(score.leaf_match);
        }
    }
    CHECK(path_matches > 0);  // the property was actually exercised
}

TEST_CASE("oracle benchmark scores perfect accuracy") {
    const CaseSpec spec = load_case_file(test_util::case_fixture("service_interruption"));
    BenchOptions options;
    options.runs_per_case = 100;
    options.seed = 0;

    const BenchReport report = run_benchmark({spec}, oracle_decider_factory(), options);
    REQUIRE(report.cases.size() == 1);
    CHECK(report.cases[0].path_accuracy() == 1.0);
    CHECK(report.cases[0].leaf_accuracy() == 1.0);
    CHECK(report.cases[0].failures == 0);
    CHECK(report.mean_path_accuracy() == 1.0);
}

TEST_CASE("parallel benchmark execution aggregates identically") {
    const CaseSpec spec = load_case_file(test_util::case_fixture("service_interruption"));
    std::string serial_traces, parallel_traces;
    BenchOptions serial;
    serial.runs_per_case = 40;
    serial.seed = 11;
    serial.trace_sink = &serial_traces;
    BenchOptions parallel = serial;
    parallel.parallelism = 4;
    parallel.trace_sink = &parallel_traces;

    const BenchReport a = run_benchmark({spec}, oracle_decider_factory(), serial);
    const BenchReport b = run_benchmark({spec}, oracle_decider_factory(), parallel);
    CHECK(format_report_records(a) == format_report_records(b));
    CHECK(serial_traces == parallel_traces);
    CHECK_FALSE(serial_traces.empty());
}

TEST_CASE("a decider that skips the acting-only call keeps leaf accuracy only") {
    const CaseSpec spec = load_case(kActingOnlyCase);

    DeciderFactory skipping = [](const BenchRunContext&) {
        DeciderResponse first;
        first.selections.push_back(Selection{"check_order", {}});
        DeciderResponse second;
        second.selections.push_back(Selection{"notify_customer", {}});
        return std::make_unique<ScriptedDecider>(
            std::vector<ScriptStep>{first, second});
    };

    BenchOptions options;
    options.runs_per_case = 100;
    options.seed = 5;
    const BenchReport report = run_benchmark({spec}, skipping, options);
    REQUIRE(report.cases.size() == 1);
    CHECK(report.cases[0].leaf_accuracy() == 1.0);
    CHECK(report.cases[0].path_accuracy() < 1.0);
    CHECK(report.cases[0].path_accuracy() > 0.0);
    CHECK(report.cases[0].failures == 0);
}

TEST_CASE("hallucinating deciders are tallied as failures scoring false/false") {
    const CaseSpec spec = load_case_file(test_util::case_fixture("service_interruption"));
    DeciderFactory hallucinating = [](const BenchRunContext&) {
        DeciderResponse bad;
        bad.selections.push_back(Selection{"tool_that_does_not_exist", {}});
        return std::make_unique<ScriptedDecider>(std::vector<ScriptStep>{bad});
    };

    BenchOptions options;
    options.runs_per_case = 10;
    const BenchReport report = run_benchmark({spec}, hallucinating, options);
    CHECK(report.cases[0].failures == 10);
    CHECK(report.cases[0].path_accuracy() == 0.0);
    CHECK(report.cases[0].leaf_accuracy() == 0.0);
}

TEST_CASE("refinement check is clean under the oracle and localizes one injected fault") {
    const CaseSpec spec = load_case_file(test_util::case_fixture("service_interruption"));
    const DecisionGraph graph = build_graph(spec.sop);

    SUBCASE("oracle never diverges") {
        const RefineReport report = refinement_check(spec, oracle_decider_factory(), 20, 0);
        CHECK_FALSE(report.needs_refinement);
        CHECK(report.divergent.empty());
    }

    SUBCASE("zero runs never need refinement") {
        const RefineReport report = refinement_check(spec, oracle_decider_factory(), 0, 0);
        CHECK_FALSE(report.needs_refinement);
        CHECK(report.divergent.empty());
    }

    SUBCASE("a decider diverging on seed 7 only is named") {
        // pick the response that contradicts the ground truth at seed 7
        const Environment env7 = sample_environment(spec, graph, 7);
        const GroundTruth truth7 = ground_truth_trajectory(graph, env7);

        DeciderResponse wrong_turn;
        if (truth7.calls.size() <= 1) {
            wrong_turn.selections.push_back(Selection{"verify_customer_account", {}});
        } else {
            wrong_turn.no_call = true;  // take the failed-authentication branch instead
        }

        DeciderFactory single_fault = [&](const BenchRunContext& context)
            -> std::unique_ptr<Decider> {
            auto fallback = std::make_shared<OracleDecider>(context.log);
            if (context.seed == 7) {
                return std::make_unique<ScriptedDecider>(
                    std::vector<ScriptStep>{std::nullopt, wrong_turn}, fallback);
            }
            return std::make_unique<ScriptedDecider>(std::vector<ScriptStep>{}, fallback);
        };

        const RefineReport report = refinement_check(spec, single_fault, 20, 0);
        CHECK(report.needs_refinement);
        REQUIRE(report.divergent.size() == 1);
        CHECK(report.divergent[0].seed == 7);
        CHECK(report.divergent[0].predicted != report.divergent[0].truth);

        const std::string rendered = format_refine_report(report);
        CHECK(rendered.find("seed=7") != std::string::npos);
    }
}

TEST_CASE("benchmark rejects zero runs") {
    const CaseSpec spec = load_case_file(test_util::case_fixture("service_interruption"));
    BenchOptions options;
    options.runs_per_case = 0;
    CHECK_THROWS_AS((run_benchmark({spec}, oracle_decider_factory(), options)),
                    std::invalid_argument);
}
