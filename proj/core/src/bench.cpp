#include "sopgraph/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <sstream>
#include <thread>

#include "sopgraph/condition_eval.hpp"
#include "sopgraph/oracle.hpp"

namespace sop {

namespace {

std::string format_accuracy(double value) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.3f", value);
    return buf;
}

std::string trajectory_to_text(const Trajectory& calls) {
    std::string out = "[";
    for (std::size_t i = 0; i < calls.size(); ++i) {
        if (i) out += ", ";
        out += calls[i];
    }
    out += "]";
    return out;
}

struct RunOutcome {
    RunScore score;
    bool failed = false;
    std::string failure;
    Trajectory predicted;
    Trajectory truth;
    std::string trace_text;
};

RunOutcome execute_one(const CaseSpec& spec,
                       const DecisionGraph& graph,
                       const DeciderFactory& factory,
                       std::uint64_t seed,
                       int step_limit,
                       bool want_trace) {
    RunOutcome outcome;
    const Environment env = sample_environment(spec, graph, seed);

    GroundTruth truth;
    try {
        truth = ground_truth_trajectory(graph, env);
    } catch (const std::exception& e) {
        outcome.failed = true;
        outcome.failure = std::string("ground truth underivable: ") + e.what();
        return outcome;
    }
    outcome.truth = truth.calls;

    auto log = std::make_shared<ObservationLog>();
    EnvironmentExecutor executor(env, log);
    BenchRunContext context{graph, spec, env, log, seed};
    std::unique_ptr<Decider> decider = factory(context);

    EngineLimits limits;
    limits.step_limit = step_limit;
    limits.seed = seed;
    const RunResult result = run(graph, *decider, executor, limits);

    outcome.predicted = result.trajectory;
    if (want_trace) outcome.trace_text = format_trace(result.trace);
    if (!result.completed()) {
        outcome.failed = true;
        outcome.failure = failure_kind_to_text(result.failure->kind) + ": " + result.failure->detail;
        outcome.score = RunScore{false, false};
        return outcome;
    }
    outcome.score = score_run(result.trajectory, truth);
    return outcome;
}

}  // namespace

DeciderFactory oracle_decider_factory() {
    return [](const BenchRunContext& context) { return make_oracle_decider(context.log); };
}

double BenchReport::mean_path_accuracy() const {
    if (cases.empty()) return 0.0;
    double total = 0.0;
    for (const CaseResult& c : cases) total += c.path_accuracy();
    return total / static_cast<double>(cases.size());
}

double BenchReport::mean_leaf_accuracy() const {
    if (cases.empty()) return 0.0;
    double total = 0.0;
    for (const CaseResult& c : cases) total += c.leaf_accuracy();
    return total / static_cast<double>(cases.size());
}

int BenchReport::total_failures() const {
    int total = 0;
    for (const CaseResult& c : cases) total += c.failures;
    return total;
}

BenchReport run_benchmark(const std::vector<CaseSpec>& cases,
                          const DeciderFactory& factory,
                          const BenchOptions& options) {
    if (options.runs_per_case < 1) {
        throw std::invalid_argument("runs_per_case must be at least 1");
    }

    BenchReport report;
    const bool want_trace = options.trace_sink != nullptr;

    for (const CaseSpec& spec : cases) {
        const DecisionGraph graph = build_graph(spec.sop);
        std::vector<RunOutcome> outcomes(static_cast<std::size_t>(options.runs_per_case));

        const int workers = std::clamp(options.parallelism, 1, options.runs_per_case);
        if (workers <= 1) {
            for (int i = 0; i < options.runs_per_case; ++i) {
                outcomes[static_cast<std::size_t>(i)] = execute_one(
                    spec, graph, factory, options.seed + static_cast<std::uint64_t>(i),
                    options.step_limit, want_trace);
            }
        } else {
            std::atomic<int> cursor{0};
            auto worker = [&]() {
                for (;;) {
                    const int i = cursor.fetch_add(1);
                    if (i >= options.runs_per_case) return;
                    outcomes[static_cast<std::size_t>(i)] = execute_one(
                        spec, graph, factory, options.seed + static_cast<std::uint64_t>(i),
                        options.step_limit, want_trace);
                }
            };
            std::vector<std::thread> pool;
            pool.reserve(static_cast<std::size_t>(workers));
            for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
            for (std::thread& t : pool) t.join();
        }

        CaseResult result;
        result.case_name = spec.name;
        result.runs = options.runs_per_case;
        for (int i = 0; i < options.runs_per_case; ++i) {
            const RunOutcome& outcome = outcomes[static_cast<std::size_t>(i)];
            if (outcome.failed) result.failures += 1;
            if (outcome.score.path_match) result.path_hits += 1;
            if (outcome.score.leaf_match) result.leaf_hits += 1;
            if (want_trace) {
                *options.trace_sink += "case=" + spec.name +
                                       " run=" + std::to_string(i) +
                                       " seed=" + std::to_string(options.seed +
                                                                 static_cast<std::uint64_t>(i)) +
                                       "\n";
                *options.trace_sink += outcome.trace_text;
            }
        }
        report.cases.push_back(result);
    }
    return report;
}

std::string format_report_records(const BenchReport& report) {
    std::ostringstream out;
    for (const CaseResult& c : report.cases) {
        out << "case=" << c.case_name << " runs=" << c.runs
            << " path_acc=" << format_accuracy(c.path_accuracy())
            << " leaf_acc=" << format_accuracy(c.leaf_accuracy()) << " failures=" << c.failures
            << "\n";
    }
    out << "aggregate cases=" << report.cases.size()
        << " path_acc=" << format_accuracy(report.mean_path_accuracy())
        << " leaf_acc=" << format_accuracy(report.mean_leaf_accuracy())
        << " failures=" << report.total_failures() << "\n";
    return out.str();
}

std::string format_report_table(const BenchReport& report) {
    std::size_t width = std::string("Average").size();
    for (const CaseResult& c : report.cases) width = std::max(width, c.case_name.size());

    std::ostringstream out;
    out << "Case";
    out << std::string(width - 4 + 2, ' ') << "path_acc  leaf_acc  failures\n";
    auto row = [&](const std::string& name, double path, double leaf, int failures) {
        out << name << std::string(width - name.size() + 2, ' ');
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%7.1f%%  %7.1f%%  %8d\n", path * 100.0, leaf * 100.0,
                      failures);
        out << buf;
    };
    for (const CaseResult& c : report.cases) {
        row(c.case_name, c.path_accuracy(), c.leaf_accuracy(), c.failures);
    }
    row("Average", report.mean_path_accuracy(), report.mean_leaf_accuracy(),
        report.total_failures());
    return out.str();
}

RefineReport refinement_check(const CaseSpec& spec,
                              const DeciderFactory& factory,
                              int n_runs,
                              std::uint64_t seed,
                              int step_limit) {
    RefineReport report;
    report.runs = std::max(n_runs, 0);
    if (report.runs == 0) return report;

    const DecisionGraph graph = build_graph(spec.sop);
    for (int i = 0; i < report.runs; ++i) {
        const std::uint64_t run_seed = seed + static_cast<std::uint64_t>(i);
        const RunOutcome outcome =
            execute_one(spec, graph, factory, run_seed, step_limit, /*want_trace=*/false);
        const bool diverged = outcome.failed || outcome.predicted != outcome.truth;
        if (!diverged) continue;
        report.needs_refinement = true;
        report.divergent.push_back(
            Divergence{run_seed, outcome.predicted, outcome.truth, outcome.failed, outcome.failure});
    }
    return report;
}

std::string format_refine_report(const RefineReport& report) {
    std::ostringstream out;
    out << "runs=" << report.runs << " needs_refinement=" << (report.needs_refinement ? "true" : "false")
        << " divergent=" << report.divergent.size() << "\n";
    for (const Divergence& d : report.divergent) {
        out << "seed=" << d.seed;
        if (d.run_failed) {
            out << " failed=" << d.failure;
        }
        out << " predicted=" << trajectory_to_text(d.predicted)
            << " truth=" << trajectory_to_text(d.truth) << "\n";
    }
    return out.str();
}

}  // namespace sop
