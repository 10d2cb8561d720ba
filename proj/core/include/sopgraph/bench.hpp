#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "sopgraph/case_spec.hpp"
#include "sopgraph/decider.hpp"
#include "sopgraph/engine.hpp"
#include "sopgraph/environment.hpp"
#include "sopgraph/ground_truth.hpp"
#include "sopgraph/sampler.hpp"
#include "sopgraph/scoring.hpp"

namespace sop {

/// Everything a decider implementation may need for one benchmark run.
struct BenchRunContext {
    const DecisionGraph& graph;
    const CaseSpec& spec;
    const Environment& env;
    std::shared_ptr<const ObservationLog> log;
    std::uint64_t seed;
};

using DeciderFactory = std::function<std::unique_ptr<Decider>(const BenchRunContext&)>;

DeciderFactory oracle_decider_factory();

struct CaseResult {
    std::string case_name;
    int runs = 0;
    int path_hits = 0;
    int leaf_hits = 0;
    int failures = 0;  // runs that ended in an engine failure

    double path_accuracy() const { return runs ? static_cast<double>(path_hits) / runs : 0.0; }
    double leaf_accuracy() const { return runs ? static_cast<double>(leaf_hits) / runs : 0.0; }
};

struct BenchReport {
    std::vector<CaseResult> cases;

    double mean_path_accuracy() const;
    double mean_leaf_accuracy() const;
    int total_failures() const;
};

struct BenchOptions {
    int runs_per_case = 100;
    std::uint64_t seed = 0;
    int step_limit = 50;
    int parallelism = 1;
    /// When set, receives the per-run traces in deterministic
    /// (case, run) order, prefixed with their case name and seed.
    std::string* trace_sink = nullptr;
};

/// Runs every case runs_per_case times with per-run environments sampled
/// at seed + i, scores each completed run against the ground truth and
/// tallies failed runs as {path false, leaf false}. Runs may execute
/// concurrently; aggregation order is always (case, run).
BenchReport run_benchmark(const std::vector<CaseSpec>& cases,
                          const DeciderFactory& factory,
                          const BenchOptions& options);

/// Key/value records per case plus the aggregate line.
std::string format_report_records(const BenchReport& report);

/// Human-readable accuracy table.
std::string format_report_table(const BenchReport& report);

struct Divergence {
    std::uint64_t seed = 0;
    Trajectory predicted;
    Trajectory truth;
    bool run_failed = false;
    std::string failure;
};

struct RefineReport {
    bool needs_refinement = false;
    std::vector<Divergence> divergent;
    int runs = 0;
};

/// Seeded refinement check: n_runs trials at seed + i, divergence means
/// the run trajectory differs from the ground truth (failed runs count
/// as divergent). n_runs = 0 reports no refinement needed.
RefineReport refinement_check(const CaseSpec& spec,
                              const DeciderFactory& factory,
                              int n_runs = 20,
                              std::uint64_t seed = 0,
                              int step_limit = 50);

std::string format_refine_report(const RefineReport& report);

}  // namespace sop
