// sop — validate, run, measure and benchmark decision-graph SOPs.
//
// Exit codes: 0 success, 1 domain failure (validation errors, run
// failure, detected divergence), 2 usage/configuration/I-O errors.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "sopgraph/bench.hpp"
#include "sopgraph/case_spec.hpp"
#include "sopgraph/engine.hpp"
#include "sopgraph/environment.hpp"
#include "sopgraph/graph.hpp"
#include "sopgraph/llm_client.hpp"
#include "sopgraph/oracle.hpp"
#include "sopgraph/parser.hpp"
#include "sopgraph/sampler.hpp"
#include "sopgraph/scripted.hpp"
#include "sopgraph/serializer.hpp"
#include "sopgraph/validator.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomainFailure = 1;
constexpr int kExitUsage = 2;

struct DeciderConfig {
    std::string kind = "oracle";  // scripted | oracle | llm
    std::string script_path;
    std::string llm_endpoint;
    std::string llm_model;
    double llm_temperature = 0.0;
    int llm_timeout_seconds = 60;
};

void add_decider_flags(CLI::App* cmd, DeciderConfig& config) {
    cmd->add_option("--decider", config.kind, "Decider implementation: scripted|oracle|llm")
        ->check(CLI::IsMember({"scripted", "oracle", "llm"}));
    cmd->add_option("--script", config.script_path, "Plan file for the scripted decider");
    cmd->add_option("--llm-endpoint", config.llm_endpoint, "Chat-completions endpoint URL");
    cmd->add_option("--llm-model", config.llm_model, "Model name sent to the endpoint");
    cmd->add_option("--llm-temperature", config.llm_temperature, "Sampling temperature")
        ->capture_default_str();
    cmd->add_option("--llm-timeout", config.llm_timeout_seconds, "Per-request timeout in seconds")
        ->capture_default_str();
}

std::string auth_token_from_env() {
    for (const char* name : {"SOP_LLM_TOKEN", "OPENAI_API_KEY"}) {
        if (const char* token = std::getenv(name); token && *token) return token;
    }
    return {};
}

sop::LlmConfig llm_config_from(const DeciderConfig& config) {
    sop::LlmConfig llm;
    llm.endpoint = config.llm_endpoint;
    llm.model = config.llm_model;
    llm.temperature = config.llm_temperature;
    llm.timeout_seconds = config.llm_timeout_seconds;
    llm.auth_token = auth_token_from_env();
    if (llm.endpoint.empty()) throw std::runtime_error("--llm-endpoint is required with --decider llm");
    if (llm.model.empty()) throw std::runtime_error("--llm-model is required with --decider llm");
    if (llm.auth_token.empty()) {
        throw std::runtime_error(
            "no auth token: set SOP_LLM_TOKEN (or OPENAI_API_KEY) in the environment");
    }
    return llm;
}

/// Decider factory for benchmark-style commands; the context gives the
/// scripted decider its per-seed plan and the oracle its observation log.
sop::DeciderFactory make_decider_factory(const DeciderConfig& config) {
    if (config.kind == "oracle") {
        return sop::oracle_decider_factory();
    }
    if (config.kind == "scripted") {
        if (config.script_path.empty()) {
            throw std::runtime_error("--script is required with --decider scripted");
        }
        auto script = std::make_shared<sop::Script>(sop::load_script_file(config.script_path));
        return [script](const sop::BenchRunContext& context) -> std::unique_ptr<sop::Decider> {
            std::shared_ptr<sop::Decider> fallback;
            if (script->oracle_fallback) fallback = sop::make_oracle_decider(context.log);
            return std::make_unique<sop::ScriptedDecider>(script->plan_for(context.seed), fallback);
        };
    }
    const sop::LlmConfig llm = llm_config_from(config);
    return [llm](const sop::BenchRunContext&) -> std::unique_ptr<sop::Decider> {
        return std::make_unique<sop::LlmDecider>(llm);
    };
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

int print_diagnostics(const std::vector<sop::Diagnostic>& diagnostics) {
    for (const sop::Diagnostic& d : diagnostics) {
        std::cout << sop::severity_to_text(d.severity) << " [" << d.code << "] node " << d.node_path
                  << ": " << d.message << "\n";
    }
    return sop::has_errors(diagnostics) ? kExitDomainFailure : kExitOk;
}

int cmd_validate(const std::string& sop_path) {
    sop::SopDocument doc;
    try {
        doc = sop::parse_sop_file(sop_path);
    } catch (const sop::ParseError& e) {
        std::cout << "error [parse] " << e.what() << "\n";
        return kExitDomainFailure;
    }
    const auto diagnostics = sop::validate(doc);
    const int code = print_diagnostics(diagnostics);
    if (code == kExitOk) {
        std::cout << "ok: " << sop_path << " (" << doc.roots.size() << " root"
                  << (doc.roots.size() == 1 ? "" : "s") << ")\n";
    }
    return code;
}

void print_stats_rows(std::ostream& out, const sop::GraphStats& stats) {
    out << "Maximum Depth: " << stats.max_depth << "\n";
    out << "Number of Leaf Nodes: " << stats.leaf_count << "\n";
    out << "Number of Nodes: " << stats.node_count << "\n";
    out << "Number of Non-Leaf Nodes: " << stats.non_leaf_count << "\n";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", stats.avg_children_per_non_leaf);
    out << "Average Children per Node: " << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%.2f", stats.avg_leaf_depth);
    out << "Average Leaf Depth: " << buf << "\n";
    out << "Number of Unique APIs: " << stats.unique_tool_count << "\n";
}

int cmd_stats(const std::string& sop_path) {
    std::vector<fs::path> files;
    if (fs::is_directory(sop_path)) {
        for (const auto& entry : fs::directory_iterator(sop_path)) {
            if (entry.path().extension() == ".sop") files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        if (files.empty()) {
            std::cerr << "no .sop files under " << sop_path << "\n";
            return kExitUsage;
        }
    } else {
        files.emplace_back(sop_path);
    }

    std::vector<sop::GraphStats> all;
    for (const fs::path& file : files) {
        const sop::SopDocument doc = sop::parse_sop_file(file.string());
        const auto diagnostics = sop::validate(doc);
        if (sop::has_errors(diagnostics)) {
            std::cout << "== " << file.string() << "\n";
            print_diagnostics(diagnostics);
            return kExitDomainFailure;
        }
        const sop::GraphStats stats = sop::build_graph(doc).compute_stats();
        if (files.size() > 1) std::cout << "== " << file.string() << "\n";
        print_stats_rows(std::cout, stats);
        all.push_back(stats);
    }

    if (all.size() > 1) {
        auto mean = [&](auto getter) {
            double total = 0.0;
            for (const sop::GraphStats& s : all) total += static_cast<double>(getter(s));
            return total / static_cast<double>(all.size());
        };
        char buf[64];
        std::cout << "== averages over " << all.size() << " files\n";
        auto row = [&](const char* name, double v) {
            std::snprintf(buf, sizeof(buf), "%.2f", v);
            std::cout << name << ": " << buf << "\n";
        };
        row("Average Maximum Depth", mean([](const auto& s) { return s.max_depth; }));
        row("Number of Leaf Nodes", mean([](const auto& s) { return s.leaf_count; }));
        row("Number of Nodes", mean([](const auto& s) { return s.node_count; }));
        row("Number of Non-Leaf Nodes", mean([](const auto& s) { return s.non_leaf_count; }));
        row("Average Children per Node",
            mean([](const auto& s) { return s.avg_children_per_non_leaf; }));
        row("Average Leaf Depth", mean([](const auto& s) { return s.avg_leaf_depth; }));
        row("Number of Unique APIs", mean([](const auto& s) { return s.unique_tool_count; }));
    }
    return kExitOk;
}

int cmd_run(const std::string& sop_path, const DeciderConfig& decider_config,
            const std::string& env_path, std::uint64_t seed, int step_limit,
            const std::string& out_path) {
    const sop::SopDocument doc = sop::parse_sop_file(sop_path);
    const auto diagnostics = sop::validate(doc);
    if (sop::has_errors(diagnostics)) {
        print_diagnostics(diagnostics);
        return kExitDomainFailure;
    }
    const sop::DecisionGraph graph = sop::build_graph(doc);

    auto log = std::make_shared<sop::ObservationLog>();
    std::unique_ptr<sop::Executor> executor;
    if (!env_path.empty()) {
        executor = std::make_unique<sop::EnvironmentExecutor>(sop::load_environment_file(env_path), log);
    } else {
        executor = std::make_unique<sop::EchoExecutor>();
    }

    std::unique_ptr<sop::Decider> decider;
    if (decider_config.kind == "oracle") {
        if (env_path.empty()) throw std::runtime_error("--env is required with --decider oracle");
        decider = sop::make_oracle_decider(log);
    } else if (decider_config.kind == "scripted") {
        if (decider_config.script_path.empty()) {
            throw std::runtime_error("--script is required with --decider scripted");
        }
        const sop::Script script = sop::load_script_file(decider_config.script_path);
        std::shared_ptr<sop::Decider> fallback;
        if (script.oracle_fallback) fallback = sop::make_oracle_decider(log);
        decider = std::make_unique<sop::ScriptedDecider>(script.plan_for(seed), fallback);
    } else {
        decider = std::make_unique<sop::LlmDecider>(llm_config_from(decider_config));
    }

    sop::EngineLimits limits;
    limits.step_limit = step_limit;
    limits.seed = seed;
    const sop::RunResult result = sop::run(graph, *decider, *executor, limits);

    std::string trace_text = sop::format_trace(result.trace);
    trace_text += "result terminal=";
    trace_text += result.completed()
                      ? "completed"
                      : "failed(" + sop::failure_kind_to_text(result.failure->kind) + ")";
    trace_text += " queries=" + std::to_string(result.query_count);
    trace_text += " trajectory=[";
    for (std::size_t i = 0; i < result.trajectory.size(); ++i) {
        if (i) trace_text += ",";
        trace_text += result.trajectory[i];
    }
    trace_text += "]\n";

    if (!out_path.empty()) {
        write_file(out_path, trace_text);
    } else {
        std::cout << trace_text;
    }

    if (!result.completed()) {
        std::cout << "run failed: " << sop::failure_kind_to_text(result.failure->kind) << ": "
                  << result.failure->detail << "\n";
        return kExitDomainFailure;
    }
    std::cout << "trajectory:";
    for (const std::string& call : result.trajectory) std::cout << " " << call;
    std::cout << "\n";
    return kExitOk;
}

int cmd_bench(const std::vector<std::string>& case_paths, const DeciderConfig& decider_config,
              int runs, std::uint64_t seed, int step_limit, int parallel,
              const std::string& out_path, const std::string& trace_out_path) {
    if (runs < 1) {
        std::cerr << "--runs must be at least 1\n";
        return kExitDomainFailure;
    }
    std::vector<sop::CaseSpec> cases;
    for (const std::string& path : case_paths) {
        try {
            cases.push_back(sop::load_case_file(path));
        } catch (const sop::CaseError& e) {
            std::cerr << "invalid case " << path << ": " << e.what() << "\n";
            return kExitDomainFailure;
        }
    }

    const sop::DeciderFactory factory = make_decider_factory(decider_config);
    sop::BenchOptions options;
    options.runs_per_case = runs;
    options.seed = seed;
    options.step_limit = step_limit;
    options.parallelism = parallel;
    std::string traces;
    if (!trace_out_path.empty()) options.trace_sink = &traces;

    const sop::BenchReport report = sop::run_benchmark(cases, factory, options);

    const std::string records = sop::format_report_records(report);
    std::cout << sop::format_report_table(report);
    if (!out_path.empty()) {
        write_file(out_path, records);
    } else {
        std::cout << records;
    }
    if (!trace_out_path.empty()) write_file(trace_out_path, traces);
    return kExitOk;
}

int cmd_refine_check(const std::string& case_path, const DeciderConfig& decider_config, int runs,
                     std::uint64_t seed, int step_limit) {
    sop::CaseSpec spec;
    try {
        spec = sop::load_case_file(case_path);
    } catch (const sop::CaseError& e) {
        std::cerr << "invalid case " << case_path << ": " << e.what() << "\n";
        return kExitUsage;
    }
    const sop::DeciderFactory factory = make_decider_factory(decider_config);
    const sop::RefineReport report = sop::refinement_check(spec, factory, runs, seed, step_limit);
    std::cout << sop::format_refine_report(report);
    return report.needs_refinement ? kExitDomainFailure : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SOP decision-graph toolkit"};
    app.require_subcommand(1);

    std::string sop_path, case_path, env_path, out_path, trace_out_path;
    std::vector<std::string> case_paths;
    std::uint64_t seed = 0;
    int runs = 100;
    int refine_runs = 20;
    int step_limit = 50;
    int parallel = 1;
    DeciderConfig decider_config;

    CLI::App* validate = app.add_subcommand("validate", "Parse a SOP file and report diagnostics");
    validate->add_option("--sop", sop_path, "SOP file")->required();

    CLI::App* stats = app.add_subcommand("stats", "Print decision-graph statistics");
    stats->add_option("--sop", sop_path, "SOP file or directory of .sop files")->required();

    CLI::App* run_cmd = app.add_subcommand("run", "Execute a SOP once and write its trace");
    run_cmd->add_option("--sop", sop_path, "SOP file")->required();
    run_cmd->add_option("--env", env_path, "Environment file of pre-sampled observations");
    run_cmd->add_option("--seed", seed, "Run seed")->capture_default_str();
    run_cmd->add_option("--step-limit", step_limit, "Maximum engine steps")->capture_default_str();
    run_cmd->add_option("--out", out_path, "Trace output file (defaults to stdout)");
    add_decider_flags(run_cmd, decider_config);

    CLI::App* bench = app.add_subcommand("bench", "Run benchmark cases and report accuracy");
    bench->add_option("--case", case_paths, "Case file (repeatable)")->required();
    bench->add_option("--runs", runs, "Runs per case")->capture_default_str();
    bench->add_option("--seed", seed, "Base seed; run i uses seed+i")->capture_default_str();
    bench->add_option("--step-limit", step_limit, "Maximum engine steps per run")
        ->capture_default_str();
    bench->add_option("--parallel", parallel, "Worker threads")->capture_default_str();
    bench->add_option("--out", out_path, "Report records file");
    bench->add_option("--trace-out", trace_out_path, "Consolidated trace file for all runs");
    add_decider_flags(bench, decider_config);

    CLI::App* refine = app.add_subcommand("refine-check", "Detect decider/ground-truth divergence");
    refine->add_option("--case", case_path, "Case file")->required();
    refine->add_option("--runs", refine_runs, "Seeded trials")->capture_default_str();
    refine->add_option("--seed", seed, "Base seed; trial i uses seed+i")->capture_default_str();
    refine->add_option("--step-limit", step_limit, "Maximum engine steps per run")
        ->capture_default_str();
    add_decider_flags(refine, decider_config);

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(sop_path);
        if (stats->parsed()) return cmd_stats(sop_path);
        if (run_cmd->parsed()) {
            return cmd_run(sop_path, decider_config, env_path, seed, step_limit, out_path);
        }
        if (bench->parsed()) {
            return cmd_bench(case_paths, decider_config, runs, seed, step_limit, parallel, out_path,
                             trace_out_path);
        }
        if (refine->parsed()) {
            return cmd_refine_check(case_path, decider_config, refine_runs, seed, step_limit);
        }
    } catch (const sop::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitDomainFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
