// Command-line front end: single searches, benchmark runs, hyperparameter
// sweeps, and run-log replay verification.

#include "rex/config.hpp"
#include "rex/dot_export.hpp"
#include "rex/engine.hpp"
#include "rex/harness.hpp"
#include "rex/llm_client.hpp"
#include "rex/metrics.hpp"
#include "rex/oracle.hpp"
#include "rex/run_log.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <string>

namespace {

rex::PolicyConfig policy_from_flags(const std::string& name, double c, double empty_value,
                                    int branching, int width) {
    if (name == "rex") return rex::RexPolicy{c};
    if (name == "greedy") return rex::GreedyPolicy{empty_value};
    if (name == "bfs") return rex::BfsPolicy{branching};
    if (name == "fixed-width") return rex::FixedWidthPolicy{width};
    throw rex::ConfigError("unknown policy: " + name);
}

int cmd_run(const std::string& policy_name, double c, double empty_value, int branching,
            int width, int budget, std::uint64_t seed, const std::string& oracle_kind,
            const std::string& config_path, const std::string& problem_file,
            const std::string& checks, const std::string& dot_out, const std::string& log_out) {
    rex::SearchConfig sc;
    sc.policy = policy_from_flags(policy_name, c, empty_value, branching, width);
    sc.budget = budget;
    sc.seed = seed;

    rex::OracleModel model;
    rex::LLMOracleConfig llm_cfg;
    if (!config_path.empty()) {
        const rex::IniFile ini = rex::load_ini(config_path);
        const std::filesystem::path base = std::filesystem::path(config_path).parent_path();
        if (const rex::IniSection* oracle = ini.find("oracle")) {
            for (const auto& [k, v] : oracle->entries) {
                rex::detail::apply_oracle_key(model, k, v, "[oracle]");
            }
        }
        if (const rex::IniSection* llm = ini.find("llm")) {
            for (const auto& [k, v] : llm->entries) {
                if (k == "endpoint") llm_cfg.endpoint = v;
                else if (k == "api_key") llm_cfg.api_key = v;
                else if (k == "model") llm_cfg.model = v;
                else if (k == "temperature") llm_cfg.temperature = rex::detail::to_double(v, "[llm]");
                else if (k == "max_retries") llm_cfg.max_retries = static_cast<int>(rex::detail::to_int(v, "[llm]"));
                else if (k == "timeout_ms") llm_cfg.timeout = std::chrono::milliseconds(rex::detail::to_int(v, "[llm]"));
                else if (k == "backoff_ms") llm_cfg.backoff_base = std::chrono::milliseconds(rex::detail::to_int(v, "[llm]"));
                else if (k == "initial_template") llm_cfg.initial_template = rex::PromptTemplate::load(base / v);
                else if (k == "refine_template") llm_cfg.refine_template = rex::PromptTemplate::load(base / v);
                else throw rex::ConfigError("[llm]: unknown key '" + k + "'");
            }
        }
    }

    rex::Specification spec;
    std::unique_ptr<rex::RefinementOracle> oracle;
    if (oracle_kind == "sim") {
        sc.problem_id = "sim";
        spec = rex::make_sim_spec(model.k);
        oracle = std::make_unique<rex::SimulatedOracle>(model);
    } else if (oracle_kind == "llm") {
        rex::apply_env_overrides(llm_cfg);
        if (llm_cfg.initial_template.sections.empty() || llm_cfg.refine_template.sections.empty()) {
            throw rex::ConfigError(
                "llm oracle needs initial_template and refine_template ([llm] section of --config)");
        }
        if (problem_file.empty() || checks.empty()) {
            throw rex::ConfigError("llm oracle needs --problem-file and --checks");
        }
        rex::ProblemSpec problem;
        problem.id = "llm";
        problem.use_llm = true;
        problem.description = rex::detail::read_text_file(problem_file);
        problem.checks = rex::detail::split_list(checks, '|');
        sc.problem_id = problem.id;
        spec = rex::make_problem_spec(problem);
        oracle = std::make_unique<rex::LlmOracle>(llm_cfg, problem.description);
    } else {
        throw rex::ConfigError("--oracle must be sim or llm");
    }

    const rex::SearchResult result = rex::run_search(spec, *oracle, sc);
    if (result.aborted) {
        std::cerr << "search aborted: " << result.diagnostic << "\n";
        return 2;
    }
    if (result.solved) {
        std::cout << "solved in " << result.calls_used << " calls (node "
                  << *result.solution_id << ", depth "
                  << result.tree.node(*result.solution_id).depth << ")\n";
    } else {
        std::cout << "not solved within " << result.calls_used << " calls ("
                  << result.tree.size() << " nodes)\n";
    }
    if (!log_out.empty()) {
        std::ofstream out(log_out);
        rex::write_run_log(out, sc, result);
        std::cout << "run log: " << log_out << "\n";
    }
    if (!dot_out.empty()) {
        std::ofstream out(dot_out);
        out << rex::export_dot(result.tree);
        std::cout << "tree: " << dot_out << "\n";
    }
    return result.solved ? 0 : 1;
}

int cmd_bench(const std::string& config_path, const std::string& out_dir, int jobs) {
    rex::BenchmarkConfig cfg = rex::load_benchmark_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (jobs > 0) cfg.jobs = jobs;
    const rex::MetricsTable table = rex::run_benchmark(cfg);
    for (const rex::ConfigMetrics& e : table.entries) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%-28s auc=%.4f final=%.4f solved=%zu/%zu\n",
                      rex::policy_label(e.config).c_str(), e.auc, e.final_rate,
                      e.problem_calls.size(), cfg.problems.size());
        std::cout << buf;
    }
    std::cout << "artifacts in " << cfg.out_dir << "\n";
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir) {
    rex::BenchmarkConfig cfg = rex::load_benchmark_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    const rex::MetricsTable table = rex::run_benchmark(cfg);
    const rex::SweepReport report = rex::make_sweep(table);
    rex::write_sweep_report(std::cout, report);
    if (!cfg.out_dir.empty()) {
        rex::write_sweep_json(std::filesystem::path(cfg.out_dir) / "sweep.json", report);
    }
    return 0;
}

int cmd_replay(const std::string& log_path) {
    std::ifstream in(log_path);
    if (!in) {
        std::cerr << "cannot open " << log_path << "\n";
        return 2;
    }
    const rex::ParsedRunLog log = rex::read_run_log(in);
    const rex::ReplayReport report = rex::replay_log(log);
    std::cout << "replayed " << report.steps << " events, " << report.mismatches
              << " mismatches\n";
    for (const std::string& d : report.details) std::cout << "  " << d << "\n";
    return report.conformant() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bandit-guided iterative refinement search"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Run a single search");
    std::string policy = "rex";
    double c = 20.0, empty_value = 0.0;
    int branching = 3, width = 25, budget = 300;
    std::uint64_t seed = 0;
    std::string oracle_kind = "sim", config_path, problem_file, checks, dot_out, log_out;
    run->add_option("--policy", policy, "rex | greedy | bfs | fixed-width");
    run->add_option("--c", c, "rex: prior strength C");
    run->add_option("--empty-value", empty_value, "greedy: heuristic of the empty program");
    run->add_option("--branching", branching, "bfs: branching factor");
    run->add_option("--width", width, "fixed-width: number of chains");
    run->add_option("--budget", budget, "maximum refinement calls");
    run->add_option("--seed", seed, "run seed");
    run->add_option("--oracle", oracle_kind, "sim | llm");
    run->add_option("--config", config_path, "config file ([oracle]/[llm] sections)");
    run->add_option("--problem-file", problem_file, "llm: problem description file");
    run->add_option("--checks", checks, "llm: constraints, e.g. \"contains:a|contains:b\"");
    run->add_option("--dot-out", dot_out, "write the final tree as DOT");
    run->add_option("--log-out", log_out, "write the JSONL run log");

    // bench
    auto* bench = app.add_subcommand("bench", "Run a benchmark config");
    std::string bench_config, bench_out;
    int bench_jobs = 0;
    bench->add_option("--config", bench_config, "benchmark config file")->required();
    bench->add_option("--out", bench_out, "output directory (overrides config)");
    bench->add_option("--jobs", bench_jobs, "parallel cells (overrides config)");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Rank hyperparameter configurations");
    std::string sweep_config, sweep_out;
    sweep->add_option("--config", sweep_config, "benchmark config file")->required();
    sweep->add_option("--out", sweep_out, "output directory (overrides config)");

    // replay
    auto* replay = app.add_subcommand("replay", "Verify a run log against its policy");
    std::string replay_log_path;
    replay->add_option("--log", replay_log_path, "JSONL run log")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            return cmd_run(policy, c, empty_value, branching, width, budget, seed, oracle_kind,
                           config_path, problem_file, checks, dot_out, log_out);
        }
        if (bench->parsed()) return cmd_bench(bench_config, bench_out, bench_jobs);
        if (sweep->parsed()) return cmd_sweep(sweep_config, sweep_out);
        if (replay->parsed()) return cmd_replay(replay_log_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
