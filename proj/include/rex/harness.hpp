#pragma once

#include "rex/config.hpp"
#include "rex/core.hpp"
#include "rex/dot_export.hpp"
#include "rex/engine.hpp"
#include "rex/errors.hpp"
#include "rex/llm_client.hpp"
#include "rex/metrics.hpp"
#include "rex/oracle.hpp"
#include "rex/run_log.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace rex {

/// Deterministic per-cell seed: adding a policy or problem never perturbs
/// the seeds of existing cells.
inline std::uint64_t cell_seed(std::uint64_t base_seed, const std::string& problem,
                               const PolicyConfig& policy, int replicate) {
    return derive_seed(base_seed, "cell/" + problem + "/" + policy_label(policy) + "/r" +
                                      std::to_string(replicate));
}

/// Mean over problems of the per-problem mean-over-replicates curves.
inline std::vector<double> problem_mean_curve(
    const std::vector<std::vector<RunOutcome>>& by_problem, int budget) {
    std::vector<double> curve(static_cast<std::size_t>(budget), 0.0);
    if (by_problem.empty()) return curve;
    for (const auto& replicates : by_problem) {
        const std::vector<double> c = success_curve(replicates, budget);
        for (std::size_t t = 0; t < curve.size(); ++t) curve[t] += c[t];
    }
    for (double& v : curve) v /= static_cast<double>(by_problem.size());
    return curve;
}

/// Same aggregate computed by pooling every run; equals problem_mean_curve
/// when every problem has the same replicate count.
inline std::vector<double> pooled_curve(const std::vector<std::vector<RunOutcome>>& by_problem,
                                        int budget) {
    std::vector<RunOutcome> all;
    for (const auto& replicates : by_problem) {
        all.insert(all.end(), replicates.begin(), replicates.end());
    }
    return success_curve(all, budget);
}

namespace detail {

inline std::string sanitize_for_filename(std::string s) {
    for (char& c : s) {
        if (c == '/' || c == '\\' || c == ' ') c = '_';
    }
    return s;
}

inline std::unique_ptr<RefinementOracle> make_oracle(const BenchmarkConfig& cfg,
                                                     const ProblemSpec& problem) {
    if (problem.use_llm) {
        return std::make_unique<LlmOracle>(cfg.llm, problem.description);
    }
    return std::make_unique<SimulatedOracle>(problem.model);
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace detail

inline void write_metrics_csv(const std::filesystem::path& path, const MetricsTable& table);
inline void write_summary_json(const std::filesystem::path& path, const BenchmarkConfig& cfg,
                               const MetricsTable& table);

/// Execute every (problem x policy x replicate) cell, aggregate success
/// curves (mean over seeds, then over problems), and write metrics.csv,
/// summary.json and per-run logs under cfg.out_dir (skipped when empty).
/// A cell aborting on a checker error fails the whole run, naming the cell.
inline MetricsTable run_benchmark(const BenchmarkConfig& cfg) {
    cfg.validate();

    struct Cell {
        std::size_t policy_idx;
        std::size_t problem_idx;
        int replicate;
    };
    std::vector<Cell> cells;
    cells.reserve(cfg.policies.size() * cfg.problems.size() * static_cast<std::size_t>(cfg.seeds));
    for (std::size_t pi = 0; pi < cfg.policies.size(); ++pi) {
        for (std::size_t qi = 0; qi < cfg.problems.size(); ++qi) {
            for (int r = 0; r < cfg.seeds; ++r) {
                cells.push_back(Cell{pi, qi, r});
            }
        }
    }

    const bool write_files = !cfg.out_dir.empty();
    const std::filesystem::path out_dir(cfg.out_dir);
    if (write_files) {
        std::filesystem::create_directories(out_dir);
        if (cfg.write_logs) std::filesystem::create_directories(out_dir / "logs");
        if (cfg.write_trees) std::filesystem::create_directories(out_dir / "trees");
    }

    // outcomes[policy][problem][replicate]
    std::vector<std::vector<std::vector<RunOutcome>>> outcomes(
        cfg.policies.size(),
        std::vector<std::vector<RunOutcome>>(cfg.problems.size(),
                                             std::vector<RunOutcome>(static_cast<std::size_t>(cfg.seeds))));

    std::atomic<std::size_t> next{0};
    std::mutex abort_mutex;
    std::string abort_message;

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            {
                std::lock_guard<std::mutex> lock(abort_mutex);
                if (!abort_message.empty()) return;
            }
            const Cell& cell = cells[i];
            const ProblemSpec& problem = cfg.problems[cell.problem_idx];
            const PolicyConfig& policy = cfg.policies[cell.policy_idx];

            SearchConfig sc;
            sc.policy = policy;
            sc.budget = cfg.budget;
            sc.problem_id = problem.id;
            sc.seed = cell_seed(cfg.base_seed, problem.id, policy, cell.replicate);

            const Specification spec = make_problem_spec(problem);
            const auto oracle = detail::make_oracle(cfg, problem);
            const SearchResult result = run_search(spec, *oracle, sc);

            if (result.aborted) {
                std::lock_guard<std::mutex> lock(abort_mutex);
                if (abort_message.empty()) {
                    abort_message = "cell (" + problem.id + ", " + policy_label(policy) + ", r" +
                                    std::to_string(cell.replicate) +
                                    ") aborted: " + result.diagnostic;
                }
                return;
            }
            outcomes[cell.policy_idx][cell.problem_idx][static_cast<std::size_t>(cell.replicate)] =
                RunOutcome{result.solved, result.calls_used};

            if (write_files && (cfg.write_logs || cfg.write_trees)) {
                const std::string stem = detail::sanitize_for_filename(
                    problem.id + "__" + policy_label(policy) + "__r" + std::to_string(cell.replicate));
                if (cfg.write_logs) {
                    std::ofstream log(out_dir / "logs" / (stem + ".jsonl"));
                    write_run_log(log, sc, result);
                }
                if (cfg.write_trees) {
                    std::ofstream dot(out_dir / "trees" / (stem + ".dot"));
                    dot << export_dot(result.tree);
                }
            }
        }
    };

    const int jobs = std::min<int>(cfg.jobs, static_cast<int>(cells.size()));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();

    if (!abort_message.empty()) throw Error(abort_message);

    MetricsTable table;
    table.budget = cfg.budget;
    for (std::size_t pi = 0; pi < cfg.policies.size(); ++pi) {
        ConfigMetrics m;
        m.config = cfg.policies[pi];
        m.curve = problem_mean_curve(outcomes[pi], cfg.budget);
        m.auc = auc_of(m.curve);
        m.final_rate = m.curve.back();
        for (std::size_t qi = 0; qi < cfg.problems.size(); ++qi) {
            std::vector<double> calls;
            calls.reserve(outcomes[pi][qi].size());
            for (const RunOutcome& r : outcomes[pi][qi]) {
                calls.push_back(r.solved ? static_cast<double>(r.calls_used)
                                         : std::numeric_limits<double>::infinity());
            }
            const double med = median_calls(std::move(calls));
            if (std::isfinite(med)) m.problem_calls[cfg.problems[qi].id] = med;
        }
        table.entries.push_back(std::move(m));
    }

    if (write_files) {
        write_metrics_csv(out_dir / "metrics.csv", table);
        write_summary_json(out_dir / "summary.json", cfg, table);
    }
    return table;
}

inline void write_metrics_csv(const std::filesystem::path& path, const MetricsTable& table) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "policy,param,t,success\n";
    for (const ConfigMetrics& e : table.entries) {
        const std::string name = policy_name(e.config);
        const std::string param = policy_param(e.config);
        for (std::size_t t = 0; t < e.curve.size(); ++t) {
            out << name << ',' << param << ',' << (t + 1) << ','
                << detail::format_double(e.curve[t]) << '\n';
        }
    }
}

inline void write_summary_json(const std::filesystem::path& path, const BenchmarkConfig& cfg,
                               const MetricsTable& table) {
    nlohmann::ordered_json j;
    j["budget"] = table.budget;
    j["problems"] = cfg.problems.size();
    j["seeds"] = cfg.seeds;
    j["base_seed"] = cfg.base_seed;

    const ConfigMetrics* best_rex = nullptr;
    j["configs"] = nlohmann::ordered_json::array();
    for (const ConfigMetrics& e : table.entries) {
        nlohmann::ordered_json c;
        c["policy"] = policy_name(e.config);
        c["param"] = policy_param(e.config);
        c["auc"] = e.auc;
        c["final"] = e.final_rate;
        c["score"] = 0.5 * (e.auc + e.final_rate);
        c["solved_problems"] = e.problem_calls.size();
        j["configs"].push_back(std::move(c));
        if (policy_name(e.config) == "rex") {
            if (!best_rex || 0.5 * (e.auc + e.final_rate) >
                                 0.5 * (best_rex->auc + best_rex->final_rate)) {
                best_rex = &e;
            }
        }
    }

    j["speedups"] = nlohmann::ordered_json::array();
    if (best_rex) {
        for (const ConfigMetrics& e : table.entries) {
            if (&e == best_rex || policy_name(e.config) == "rex") continue;
            nlohmann::ordered_json s;
            s["baseline"] = policy_label(e.config);
            s["reference"] = policy_label(best_rex->config);
            try {
                s["median_call_ratio"] = speedup(e, *best_rex);
            } catch (const UndefinedSpeedupError&) {
                s["median_call_ratio"] = nullptr;
            }
            j["speedups"].push_back(std::move(s));
        }
    }

    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

inline void write_sweep_report(std::ostream& out, const SweepReport& report) {
    out << "rank  score     auc       final     policy\n";
    int rank = 1;
    for (const SweepRow& row : report.ranking) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%-5d %-9.4f %-9.4f %-9.4f %s[%s]\n", rank++, row.score,
                      row.auc, row.final_rate, row.policy.c_str(), row.param.c_str());
        out << buf;
    }
    out << "\nscore spread across each method's grid (max - min):\n";
    for (const auto& [policy, spread] : report.spreads) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "  %-12s %.4f\n", policy.c_str(), spread);
        out << buf;
    }
}

inline void write_sweep_json(const std::filesystem::path& path, const SweepReport& report) {
    nlohmann::ordered_json j;
    j["ranking"] = nlohmann::ordered_json::array();
    for (const SweepRow& row : report.ranking) {
        nlohmann::ordered_json r;
        r["policy"] = row.policy;
        r["param"] = row.param;
        r["auc"] = row.auc;
        r["final"] = row.final_rate;
        r["score"] = row.score;
        j["ranking"].push_back(std::move(r));
    }
    j["spreads"] = nlohmann::ordered_json::object();
    for (const auto& [policy, spread] : report.spreads) j["spreads"][policy] = spread;
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

} // namespace rex
