#pragma once

#include "rex/core.hpp"
#include "rex/errors.hpp"
#include "rex/policies.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace rex {

/// Compact per-run outcome used by the aggregation layer.
struct RunOutcome {
    bool solved = false;
    int calls_used = 0;
};

/// Entry t-1 = fraction of runs solved within t calls. Cumulative, hence
/// non-decreasing.
inline std::vector<double> success_curve(const std::vector<RunOutcome>& outcomes, int budget) {
    if (budget < 1) throw ConfigError("success_curve: budget must be >= 1");
    std::vector<int> solved_at(static_cast<std::size_t>(budget) + 1, 0);
    for (const RunOutcome& r : outcomes) {
        if (r.solved && r.calls_used >= 1 && r.calls_used <= budget) {
            solved_at[static_cast<std::size_t>(r.calls_used)] += 1;
        }
    }
    std::vector<double> curve(static_cast<std::size_t>(budget), 0.0);
    const double n = outcomes.empty() ? 1.0 : static_cast<double>(outcomes.size());
    int cumulative = 0;
    for (int t = 1; t <= budget; ++t) {
        cumulative += solved_at[static_cast<std::size_t>(t)];
        curve[static_cast<std::size_t>(t) - 1] = static_cast<double>(cumulative) / n;
    }
    return curve;
}

inline std::vector<double> success_curve(const std::vector<SearchResult>& results, int budget) {
    std::vector<RunOutcome> outcomes;
    outcomes.reserve(results.size());
    for (const SearchResult& r : results) outcomes.push_back({r.solved, r.calls_used});
    return success_curve(outcomes, budget);
}

/// Arithmetic mean of the success curve; dividing by the budget keeps AUC in
/// [0, 1] regardless of the budget convention.
inline double auc_of(const std::vector<double>& curve) {
    if (curve.empty()) return 0.0;
    double sum = 0.0;
    for (double v : curve) sum += v;
    return sum / static_cast<double>(curve.size());
}

/// Median with unsolved runs counted as +infinity, so a problem only gets a
/// finite calls-to-solve when at least half its replicates solved.
inline double median_calls(std::vector<double> values) {
    if (values.empty()) return std::numeric_limits<double>::infinity();
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

/// Metrics for one (policy, hyperparameter) configuration.
struct ConfigMetrics {
    PolicyConfig config;
    std::vector<double> curve;
    double auc = 0.0;
    double final_rate = 0.0;
    /// problem id -> median calls-to-solve across replicates (finite only).
    std::map<std::string, double> problem_calls;
};

struct MetricsTable {
    int budget = 0;
    std::vector<ConfigMetrics> entries;

    const ConfigMetrics* find(const std::string& label) const {
        for (const ConfigMetrics& e : entries) {
            if (policy_label(e.config) == label) return &e;
        }
        return nullptr;
    }
};

/// Ratio of median calls-to-solve of `a` over `b`, restricted to the
/// problems both methods solved. Greater than 1 means `b` is faster.
inline double speedup(const ConfigMetrics& a, const ConfigMetrics& b) {
    std::vector<double> a_calls, b_calls;
    for (const auto& [problem, calls] : a.problem_calls) {
        const auto it = b.problem_calls.find(problem);
        if (it != b.problem_calls.end()) {
            a_calls.push_back(calls);
            b_calls.push_back(it->second);
        }
    }
    if (a_calls.empty()) {
        throw UndefinedSpeedupError("speedup: no commonly solved problems between " +
                                    policy_label(a.config) + " and " + policy_label(b.config));
    }
    return median_calls(std::move(a_calls)) / median_calls(std::move(b_calls));
}

struct SweepRow {
    std::string policy;
    std::string param;
    double auc = 0.0;
    double final_rate = 0.0;
    double score = 0.0; // (auc + final) / 2
};

struct SweepReport {
    std::vector<SweepRow> ranking;
    /// policy name -> max-min score across its own hyperparameter grid.
    std::map<std::string, double> spreads;
};

/// Rank every configuration by (AUC + final)/2, ties broken lexicographically
/// by policy name then parameter, and report each method's score spread.
inline SweepReport make_sweep(const MetricsTable& table) {
    SweepReport report;
    for (const ConfigMetrics& e : table.entries) {
        SweepRow row;
        row.policy = policy_name(e.config);
        row.param = policy_param(e.config);
        row.auc = e.auc;
        row.final_rate = e.final_rate;
        row.score = 0.5 * (e.auc + e.final_rate);
        report.ranking.push_back(std::move(row));
    }
    std::sort(report.ranking.begin(), report.ranking.end(), [](const SweepRow& a, const SweepRow& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.policy != b.policy) return a.policy < b.policy;
        return a.param < b.param;
    });
    std::map<std::string, std::pair<double, double>> range; // policy -> (min,max)
    for (const SweepRow& row : report.ranking) {
        auto [it, inserted] = range.try_emplace(row.policy, row.score, row.score);
        if (!inserted) {
            it->second.first = std::min(it->second.first, row.score);
            it->second.second = std::max(it->second.second, row.score);
        }
    }
    for (const auto& [policy, mm] : range) {
        report.spreads[policy] = mm.second - mm.first;
    }
    return report;
}

} // namespace rex
