#pragma once

#include "rex/core.hpp"
#include "rex/engine.hpp"
#include "rex/errors.hpp"
#include "rex/policies.hpp"

#include <json.hpp>

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace rex {

inline nlohmann::ordered_json policy_to_json(const PolicyConfig& cfg) {
    nlohmann::ordered_json j;
    j["policy"] = policy_name(cfg);
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, RexPolicy>) j["c"] = p.c;
            else if constexpr (std::is_same_v<T, GreedyPolicy>) j["empty_value"] = p.empty_value;
            else if constexpr (std::is_same_v<T, BfsPolicy>) j["branching"] = p.branching;
            else j["width"] = p.width;
        },
        cfg);
    return j;
}

inline PolicyConfig policy_from_json(const nlohmann::json& j) {
    const std::string name = j.at("policy").get<std::string>();
    if (name == "rex") return RexPolicy{j.at("c").get<double>()};
    if (name == "greedy") return GreedyPolicy{j.at("empty_value").get<double>()};
    if (name == "bfs") return BfsPolicy{j.at("branching").get<int>()};
    if (name == "fixed-width") return FixedWidthPolicy{j.at("width").get<int>()};
    throw ConfigError("unknown policy name: " + name);
}

/// Line-delimited JSON run log: one header record (config, seed), one record
/// per search event, one footer record (result summary).
inline void write_run_log(std::ostream& out, const SearchConfig& cfg, const SearchResult& res) {
    nlohmann::ordered_json header;
    header["type"] = "header";
    header["problem"] = cfg.problem_id;
    header["config"] = policy_to_json(cfg.policy);
    header["budget"] = cfg.budget;
    header["seed"] = cfg.seed;
    out << header.dump() << '\n';

    for (const SearchEvent& ev : res.events) {
        const ProgramNode& node = res.tree.node(ev.new_node_id);
        nlohmann::ordered_json j;
        j["step"] = ev.step;
        j["selected_id"] = ev.selected_id;
        if (ev.counterexample_id) j["counterexample_id"] = *ev.counterexample_id;
        else j["counterexample_id"] = nullptr;
        j["new_node_id"] = ev.new_node_id;
        j["reward"] = ev.reward;
        j["heuristic"] = node.heuristic;
        j["depth"] = node.depth;
        out << j.dump() << '\n';
    }

    nlohmann::ordered_json footer;
    footer["type"] = "footer";
    footer["solved"] = res.solved;
    footer["calls_used"] = res.calls_used;
    if (res.solution_id) footer["solution_id"] = *res.solution_id;
    else footer["solution_id"] = nullptr;
    footer["nodes"] = res.tree.size();
    if (res.aborted) {
        footer["aborted"] = true;
        footer["diagnostic"] = res.diagnostic;
    }
    out << footer.dump() << '\n';
}

inline std::string run_log_to_string(const SearchConfig& cfg, const SearchResult& res) {
    std::ostringstream os;
    write_run_log(os, cfg, res);
    return os.str();
}

struct LogEvent {
    SearchEvent event;
    double heuristic = 0.0;
    int depth = 0;
};

struct ParsedRunLog {
    SearchConfig config;
    std::vector<LogEvent> events;
    bool solved = false;
    int calls_used = 0;
};

inline ParsedRunLog read_run_log(std::istream& in) {
    ParsedRunLog log;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        const std::string type = j.value("type", "");
        if (type == "header") {
            log.config.problem_id = j.at("problem").get<std::string>();
            log.config.policy = policy_from_json(j.at("config"));
            log.config.budget = j.at("budget").get<int>();
            log.config.seed = j.at("seed").get<std::uint64_t>();
            have_header = true;
        } else if (type == "footer") {
            log.solved = j.at("solved").get<bool>();
            log.calls_used = j.at("calls_used").get<int>();
        } else {
            LogEvent ev;
            ev.event.step = j.at("step").get<int>();
            ev.event.selected_id = j.at("selected_id").get<NodeId>();
            if (!j.at("counterexample_id").is_null()) {
                ev.event.counterexample_id = j.at("counterexample_id").get<int>();
            }
            ev.event.new_node_id = j.at("new_node_id").get<NodeId>();
            ev.event.reward = j.at("reward").get<int>();
            ev.heuristic = j.at("heuristic").get<double>();
            ev.depth = j.at("depth").get<int>();
            log.events.push_back(std::move(ev));
        }
    }
    if (!have_header) throw Error("run log has no header record");
    return log;
}

struct ReplayReport {
    int steps = 0;
    int mismatches = 0;
    std::vector<std::string> details;

    bool conformant() const { return mismatches == 0; }
};

/// Re-derive every selection from the recorded tree prefix and the stream
/// state implied by the header seed, and compare against the log. The tree
/// is reconstructed from the recorded heuristics, so fail counts and policy
/// scratch state evolve exactly as they did during the original run.
inline ReplayReport replay_log(const ParsedRunLog& log) {
    ReplayReport report;
    RandomStream select_rng = RandomStream::derive(log.config.seed, "select");
    Policy policy(log.config.policy);
    RefinementTree tree;

    for (const LogEvent& ev : log.events) {
        ++report.steps;
        const NodeId selected = policy.select(tree, select_rng);
        if (selected != ev.event.selected_id) {
            ++report.mismatches;
            report.details.push_back("step " + std::to_string(ev.event.step) + ": policy chose " +
                                     std::to_string(selected) + ", log has " +
                                     std::to_string(ev.event.selected_id));
        }
        // Follow the log even on mismatch so later steps stay comparable.
        const NodeId child =
            tree.add_summary_child(ev.event.selected_id, ev.heuristic, ev.event.step);
        if (child != ev.event.new_node_id) {
            ++report.mismatches;
            report.details.push_back("step " + std::to_string(ev.event.step) +
                                     ": node ids diverge");
        }
        if (ev.event.reward == 0) {
            policy.note_refinement(ev.event.selected_id, child);
        }
    }
    return report;
}

} // namespace rex
