#pragma once

#include "rex/core.hpp"
#include "rex/errors.hpp"
#include "rex/oracle.hpp"
#include "rex/policies.hpp"
#include "rex/random.hpp"

#include <cstdint>
#include <string>

namespace rex {

struct SearchConfig {
    PolicyConfig policy;
    int budget = 1;
    std::uint64_t seed = 0;
    std::string problem_id = "default";

    void validate() const {
        rex::validate(policy);
        if (budget < 1) throw ConfigError("search: budget must be >= 1");
    }
};

/// Content recorded for refinements whose oracle call failed outright; it
/// fails every conjunct by construction.
inline constexpr const char* kUnparseableProgram = "<<unparseable>>";

/// The select -> refine -> evaluate -> update loop. Each iteration selects a
/// node via the policy, samples one failing conjunct uniformly (none for the
/// root), asks the oracle for a refinement, scores it, and appends it to the
/// tree; a program satisfying every conjunct stops the search. Failed oracle
/// calls (transport/protocol) consume budget as reward-0 events with a
/// sentinel program; checker errors abort with a diagnostic result. All
/// randomness comes from streams derived from (seed, label), so runs replay
/// bit-exactly.
inline SearchResult run_search(const Specification& spec, RefinementOracle& oracle,
                               const SearchConfig& cfg) {
    cfg.validate();
    spec.validate();

    RandomStream select_rng = RandomStream::derive(cfg.seed, "select");
    RandomStream cex_rng = RandomStream::derive(cfg.seed, "counterexample");
    RandomStream oracle_rng = RandomStream::derive(cfg.seed, "oracle");
    Policy policy(cfg.policy);

    SearchResult res;
    for (int step = 1; step <= cfg.budget; ++step) {
        const NodeId selected = policy.select(res.tree, select_rng);
        const ProgramNode& parent = res.tree.node(selected);

        std::optional<Conjunct> cex;
        if (!parent.is_root()) {
            cex = sample_counterexample(counterexamples(parent.pass_vector, spec), cex_rng);
        }

        std::string content;
        bool call_failed = false;
        try {
            content = oracle.refine(parent, cex, spec, oracle_rng);
        } catch (const TransportError&) {
            call_failed = true;
        } catch (const ProtocolError&) {
            call_failed = true;
        }

        PassVector pv;
        double h = 0.0;
        if (call_failed) {
            content = kUnparseableProgram;
            pv = PassVector::all_false(spec.size());
        } else {
            try {
                pv = evaluate(spec, content);
            } catch (const EvaluationError& e) {
                res.aborted = true;
                res.diagnostic = e.what();
                return res;
            }
            h = heuristic(pv);
        }

        const int reward = pv.all_pass() ? 1 : 0;
        const NodeId child = res.tree.add_child(selected, std::move(content), std::move(pv), h, step);

        SearchEvent ev;
        ev.step = step;
        ev.selected_id = selected;
        if (cex) ev.counterexample_id = cex->id;
        ev.new_node_id = child;
        ev.reward = reward;
        res.events.push_back(ev);
        res.calls_used = step;

        if (reward == 1) {
            res.solved = true;
            res.solution_id = child;
            break;
        }
        policy.note_refinement(selected, child);
    }
    return res;
}

} // namespace rex
