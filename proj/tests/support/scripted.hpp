#pragma once

// Scripted fixtures for engine/policy tests: a specification over literal
// bit-strings, an oracle that replays a fixed list of programs, and
// hand-written simulators of the baseline expansion orders. The simulators
// are independent re-derivations of the expected traces, not wrappers over
// the library.

#include "rex/core.hpp"
#include "rex/oracle.hpp"

#include <deque>
#include <string>
#include <vector>

namespace testsupport {

/// Program text "bits:1010" passes conjunct k iff character k-1 is '1'.
inline rex::Specification make_bits_spec(int k) {
    rex::Specification spec;
    for (int i = 1; i <= k; ++i) {
        spec.conjuncts.push_back(rex::Conjunct{i, "bit-" + std::to_string(i)});
    }
    spec.checker = [](const std::string& program, const rex::Conjunct& conj) {
        const std::string prefix = "bits:";
        if (program.rfind(prefix, 0) != 0) throw std::runtime_error("not a bits program");
        const std::size_t idx = prefix.size() + static_cast<std::size_t>(conj.id) - 1;
        if (idx >= program.size()) throw std::runtime_error("bits program too short");
        return program[idx] == '1';
    };
    return spec;
}

inline std::string bits_content(const std::vector<int>& bits) {
    std::string s = "bits:";
    for (int b : bits) s += b ? '1' : '0';
    return s;
}

/// Replays a fixed sequence of program texts, one per refinement call.
class ScriptedOracle final : public rex::RefinementOracle {
public:
    explicit ScriptedOracle(std::vector<std::string> outputs) : outputs_(std::move(outputs)) {}

    int calls() const { return calls_; }

    std::string refine(const rex::ProgramNode&, const std::optional<rex::Conjunct>&,
                       const rex::Specification&, rex::RandomStream&) override {
        if (calls_ >= static_cast<int>(outputs_.size())) {
            throw std::runtime_error("scripted oracle exhausted");
        }
        return outputs_[static_cast<std::size_t>(calls_++)];
    }

private:
    std::vector<std::string> outputs_;
    int calls_ = 0;
};

/// Oracle whose every call throws the given library error.
template <typename E>
class FailingOracle final : public rex::RefinementOracle {
public:
    std::string refine(const rex::ProgramNode&, const std::optional<rex::Conjunct>&,
                       const rex::Specification&, rex::RandomStream&) override {
        throw E("scripted failure");
    }
};

/// Hand simulation of breadth-first expansion: node i is selected `branching`
/// times in creation order; the j-th refinement overall creates node j.
/// Returns the selected node per step for `budget` steps, assuming no
/// refinement ever solves.
inline std::vector<long long> hand_bfs_trace(int branching, int budget) {
    std::vector<long long> selected;
    std::deque<std::pair<long long, int>> queue{{0, 0}};
    long long next_node = 1;
    for (int step = 1; step <= budget; ++step) {
        selected.push_back(queue.front().first);
        if (++queue.front().second >= branching) queue.pop_front();
        queue.emplace_back(next_node++, 0);
    }
    return selected;
}

/// Hand simulation of fixed-width round robin: W root samples, then chains
/// advance in ascending order, never reusing a node.
inline std::vector<long long> hand_fixed_width_trace(int width, int budget) {
    std::vector<long long> selected;
    std::vector<long long> leaves;
    long long next_node = 1;
    for (int step = 1; step <= budget; ++step) {
        const int done = step - 1;
        if (done < width) {
            selected.push_back(0);
            leaves.push_back(next_node++);
        } else {
            const int chain = (done - width) % width;
            selected.push_back(leaves[static_cast<std::size_t>(chain)]);
            leaves[static_cast<std::size_t>(chain)] = next_node++;
        }
    }
    return selected;
}

/// Hand simulation of greedy: root scores empty_value, node j scores h[j-1];
/// argmax with earliest-created tie-break, assuming no refinement solves.
inline std::vector<long long> hand_greedy_trace(double empty_value,
                                                const std::vector<double>& h, int budget) {
    std::vector<long long> selected;
    for (int step = 1; step <= budget; ++step) {
        long long best = 0;
        double best_h = empty_value;
        for (int j = 1; j < step; ++j) {
            if (h[static_cast<std::size_t>(j) - 1] > best_h) {
                best_h = h[static_cast<std::size_t>(j) - 1];
                best = j;
            }
        }
        selected.push_back(best);
    }
    return selected;
}

} // namespace testsupport
