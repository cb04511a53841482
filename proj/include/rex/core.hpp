#pragma once

#include "rex/errors.hpp"
#include "rex/random.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rex {

using NodeId = std::int64_t;
inline constexpr NodeId kRootId = 0;
inline constexpr NodeId kNoParent = -1;

/// One independently checkable constraint of a specification. Ids are
/// 1-based and contiguous; the payload is opaque to the search and only
/// interpreted by the checker.
struct Conjunct {
    int id = 0;
    std::string payload;
};

/// A full specification: an ordered conjunct list plus a pluggable checker
/// evaluating one (program, conjunct) pair. The checker must be
/// deterministic for a fixed pair.
struct Specification {
    using Checker = std::function<bool(const std::string& program, const Conjunct&)>;

    std::vector<Conjunct> conjuncts;
    Checker checker;

    int size() const { return static_cast<int>(conjuncts.size()); }

    void validate() const {
        if (conjuncts.empty()) {
            throw InvalidSpecificationError("specification needs at least one conjunct");
        }
        for (std::size_t i = 0; i < conjuncts.size(); ++i) {
            if (conjuncts[i].id != static_cast<int>(i) + 1) {
                throw InvalidSpecificationError(
                    "conjunct ids must be contiguous from 1; position " +
                    std::to_string(i) + " has id " + std::to_string(conjuncts[i].id));
            }
        }
        if (!checker) {
            throw InvalidSpecificationError("specification has no checker");
        }
    }
};

/// Pass/fail bit per conjunct; bit k-1 says whether the program satisfied
/// conjunct k.
struct PassVector {
    std::vector<bool> bits;

    static PassVector all_false(int k) { return PassVector{std::vector<bool>(k, false)}; }

    std::size_t size() const { return bits.size(); }
    int count_passed() const {
        int n = 0;
        for (bool b : bits) n += b ? 1 : 0;
        return n;
    }
    bool all_pass() const {
        return !bits.empty() && count_passed() == static_cast<int>(bits.size());
    }
};

/// Fraction of conjuncts satisfied, in [0, 1].
inline double heuristic(const PassVector& pv) {
    if (pv.bits.empty()) {
        throw InvalidSpecificationError("heuristic: empty pass vector");
    }
    return static_cast<double>(pv.count_passed()) / static_cast<double>(pv.size());
}

/// Evaluate every conjunct of the specification against a program text.
/// A checker that throws turns into an EvaluationError naming the conjunct.
inline PassVector evaluate(const Specification& spec, const std::string& content) {
    spec.validate();
    PassVector pv;
    pv.bits.reserve(spec.conjuncts.size());
    for (const Conjunct& conj : spec.conjuncts) {
        try {
            pv.bits.push_back(spec.checker(content, conj));
        } catch (const std::exception& e) {
            throw EvaluationError("checker failed on conjunct " + std::to_string(conj.id) +
                                  ": " + e.what());
        }
    }
    return pv;
}

/// The conjuncts the program fails, in id order.
inline std::vector<Conjunct> counterexamples(const PassVector& pv, const Specification& spec) {
    if (pv.size() != spec.conjuncts.size()) {
        throw InvalidSpecificationError("counterexamples: pass vector length " +
                                        std::to_string(pv.size()) + " != conjunct count " +
                                        std::to_string(spec.conjuncts.size()));
    }
    std::vector<Conjunct> out;
    for (std::size_t i = 0; i < pv.bits.size(); ++i) {
        if (!pv.bits[i]) out.push_back(spec.conjuncts[i]);
    }
    return out;
}

/// Uniform draw from a non-empty counterexample list.
inline Conjunct sample_counterexample(const std::vector<Conjunct>& cs, RandomStream& rng) {
    if (cs.empty()) {
        throw CannotRefineSolvedError("sample_counterexample: program has no counterexamples");
    }
    return cs[static_cast<std::size_t>(rng.next_below(cs.size()))];
}

/// One arm of the search: a program, its pass vector and heuristic, and the
/// count of failed refinements made from it. The root (node_id 0) is a
/// synthetic node with empty content and no pass vector.
struct ProgramNode {
    NodeId node_id = 0;
    NodeId parent_id = kNoParent;
    std::string content;
    PassVector pass_vector;
    double heuristic = 0.0;
    int fail_count = 0;
    int depth = 0;
    int created_at_step = 0;

    bool is_root() const { return node_id == kRootId; }
};

/// Append-only refinement tree. Node ids are assigned in creation order and
/// the parent's fail_count is bumped whenever a non-solving child is added,
/// so the tree itself maintains the N counters the policies read.
class RefinementTree {
public:
    RefinementTree() {
        ProgramNode root;
        root.node_id = kRootId;
        root.parent_id = kNoParent;
        nodes_.push_back(std::move(root));
        children_.emplace_back();
    }

    std::size_t size() const { return nodes_.size(); }
    const std::vector<ProgramNode>& nodes() const { return nodes_; }

    const ProgramNode& node(NodeId id) const { return nodes_.at(static_cast<std::size_t>(id)); }
    const ProgramNode& root() const { return nodes_.front(); }
    const std::vector<NodeId>& children(NodeId id) const {
        return children_.at(static_cast<std::size_t>(id));
    }

    NodeId add_child(NodeId parent, std::string content, PassVector pv, double h, int step) {
        check_parent(parent);
        ProgramNode n;
        n.node_id = static_cast<NodeId>(nodes_.size());
        n.parent_id = parent;
        n.content = std::move(content);
        n.pass_vector = std::move(pv);
        n.heuristic = h;
        n.depth = nodes_[static_cast<std::size_t>(parent)].depth + 1;
        n.created_at_step = step;
        return append(parent, std::move(n));
    }

    /// Reconstruction path for replay: only the heuristic is known.
    NodeId add_summary_child(NodeId parent, double h, int step) {
        check_parent(parent);
        ProgramNode n;
        n.node_id = static_cast<NodeId>(nodes_.size());
        n.parent_id = parent;
        n.heuristic = h;
        n.depth = nodes_[static_cast<std::size_t>(parent)].depth + 1;
        n.created_at_step = step;
        return append(parent, std::move(n));
    }

private:
    void check_parent(NodeId parent) const {
        if (parent < 0 || parent >= static_cast<NodeId>(nodes_.size())) {
            throw Error("add_child: parent " + std::to_string(parent) + " does not exist");
        }
    }

    NodeId append(NodeId parent, ProgramNode n) {
        const NodeId id = n.node_id;
        // A child that solves (h == 1 exactly) is not a failed refinement.
        if (n.heuristic < 1.0) {
            nodes_[static_cast<std::size_t>(parent)].fail_count += 1;
        }
        nodes_.push_back(std::move(n));
        children_.emplace_back();
        children_[static_cast<std::size_t>(parent)].push_back(id);
        return id;
    }

    std::vector<ProgramNode> nodes_;
    std::vector<std::vector<NodeId>> children_;
};

/// One engine step: which node was refined, with which counterexample, what
/// came out, and whether it solved the specification.
struct SearchEvent {
    int step = 0;
    NodeId selected_id = 0;
    std::optional<int> counterexample_id;
    NodeId new_node_id = 0;
    int reward = 0;
};

/// Outcome of one search run.
struct SearchResult {
    bool solved = false;
    int calls_used = 0;
    std::optional<NodeId> solution_id;
    std::vector<SearchEvent> events;
    RefinementTree tree;

    // Set when a checker error invalidated the run.
    bool aborted = false;
    std::string diagnostic;
};

} // namespace rex
