#pragma once

#include "rex/core.hpp"
#include "rex/errors.hpp"
#include "rex/random.hpp"

#include <deque>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace rex {

/// Beta posterior over an arm's refinement-success probability.
struct PosteriorBelief {
    double alpha = 1.0;
    double beta = 1.0;

    double mean() const { return alpha / (alpha + beta); }
    double variance() const {
        const double s = alpha + beta;
        return alpha * beta / (s * s * (s + 1.0));
    }
};

/// Posterior parameters for an arm with heuristic h refined N times without
/// success: Beta(1 + C*h, 1 + C*(1-h) + N). The root has unknown heuristic,
/// so both C-terms vanish and it gets Beta(1, 1 + N).
inline PosteriorBelief posterior_params(std::optional<double> h, int fail_count, double c) {
    if (!(c > 0.0)) {
        throw ConfigError("posterior_params: C must be > 0");
    }
    if (fail_count < 0) {
        throw ConfigError("posterior_params: fail count must be >= 0");
    }
    if (!h.has_value()) {
        return PosteriorBelief{1.0, 1.0 + static_cast<double>(fail_count)};
    }
    if (!(*h >= 0.0 && *h <= 1.0)) {
        throw ConfigError("posterior_params: h must be in [0, 1]");
    }
    return PosteriorBelief{1.0 + c * *h,
                           1.0 + c * (1.0 - *h) + static_cast<double>(fail_count)};
}

inline double posterior_mean(std::optional<double> h, int fail_count, double c) {
    return posterior_params(h, fail_count, c).mean();
}

inline double posterior_variance(std::optional<double> h, int fail_count, double c) {
    return posterior_params(h, fail_count, c).variance();
}

/// Thompson selection core: sample each belief once and return the index of
/// the largest draw. Ties (measure zero) go to the smallest index.
inline std::size_t thompson_argmax(std::span<const PosteriorBelief> beliefs, RandomStream& rng) {
    std::size_t best = 0;
    double best_draw = -1.0;
    for (std::size_t i = 0; i < beliefs.size(); ++i) {
        const double draw = beta_sample(beliefs[i].alpha, beliefs[i].beta, rng);
        if (draw > best_draw) {
            best_draw = draw;
            best = i;
        }
    }
    return best;
}

/// Thompson sampling over every node of the tree (root included).
inline NodeId select_rex(const RefinementTree& tree, double c, RandomStream& rng) {
    std::vector<PosteriorBelief> beliefs;
    beliefs.reserve(tree.size());
    for (const ProgramNode& n : tree.nodes()) {
        beliefs.push_back(n.is_root() ? posterior_params(std::nullopt, n.fail_count, c)
                                      : posterior_params(n.heuristic, n.fail_count, c));
    }
    return static_cast<NodeId>(thompson_argmax(beliefs, rng));
}

/// Highest effective heuristic wins; the root scores `empty_value`. Earliest
/// created node wins ties, so with empty_value = 0 the search keeps sampling
/// from scratch while every program scores 0.
inline NodeId select_greedy(const RefinementTree& tree, double empty_value) {
    NodeId best = kRootId;
    double best_h = -1.0;
    for (const ProgramNode& n : tree.nodes()) {
        const double h = n.is_root() ? empty_value : n.heuristic;
        if (h > best_h) {
            best_h = h;
            best = n.node_id;
        }
    }
    return best;
}

/// FIFO scratch for breadth-first expansion: (node, expansions used so far).
struct BfsState {
    std::deque<std::pair<NodeId, int>> queue{{kRootId, 0}};

    void note_refinement(NodeId selected, NodeId child, int branching) {
        if (queue.empty() || queue.front().first != selected) {
            throw Error("bfs state: refinement does not match queue front");
        }
        if (++queue.front().second >= branching) {
            queue.pop_front();
        }
        queue.emplace_back(child, 0);
    }
};

/// Front of the queue; the queue never empties because children always join
/// the back.
inline NodeId select_bfs(const RefinementTree& tree, const BfsState& state, int branching) {
    (void)tree;
    if (branching < 1) throw ConfigError("bfs: branching must be >= 1");
    if (state.queue.empty()) throw Error("bfs state: queue is empty");
    return state.queue.front().first;
}

/// Round-robin scratch: one current leaf per chain plus a step counter.
struct FixedWidthState {
    std::vector<NodeId> leaves;
    int steps_done = 0;

    void note_refinement(NodeId child, int width) {
        if (steps_done < width) {
            leaves.push_back(child);
        } else {
            leaves[static_cast<std::size_t>((steps_done - width) % width)] = child;
        }
        ++steps_done;
    }
};

/// Steps 1..W draw fresh samples from the root; afterwards the chains are
/// refined round-robin and no non-root node is ever selected twice.
inline NodeId select_fixed_width(const RefinementTree& tree, const FixedWidthState& state,
                                 int width) {
    (void)tree;
    if (width < 1) throw ConfigError("fixed-width: width must be >= 1");
    if (state.steps_done < width) return kRootId;
    return state.leaves[static_cast<std::size_t>((state.steps_done - width) % width)];
}

struct RexPolicy {
    double c = 20.0;
};
struct GreedyPolicy {
    double empty_value = 0.0;
};
struct BfsPolicy {
    int branching = 3;
};
struct FixedWidthPolicy {
    int width = 25;
};

using PolicyConfig = std::variant<RexPolicy, GreedyPolicy, BfsPolicy, FixedWidthPolicy>;

inline void validate(const PolicyConfig& cfg) {
    std::visit(
        [](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, RexPolicy>) {
                if (!(p.c > 0.0)) throw ConfigError("rex: c must be > 0");
            } else if constexpr (std::is_same_v<T, GreedyPolicy>) {
                if (!(p.empty_value >= 0.0 && p.empty_value <= 1.0)) {
                    throw ConfigError("greedy: empty_value must be in [0, 1]");
                }
            } else if constexpr (std::is_same_v<T, BfsPolicy>) {
                if (p.branching < 1) throw ConfigError("bfs: branching must be >= 1");
            } else {
                if (p.width < 1) throw ConfigError("fixed-width: width must be >= 1");
            }
        },
        cfg);
}

inline std::string policy_name(const PolicyConfig& cfg) {
    return std::visit(
        [](const auto& p) -> std::string {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, RexPolicy>) return "rex";
            else if constexpr (std::is_same_v<T, GreedyPolicy>) return "greedy";
            else if constexpr (std::is_same_v<T, BfsPolicy>) return "bfs";
            else return "fixed-width";
        },
        cfg);
}

namespace detail {
inline std::string trim_number(double v) {
    std::ostringstream os;
    os.precision(15);
    os << v;
    return os.str();
}
} // namespace detail

/// Human/file-facing parameter tag, e.g. "c=20" or "width=25".
inline std::string policy_param(const PolicyConfig& cfg) {
    return std::visit(
        [](const auto& p) -> std::string {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, RexPolicy>) return "c=" + detail::trim_number(p.c);
            else if constexpr (std::is_same_v<T, GreedyPolicy>)
                return "empty_value=" + detail::trim_number(p.empty_value);
            else if constexpr (std::is_same_v<T, BfsPolicy>)
                return "branching=" + std::to_string(p.branching);
            else return "width=" + std::to_string(p.width);
        },
        cfg);
}

inline std::string policy_label(const PolicyConfig& cfg) {
    return policy_name(cfg) + "[" + policy_param(cfg) + "]";
}

/// Stateful selection policy driven by the engine: select() picks the next
/// node, note_refinement() feeds the outcome back into the variant-specific
/// scratch state.
class Policy {
public:
    explicit Policy(PolicyConfig cfg) : cfg_(std::move(cfg)) { rex::validate(cfg_); }

    const PolicyConfig& config() const { return cfg_; }

    NodeId select(const RefinementTree& tree, RandomStream& rng) {
        return std::visit(
            [&](const auto& p) -> NodeId {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, RexPolicy>) {
                    return select_rex(tree, p.c, rng);
                } else if constexpr (std::is_same_v<T, GreedyPolicy>) {
                    return select_greedy(tree, p.empty_value);
                } else if constexpr (std::is_same_v<T, BfsPolicy>) {
                    return select_bfs(tree, bfs_, p.branching);
                } else {
                    return select_fixed_width(tree, fw_, p.width);
                }
            },
            cfg_);
    }

    void note_refinement(NodeId selected, NodeId child) {
        std::visit(
            [&](const auto& p) {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, BfsPolicy>) {
                    bfs_.note_refinement(selected, child, p.branching);
                } else if constexpr (std::is_same_v<T, FixedWidthPolicy>) {
                    fw_.note_refinement(child, p.width);
                }
            },
            cfg_);
    }

private:
    PolicyConfig cfg_;
    BfsState bfs_;
    FixedWidthState fw_;
};

} // namespace rex
