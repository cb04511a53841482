#pragma once

#include "rex/core.hpp"
#include "rex/errors.hpp"
#include "rex/random.hpp"

#include <algorithm>
#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <optional>
#include <string>

namespace rex {

/// The refinement distribution behind one interface: given a parent program
/// (or the root for a fresh sample) and one failing conjunct, produce a new
/// program text. Implementations: SimulatedOracle, LlmOracle.
class RefinementOracle {
public:
    virtual ~RefinementOracle() = default;

    /// ROOT parent => counterexample is nullopt (generate from scratch).
    virtual std::string refine(const ProgramNode& parent,
                               const std::optional<Conjunct>& counterexample,
                               const Specification& spec, RandomStream& rng) = 0;
};

/// Parameters of the simulated refinement process. Fresh samples draw their
/// latent quality from Beta(fresh_alpha, fresh_beta); refinement shifts the
/// parent quality by Normal(gain_mean, gain_sd), clamped to [0, 1]; each new
/// node is a trap with probability p_dead, and every descendant of a trap is
/// a trap with quality zero.
struct OracleModel {
    int k = 10;
    double fresh_alpha = 2.0;
    double fresh_beta = 4.0;
    double gain_mean = 0.1;
    double gain_sd = 0.15;
    double p_dead = 0.15;

    void validate() const {
        if (k < 1) throw ConfigError("oracle model: k must be >= 1");
        if (!(fresh_alpha > 0.0) || !(fresh_beta > 0.0)) {
            throw ConfigError("oracle model: fresh_alpha and fresh_beta must be > 0");
        }
        if (!(gain_sd >= 0.0)) throw ConfigError("oracle model: gain_sd must be >= 0");
        if (!(p_dead >= 0.0 && p_dead <= 1.0)) {
            throw ConfigError("oracle model: p_dead must be in [0, 1]");
        }
    }
};

/// Latent state of a simulated program, serialized into its content text so
/// the checker can decode it without access to the tree.
struct SimProgram {
    double quality = 0.0;
    bool trap = false;
    std::uint64_t sub_seed = 0;

    std::string encode() const {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "sim q=%.17g trap=%d sub=%016" PRIx64, quality,
                      trap ? 1 : 0, sub_seed);
        return buf;
    }

    static SimProgram decode(const std::string& content) {
        SimProgram p;
        int trap_flag = 0;
        if (std::sscanf(content.c_str(), "sim q=%lg trap=%d sub=%" SCNx64, &p.quality,
                        &trap_flag, &p.sub_seed) != 3) {
            throw Error("not a simulated program: \"" + content + "\"");
        }
        p.trap = trap_flag != 0;
        return p;
    }
};

/// Pass bit for one conjunct of a simulated program: Bernoulli(quality),
/// frozen at creation via the node's own sub-seed. Deterministic for a fixed
/// (program, conjunct) pair.
inline bool sim_check(const std::string& content, const Conjunct& conj) {
    const SimProgram p = SimProgram::decode(content);
    RandomStream bit = RandomStream::derive(p.sub_seed, "bit/" + std::to_string(conj.id));
    return bit.next_double() < p.quality;
}

/// Specification with K opaque conjuncts backed by the simulated checker.
inline Specification make_sim_spec(int k) {
    Specification spec;
    spec.conjuncts.reserve(static_cast<std::size_t>(k));
    for (int i = 1; i <= k; ++i) {
        spec.conjuncts.push_back(Conjunct{i, "sim-conjunct-" + std::to_string(i)});
    }
    spec.checker = sim_check;
    spec.validate();
    return spec;
}

/// One simulated refinement step; pure function of the parent content, the
/// model, and the stream state.
inline std::string sim_refine(const ProgramNode& parent, const OracleModel& model,
                              RandomStream& rng) {
    model.validate();
    SimProgram child;
    if (parent.is_root()) {
        child.quality = beta_sample(model.fresh_alpha, model.fresh_beta, rng);
        child.trap = rng.next_double() < model.p_dead;
    } else {
        const SimProgram p = SimProgram::decode(parent.content);
        if (p.trap) {
            child.quality = 0.0;
            child.trap = true;
        } else {
            const double gain = model.gain_mean + model.gain_sd * rng.next_normal();
            child.quality = std::clamp(p.quality + gain, 0.0, 1.0);
            child.trap = rng.next_double() < model.p_dead;
        }
    }
    child.sub_seed = rng.next_u64();
    return child.encode();
}

class SimulatedOracle final : public RefinementOracle {
public:
    explicit SimulatedOracle(OracleModel model) : model_(model) { model_.validate(); }

    const OracleModel& model() const { return model_; }

    std::string refine(const ProgramNode& parent, const std::optional<Conjunct>&,
                       const Specification&, RandomStream& rng) override {
        return sim_refine(parent, model_, rng);
    }

private:
    OracleModel model_;
};

} // namespace rex
