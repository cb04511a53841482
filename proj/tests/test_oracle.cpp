#include "rex/oracle.hpp"

#include "rex/core.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace rex;

namespace {

ProgramNode node_with_content(std::string content) {
    ProgramNode n;
    n.node_id = 1;
    n.parent_id = kRootId;
    n.content = std::move(content);
    return n;
}

ProgramNode root_node() {
    ProgramNode n;
    n.node_id = kRootId;
    return n;
}

} // namespace

TEST_CASE("sim program content round-trips exactly") {
    RandomStream rng = RandomStream::derive(3, "roundtrip");
    for (int i = 0; i < 200; ++i) {
        SimProgram p;
        p.quality = rng.next_double();
        p.trap = rng.next_double() < 0.5;
        p.sub_seed = rng.next_u64();
        const SimProgram q = SimProgram::decode(p.encode());
        REQUIRE(q.quality == p.quality);
        REQUIRE(q.trap == p.trap);
        REQUIRE(q.sub_seed == p.sub_seed);
    }
    REQUIRE_THROWS_AS(SimProgram::decode("print('hello')"), Error);
}

TEST_CASE("sim_check is deterministic per (program, conjunct)") {
    const std::string content = SimProgram{0.6, false, 12345}.encode();
    const Specification spec = make_sim_spec(10);
    const PassVector a = evaluate(spec, content);
    const PassVector b = evaluate(spec, content);
    REQUIRE(a.bits == b.bits);
}

TEST_CASE("trap parents produce trap children with zero heuristic") {
    const OracleModel model;
    const ProgramNode parent = node_with_content(SimProgram{0.9, true, 777}.encode());
    RandomStream rng = RandomStream::derive(5, "trap");
    const std::string child = sim_refine(parent, model, rng);
    const SimProgram decoded = SimProgram::decode(child);
    REQUIRE(decoded.trap);
    REQUIRE(decoded.quality == 0.0);
    REQUIRE(heuristic(evaluate(make_sim_spec(model.k), child)) == 0.0);
}

TEST_CASE("degenerate gain adds exactly the mean") {
    OracleModel model;
    model.gain_sd = 0.0;
    model.p_dead = 0.0;
    model.gain_mean = 0.1;
    const ProgramNode parent = node_with_content(SimProgram{0.85, false, 1}.encode());
    RandomStream rng = RandomStream::derive(7, "degenerate");
    const SimProgram child = SimProgram::decode(sim_refine(parent, model, rng));
    REQUIRE(child.quality == 0.85 + 0.1);
    REQUIRE_FALSE(child.trap);
}

TEST_CASE("fresh samples have mean heuristic near the fresh Beta mean") {
    const OracleModel model; // defaults: K=10, Beta(2,4), N(0.1,0.15), p_dead=0.15
    const Specification spec = make_sim_spec(model.k);
    RandomStream rng = RandomStream::derive(9, "fresh");
    const ProgramNode root = root_node();
    double sum = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        sum += heuristic(evaluate(spec, sim_refine(root, model, rng)));
    }
    REQUIRE(sum / n == Catch::Approx(1.0 / 3.0).margin(0.02));
}

TEST_CASE("sim_refine replays bit-exactly from the same stream state") {
    const OracleModel model;
    const ProgramNode parent = node_with_content(SimProgram{0.4, false, 42}.encode());
    RandomStream a = RandomStream::derive(11, "pure");
    RandomStream b = RandomStream::derive(11, "pure");
    for (int i = 0; i < 100; ++i) {
        REQUIRE(sim_refine(parent, model, a) == sim_refine(parent, model, b));
    }
}

TEST_CASE("positive mean gain rewards depth when traps are off") {
    OracleModel model;
    model.p_dead = 0.0;
    const Specification spec = make_sim_spec(model.k);
    RandomStream rng = RandomStream::derive(13, "depth-gain");
    const ProgramNode root = root_node();
    double parent_sum = 0.0, child_sum = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const std::string parent_content = sim_refine(root, model, rng);
        parent_sum += heuristic(evaluate(spec, parent_content));
        ProgramNode parent = node_with_content(parent_content);
        child_sum += heuristic(evaluate(spec, sim_refine(parent, model, rng)));
    }
    REQUIRE(child_sum / n > parent_sum / n);
}

TEST_CASE("trap survival follows (1 - p_dead)^n") {
    const OracleModel model; // p_dead = 0.15
    RandomStream rng = RandomStream::derive(15, "survival");
    const ProgramNode root = root_node();
    const int generations = 4;
    const int chains = 10000;
    std::vector<int> alive(generations, 0);
    for (int c = 0; c < chains; ++c) {
        ProgramNode cur = root;
        for (int g = 0; g < generations; ++g) {
            cur = node_with_content(sim_refine(cur, model, rng));
            cur.node_id = 1; // keep it non-root
            if (!SimProgram::decode(cur.content).trap) alive[g] += 1;
        }
    }
    for (int g = 0; g < generations; ++g) {
        const double expected = std::pow(1.0 - model.p_dead, g + 1);
        REQUIRE(static_cast<double>(alive[g]) / chains ==
                Catch::Approx(expected).margin(0.02));
    }
}

TEST_CASE("oracle model validation") {
    OracleModel m;
    m.k = 0;
    REQUIRE_THROWS_AS(m.validate(), ConfigError);
    m = OracleModel{};
    m.fresh_alpha = 0.0;
    REQUIRE_THROWS_AS(m.validate(), ConfigError);
    m = OracleModel{};
    m.p_dead = 1.5;
    REQUIRE_THROWS_AS(m.validate(), ConfigError);
    m = OracleModel{};
    m.gain_sd = -0.1;
    REQUIRE_THROWS_AS(m.validate(), ConfigError);
}
