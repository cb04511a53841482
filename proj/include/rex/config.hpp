#pragma once

#include "rex/errors.hpp"
#include "rex/llm_client.hpp"
#include "rex/oracle.hpp"
#include "rex/policies.hpp"

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace rex {

/// Minimal sectioned key-value file: `[section]` lines, `key = value` lines,
/// full-line comments starting with '#' or ';'. Section and key order is
/// preserved; duplicate keys within a section keep the last value.
struct IniSection {
    std::string name;
    std::vector<std::pair<std::string, std::string>> entries;

    std::optional<std::string> maybe(const std::string& key) const {
        std::optional<std::string> found;
        for (const auto& [k, v] : entries) {
            if (k == key) found = v;
        }
        return found;
    }

    std::string get(const std::string& key) const {
        if (auto v = maybe(key)) return *v;
        throw ConfigError("missing key '" + key + "' in section [" + name + "]");
    }
};

struct IniFile {
    std::vector<IniSection> sections;

    const IniSection* find(const std::string& name) const {
        for (const IniSection& s : sections) {
            if (s.name == name) return &s;
        }
        return nullptr;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    const std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

inline double to_double(const std::string& v, const std::string& where) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError(where + ": expected a number, got '" + v + "'");
    }
}

inline long long to_int(const std::string& v, const std::string& where) {
    try {
        std::size_t pos = 0;
        const long long i = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        throw ConfigError(where + ": expected an integer, got '" + v + "'");
    }
}

inline std::uint64_t to_u64(const std::string& v, const std::string& where) {
    try {
        std::size_t pos = 0;
        const std::uint64_t i = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        throw ConfigError(where + ": expected an unsigned integer, got '" + v + "'");
    }
}

inline bool to_bool(const std::string& v, const std::string& where) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(where + ": expected true/false, got '" + v + "'");
}

inline std::vector<std::string> split_list(const std::string& v, char sep = ',') {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(v);
    while (std::getline(in, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

} // namespace detail

inline IniFile parse_ini(std::istream& in) {
    IniFile file;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') {
                throw ConfigError("line " + std::to_string(lineno) + ": unterminated section");
            }
            file.sections.push_back(IniSection{detail::trim(t.substr(1, t.size() - 2)), {}});
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        }
        if (file.sections.empty()) {
            throw ConfigError("line " + std::to_string(lineno) + ": key outside any section");
        }
        file.sections.back().entries.emplace_back(detail::trim(t.substr(0, eq)),
                                                  detail::trim(t.substr(eq + 1)));
    }
    return file;
}

inline IniFile load_ini(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    return parse_ini(in);
}

/// One benchmark problem: a simulated instance (oracle model) or a live-LLM
/// instance (description plus textual constraints).
struct ProblemSpec {
    std::string id;
    bool use_llm = false;
    OracleModel model;
    std::string description;
    std::vector<std::string> checks; // conjunct payloads, "contains:<text>"
};

/// Specification for a problem: simulated checker for sim problems, a
/// substring-constraint checker for live-oracle problems ("contains:<text>"
/// passes when the program text contains <text>).
inline Specification make_problem_spec(const ProblemSpec& problem) {
    if (!problem.use_llm) return make_sim_spec(problem.model.k);
    Specification spec;
    for (std::size_t i = 0; i < problem.checks.size(); ++i) {
        spec.conjuncts.push_back(Conjunct{static_cast<int>(i) + 1, problem.checks[i]});
    }
    spec.checker = [](const std::string& program, const Conjunct& conj) {
        constexpr std::string_view prefix = "contains:";
        if (conj.payload.rfind(prefix, 0) != 0) {
            throw Error("unsupported conjunct payload: " + conj.payload);
        }
        return program.find(conj.payload.substr(prefix.size())) != std::string::npos;
    };
    spec.validate();
    return spec;
}

struct BenchmarkConfig {
    std::vector<ProblemSpec> problems;
    std::vector<PolicyConfig> policies;
    int budget = 300;
    int seeds = 5;
    std::uint64_t base_seed = 1;
    int jobs = 1;
    bool write_logs = true;
    bool write_trees = false;
    std::string out_dir = "out";
    LLMOracleConfig llm;

    void validate() const {
        if (problems.empty()) throw ConfigError("benchmark: needs at least one problem");
        if (policies.empty()) throw ConfigError("benchmark: needs at least one policy");
        if (seeds < 1) throw ConfigError("benchmark: seeds must be >= 1");
        if (budget < 1) throw ConfigError("benchmark: budget must be >= 1");
        if (jobs < 1) throw ConfigError("benchmark: jobs must be >= 1");
        for (const PolicyConfig& p : policies) rex::validate(p);
        for (const ProblemSpec& p : problems) {
            if (p.use_llm && p.checks.empty()) {
                throw ConfigError("problem " + p.id + ": llm problems need checks");
            }
            if (!p.use_llm) p.model.validate();
        }
    }
};

namespace detail {

inline void apply_oracle_key(OracleModel& model, const std::string& key, const std::string& value,
                             const std::string& where) {
    if (key == "k") model.k = static_cast<int>(to_int(value, where));
    else if (key == "fresh_alpha") model.fresh_alpha = to_double(value, where);
    else if (key == "fresh_beta") model.fresh_beta = to_double(value, where);
    else if (key == "gain_mean") model.gain_mean = to_double(value, where);
    else if (key == "gain_sd") model.gain_sd = to_double(value, where);
    else if (key == "p_dead") model.p_dead = to_double(value, where);
    else throw ConfigError(where + ": unknown oracle key '" + key + "'");
}

/// Expand one `[policy.*]` section, whose parameter value may be a comma
/// list, into concrete PolicyConfig values.
inline std::vector<PolicyConfig> expand_policy_section(const IniSection& sec) {
    const std::string kind = sec.get("policy");
    std::vector<PolicyConfig> out;
    const std::string where = "[" + sec.name + "]";
    auto values_of = [&](const std::string& key) {
        const auto list = split_list(sec.get(key));
        if (list.empty()) throw ConfigError(where + ": empty value list for '" + key + "'");
        return list;
    };
    if (kind == "rex") {
        for (const std::string& v : values_of("c")) out.push_back(RexPolicy{to_double(v, where)});
    } else if (kind == "greedy") {
        for (const std::string& v : values_of("empty_value")) {
            out.push_back(GreedyPolicy{to_double(v, where)});
        }
    } else if (kind == "bfs") {
        for (const std::string& v : values_of("branching")) {
            out.push_back(BfsPolicy{static_cast<int>(to_int(v, where))});
        }
    } else if (kind == "fixed-width") {
        for (const std::string& v : values_of("width")) {
            out.push_back(FixedWidthPolicy{static_cast<int>(to_int(v, where))});
        }
    } else {
        throw ConfigError(where + ": unknown policy '" + kind + "'");
    }
    for (const PolicyConfig& p : out) validate(p);
    return out;
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace detail

/// Generated default problem ids: p001, p002, ...
inline std::string default_problem_id(int index, int total) {
    int digits = 1;
    for (int v = total; v >= 10; v /= 10) ++digits;
    std::string num = std::to_string(index);
    while (static_cast<int>(num.size()) < digits) num.insert(num.begin(), '0');
    return "p" + num;
}

inline BenchmarkConfig load_benchmark_config(const std::filesystem::path& path) {
    const IniFile ini = load_ini(path);
    const std::filesystem::path base_dir = path.parent_path();
    BenchmarkConfig cfg;

    OracleModel default_model;
    if (const IniSection* oracle = ini.find("oracle")) {
        for (const auto& [k, v] : oracle->entries) {
            detail::apply_oracle_key(default_model, k, v, "[oracle]");
        }
        default_model.validate();
    }

    int generated_problems = 0;
    if (const IniSection* bench = ini.find("benchmark")) {
        for (const auto& [k, v] : bench->entries) {
            if (k == "problems") generated_problems = static_cast<int>(detail::to_int(v, "[benchmark]"));
            else if (k == "seeds") cfg.seeds = static_cast<int>(detail::to_int(v, "[benchmark]"));
            else if (k == "budget") cfg.budget = static_cast<int>(detail::to_int(v, "[benchmark]"));
            else if (k == "base_seed") cfg.base_seed = detail::to_u64(v, "[benchmark]");
            else if (k == "jobs") cfg.jobs = static_cast<int>(detail::to_int(v, "[benchmark]"));
            else if (k == "out_dir") cfg.out_dir = v;
            else if (k == "write_logs") cfg.write_logs = detail::to_bool(v, "[benchmark]");
            else if (k == "write_trees") cfg.write_trees = detail::to_bool(v, "[benchmark]");
            else throw ConfigError("[benchmark]: unknown key '" + k + "'");
        }
    }

    for (int i = 1; i <= generated_problems; ++i) {
        ProblemSpec p;
        p.id = default_problem_id(i, generated_problems);
        p.model = default_model;
        cfg.problems.push_back(std::move(p));
    }

    bool any_llm = false;
    for (const IniSection& sec : ini.sections) {
        if (sec.name.rfind("policy.", 0) == 0 || sec.name == "policy") {
            for (PolicyConfig& p : detail::expand_policy_section(sec)) {
                cfg.policies.push_back(std::move(p));
            }
        } else if (sec.name.rfind("problem.", 0) == 0) {
            ProblemSpec p;
            p.id = sec.name.substr(std::string("problem.").size());
            p.model = default_model;
            const std::string where = "[" + sec.name + "]";
            for (const auto& [k, v] : sec.entries) {
                if (k == "oracle") {
                    if (v == "llm") p.use_llm = true;
                    else if (v == "sim") p.use_llm = false;
                    else throw ConfigError(where + ": oracle must be sim or llm");
                } else if (k == "description") {
                    p.description = v;
                } else if (k == "description_file") {
                    p.description = detail::read_text_file(base_dir / v);
                } else if (k == "checks") {
                    p.checks = detail::split_list(v, '|');
                } else {
                    detail::apply_oracle_key(p.model, k, v, where);
                }
            }
            any_llm = any_llm || p.use_llm;
            // Replace a generated problem with the same id, else append.
            bool replaced = false;
            for (ProblemSpec& existing : cfg.problems) {
                if (existing.id == p.id) {
                    existing = p;
                    replaced = true;
                    break;
                }
            }
            if (!replaced) cfg.problems.push_back(std::move(p));
        }
    }

    if (const IniSection* llm = ini.find("llm")) {
        for (const auto& [k, v] : llm->entries) {
            if (k == "endpoint") cfg.llm.endpoint = v;
            else if (k == "api_key") cfg.llm.api_key = v;
            else if (k == "model") cfg.llm.model = v;
            else if (k == "temperature") cfg.llm.temperature = detail::to_double(v, "[llm]");
            else if (k == "max_retries") cfg.llm.max_retries = static_cast<int>(detail::to_int(v, "[llm]"));
            else if (k == "timeout_ms") cfg.llm.timeout = std::chrono::milliseconds(detail::to_int(v, "[llm]"));
            else if (k == "backoff_ms") cfg.llm.backoff_base = std::chrono::milliseconds(detail::to_int(v, "[llm]"));
            else if (k == "initial_template") cfg.llm.initial_template = PromptTemplate::load(base_dir / v);
            else if (k == "refine_template") cfg.llm.refine_template = PromptTemplate::load(base_dir / v);
            else throw ConfigError("[llm]: unknown key '" + k + "'");
        }
    }
    if (any_llm) {
        apply_env_overrides(cfg.llm);
        if (cfg.llm.initial_template.sections.empty() || cfg.llm.refine_template.sections.empty()) {
            throw ConfigError("llm problems need initial_template and refine_template in [llm]");
        }
    }

    cfg.validate();
    return cfg;
}

} // namespace rex
