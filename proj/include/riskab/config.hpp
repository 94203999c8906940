#pragma once
// JSON experiment configs. A config names an environment, an agent, one or
// more horizons, and the Monte Carlo parameters. Parsing is strict: unknown
// agent/reward/noise/input kinds and missing required fields raise
// ConfigError with the offending key, and serialization round-trips.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "riskab/agent.hpp"
#include "riskab/analysis.hpp"
#include "riskab/environment.hpp"
#include "riskab/errors.hpp"
#include "riskab/io.hpp"
#include "riskab/simulate.hpp"

namespace riskab {

struct AgentSpec {
    enum class Kind { Abstention, AlwaysCommit, AlwaysAbstain, CommitFirst, Oracle };

    Kind kind = Kind::Abstention;
    double c = 0.5;
    ScheduleVariant schedule = ScheduleVariant::Log;
    double c_m = 0.25;            // power schedule exponent
    std::optional<double> w, m;   // explicit schedule overrides
    std::int64_t j = 1;           // commit_first burn-in length
};

struct ExperimentConfig {
    std::string name;
    EnvSpec env;
    AgentSpec agent;
    std::vector<std::int64_t> horizons;  // from "T" (single) or "horizons" (sweep)
    std::int64_t reps = 1;
    std::uint64_t base_seed = 1;
    std::string out;  // output directory, defaults to out/<name>
    bool audit = false;
    int workers = 1;
};

namespace detail {

inline const nlohmann::json& require_key(const nlohmann::json& j, const char* key, const std::string& ctx) {
    auto it = j.find(key);
    if (it == j.end()) throw ConfigError(ctx + ": missing required key \"" + key + "\"");
    return *it;
}

inline double as_number(const nlohmann::json& j, const std::string& ctx) {
    if (!j.is_number()) throw ConfigError(ctx + ": expected a number");
    return j.get<double>();
}

inline double require_number(const nlohmann::json& j, const char* key, const std::string& ctx) {
    return as_number(require_key(j, key, ctx), ctx + "." + key);
}

inline double number_or(const nlohmann::json& j, const char* key, double def, const std::string& ctx) {
    auto it = j.find(key);
    return it == j.end() ? def : as_number(*it, ctx + "." + key);
}

inline std::int64_t as_int(const nlohmann::json& j, const std::string& ctx) {
    if (!j.is_number_integer()) throw ConfigError(ctx + ": expected an integer");
    return j.get<std::int64_t>();
}

inline std::string as_string(const nlohmann::json& j, const std::string& ctx) {
    if (!j.is_string()) throw ConfigError(ctx + ": expected a string");
    return j.get<std::string>();
}

inline std::vector<double> as_point(const nlohmann::json& j, const std::string& ctx) {
    if (!j.is_array() || j.empty()) throw ConfigError(ctx + ": expected a non-empty array of numbers");
    std::vector<double> v;
    v.reserve(j.size());
    for (const auto& e : j) v.push_back(as_number(e, ctx));
    return v;
}

inline RewardFunction parse_reward(const nlohmann::json& j, const std::string& ctx) {
    std::string kind = as_string(require_key(j, "kind", ctx), ctx + ".kind");
    if (kind == "cone")
        return RewardFunction::cone(require_number(j, "L", ctx), number_or(j, "r0", 1.0, ctx));
    if (kind == "constant_one") return RewardFunction::constant_one();
    if (kind == "radial_profile") {
        double L = require_number(j, "L", ctx);
        const auto& kj = require_key(j, "knots", ctx);
        if (!kj.is_array()) throw ConfigError(ctx + ".knots: expected an array of [radius, value] pairs");
        std::vector<std::pair<double, double>> knots;
        for (const auto& e : kj) {
            if (!e.is_array() || e.size() != 2)
                throw ConfigError(ctx + ".knots: expected [radius, value] pairs");
            knots.emplace_back(as_number(e[0], ctx + ".knots"), as_number(e[1], ctx + ".knots"));
        }
        return RewardFunction::radial_profile(L, std::move(knots));
    }
    throw ConfigError(ctx + ".kind: unknown reward kind \"" + kind + "\"");
}

inline NoiseModel parse_noise(const nlohmann::json& j, const std::string& ctx) {
    std::string kind = as_string(require_key(j, "kind", ctx), ctx + ".kind");
    if (kind == "gaussian") return NoiseModel::gaussian(require_number(j, "sigma", ctx));
    if (kind == "bounded_uniform")
        return NoiseModel::bounded_uniform(require_number(j, "a", ctx), require_number(j, "b", ctx));
    if (kind == "none") return NoiseModel::none();
    throw ConfigError(ctx + ".kind: unknown noise kind \"" + kind + "\"");
}

inline InputDistribution parse_inputs(const nlohmann::json& j, int n, const std::string& ctx) {
    std::string kind = as_string(require_key(j, "kind", ctx), ctx + ".kind");
    if (kind == "gaussian_iso") return InputDistribution::gaussian_iso(n, number_or(j, "scale", 1.0, ctx));
    if (kind == "laplace_radial") return InputDistribution::laplace_radial(n, number_or(j, "scale", 1.0, ctx));
    if (kind == "pareto_radial")
        return InputDistribution::pareto_radial(n, require_number(j, "alpha", ctx),
                                                number_or(j, "r_min", 1.0, ctx));
    if (kind == "sphere") return InputDistribution::sphere(n, require_number(j, "radius", ctx));
    if (kind == "point_mass")
        return InputDistribution::point_mass(as_point(require_key(j, "x0", ctx), ctx + ".x0"));
    if (kind == "uniform_box")
        return InputDistribution::uniform_box(as_point(require_key(j, "lo", ctx), ctx + ".lo"),
                                              as_point(require_key(j, "hi", ctx), ctx + ".hi"));
    throw ConfigError(ctx + ".kind: unknown input kind \"" + kind + "\"");
}

inline AgentSpec parse_agent(const nlohmann::json& j, const std::string& ctx) {
    AgentSpec spec;
    std::string kind = as_string(require_key(j, "kind", ctx), ctx + ".kind");
    if (kind == "abstention") {
        spec.kind = AgentSpec::Kind::Abstention;
        spec.c = number_or(j, "c", 0.5, ctx);
        std::string sched = j.contains("schedule") ? as_string(j["schedule"], ctx + ".schedule") : "log";
        if (sched == "log")
            spec.schedule = ScheduleVariant::Log;
        else if (sched == "power")
            spec.schedule = ScheduleVariant::Power;
        else
            throw ConfigError(ctx + ".schedule: expected \"log\" or \"power\"");
        spec.c_m = number_or(j, "c_m", 0.25, ctx);
        if (j.contains("w")) spec.w = as_number(j["w"], ctx + ".w");
        if (j.contains("m")) spec.m = as_number(j["m"], ctx + ".m");
    } else if (kind == "always_commit") {
        spec.kind = AgentSpec::Kind::AlwaysCommit;
    } else if (kind == "always_abstain") {
        spec.kind = AgentSpec::Kind::AlwaysAbstain;
    } else if (kind == "commit_first") {
        spec.kind = AgentSpec::Kind::CommitFirst;
        spec.j = as_int(require_key(j, "j", ctx), ctx + ".j");
    } else if (kind == "oracle") {
        spec.kind = AgentSpec::Kind::Oracle;
    } else {
        throw ConfigError(ctx + ".kind: unknown agent kind \"" + kind + "\"");
    }
    return spec;
}

}  // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& j) {
    using namespace detail;
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    ExperimentConfig cfg;
    cfg.name = as_string(require_key(j, "name", "config"), "config.name");

    const auto& envj = require_key(j, "env", "config");
    cfg.env.n = static_cast<int>(as_int(require_key(envj, "n", "config.env"), "config.env.n"));
    cfg.env.reward = parse_reward(require_key(envj, "reward", "config.env"), "config.env.reward");
    cfg.env.noise = parse_noise(require_key(envj, "noise", "config.env"), "config.env.noise");
    cfg.env.inputs = parse_inputs(require_key(envj, "inputs", "config.env"), cfg.env.n, "config.env.inputs");

    cfg.agent = parse_agent(require_key(j, "agent", "config"), "config.agent");

    bool has_T = j.contains("T"), has_list = j.contains("horizons");
    if (has_T == has_list)
        throw ConfigError("config: exactly one of \"T\" and \"horizons\" is required");
    if (has_T) {
        cfg.horizons.push_back(as_int(j["T"], "config.T"));
    } else {
        const auto& hj = j["horizons"];
        if (!hj.is_array() || hj.empty()) throw ConfigError("config.horizons: expected a non-empty array");
        for (const auto& e : hj) cfg.horizons.push_back(as_int(e, "config.horizons"));
    }
    for (std::int64_t T : cfg.horizons)
        if (T < 1) throw ConfigError("config: horizons must be >= 1");

    if (j.contains("reps")) cfg.reps = as_int(j["reps"], "config.reps");
    if (cfg.reps < 1) throw ConfigError("config.reps: must be >= 1");
    if (j.contains("base_seed")) {
        const auto& s = j["base_seed"];
        if (!s.is_number_integer() && !s.is_number_unsigned())
            throw ConfigError("config.base_seed: expected an integer");
        cfg.base_seed = s.get<std::uint64_t>();
    }
    cfg.out = j.contains("out") ? as_string(j["out"], "config.out") : "out/" + cfg.name;
    if (j.contains("audit")) {
        if (!j["audit"].is_boolean()) throw ConfigError("config.audit: expected a boolean");
        cfg.audit = j["audit"].get<bool>();
    }
    if (j.contains("workers")) cfg.workers = static_cast<int>(as_int(j["workers"], "config.workers"));
    if (cfg.workers < 1) throw ConfigError("config.workers: must be >= 1");
    if (cfg.audit && cfg.agent.kind != AgentSpec::Kind::Abstention)
        throw ConfigError("config.audit: only the abstention agent can be audited");
    return cfg;
}

inline nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::ordered_json j;
    j["name"] = cfg.name;

    nlohmann::ordered_json envj;
    envj["n"] = cfg.env.n;
    nlohmann::ordered_json rj;
    switch (cfg.env.reward.kind) {
        case RewardKind::Cone:
            rj["kind"] = "cone";
            rj["L"] = cfg.env.reward.L;
            rj["r0"] = cfg.env.reward.r0;
            break;
        case RewardKind::ConstantOne:
            rj["kind"] = "constant_one";
            break;
        case RewardKind::RadialProfile: {
            rj["kind"] = "radial_profile";
            rj["L"] = cfg.env.reward.L;
            auto knots = nlohmann::ordered_json::array();
            for (auto [r, v] : cfg.env.reward.knots) knots.push_back({r, v});
            rj["knots"] = std::move(knots);
            break;
        }
    }
    envj["reward"] = std::move(rj);
    nlohmann::ordered_json nj;
    switch (cfg.env.noise.kind) {
        case NoiseKind::Gaussian:
            nj["kind"] = "gaussian";
            nj["sigma"] = cfg.env.noise.sigma;
            break;
        case NoiseKind::BoundedUniform:
            nj["kind"] = "bounded_uniform";
            nj["a"] = cfg.env.noise.a;
            nj["b"] = cfg.env.noise.b;
            break;
        case NoiseKind::None:
            nj["kind"] = "none";
            break;
    }
    envj["noise"] = std::move(nj);
    nlohmann::ordered_json ij;
    switch (cfg.env.inputs.kind) {
        case InputKind::GaussianIso:
            ij["kind"] = "gaussian_iso";
            ij["scale"] = cfg.env.inputs.scale;
            break;
        case InputKind::LaplaceRadial:
            ij["kind"] = "laplace_radial";
            ij["scale"] = cfg.env.inputs.scale;
            break;
        case InputKind::ParetoRadial:
            ij["kind"] = "pareto_radial";
            ij["alpha"] = cfg.env.inputs.alpha;
            ij["r_min"] = cfg.env.inputs.r_min;
            break;
        case InputKind::Sphere:
            ij["kind"] = "sphere";
            ij["radius"] = cfg.env.inputs.radius;
            break;
        case InputKind::PointMass:
            ij["kind"] = "point_mass";
            ij["x0"] = cfg.env.inputs.x0;
            break;
        case InputKind::UniformBox:
            ij["kind"] = "uniform_box";
            ij["lo"] = cfg.env.inputs.lo;
            ij["hi"] = cfg.env.inputs.hi;
            break;
    }
    envj["inputs"] = std::move(ij);
    j["env"] = std::move(envj);

    nlohmann::ordered_json aj;
    switch (cfg.agent.kind) {
        case AgentSpec::Kind::Abstention:
            aj["kind"] = "abstention";
            aj["c"] = cfg.agent.c;
            aj["schedule"] = cfg.agent.schedule == ScheduleVariant::Log ? "log" : "power";
            if (cfg.agent.schedule == ScheduleVariant::Power) aj["c_m"] = cfg.agent.c_m;
            if (cfg.agent.w) aj["w"] = *cfg.agent.w;
            if (cfg.agent.m) aj["m"] = *cfg.agent.m;
            break;
        case AgentSpec::Kind::AlwaysCommit:
            aj["kind"] = "always_commit";
            break;
        case AgentSpec::Kind::AlwaysAbstain:
            aj["kind"] = "always_abstain";
            break;
        case AgentSpec::Kind::CommitFirst:
            aj["kind"] = "commit_first";
            aj["j"] = cfg.agent.j;
            break;
        case AgentSpec::Kind::Oracle:
            aj["kind"] = "oracle";
            break;
    }
    j["agent"] = std::move(aj);

    if (cfg.horizons.size() == 1)
        j["T"] = cfg.horizons.front();
    else
        j["horizons"] = cfg.horizons;
    j["reps"] = cfg.reps;
    j["base_seed"] = cfg.base_seed;
    j["out"] = cfg.out;
    j["audit"] = cfg.audit;
    j["workers"] = cfg.workers;
    return j;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    try {
        return parse_config(j);
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

// Learner config for one horizon; schedules recomputed unless overridden.
inline AgentConfig agent_config_for(const ExperimentConfig& cfg, std::int64_t T) {
    if (cfg.agent.kind != AgentSpec::Kind::Abstention)
        throw InvalidInputError("agent_config_for: not an abstention agent");
    AgentConfig a;
    a.n = cfg.env.n;
    a.L = cfg.env.reward.L;
    a.sigma = cfg.env.noise.sigma_proxy();
    a.T = T;
    a.c = cfg.agent.c;
    SchedulePair s = default_schedules(T, a.n, cfg.agent.schedule, cfg.agent.c_m);
    a.w = cfg.agent.w.value_or(s.w);
    a.m = cfg.agent.m.value_or(s.m);
    a.derive();
    return a;
}

inline AgentFactory agent_factory_for(const ExperimentConfig& cfg, std::int64_t T) {
    switch (cfg.agent.kind) {
        case AgentSpec::Kind::Abstention: {
            AgentConfig a = agent_config_for(cfg, T);
            return [a] { return std::make_unique<AbstentionAgent>(a); };
        }
        case AgentSpec::Kind::AlwaysCommit:
            return [] { return make_always_commit(); };
        case AgentSpec::Kind::AlwaysAbstain:
            return [] { return make_always_abstain(); };
        case AgentSpec::Kind::CommitFirst: {
            std::int64_t j = cfg.agent.j;
            return [j] { return make_commit_first(j); };
        }
        case AgentSpec::Kind::Oracle: {
            EnvSpec env = cfg.env;
            return [env] { return make_oracle(env); };
        }
    }
    throw InvalidInputError("agent_factory_for: unknown agent kind");
}

}  // namespace riskab
