#pragma once
// Command-line front end. Four verbs:
//
//   run     one environment/agent/horizon; writes summary.csv, runs.jsonl, meta.json
//   sweep   horizon sweep with per-T schedules; writes sweep.csv, fit.json
//   demo    the two built-in impossibility constructions
//   report  merge sweep.csv files under a directory into one table
//
// All numeric output goes through shortest round-trip formatting, and no
// timestamp enters summary.csv, runs.jsonl, or sweep.csv, so identical
// configs and seeds produce byte-identical payload files at any worker count.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "riskab/analysis.hpp"
#include "riskab/config.hpp"
#include "riskab/errors.hpp"
#include "riskab/io.hpp"
#include "riskab/simulate.hpp"

namespace riskab::cli {

inline constexpr const char* kToolVersion = "riskab 0.1.0";

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> reps;
    std::optional<std::string> out;
    std::optional<int> workers;
    bool audit = false;
};

inline ExperimentConfig load_and_override(const std::string& path, const Overrides& o) {
    ExperimentConfig cfg = load_config(path);
    if (o.seed) cfg.base_seed = *o.seed;
    if (o.reps) cfg.reps = *o.reps;
    if (o.out) cfg.out = *o.out;
    if (o.workers) cfg.workers = *o.workers;
    if (o.audit) cfg.audit = true;
    if (cfg.reps < 1) throw ConfigError("reps must be >= 1");
    if (cfg.workers < 1) throw ConfigError("workers must be >= 1");
    if (cfg.audit && cfg.agent.kind != AgentSpec::Kind::Abstention)
        throw ConfigError("--audit: only the abstention agent can be audited");
    return cfg;
}

namespace detail {

inline std::string iso_now() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline void require_valid_env(const EnvSpec& env) {
    if (auto rep = validate_env(env); !rep.ok())
        throw ConfigError("environment failed validation: " + rep.to_string());
}

inline MonteCarloResult run_batch(const ExperimentConfig& cfg, std::int64_t T) {
    MonteCarloOptions opt;
    opt.workers = cfg.workers;
    opt.audit = cfg.audit;
    if (cfg.audit) opt.audit_config = agent_config_for(cfg, T);
    return monte_carlo(cfg.env, agent_factory_for(cfg, T), T, cfg.reps, cfg.base_seed, opt);
}

inline nlohmann::ordered_json rep_to_json(const RepSummary& s) {
    nlohmann::ordered_json j;
    j["rep"] = s.rep;
    j["seed"] = s.seed;
    j["cum_regret"] = s.cum_regret;
    j["max_step_regret"] = s.max_step_regret;
    j["commits"] = s.commits;
    j["certified_bins"] = s.certified_bins;
    j["ood_abstains"] = s.ood_abstains;
    if (s.good_event) j["good_event"] = *s.good_event;
    return j;
}

inline void write_meta(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
    nlohmann::ordered_json meta;
    meta["tool"] = kToolVersion;
    meta["rng"] = kRngAlgorithm;
    meta["created"] = iso_now();  // the only timestamp in any output file
    meta["config"] = config_to_json(cfg);
    write_text_file(dir / "meta.json", meta.dump(2) + "\n");
}

}  // namespace detail

inline int cmd_run(const ExperimentConfig& cfg, std::ostream& out) {
    if (cfg.horizons.size() != 1)
        throw ConfigError("run expects a single horizon; use sweep for several");
    detail::require_valid_env(cfg.env);
    const std::int64_t T = cfg.horizons.front();
    MonteCarloResult mc = detail::run_batch(cfg, T);

    double mean_commits = 0.0, mean_cert = 0.0, mean_ood = 0.0, max_step = 0.0;
    std::int64_t audited = 0, good = 0;
    for (const auto& s : mc.reps) {
        mean_commits += double(s.commits);
        mean_cert += double(s.certified_bins);
        mean_ood += double(s.ood_abstains);
        max_step = std::max(max_step, s.max_step_regret);
        if (s.good_event) {
            ++audited;
            good += *s.good_event ? 1 : 0;
        }
    }
    const double r = double(cfg.reps);
    mean_commits /= r;
    mean_cert /= r;
    mean_ood /= r;

    CsvWriter csv;
    csv.comment("summary.csv: aggregate over replications for one run");
    csv.comment("name: experiment name from the config");
    csv.comment("T: horizon (rounds per episode)");
    csv.comment("reps: number of replications");
    csv.comment("base_seed: master seed; episode seeds are derived from it by rep index");
    csv.comment("mean_regret: mean cumulative regret across reps");
    csv.comment("std_regret: sample standard deviation of cumulative regret (0 when reps < 2)");
    csv.comment("stderr_regret: std_regret / sqrt(reps)");
    csv.comment("mean_commits: mean commits per episode");
    csv.comment("mean_certified_bins: mean bins certified harmful per episode");
    csv.comment("mean_ood_abstains: mean abstains outside the trusted region per episode");
    csv.comment("max_step_regret: largest single-round regret over all reps");
    csv.comment("good_event_frac: fraction of audited reps passing the concentration check (empty without audit)");
    csv.row({"name", "T", "reps", "base_seed", "mean_regret", "std_regret", "stderr_regret",
             "mean_commits", "mean_certified_bins", "mean_ood_abstains", "max_step_regret",
             "good_event_frac"});
    csv.row({cfg.name, format_int(T), format_int(cfg.reps), format_uint(cfg.base_seed),
             format_double(mc.mean_regret), format_double(mc.std_regret),
             format_double(mc.stderr_regret), format_double(mean_commits), format_double(mean_cert),
             format_double(mean_ood), format_double(max_step),
             audited ? format_double(double(good) / double(audited)) : std::string{}});

    std::string jsonl;
    for (const auto& s : mc.reps) jsonl += detail::rep_to_json(s).dump() + "\n";

    std::filesystem::path dir(cfg.out);
    write_text_file(dir / "summary.csv", csv.buffer);
    write_text_file(dir / "runs.jsonl", jsonl);
    detail::write_meta(cfg, dir);

    out << "run " << cfg.name << ": T=" << T << " reps=" << cfg.reps
        << " mean_regret=" << format_double(mc.mean_regret)
        << " stderr=" << format_double(mc.stderr_regret)
        << " mean_commits=" << format_double(mean_commits);
    if (audited) out << " good_event_frac=" << format_double(double(good) / double(audited));
    out << "\n";
    out << "wrote " << (dir / "summary.csv").string() << ", runs.jsonl, meta.json\n";
    return 0;
}

inline int cmd_sweep(const ExperimentConfig& cfg, std::ostream& out) {
    if (cfg.horizons.size() < 3)
        throw ConfigError("sweep expects at least 3 horizons");
    detail::require_valid_env(cfg.env);
    std::vector<std::int64_t> horizons = cfg.horizons;
    std::sort(horizons.begin(), horizons.end());

    const bool learner = cfg.agent.kind == AgentSpec::Kind::Abstention;
    bool have_bound = learner;

    CsvWriter csv;
    csv.comment("sweep.csv: per-horizon aggregates");
    csv.comment("T: horizon");
    csv.comment("w: bin side used at this horizon (abstention agent only)");
    csv.comment("m: trusted radius used at this horizon (abstention agent only)");
    csv.comment("mean_regret, std_regret, stderr_regret: as in summary.csv");
    csv.comment("bound_*: closed-form regret bound and its terms (abstention agent only)");
    csv.row({"T", "w", "m", "mean_regret", "std_regret", "stderr_regret", "bound_total",
             "bound_lipschitz", "bound_variance", "bound_margin", "bound_tail", "bound_failure"});

    std::vector<std::pair<double, double>> fit_pts;
    for (std::int64_t T : horizons) {
        MonteCarloResult mc = detail::run_batch(cfg, T);
        fit_pts.emplace_back(double(T), mc.mean_regret);
        std::vector<std::string> row{format_int(T)};
        std::string bound_txt;
        if (learner) {
            AgentConfig a = agent_config_for(cfg, T);
            row.push_back(format_double(a.w));
            row.push_back(format_double(a.m));
            row.push_back(format_double(mc.mean_regret));
            row.push_back(format_double(mc.std_regret));
            row.push_back(format_double(mc.stderr_regret));
            try {
                BoundBreakdown b = explicit_bound(a, cfg.env.inputs);
                row.insert(row.end(),
                           {format_double(b.total), format_double(b.lipschitz_term),
                            format_double(b.variance_term), format_double(b.margin_term),
                            format_double(b.tail_term), format_double(b.failure_term)});
                bound_txt = " bound=" + format_double(b.total);
            } catch (const UnsupportedQueryError&) {
                have_bound = false;
                row.insert(row.end(), 6, std::string{});
            }
        } else {
            row.insert(row.end(), {std::string{}, std::string{}, format_double(mc.mean_regret),
                                   format_double(mc.std_regret), format_double(mc.stderr_regret)});
            row.insert(row.end(), 6, std::string{});
        }
        csv.row(row);
        out << "T=" << T << " mean_regret=" << format_double(mc.mean_regret)
            << " stderr=" << format_double(mc.stderr_regret) << bound_txt << "\n";
    }

    nlohmann::ordered_json fitj;
    try {
        ScalingFit fit = fit_scaling_exponent(fit_pts);
        fitj["slope"] = fit.slope;
        fitj["intercept"] = fit.intercept;
        fitj["r_squared"] = fit.r_squared;
        fitj["dropped"] = fit.dropped;
        auto pts = nlohmann::ordered_json::array();
        for (auto [T, regret] : fit.points) pts.push_back({T, regret});
        fitj["points"] = std::move(pts);
        out << "fit: slope=" << format_double(fit.slope)
            << " r_squared=" << format_double(fit.r_squared) << "\n";
    } catch (const InsufficientDataError& e) {
        fitj["error"] = e.what();
        out << "fit: skipped (" << e.what() << ")\n";
    }
    (void)have_bound;

    std::filesystem::path dir(cfg.out);
    write_text_file(dir / "sweep.csv", csv.buffer);
    write_text_file(dir / "fit.json", fitj.dump(2) + "\n");
    detail::write_meta(cfg, dir);
    out << "wrote " << (dir / "sweep.csv").string() << ", fit.json, meta.json\n";
    return 0;
}

// Empirical companion to the two impossibility constructions.
inline int cmd_demo(const std::string& which, std::uint64_t seed, std::string out_dir,
                    std::int64_t T, std::ostream& out) {
    nlohmann::ordered_json doc;
    doc["demo"] = which;
    doc["seed"] = seed;
    std::string verdict;

    if (which == "need_for_caution") {
        // Heavy-tailed inputs (E||x|| infinite) against the cone reward: any
        // agent that commits before abstaining pays an expected price no
        // Monte Carlo average can converge to. Episodes are single rounds of
        // a commit-once agent; the running mean regret keeps climbing as the
        // sample grows.
        if (out_dir.empty()) out_dir = "out/demo_need_for_caution";
        EnvSpec env;
        env.n = 1;
        env.reward = RewardFunction::cone(1.0, 1.0);
        env.noise = NoiseModel::none();
        env.inputs = InputDistribution::pareto_radial(1, 1.0, 1.0);
        const std::vector<std::int64_t> checkpoints{1000, 10000, 100000, 1000000};
        auto cps = nlohmann::ordered_json::array();
        double sum = 0.0;
        std::int64_t rep = 0;
        std::vector<double> means;
        for (std::int64_t stop : checkpoints) {
            for (; rep < stop; ++rep) {
                auto agent = make_commit_first(1);
                TraceOptions topt;
                topt.mode = TraceMode::None;
                RunResult r = run_episode(env, *agent, 1,
                                          derive_stream(seed, static_cast<std::uint64_t>(rep)), topt);
                sum += r.cum_regret;
            }
            double mean = sum / double(rep);
            means.push_back(mean);
            cps.push_back({{"reps", stop}, {"running_mean_regret", mean}});
            out << "reps=" << stop << " running_mean_regret=" << format_double(mean) << "\n";
        }
        bool diverging = true;
        for (std::size_t i = 1; i < means.size(); ++i)
            if (!(means[i] > means[i - 1])) diverging = false;
        verdict = diverging ? "DIVERGING" : "NOT-DIVERGING";
        doc["checkpoints"] = std::move(cps);
    } else if (which == "limits_of_caution") {
        // Inputs on the sphere of radius T with two rewards that agree
        // nowhere near the data: one harmful, one benign. Whatever the agent
        // does, one of the pair charges linear regret.
        if (out_dir.empty()) out_dir = "out/demo_limits_of_caution";
        if (T < 2) throw ConfigError("demo limits_of_caution: T must be >= 2");
        auto episode = [&](const RewardFunction& reward) {
            EnvSpec env;
            env.n = 1;
            env.reward = reward;
            env.noise = NoiseModel::none();
            env.inputs = InputDistribution::sphere(1, double(T));
            AbstentionAgent agent(AgentConfig::make(1, reward.L, 0.0, T));
            TraceOptions topt;
            topt.mode = TraceMode::None;
            return run_episode(env, agent, T, seed, topt);
        };
        RunResult harmful = episode(RewardFunction::cone(1.0, 1.0));
        RunResult benign = episode(RewardFunction::constant_one());
        doc["T"] = T;
        doc["pair"] = {{{"reward", "harmful"},
                        {"cum_regret", harmful.cum_regret},
                        {"commits", harmful.commits}},
                       {{"reward", "benign"},
                        {"cum_regret", benign.cum_regret},
                        {"commits", benign.commits}}};
        out << "harmful: cum_regret=" << format_double(harmful.cum_regret)
            << " commits=" << harmful.commits << "\n";
        out << "benign: cum_regret=" << format_double(benign.cum_regret)
            << " commits=" << benign.commits << "\n";
        verdict = std::max(harmful.cum_regret, benign.cum_regret) >= double(T) / 2.0 ? "LINEAR"
                                                                                     : "SUBLINEAR";
    } else {
        throw ConfigError("unknown demo \"" + which +
                          "\"; expected need_for_caution or limits_of_caution");
    }

    doc["verdict"] = verdict;
    std::filesystem::path dir(out_dir);
    write_text_file(dir / "demo.json", doc.dump(2) + "\n");
    out << "verdict: " << verdict << "\n";
    out << "wrote " << (dir / "demo.json").string() << "\n";
    return 0;
}

namespace detail {

struct SweepRow {
    std::string source;
    std::int64_t T = 0;
    double mean_regret = 0.0;
    std::optional<double> bound_total;
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

inline void parse_sweep_csv(const std::filesystem::path& path, const std::string& source,
                            std::vector<SweepRow>& rows) {
    std::istringstream in(read_text_file(path));
    std::string line;
    std::vector<std::string> header;
    std::map<std::string, std::size_t> col;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto cells = split_csv_line(line);
        if (header.empty()) {
            header = cells;
            for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
            for (const char* need : {"T", "mean_regret", "bound_total"})
                if (!col.count(need))
                    throw ConfigError(path.string() + ": missing column \"" + need + "\"");
            continue;
        }
        SweepRow row;
        row.source = source;
        row.T = std::stoll(cells.at(col["T"]));
        row.mean_regret = std::stod(cells.at(col["mean_regret"]));
        const std::string& bt = cells.at(col["bound_total"]);
        if (!bt.empty()) row.bound_total = std::stod(bt);
        rows.push_back(std::move(row));
    }
    if (header.empty()) throw ConfigError(path.string() + ": no header row");
}

}  // namespace detail

inline int cmd_report(const std::string& root, std::ostream& out) {
    namespace fs = std::filesystem;
    if (!fs::exists(root)) throw ConfigError("report: no such directory: " + root);
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(root))
        if (entry.is_regular_file() && entry.path().filename() == "sweep.csv")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ConfigError("report: no sweep.csv found under " + root);

    std::vector<detail::SweepRow> rows;
    for (const auto& f : files)
        detail::parse_sweep_csv(f, fs::relative(f.parent_path(), root).string(), rows);

    CsvWriter csv;
    csv.comment("report.csv: merged sweep results");
    csv.comment("source: sweep directory relative to the report root");
    csv.comment("slack: bound_total - mean_regret (empty when no bound applies)");
    csv.row({"source", "T", "mean_regret", "bound_total", "slack"});
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-24s %10s %16s %16s %16s", "source", "T", "mean_regret",
                  "bound_total", "slack");
    out << buf << "\n";
    for (const auto& row : rows) {
        std::string bound = row.bound_total ? format_double(*row.bound_total) : std::string{};
        std::string slack =
            row.bound_total ? format_double(*row.bound_total - row.mean_regret) : std::string{};
        csv.row({row.source, format_int(row.T), format_double(row.mean_regret), bound, slack});
        std::snprintf(buf, sizeof(buf), "%-24s %10lld %16.6g %16s %16s", row.source.c_str(),
                      static_cast<long long>(row.T), row.mean_regret, bound.c_str(), slack.c_str());
        out << buf << "\n";
    }
    write_text_file(fs::path(root) / "report.csv", csv.buffer);
    out << "wrote " << (fs::path(root) / "report.csv").string() << "\n";
    return 0;
}

}  // namespace riskab::cli
