#pragma once
// Episode driver and Monte Carlo harness. Regret per round is measured
// against the pointwise best action: delta_t = max(0, r(x_t,1)) - r(x_t,y_t),
// which is always nonnegative. Replications are folded in rep order no matter
// how many worker threads ran them, so aggregates are bit-identical for any
// worker count.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "riskab/agent.hpp"
#include "riskab/environment.hpp"
#include "riskab/errors.hpp"
#include "riskab/geometry.hpp"
#include "riskab/rng.hpp"

namespace riskab {

enum class TraceMode { Full, Thin, None };

struct TraceOptions {
    TraceMode mode = TraceMode::Full;
    std::int64_t stride = 1;  // thin mode keeps rounds with (t - 1) % stride == 0
};

struct RoundRecord {
    std::int64_t t = 0;
    InputPoint x;
    int y = 0;
    double r_obs = std::numeric_limits<double>::quiet_NaN();  // NaN on abstain
    double r_true_commit = 0.0;                               // r(x_t, 1)
    double delta = 0.0;
};

struct RunResult {
    std::vector<RoundRecord> trace;
    TraceMode trace_mode = TraceMode::Full;
    std::int64_t thin_stride = 1;
    std::int64_t T = 0;
    std::uint64_t seed = 0;
    double cum_regret = 0.0;
    double max_step_regret = 0.0;
    std::int64_t commits = 0;
    std::int64_t certified_bins = 0;
    std::int64_t ood_abstains = 0;
    std::optional<bool> good_event;
};

inline RunResult run_episode(const EnvSpec& env, Agent& agent, std::int64_t T, std::uint64_t seed,
                             const TraceOptions& topt = {}) {
    if (T < 1) throw InvalidInputError("run_episode: T must be >= 1");
    if (topt.mode == TraceMode::Thin && topt.stride < 1)
        throw InvalidInputError("run_episode: thin stride must be >= 1");
    if (auto vr = validate_env(env); !vr.ok())
        throw ConfigError("run_episode: environment failed validation: " + vr.to_string());
    if (auto h = agent.horizon(); h && *h != T)
        throw InvalidInputError("run_episode: agent is configured for a different horizon");

    Rng input_rng(derive_stream(seed, kInputStream));
    Rng noise_rng(derive_stream(seed, kNoiseStream));
    // kAgentStream is reserved so randomized agents cannot disturb the two
    // streams above; the shipped agents are deterministic and do not draw.

    RunResult out;
    out.trace_mode = topt.mode;
    out.thin_stride = topt.mode == TraceMode::Thin ? topt.stride : 1;
    out.T = T;
    out.seed = seed;
    if (topt.mode == TraceMode::Full) out.trace.reserve(static_cast<std::size_t>(T));

    for (std::int64_t t = 1; t <= T; ++t) {
        InputPoint x = sample_input(env.inputs, input_rng);
        int y;
        try {
            y = agent.act(x);
        } catch (const ProtocolError& e) {
            throw AbortedRunError(t, e.what());
        }
        if (y != 0 && y != 1) throw AbortedRunError(t, "agent returned an action outside {0, 1}");
        double r_true = reward_eval(env, x, 1);
        double r_obs = std::numeric_limits<double>::quiet_NaN();
        if (y == 1) {
            r_obs = observe(env, x, 1, noise_rng);
            try {
                agent.observe_commit(r_obs);
            } catch (const ProtocolError& e) {
                throw AbortedRunError(t, e.what());
            }
            ++out.commits;
        }
        double delta = std::max(0.0, r_true) - (y == 1 ? r_true : 0.0);
        out.cum_regret += delta;
        if (delta > out.max_step_regret) out.max_step_regret = delta;
        bool keep = topt.mode == TraceMode::Full ||
                    (topt.mode == TraceMode::Thin && (t - 1) % topt.stride == 0);
        if (keep) out.trace.push_back(RoundRecord{t, std::move(x), y, r_obs, r_true, delta});
    }

    auto c = agent.counters();
    out.certified_bins = c.certified_bins;
    out.ood_abstains = c.ood_abstains;
    return out;
}

// Replays a full trace and checks the concentration event: at every commit the
// running bin mean must stay within gamma(k) of the oracle bin mean, with
// 3 * oracle_precision slack for the oracle's own error.
inline bool audit_good_event(const RunResult& res, const EnvSpec& env, const AgentConfig& cfg,
                             double oracle_precision = 1e-3) {
    if (res.trace_mode != TraceMode::Full)
        throw AuditUnavailableError("audit_good_event: requires a full trace");
    std::unordered_map<BinKey, BinStats, BinKeyHash> stats;
    std::unordered_map<BinKey, double, BinKeyHash> oracle;
    for (const auto& rec : res.trace) {
        if (rec.y != 1) continue;
        BinKey key = bin_key(rec.x, cfg.w);
        auto [it, fresh] = oracle.try_emplace(key, 0.0);
        if (fresh) {
            try {
                it->second = bin_mean_oracle(env, key, cfg.w, oracle_precision);
            } catch (const UnreachableBinError& e) {
                throw AuditUnavailableError(std::string("audit_good_event: ") + e.what());
            }
        }
        BinStats& st = stats[key];
        ++st.k;
        st.mu_hat += (rec.r_obs - st.mu_hat) / double(st.k);
        double gam = confidence_radius(st.k, cfg.sigma_w, cfg.T, cfg.c);
        if (std::abs(st.mu_hat - it->second) > gam + 3.0 * oracle_precision) return false;
    }
    return true;
}

// Commits recorded in the given bin. Certification is absorbing, so for the
// abstention agent every such commit predates the bin's certification.
inline std::int64_t count_precert_commits(const RunResult& res, const BinKey& key, double w) {
    if (res.trace_mode != TraceMode::Full)
        throw AuditUnavailableError("count_precert_commits: requires a full trace");
    std::int64_t count = 0;
    for (const auto& rec : res.trace)
        if (rec.y == 1 && bin_key(rec.x, w) == key) ++count;
    return count;
}

struct SafetyScan {
    std::int64_t ood_commits = 0;        // commits with ||x|| > R
    std::int64_t post_cert_commits = 0;  // commits after the bin's stats certified
};

// Replays a full trace against the certification rule to confirm the agent
// never committed outside the trusted radius or after certifying a bin.
inline SafetyScan scan_safety(const RunResult& res, const AgentConfig& cfg) {
    if (res.trace_mode != TraceMode::Full)
        throw AuditUnavailableError("scan_safety: requires a full trace");
    SafetyScan scan;
    std::unordered_map<BinKey, BinStats, BinKeyHash> stats;
    for (const auto& rec : res.trace) {
        if (rec.y != 1) continue;
        if (l2_norm(rec.x) > cfg.R) ++scan.ood_commits;
        BinStats& st = stats[bin_key(rec.x, cfg.w)];
        if (st.certified || certifies(st.mu_hat, st.k, cfg)) {
            st.certified = true;
            ++scan.post_cert_commits;
            continue;
        }
        ++st.k;
        st.mu_hat += (rec.r_obs - st.mu_hat) / double(st.k);
    }
    return scan;
}

struct RepSummary {
    std::int64_t rep = 0;
    std::uint64_t seed = 0;
    double cum_regret = 0.0;
    double max_step_regret = 0.0;
    std::int64_t commits = 0;
    std::int64_t certified_bins = 0;
    std::int64_t ood_abstains = 0;
    std::optional<bool> good_event;
};

struct MonteCarloResult {
    double mean_regret = 0.0;
    double std_regret = 0.0;  // sample standard deviation, 0 when reps < 2
    double stderr_regret = 0.0;
    std::vector<RepSummary> reps;
};

using AgentFactory = std::function<std::unique_ptr<Agent>()>;

struct MonteCarloOptions {
    int workers = 1;
    bool audit = false;
    std::optional<AgentConfig> audit_config;  // required when audit is set
    double oracle_precision = 1e-3;
};

inline MonteCarloResult monte_carlo(const EnvSpec& env, const AgentFactory& factory, std::int64_t T,
                                    std::int64_t reps, std::uint64_t base_seed,
                                    const MonteCarloOptions& opt = {}) {
    if (reps < 1) throw InvalidInputError("monte_carlo: reps must be >= 1");
    if (opt.workers < 1) throw InvalidInputError("monte_carlo: workers must be >= 1");
    if (opt.audit && !opt.audit_config)
        throw InvalidInputError("monte_carlo: audit requires the learner's config");
    if (auto vr = validate_env(env); !vr.ok())
        throw ConfigError("monte_carlo: environment failed validation: " + vr.to_string());

    std::vector<RepSummary> summaries(static_cast<std::size_t>(reps));
    std::vector<std::string> failures(static_cast<std::size_t>(reps));
    std::atomic<std::int64_t> next{0};
    std::atomic<bool> failed{false};

    auto work = [&]() {
        for (;;) {
            std::int64_t rep = next.fetch_add(1);
            if (rep >= reps || failed.load()) return;
            std::uint64_t eseed = derive_stream(base_seed, static_cast<std::uint64_t>(rep));
            try {
                auto agent = factory();
                TraceOptions topt;
                topt.mode = opt.audit ? TraceMode::Full : TraceMode::None;
                RunResult r = run_episode(env, *agent, T, eseed, topt);
                RepSummary s;
                s.rep = rep;
                s.seed = eseed;
                s.cum_regret = r.cum_regret;
                s.max_step_regret = r.max_step_regret;
                s.commits = r.commits;
                s.certified_bins = r.certified_bins;
                s.ood_abstains = r.ood_abstains;
                if (opt.audit)
                    s.good_event = audit_good_event(r, env, *opt.audit_config, opt.oracle_precision);
                summaries[static_cast<std::size_t>(rep)] = s;
            } catch (const std::exception& e) {
                failures[static_cast<std::size_t>(rep)] = e.what();
                failed.store(true);
            }
        }
    };

    int workers = static_cast<int>(std::min<std::int64_t>(opt.workers, reps));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int i = 0; i < workers; ++i) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    for (std::int64_t rep = 0; rep < reps; ++rep)
        if (!failures[static_cast<std::size_t>(rep)].empty())
            throw AbortedRunError(failures[static_cast<std::size_t>(rep)], rep);

    MonteCarloResult out;
    out.reps = std::move(summaries);
    double mean = 0.0;
    for (const auto& s : out.reps) mean += s.cum_regret;
    mean /= double(reps);
    double ss = 0.0;
    for (const auto& s : out.reps) ss += sqr(s.cum_regret - mean);
    out.mean_regret = mean;
    out.std_regret = reps > 1 ? std::sqrt(ss / double(reps - 1)) : 0.0;
    out.stderr_regret = out.std_regret / std::sqrt(double(reps));
    return out;
}

}  // namespace riskab
