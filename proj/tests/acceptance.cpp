// Acceptance gate: nine end-to-end checks against the toolkit's contract,
// one PASS/FAIL line each. Exit status is nonzero if any check fails.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "riskab/cli_main.hpp"
#include "riskab/riskab.hpp"

using namespace riskab;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, bool ok, const std::string& detail) {
    std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// Per-episode invariants shared by criteria 7 and 8a, accumulated over every
// full-trace learner episode the suite runs.
struct SafetyTotals {
    std::int64_t episodes = 0;
    std::int64_t ood_commits = 0;
    std::int64_t post_cert_commits = 0;
    double max_regret_rel_err = 0.0;

    void add(const RunResult& res, const AgentConfig& cfg) {
        SafetyScan scan = scan_safety(res, cfg);
        ood_commits += scan.ood_commits;
        post_cert_commits += scan.post_cert_commits;
        double sum = 0.0;
        for (const auto& rec : res.trace) sum += rec.delta;
        double rel = std::abs(sum - res.cum_regret) / std::max(std::abs(res.cum_regret), 1.0);
        max_regret_rel_err = std::max(max_regret_rel_err, rel);
        ++episodes;
    }
};

EnvSpec cone_gaussian_env() {
    EnvSpec env;
    env.n = 1;
    env.reward = RewardFunction::cone(1.0, 1.0);
    env.noise = NoiseModel::gaussian(0.25);
    env.inputs = InputDistribution::gaussian_iso(1, 1.0);
    return env;
}

struct SweepRow {
    std::int64_t T = 0;
    double mean = 0.0;
    double stderr_regret = 0.0;
    double bound = 0.0;
};

}  // namespace

int main() {
    SafetyTotals safety;

    // Criteria 1 and 2: sublinear regret scaling and explicit bound dominance
    // on the cone/gaussian sweep, T = 2^8..2^15, 50 reps per horizon.
    std::vector<SweepRow> rows;
    try {
        EnvSpec env = cone_gaussian_env();
        std::vector<std::pair<double, double>> fit_pts;
        for (std::int64_t T = 256; T <= 32768; T *= 2) {
            AgentConfig acfg = AgentConfig::make(1, 1.0, 0.25, T);
            std::vector<double> regrets;
            regrets.reserve(50);
            for (std::int64_t rep = 0; rep < 50; ++rep) {
                AbstentionAgent agent(acfg);
                RunResult res = run_episode(env, agent, T,
                                            derive_stream(1, static_cast<std::uint64_t>(rep)));
                safety.add(res, acfg);
                regrets.push_back(res.cum_regret);
            }
            double mean = 0.0;
            for (double r : regrets) mean += r;
            mean /= double(regrets.size());
            double ss = 0.0;
            for (double r : regrets) ss += sqr(r - mean);
            double se = std::sqrt(ss / double(regrets.size() - 1)) / std::sqrt(double(regrets.size()));
            SweepRow row;
            row.T = T;
            row.mean = mean;
            row.stderr_regret = se;
            row.bound = explicit_bound(acfg, env.inputs).total;
            rows.push_back(row);
            fit_pts.emplace_back(double(T), mean);
        }
        ScalingFit fit = fit_scaling_exponent(fit_pts);
        bool ok1 = fit.slope >= 0.0 && fit.slope <= 0.95 && fit.r_squared >= 0.9;
        report(1, ok1,
               "fitted log-log slope " + fmt(fit.slope) + " in [0, 0.95] with r^2 " +
                   fmt(fit.r_squared) + " >= 0.9 over T=256..32768, 50 reps each");

        bool ok2 = true;
        double min_slack = std::numeric_limits<double>::infinity();
        for (const auto& row : rows) {
            double slack = row.bound - (row.mean + 2.0 * row.stderr_regret);
            min_slack = std::min(min_slack, slack);
            if (slack < 0.0) ok2 = false;
        }
        report(2, ok2,
               "mean regret + 2*stderr stays below the explicit bound at all " +
                   std::to_string(rows.size()) + " horizons (min slack " + fmt(min_slack) + ")");
    } catch (const std::exception& e) {
        report(1, false, std::string("exception: ") + e.what());
        report(2, false, "sweep unavailable");
    }

    // Criterion 3: commit-once agent under alpha=1 Pareto inputs; the running
    // mean of first-step regret keeps climbing because its expectation is
    // infinite.
    try {
        EnvSpec env;
        env.n = 1;
        env.reward = RewardFunction::cone(1.0, 1.0);
        env.noise = NoiseModel::none();
        env.inputs = InputDistribution::pareto_radial(1, 1.0, 1.0);
        TraceOptions none;
        none.mode = TraceMode::None;
        int successes = 0;
        for (std::uint64_t base = 1; base <= 10; ++base) {
            double sum = 0.0, mean_1e3 = 0.0;
            for (std::int64_t rep = 0; rep < 1000000; ++rep) {
                auto agent = make_commit_first(1);
                sum += run_episode(env, *agent, 1,
                                   derive_stream(base, static_cast<std::uint64_t>(rep)), none)
                           .cum_regret;
                if (rep + 1 == 1000) mean_1e3 = sum / 1000.0;
            }
            double mean_1e6 = sum / 1000000.0;
            if (mean_1e6 > mean_1e3 && mean_1e6 > 10.0) ++successes;
        }
        report(3, successes >= 9,
               std::to_string(successes) +
                   "/10 base seeds show the running mean regret at 1e6 reps above both its 1e3 "
                   "value and 10 (need >= 9)");
    } catch (const std::exception& e) {
        report(3, false, std::string("exception: ") + e.what());
    }

    // Criterion 4: radius-T sphere inputs make the learner abstain everywhere,
    // so the benign/harmful reward pair pins regret to exactly T and 0.
    try {
        const std::int64_t T = 1000;
        auto episode = [&](const RewardFunction& reward) {
            EnvSpec env;
            env.n = 1;
            env.reward = reward;
            env.noise = NoiseModel::none();
            env.inputs = InputDistribution::sphere(1, double(T));
            AgentConfig acfg = AgentConfig::make(1, reward.L, 0.0, T);
            AbstentionAgent agent(acfg);
            RunResult res = run_episode(env, agent, T, 77);
            safety.add(res, acfg);
            return res;
        };
        RunResult harmful = episode(RewardFunction::cone(1.0, 1.0));
        RunResult benign = episode(RewardFunction::constant_one());
        double worst = std::max(harmful.cum_regret, benign.cum_regret);
        bool ok4 = harmful.commits == 0 && benign.commits == 0 && harmful.cum_regret == 0.0 &&
                   benign.cum_regret == double(T) && worst >= double(T) / 2.0;
        report(4, ok4,
               "zero commits on both rewards; regret exactly " + fmt(benign.cum_regret) +
                   " (benign) and " + fmt(harmful.cum_regret) + " (harmful), max >= T/2");
    } catch (const std::exception& e) {
        report(4, false, std::string("exception: ") + e.what());
    }

    // Criterion 5: audited concentration event frequency at T = 1e4.
    try {
        EnvSpec env = cone_gaussian_env();
        const std::int64_t T = 10000;
        AgentConfig acfg = AgentConfig::make(1, 1.0, 0.25, T);
        int good = 0;
        for (std::int64_t rep = 0; rep < 200; ++rep) {
            AbstentionAgent agent(acfg);
            RunResult res =
                run_episode(env, agent, T, derive_stream(7, static_cast<std::uint64_t>(rep)));
            safety.add(res, acfg);
            if (audit_good_event(res, env, acfg)) ++good;
        }
        report(5, good >= 198,
               std::to_string(good) + "/200 audited episodes satisfy the concentration event "
                                      "(need >= 198)");
    } catch (const std::exception& e) {
        report(5, false, std::string("exception: ") + e.what());
    }

    // Criterion 6: certification sample and per-bin regret caps for a point
    // mass with true bin mean -1.
    try {
        EnvSpec env;
        env.n = 1;
        env.reward = RewardFunction::cone(1.0, 1.0);
        env.noise = NoiseModel::gaussian(0.25);
        env.inputs = InputDistribution::point_mass({2.0});
        const std::int64_t T = 10000;
        AgentConfig acfg = AgentConfig::make(1, 1.0, 0.25, T);
        const double mu = -1.0;
        const double ln_term = std::log(2.0 * std::pow(double(T), 4.0));
        const double margin = sqr(mu + acfg.L * std::sqrt(double(acfg.n)) * acfg.w);
        const auto k_cap = static_cast<std::int64_t>(
            std::ceil(4.0 * sqr(acfg.sigma_w) * ln_term / (acfg.c * margin))) + 1;
        const double reg_cap =
            2.0 * acfg.L * acfg.R + 32.0 * sqr(acfg.sigma_w) * ln_term / (acfg.c * acfg.w);
        const BinKey key = bin_key(std::vector<double>{2.0}, acfg.w);

        int good = 0;
        bool caps_hold = true;
        std::int64_t worst_k = 0;
        double worst_reg = 0.0;
        for (std::int64_t rep = 0; rep < 100; ++rep) {
            AbstentionAgent agent(acfg);
            RunResult res =
                run_episode(env, agent, T, derive_stream(11, static_cast<std::uint64_t>(rep)));
            safety.add(res, acfg);
            if (!audit_good_event(res, env, acfg)) continue;
            ++good;
            std::int64_t k = count_precert_commits(res, key, acfg.w);
            double bin_regret = 0.0;
            for (const auto& rec : res.trace)
                if (rec.y == 1) bin_regret += rec.delta;
            worst_k = std::max(worst_k, k);
            worst_reg = std::max(worst_reg, bin_regret);
            if (k > k_cap || bin_regret > reg_cap) caps_hold = false;
        }
        bool ok6 = good == 100 && caps_hold;
        report(6, ok6,
               std::to_string(good) + "/100 episodes audited good; pre-certification commits <= " +
                   std::to_string(k_cap) + " (worst " + std::to_string(worst_k) +
                   ") and bin regret <= " + fmt(reg_cap) + " (worst " + fmt(worst_reg) +
                   ") in all of them");
    } catch (const std::exception& e) {
        report(6, false, std::string("exception: ") + e.what());
    }

    // Criterion 7: hard safety invariants over every learner episode above.
    report(7, safety.ood_commits == 0 && safety.post_cert_commits == 0,
           std::to_string(safety.ood_commits) + " commits outside the trusted radius and " +
               std::to_string(safety.post_cert_commits) + " post-certification commits across " +
               std::to_string(safety.episodes) + " episodes (need 0 and 0)");

    // Criterion 8: oracle equivalences.
    try {
        bool ok_regret = safety.max_regret_rel_err <= 1e-9;

        bool ok_ball = true;
        for (int n = 1; n <= 5; ++n) {
            Rng rng(derive_stream(99, static_cast<std::uint64_t>(n)));
            const std::int64_t N = 2000000;
            std::int64_t inside = 0;
            std::vector<double> x(static_cast<std::size_t>(n));
            for (std::int64_t i = 0; i < N; ++i) {
                double ss = 0.0;
                for (auto& xi : x) {
                    xi = rng.uniform(-1.0, 1.0);
                    ss += xi * xi;
                }
                if (ss <= 1.0) ++inside;
            }
            double est = double(inside) / double(N) * std::pow(2.0, n);
            if (std::abs(est - unit_ball_volume(n)) > 0.01 * unit_ball_volume(n)) ok_ball = false;
        }

        std::vector<std::pair<double, double>> synth;
        for (double T = 256.0; T <= 8192.0; T *= 2.0) synth.emplace_back(T, 2.5 * std::pow(T, 0.6));
        bool ok_fit = std::abs(fit_scaling_exponent(synth).slope - 0.6) <= 1e-9;

        struct SurvivalCase {
            InputDistribution dist;
            std::vector<double> radii;
        };
        std::vector<SurvivalCase> cases;
        cases.push_back({InputDistribution::gaussian_iso(1, 1.0),
                         {0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5}});
        cases.push_back({InputDistribution::laplace_radial(2, 1.5),
                         {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0, 8.0}});
        cases.push_back({InputDistribution::pareto_radial(1, 1.5, 1.0),
                         {1.1, 1.3, 1.6, 2.0, 2.5, 3.0, 4.0, 6.0, 9.0, 14.0}});
        cases.push_back({InputDistribution::sphere(2, 2.0),
                         {0.3, 0.8, 1.2, 1.6, 1.9, 2.1, 2.4, 2.8, 3.2, 3.6}});
        cases.push_back({InputDistribution::point_mass({0.6, 0.8}),
                         {0.2, 0.4, 0.6, 0.8, 0.9, 1.1, 1.2, 1.4, 1.6, 1.8}});
        cases.push_back({InputDistribution::uniform_box({-2.0}, {3.0}),
                         {0.1, 0.5, 0.9, 1.3, 1.7, 2.1, 2.5, 2.9, 3.4, 3.9}});
        bool ok_surv = true;
        const std::int64_t N = 200000;
        std::uint64_t stream = 500;
        for (const auto& sc : cases) {
            Rng rng(derive_stream(stream++, 0));
            std::vector<double> norms;
            norms.reserve(static_cast<std::size_t>(N));
            for (std::int64_t i = 0; i < N; ++i) norms.push_back(l2_norm(sample_input(sc.dist, rng)));
            for (double r : sc.radii) {
                double hits = 0.0;
                for (double nm : norms)
                    if (nm >= r) hits += 1.0;
                double p_hat = hits / double(N);
                double tol = 3.0 * std::sqrt(p_hat * (1.0 - p_hat) / double(N)) + 1e-4;
                if (std::abs(p_hat - survival(sc.dist, r)) > tol) ok_surv = false;
            }
        }

        bool ok8 = ok_regret && ok_ball && ok_fit && ok_surv;
        std::string detail;
        if (ok8) {
            detail = "regret recomputation within 1e-9 relative (worst " +
                     fmt(safety.max_regret_rel_err) + "); ball volumes within 1% for n <= 5; "
                     "scaling fit exact to 1e-9; empirical survival within 3 stderr + 1e-4 at 10 "
                     "radii for all 6 input kinds";
        } else {
            detail = std::string("failed sub-checks:") + (ok_regret ? "" : " regret-tracker") +
                     (ok_ball ? "" : " ball-volume") + (ok_fit ? "" : " scaling-fit") +
                     (ok_surv ? "" : " survival");
        }
        report(8, ok8, detail);
    } catch (const std::exception& e) {
        report(8, false, std::string("exception: ") + e.what());
    }

    // Criterion 9: byte-identical payload files across executions and worker
    // counts, via the command-line front end.
    try {
        fs::path dir = fs::temp_directory_path() / "riskab_acceptance_c9";
        fs::remove_all(dir);
        fs::create_directories(dir);

        ExperimentConfig run_cfg;
        run_cfg.name = "determinism_run";
        run_cfg.env = cone_gaussian_env();
        run_cfg.horizons = {400};
        run_cfg.reps = 10;
        run_cfg.base_seed = 5;
        run_cfg.audit = true;
        run_cfg.out = (dir / "unused").string();
        fs::path run_path = dir / "run.json";
        write_text_file(run_path, config_to_json(run_cfg).dump(2) + "\n");

        ExperimentConfig sweep_cfg = run_cfg;
        sweep_cfg.name = "determinism_sweep";
        sweep_cfg.horizons = {64, 128, 256};
        sweep_cfg.reps = 5;
        sweep_cfg.audit = false;
        fs::path sweep_path = dir / "sweep.json";
        write_text_file(sweep_path, config_to_json(sweep_cfg).dump(2) + "\n");

        auto cli = [&](std::vector<std::string> args) {
            std::ostringstream sink;
            return cli::cli_main(args, sink, sink);
        };
        bool ok9 = true;
        ok9 &= cli({"run", "--config", run_path.string(), "--out", (dir / "r1").string(),
                    "--workers", "1"}) == 0;
        ok9 &= cli({"run", "--config", run_path.string(), "--out", (dir / "r2").string(),
                    "--workers", "1"}) == 0;
        ok9 &= cli({"run", "--config", run_path.string(), "--out", (dir / "r8").string(),
                    "--workers", "8"}) == 0;
        ok9 &= cli({"sweep", "--config", sweep_path.string(), "--out", (dir / "s1").string(),
                    "--workers", "1"}) == 0;
        ok9 &= cli({"sweep", "--config", sweep_path.string(), "--out", (dir / "s2").string(),
                    "--workers", "8"}) == 0;

        auto same = [&](const char* a, const char* b, const char* file) {
            return read_text_file(dir / a / file) == read_text_file(dir / b / file);
        };
        ok9 &= same("r1", "r2", "summary.csv") && same("r1", "r2", "runs.jsonl");
        ok9 &= same("r1", "r8", "summary.csv") && same("r1", "r8", "runs.jsonl");
        ok9 &= same("s1", "s2", "sweep.csv") && same("s1", "s2", "fit.json");
        report(9, ok9,
               "summary.csv, runs.jsonl, and sweep.csv are byte-identical across repeated "
               "executions and worker counts 1 vs 8");
    } catch (const std::exception& e) {
        report(9, false, std::string("exception: ") + e.what());
    }

    if (g_failures == 0) {
        std::printf("all 9 acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d acceptance criteria FAILED\n", g_failures);
    return 1;
}
