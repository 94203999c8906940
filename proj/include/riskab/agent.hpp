#pragma once
// The abstention learner and reference baselines. The learner partitions the
// trusted region into lattice bins and keeps a running mean per bin. A bin is
// certified harmful once
//
//     mu_hat + gamma(k) + L sqrt(n) w < 0,
//
// where gamma(k) = sqrt(sigma_w^2 ln(2 T^4) / (c k)) and sigma_w^2 =
// n L^2 w^2 + sigma^2 absorbs both observation noise and within-bin reward
// spread. Certification is absorbing: the bin's statistics freeze and every
// later visit abstains. Inputs outside the trusted region always abstain.
// The constant c is the subgaussian Hoeffding constant; c = 1/2 matches
// tail bound 2 exp(-eps^2 k / (2 sigma_w^2)).

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>

#include "riskab/environment.hpp"
#include "riskab/errors.hpp"
#include "riskab/geometry.hpp"
#include "riskab/rng.hpp"

namespace riskab {

inline double default_bin_side(double T, int n) {
    if (!(T >= 2.0) || n < 1) throw InvalidInputError("default_bin_side: need T >= 2, n >= 1");
    return std::pow(T, -1.0 / double(n + 2));
}

inline double default_trust_radius_log(double T) {
    if (!(T >= 2.0)) throw InvalidInputError("default_trust_radius_log: need T >= 2");
    return std::log(T);
}

inline double default_trust_radius_power(double T, double c_m) {
    if (!(T >= 2.0)) throw InvalidInputError("default_trust_radius_power: need T >= 2");
    if (!(c_m > 0.0) || !(c_m < 1.0))
        throw InvalidInputError("default_trust_radius_power: need 0 < c_m < 1");
    return std::pow(T, c_m);
}

struct AgentConfig {
    int n = 1;
    double L = 1.0;
    double sigma = 0.0;
    std::int64_t T = 2;
    double c = 0.5;
    double w = 1.0;
    double m = 0.0;
    double sigma_w = 0.0;  // derived
    double R = 0.0;        // derived

    void derive();
    TrustedRegion region() const { return TrustedRegion::make(w, m, n); }

    // Default log schedules: w = T^{-1/(n+2)}, m = ln T.
    static AgentConfig make(int n, double L, double sigma, std::int64_t T, double c = 0.5) {
        AgentConfig cfg;
        cfg.n = n;
        cfg.L = L;
        cfg.sigma = sigma;
        cfg.T = T;
        cfg.c = c;
        cfg.w = default_bin_side(double(T), n);
        cfg.m = default_trust_radius_log(double(T));
        cfg.derive();
        return cfg;
    }
};

inline double sigma_w(int n, double L, double w, double sigma) {
    if (n < 1 || !(L > 0.0) || !(w >= 0.0) || !(sigma >= 0.0))
        throw InvalidInputError("sigma_w: need n >= 1, L > 0, w >= 0, sigma >= 0");
    return std::sqrt(double(n) * L * L * w * w + sigma * sigma);
}

inline void AgentConfig::derive() {
    if (n < 1 || !(L > 0.0) || !(sigma >= 0.0) || T < 2 || !(c > 0.0) || !(w > 0.0) || !(m >= 0.0))
        throw InvalidInputError("AgentConfig: invalid parameters");
    sigma_w = riskab::sigma_w(n, L, w, sigma);
    R = m + std::sqrt(double(n)) * w;
}

// Confidence radius gamma(k); gamma(0) = +infinity, so an empty bin can never
// certify and the first visit always commits.
inline double confidence_radius(std::int64_t k, double sigma_w, std::int64_t T, double c) {
    if (k < 0 || !(sigma_w >= 0.0) || T < 1 || !(c > 0.0))
        throw InvalidInputError("confidence_radius: bad arguments");
    if (k == 0) return std::numeric_limits<double>::infinity();
    double Td = double(T);
    return std::sqrt(sigma_w * sigma_w * std::log(2.0 * Td * Td * Td * Td) / (c * double(k)));
}

// The certification predicate, shared by the live agent and trace replays.
inline bool certifies(double mu_hat, std::int64_t k, const AgentConfig& cfg) {
    return mu_hat + confidence_radius(k, cfg.sigma_w, cfg.T, cfg.c) +
               cfg.L * std::sqrt(double(cfg.n)) * cfg.w <
           0.0;
}

struct BinStats {
    std::int64_t k = 0;
    double mu_hat = 0.0;
    bool certified = false;
};

struct AgentCounters {
    std::int64_t ood_abstains = 0;
    std::int64_t certified_bins = 0;
};

// Round protocol: act(x) -> {0, 1}; observe_commit(r) exactly after each
// commit and never otherwise. Violations throw ProtocolError.
class Agent {
public:
    virtual ~Agent() = default;

    int act(std::span<const double> x) {
        if (pending_) throw ProtocolError("act called while an observation is pending");
        int y = do_act(x);
        if (y == 1) pending_ = true;
        return y;
    }

    void observe_commit(double r_obs) {
        if (!pending_) throw ProtocolError("observe_commit without a preceding commit");
        pending_ = false;
        do_observe(r_obs);
    }

    virtual AgentCounters counters() const { return {}; }
    virtual std::optional<std::int64_t> horizon() const { return std::nullopt; }

protected:
    virtual int do_act(std::span<const double> x) = 0;
    virtual void do_observe(double /*r_obs*/) {}

private:
    bool pending_ = false;
};

class AbstentionAgent final : public Agent {
public:
    explicit AbstentionAgent(AgentConfig cfg) : cfg_(cfg), region_(cfg.region()) {}

    const AgentConfig& config() const { return cfg_; }
    const std::unordered_map<BinKey, BinStats, BinKeyHash>& bins() const { return bins_; }

    AgentCounters counters() const override { return {ood_abstains_, certified_count_}; }
    std::optional<std::int64_t> horizon() const override { return cfg_.T; }

protected:
    int do_act(std::span<const double> x) override {
        BinKey key = bin_key(x, cfg_.w);
        if (!is_trusted(key, region_)) {
            ++ood_abstains_;
            return 0;
        }
        auto it = bins_.find(key);
        if (it != bins_.end()) {
            BinStats& st = it->second;
            if (st.certified) return 0;
            if (certifies(st.mu_hat, st.k, cfg_)) {
                st.certified = true;
                ++certified_count_;
                return 0;
            }
        }
        pending_key_ = std::move(key);
        return 1;
    }

    void do_observe(double r_obs) override {
        BinStats& st = bins_[pending_key_];
        ++st.k;
        st.mu_hat += (r_obs - st.mu_hat) / double(st.k);
    }

private:
    AgentConfig cfg_;
    TrustedRegion region_;
    std::unordered_map<BinKey, BinStats, BinKeyHash> bins_;
    BinKey pending_key_;
    std::int64_t ood_abstains_ = 0;
    std::int64_t certified_count_ = 0;
};

class AlwaysCommitAgent final : public Agent {
protected:
    int do_act(std::span<const double>) override { return 1; }
};

class AlwaysAbstainAgent final : public Agent {
protected:
    int do_act(std::span<const double>) override { return 0; }
};

// Commits for the first j rounds, then abstains forever.
class CommitFirstAgent final : public Agent {
public:
    explicit CommitFirstAgent(std::int64_t j) : j_(j) {
        if (j < 0) throw InvalidInputError("CommitFirstAgent: j must be >= 0");
    }

protected:
    int do_act(std::span<const double>) override { return ++t_ <= j_ ? 1 : 0; }

private:
    std::int64_t j_;
    std::int64_t t_ = 0;
};

// Knows the true reward; commits iff it is positive. Evaluation baseline only.
class OracleAgent final : public Agent {
public:
    explicit OracleAgent(EnvSpec env) : env_(std::move(env)) {}

protected:
    int do_act(std::span<const double> x) override { return reward_eval(env_, x, 1) > 0.0 ? 1 : 0; }

private:
    EnvSpec env_;
};

inline std::unique_ptr<Agent> make_always_commit() { return std::make_unique<AlwaysCommitAgent>(); }
inline std::unique_ptr<Agent> make_always_abstain() { return std::make_unique<AlwaysAbstainAgent>(); }
inline std::unique_ptr<Agent> make_commit_first(std::int64_t j) { return std::make_unique<CommitFirstAgent>(j); }
inline std::unique_ptr<Agent> make_oracle(EnvSpec env) { return std::make_unique<OracleAgent>(std::move(env)); }

}  // namespace riskab
