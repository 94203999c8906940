#pragma once
// Closed-form regret bound for the abstention learner and helpers for scaling
// studies. With v1 the unit-ball volume, the bound decomposes as
//
//   lipschitz  2 L v1 R^{n+1} / w^n                 per-bin approximation cost
//   variance   32 v1 sigma_w^2 R^n ln(2 T^4) / (c w^{n+1})
//   margin     (3 L sqrt(n) + 1) w T                 bins too close to call
//   tail       T * Pr[||x|| >= m]                    abstaining outside trust
//   failure    (1 + L R) / T                         concentration failure
//
// The sum is a valid upper bound on expected cumulative regret whenever the
// input distribution admits the radial survival query.

#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "riskab/agent.hpp"
#include "riskab/environment.hpp"
#include "riskab/errors.hpp"
#include "riskab/geometry.hpp"

namespace riskab {

enum class ScheduleVariant { Log, Power };

struct SchedulePair {
    double w = 0.0;
    double m = 0.0;
};

// Default schedules: w = T^{-1/(n+2)} and m = ln T (or T^{c_m} for the power
// variant, 0 < c_m < 1).
inline SchedulePair default_schedules(std::int64_t T, int n,
                                      ScheduleVariant variant = ScheduleVariant::Log,
                                      double c_m = 0.25) {
    if (T < 2) throw InvalidInputError("default_schedules: T must be >= 2");
    SchedulePair s;
    s.w = default_bin_side(double(T), n);
    s.m = variant == ScheduleVariant::Log ? default_trust_radius_log(double(T))
                                          : default_trust_radius_power(double(T), c_m);
    return s;
}

struct BoundBreakdown {
    double lipschitz_term = 0.0;
    double variance_term = 0.0;
    double margin_term = 0.0;
    double tail_term = 0.0;
    double failure_term = 0.0;
    double total = 0.0;
};

// Expected regret contributed by inputs outside the trusted radius.
inline double tail_term(const InputDistribution& dist, std::int64_t T, double m) {
    if (T < 1 || !(m >= 0.0)) throw InvalidInputError("tail_term: need T >= 1, m >= 0");
    return double(T) * survival(dist, m);
}

inline BoundBreakdown explicit_bound(const AgentConfig& cfg, const InputDistribution& dist) {
    if (!(cfg.w > 0.0) || !(cfg.R > 0.0) || cfg.T < 2)
        throw InvalidInputError("explicit_bound: config not derived");
    const double v1 = unit_ball_volume(cfg.n);
    const double Td = double(cfg.T);
    const double ln_term = std::log(2.0 * Td * Td * Td * Td);
    BoundBreakdown b;
    b.lipschitz_term = 2.0 * cfg.L * v1 * std::pow(cfg.R, cfg.n + 1) / std::pow(cfg.w, cfg.n);
    b.variance_term =
        32.0 * v1 * sqr(cfg.sigma_w) * std::pow(cfg.R, cfg.n) * ln_term / (cfg.c * std::pow(cfg.w, cfg.n + 1));
    b.margin_term = (3.0 * cfg.L * std::sqrt(double(cfg.n)) + 1.0) * cfg.w * Td;
    b.tail_term = tail_term(dist, cfg.T, cfg.m);
    b.failure_term = (1.0 + cfg.L * cfg.R) / Td;
    b.total = b.lipschitz_term + b.variance_term + b.margin_term + b.tail_term + b.failure_term;
    return b;
}

struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::vector<std::pair<double, double>> points;  // the (T, regret) pairs used
    int dropped = 0;                                // non-positive pairs excluded
};

// Least squares of log(regret) on log(T). Non-positive values cannot be
// log-transformed and are dropped (counted); at least 3 usable points needed.
inline ScalingFit fit_scaling_exponent(std::span<const std::pair<double, double>> pts) {
    ScalingFit fit;
    for (const auto& [T, regret] : pts) {
        if (T > 0.0 && regret > 0.0)
            fit.points.emplace_back(T, regret);
        else
            ++fit.dropped;
    }
    const std::size_t n = fit.points.size();
    if (n < 3) throw InsufficientDataError("fit_scaling_exponent: need at least 3 positive points");
    double sx = 0.0, sy = 0.0;
    for (const auto& [T, regret] : fit.points) {
        sx += std::log(T);
        sy += std::log(regret);
    }
    const double mx = sx / double(n), my = sy / double(n);
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [T, regret] : fit.points) {
        double dx = std::log(T) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(regret) - my);
    }
    if (!(sxx > 0.0)) throw InsufficientDataError("fit_scaling_exponent: horizons must not coincide");
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0, ss_tot = 0.0;
    for (const auto& [T, regret] : fit.points) {
        double ly = std::log(regret);
        double pred = fit.intercept + fit.slope * std::log(T);
        ss_res += sqr(ly - pred);
        ss_tot += sqr(ly - my);
    }
    fit.r_squared = ss_tot > 0.0 ? std::max(0.0, 1.0 - ss_res / ss_tot) : 1.0;
    if (fit.r_squared > 1.0) fit.r_squared = 1.0;
    return fit;
}

}  // namespace riskab
