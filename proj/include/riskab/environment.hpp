#pragma once
// Environments: a commit-reward function over R^n, an observation-noise model,
// and an input distribution with an analytic radial survival function
// Pr[||x|| >= r]. Rewards depend on x only through ||x||, abstention always
// pays 0, and the commit reward is bounded above by 1 but may be arbitrarily
// negative far from the origin.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "riskab/errors.hpp"
#include "riskab/geometry.hpp"
#include "riskab/mathutil.hpp"
#include "riskab/rng.hpp"

namespace riskab {

// ---------------------------------------------------------------------------
// rewards

enum class RewardKind { Cone, ConstantOne, RadialProfile };

struct RewardFunction {
    RewardKind kind = RewardKind::ConstantOne;
    double L = 1.0;   // declared Lipschitz constant
    double r0 = 1.0;  // cone: commit reward at the origin
    // radial profile: (radius, value) knots, radius 0 first, linear between
    // knots and extended with the last segment's slope beyond them
    std::vector<std::pair<double, double>> knots;

    static RewardFunction cone(double L, double r0 = 1.0) {
        RewardFunction f;
        f.kind = RewardKind::Cone;
        f.L = L;
        f.r0 = r0;
        return f;
    }

    static RewardFunction constant_one() {
        RewardFunction f;
        f.kind = RewardKind::ConstantOne;
        f.L = 1.0;
        return f;
    }

    static RewardFunction radial_profile(double L, std::vector<std::pair<double, double>> knots) {
        RewardFunction f;
        f.kind = RewardKind::RadialProfile;
        f.L = L;
        f.knots = std::move(knots);
        return f;
    }

    double value_at_radius(double r) const {
        switch (kind) {
            case RewardKind::Cone:
                return r0 - L * r;
            case RewardKind::ConstantOne:
                return 1.0;
            case RewardKind::RadialProfile: {
                if (knots.size() == 1) return knots.front().second;
                std::size_t i = 1;
                while (i + 1 < knots.size() && knots[i].first < r) ++i;
                auto [ra, va] = knots[i - 1];
                auto [rb, vb] = knots[i];
                double slope = (vb - va) / (rb - ra);
                return va + slope * (r - ra);
            }
        }
        return 0.0;
    }
};

// ---------------------------------------------------------------------------
// noise

enum class NoiseKind { Gaussian, BoundedUniform, None };

struct NoiseModel {
    NoiseKind kind = NoiseKind::None;
    double sigma = 0.0;       // gaussian
    double a = 0.0, b = 0.0;  // bounded uniform support, mean zero

    static NoiseModel gaussian(double sigma) { return NoiseModel{NoiseKind::Gaussian, sigma, 0.0, 0.0}; }
    static NoiseModel bounded_uniform(double a, double b) { return NoiseModel{NoiseKind::BoundedUniform, 0.0, a, b}; }
    static NoiseModel none() { return NoiseModel{}; }

    // Subgaussian scale used by the learner.
    double sigma_proxy() const {
        switch (kind) {
            case NoiseKind::Gaussian: return sigma;
            case NoiseKind::BoundedUniform: return 0.5 * (b - a);
            case NoiseKind::None: return 0.0;
        }
        return 0.0;
    }

    double draw(Rng& rng) const {
        switch (kind) {
            case NoiseKind::Gaussian: return sigma * rng.gaussian();
            case NoiseKind::BoundedUniform: return rng.uniform(a, b);
            case NoiseKind::None: return 0.0;
        }
        return 0.0;
    }
};

// ---------------------------------------------------------------------------
// inputs

enum class InputKind { GaussianIso, LaplaceRadial, ParetoRadial, Sphere, PointMass, UniformBox };

struct InputDistribution {
    InputKind kind = InputKind::GaussianIso;
    int n = 1;
    double scale = 1.0;              // gaussian_iso, laplace_radial
    double alpha = 1.0;              // pareto_radial tail index
    double r_min = 1.0;              // pareto_radial inner radius
    double radius = 1.0;             // sphere
    InputPoint x0;                   // point_mass
    InputPoint lo, hi;               // uniform_box

    static InputDistribution gaussian_iso(int n, double scale = 1.0) {
        InputDistribution d;
        d.kind = InputKind::GaussianIso;
        d.n = n;
        d.scale = scale;
        return d;
    }
    static InputDistribution laplace_radial(int n, double scale = 1.0) {
        InputDistribution d;
        d.kind = InputKind::LaplaceRadial;
        d.n = n;
        d.scale = scale;
        return d;
    }
    static InputDistribution pareto_radial(int n, double alpha, double r_min = 1.0) {
        InputDistribution d;
        d.kind = InputKind::ParetoRadial;
        d.n = n;
        d.alpha = alpha;
        d.r_min = r_min;
        return d;
    }
    static InputDistribution sphere(int n, double radius) {
        InputDistribution d;
        d.kind = InputKind::Sphere;
        d.n = n;
        d.radius = radius;
        return d;
    }
    static InputDistribution point_mass(InputPoint x0) {
        InputDistribution d;
        d.kind = InputKind::PointMass;
        d.n = static_cast<int>(x0.size());
        d.x0 = std::move(x0);
        return d;
    }
    static InputDistribution uniform_box(InputPoint lo, InputPoint hi) {
        InputDistribution d;
        d.kind = InputKind::UniformBox;
        d.n = static_cast<int>(lo.size());
        d.lo = std::move(lo);
        d.hi = std::move(hi);
        return d;
    }
};

namespace detail {

inline void sample_direction(int n, Rng& rng, InputPoint& out) {
    out.resize(n);
    while (true) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            out[i] = rng.gaussian();
            s += out[i] * out[i];
        }
        if (s > 1e-300) {
            double inv = 1.0 / std::sqrt(s);
            for (auto& v : out) v *= inv;
            return;
        }
    }
}

}  // namespace detail

inline InputPoint sample_input(const InputDistribution& d, Rng& rng) {
    InputPoint x;
    switch (d.kind) {
        case InputKind::GaussianIso:
            x.resize(d.n);
            for (auto& v : x) v = d.scale * rng.gaussian();
            break;
        case InputKind::LaplaceRadial: {
            detail::sample_direction(d.n, rng, x);
            double r = d.scale * rng.exponential();
            for (auto& v : x) v *= r;
            break;
        }
        case InputKind::ParetoRadial: {
            detail::sample_direction(d.n, rng, x);
            double r = d.r_min * std::pow(rng.uniform01_open(), -1.0 / d.alpha);
            for (auto& v : x) v *= r;
            break;
        }
        case InputKind::Sphere: {
            detail::sample_direction(d.n, rng, x);
            for (auto& v : x) v *= d.radius;
            break;
        }
        case InputKind::PointMass:
            x = d.x0;
            break;
        case InputKind::UniformBox:
            x.resize(d.n);
            for (int i = 0; i < d.n; ++i) x[i] = rng.uniform(d.lo[i], d.hi[i]);
            break;
    }
    return x;
}

// Radial survival function Pr[||x|| >= radius].
inline double survival(const InputDistribution& d, double radius) {
    if (!(radius >= 0.0)) throw InvalidInputError("survival: radius must be >= 0");
    switch (d.kind) {
        case InputKind::GaussianIso:
            return gamma_q_half_integer(0.5 * d.n, 0.5 * sqr(radius / d.scale));
        case InputKind::LaplaceRadial:
            return std::exp(-radius / d.scale);
        case InputKind::ParetoRadial:
            return radius <= d.r_min ? 1.0 : std::pow(radius / d.r_min, -d.alpha);
        case InputKind::Sphere:
            return radius <= d.radius ? 1.0 : 0.0;
        case InputKind::PointMass:
            return l2_norm(d.x0) >= radius ? 1.0 : 0.0;
        case InputKind::UniformBox: {
            if (d.n != 1)
                throw UnsupportedQueryError("survival: no closed form for uniform_box with n >= 2");
            double A = d.lo[0], B = d.hi[0];
            double len_hi = std::max(0.0, B - std::max(A, radius));
            double len_lo = std::max(0.0, std::min(B, -radius) - A);
            return (len_hi + len_lo) / (B - A);
        }
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// environment

struct EnvSpec {
    RewardFunction reward;
    NoiseModel noise;
    InputDistribution inputs;
    int n = 1;
};

// True commit reward; abstention (y = 0) pays exactly 0.
inline double reward_eval(const EnvSpec& env, std::span<const double> x, int y) {
    if (static_cast<int>(x.size()) != env.n) throw InvalidInputError("reward_eval: dimension mismatch");
    for (double xi : x)
        if (!std::isfinite(xi)) throw InvalidInputError("reward_eval: non-finite coordinate");
    if (y != 0 && y != 1) throw InvalidInputError("reward_eval: action must be 0 or 1");
    if (y == 0) return 0.0;
    return env.reward.value_at_radius(l2_norm(x));
}

// Noisy observation of the chosen action's reward.
inline double observe(const EnvSpec& env, std::span<const double> x, int y, Rng& noise_rng) {
    return reward_eval(env, x, y) + env.noise.draw(noise_rng);
}

struct ValidationReport {
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
    std::string to_string() const {
        std::string s;
        for (const auto& v : violations) {
            if (!s.empty()) s += "; ";
            s += v;
        }
        return s;
    }
};

// Static checks: parameter ranges, dimension agreement, sup r(x,1) <= 1,
// r(0,1) > 0, and profile slopes within the declared Lipschitz constant.
inline ValidationReport validate_env(const EnvSpec& env) {
    ValidationReport rep;
    auto bad = [&rep](std::string msg) { rep.violations.push_back(std::move(msg)); };

    if (env.n < 1) bad("n must be >= 1");
    const auto& d = env.inputs;
    if (d.n != env.n) bad("input distribution dimension disagrees with n");
    switch (d.kind) {
        case InputKind::GaussianIso:
        case InputKind::LaplaceRadial:
            if (!(d.scale > 0.0)) bad("input scale must be > 0");
            break;
        case InputKind::ParetoRadial:
            if (!(d.alpha > 0.0)) bad("pareto alpha must be > 0");
            if (!(d.r_min > 0.0)) bad("pareto r_min must be > 0");
            break;
        case InputKind::Sphere:
            if (!(d.radius >= 0.0)) bad("sphere radius must be >= 0");
            break;
        case InputKind::PointMass:
            if (static_cast<int>(d.x0.size()) != env.n) bad("point mass x0 has wrong dimension");
            for (double v : d.x0)
                if (!std::isfinite(v)) bad("point mass x0 has non-finite coordinate");
            break;
        case InputKind::UniformBox:
            if (static_cast<int>(d.lo.size()) != env.n || static_cast<int>(d.hi.size()) != env.n)
                bad("uniform box bounds have wrong dimension");
            else
                for (int i = 0; i < env.n; ++i)
                    if (!(d.lo[i] < d.hi[i])) bad("uniform box needs lo < hi per coordinate");
            break;
    }

    const auto& noise = env.noise;
    switch (noise.kind) {
        case NoiseKind::Gaussian:
            if (!(noise.sigma >= 0.0)) bad("noise sigma must be >= 0");
            break;
        case NoiseKind::BoundedUniform:
            if (!(noise.a < noise.b)) bad("bounded noise needs a < b");
            if (std::abs(noise.a + noise.b) > 1e-12 * std::max(1.0, std::abs(noise.b)))
                bad("bounded noise must be mean zero (a = -b)");
            break;
        case NoiseKind::None:
            break;
    }

    const auto& r = env.reward;
    if (!(r.L > 0.0)) bad("declared Lipschitz constant L must be > 0");
    switch (r.kind) {
        case RewardKind::Cone:
            if (!(r.r0 > 0.0)) bad("cone reward at the origin must be > 0");
            if (r.r0 > 1.0) bad("cone reward at the origin must be <= 1");
            break;
        case RewardKind::ConstantOne:
            break;
        case RewardKind::RadialProfile: {
            if (r.knots.empty()) {
                bad("radial profile needs at least one knot");
                break;
            }
            if (r.knots.front().first != 0.0) bad("radial profile must start at radius 0");
            if (!(r.knots.front().second > 0.0)) bad("radial profile value at radius 0 must be > 0");
            for (std::size_t i = 0; i < r.knots.size(); ++i) {
                if (!std::isfinite(r.knots[i].first) || !std::isfinite(r.knots[i].second))
                    bad("radial profile has non-finite knot");
                if (r.knots[i].second > 1.0) bad("radial profile value exceeds 1");
                if (i > 0) {
                    double dr = r.knots[i].first - r.knots[i - 1].first;
                    if (!(dr > 0.0)) {
                        bad("radial profile radii must be strictly increasing");
                        continue;
                    }
                    double slope = (r.knots[i].second - r.knots[i - 1].second) / dr;
                    if (std::abs(slope) > r.L * (1.0 + 1e-9))
                        bad("radial profile slope exceeds declared L");
                }
            }
            if (r.knots.size() >= 2) {
                auto [ra, va] = r.knots[r.knots.size() - 2];
                auto [rb, vb] = r.knots.back();
                if (vb - va > 0.0) bad("radial profile increases beyond the last knot, so sup exceeds 1");
            }
            break;
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// bin-mean oracle

namespace detail {

inline double density_1d(const InputDistribution& d, double x) {
    switch (d.kind) {
        case InputKind::GaussianIso:
            return std::exp(-0.5 * sqr(x / d.scale)) / (d.scale * std::sqrt(2.0 * std::numbers::pi));
        case InputKind::LaplaceRadial:
            return std::exp(-std::abs(x) / d.scale) / (2.0 * d.scale);
        case InputKind::ParetoRadial: {
            double ax = std::abs(x);
            if (ax < d.r_min) return 0.0;
            return 0.5 * d.alpha * std::pow(d.r_min, d.alpha) * std::pow(ax, -d.alpha - 1.0);
        }
        case InputKind::UniformBox:
            return (x >= d.lo[0] && x <= d.hi[0]) ? 1.0 / (d.hi[0] - d.lo[0]) : 0.0;
        default:
            return 0.0;
    }
}

inline double bin_mean_quadrature_1d(const EnvSpec& env, const BinKey& key, double w) {
    const double a = double(key.coords[0]) * w;
    const double b = double(key.coords[0] + 1) * w;
    std::vector<double> cuts{a, b};
    auto add_cut = [&](double c) {
        if (c > a && c < b) cuts.push_back(c);
    };
    add_cut(0.0);
    if (env.inputs.kind == InputKind::ParetoRadial) {
        add_cut(env.inputs.r_min);
        add_cut(-env.inputs.r_min);
    }
    if (env.inputs.kind == InputKind::UniformBox) {
        add_cut(env.inputs.lo[0]);
        add_cut(env.inputs.hi[0]);
    }
    if (env.reward.kind == RewardKind::RadialProfile)
        for (auto [rad, val] : env.reward.knots) {
            add_cut(rad);
            add_cut(-rad);
        }
    std::sort(cuts.begin(), cuts.end());

    auto p = [&](double x) { return density_1d(env.inputs, x); };
    auto pr = [&](double x) {
        double v[1]{x};
        return density_1d(env.inputs, x) * reward_eval(env, v, 1);
    };
    double mass = 0.0, weighted = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        mass += adaptive_simpson(p, cuts[i], cuts[i + 1], 1e-15);
        weighted += adaptive_simpson(pr, cuts[i], cuts[i + 1], 1e-15);
    }
    if (mass < 1e-12) throw UnreachableBinError("bin_mean_oracle: bin mass below 1e-12");
    return weighted / mass;
}

inline double bin_mean_rejection(const EnvSpec& env, const BinKey& key, double w, double precision) {
    Rng rng(derive_stream(0x0b1a5ed0ac1e5eedull, BinKeyHash{}(key)));
    const std::int64_t max_attempts = 20'000'000;
    const std::int64_t min_accept = 64;
    std::int64_t accepted = 0;
    double mean = 0.0, m2 = 0.0;
    for (std::int64_t attempt = 1; attempt <= max_attempts; ++attempt) {
        InputPoint x = sample_input(env.inputs, rng);
        if (bin_key(x, w) != key) continue;
        double r = reward_eval(env, x, 1);
        ++accepted;
        double d = r - mean;
        mean += d / double(accepted);
        m2 += d * (r - mean);
        if (accepted >= min_accept) {
            double se = std::sqrt(m2 / double(accepted - 1) / double(accepted));
            if (se <= precision) return mean;
        }
    }
    if (accepted == 0) throw UnreachableBinError("bin_mean_oracle: no samples hit the bin");
    if (accepted >= 2 &&
        std::sqrt(m2 / double(accepted - 1) / double(accepted)) <= precision)
        return mean;
    throw UnreachableBinError("bin_mean_oracle: bin too rare to estimate to the requested precision");
}

}  // namespace detail

// True mean commit reward E[r(x,1) | x in bin]. Closed form where available,
// deterministic quadrature for 1-d densities, seeded rejection sampling
// otherwise (standard error <= precision on the sampled path).
inline double bin_mean_oracle(const EnvSpec& env, const BinKey& key, double w,
                              double precision = 1e-3) {
    if (static_cast<int>(key.coords.size()) != env.n)
        throw InvalidInputError("bin_mean_oracle: dimension mismatch");
    if (!(w > 0.0) || !(precision > 0.0))
        throw InvalidInputError("bin_mean_oracle: need w > 0 and precision > 0");
    if (env.reward.kind == RewardKind::ConstantOne) return 1.0;
    const auto& d = env.inputs;
    if (d.kind == InputKind::PointMass) {
        if (bin_key(d.x0, w) == key) return reward_eval(env, d.x0, 1);
        throw UnreachableBinError("bin_mean_oracle: point mass lies outside the bin");
    }
    if (env.n == 1 && d.kind != InputKind::Sphere)
        return detail::bin_mean_quadrature_1d(env, key, w);
    return detail::bin_mean_rejection(env, key, w, precision);
}

}  // namespace riskab
