#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <utility>
#include <vector>

#include "riskab/analysis.hpp"

using namespace riskab;
using Catch::Approx;

TEST_CASE("default_schedules log and power variants") {
    SchedulePair s = default_schedules(1000, 1);
    CHECK(s.w == Approx(std::pow(1000.0, -1.0 / 3.0)).epsilon(1e-15));
    CHECK(s.m == Approx(std::log(1000.0)).epsilon(1e-15));

    SchedulePair s3 = default_schedules(1000, 3);
    CHECK(s3.w == Approx(std::pow(1000.0, -0.2)).epsilon(1e-15));

    SchedulePair p = default_schedules(10000, 1, ScheduleVariant::Power, 0.5);
    CHECK(p.m == Approx(100.0).epsilon(1e-12));

    CHECK_THROWS_AS(default_schedules(1, 1), InvalidInputError);
    CHECK_THROWS_AS(default_schedules(1000, 1, ScheduleVariant::Power, 1.5), InvalidInputError);
}

TEST_CASE("tail_term is the horizon times the survival mass") {
    CHECK(tail_term(InputDistribution::sphere(2, 5.0), 1000, 3.0) == 1000.0);
    CHECK(tail_term(InputDistribution::sphere(2, 5.0), 1000, 6.0) == 0.0);
    CHECK(tail_term(InputDistribution::pareto_radial(1, 2.0, 1.0), 10000, 100.0) ==
          Approx(1.0).epsilon(1e-12));
    CHECK(tail_term(InputDistribution::gaussian_iso(1, 1.0), 100, 0.0) == 100.0);
    CHECK_THROWS_AS(tail_term(InputDistribution::gaussian_iso(1), 0, 1.0), InvalidInputError);
}

TEST_CASE("explicit_bound matches a spreadsheet-style evaluation") {
    AgentConfig cfg = AgentConfig::make(1, 1.0, 0.25, 4096);
    BoundBreakdown b = explicit_bound(cfg, InputDistribution::gaussian_iso(1, 1.0));

    // everything below is written out from scratch with std:: calls only
    const double T = 4096.0;
    const double w = std::pow(T, -1.0 / 3.0);
    const double m = std::log(T);
    const double R = m + w;  // sqrt(1) = 1
    const double v1 = 2.0;
    const double sw2 = w * w + 0.0625;
    const double lg = std::log(2.0 * T * T * T * T);
    const double lip = 2.0 * 1.0 * v1 * R * R / w;
    const double var = 32.0 * v1 * sw2 * R * lg / (0.5 * w * w);
    const double margin = (3.0 * 1.0 + 1.0) * w * T;
    const double tail = T * std::erfc(m / std::sqrt(2.0));
    const double fail = (1.0 + R) / T;

    CHECK(b.lipschitz_term == Approx(lip).epsilon(1e-12));
    CHECK(b.variance_term == Approx(var).epsilon(1e-12));
    CHECK(b.margin_term == Approx(margin).epsilon(1e-12));
    CHECK(b.tail_term == Approx(tail).epsilon(1e-10));
    CHECK(b.failure_term == Approx(fail).epsilon(1e-12));
    CHECK(b.total == Approx(lip + var + margin + tail + fail).epsilon(1e-12));
}

TEST_CASE("explicit_bound terms behave sensibly") {
    AgentConfig cfg = AgentConfig::make(2, 1.5, 0.3, 2048);
    auto inputs = InputDistribution::laplace_radial(2, 1.0);
    BoundBreakdown b = explicit_bound(cfg, inputs);
    CHECK(b.lipschitz_term > 0.0);
    CHECK(b.variance_term > 0.0);
    CHECK(b.margin_term > 0.0);
    CHECK(b.tail_term > 0.0);
    CHECK(b.failure_term > 0.0);
    CHECK(b.total ==
          b.lipschitz_term + b.variance_term + b.margin_term + b.tail_term + b.failure_term);

    AgentConfig noisier = cfg;
    noisier.sigma = 0.6;
    noisier.derive();
    CHECK(explicit_bound(noisier, inputs).variance_term > b.variance_term);

    CHECK_THROWS_AS(explicit_bound(cfg, InputDistribution::uniform_box({-1.0, -1.0}, {1.0, 1.0})),
                    UnsupportedQueryError);

    AgentConfig raw;  // never derived
    CHECK_THROWS_AS(explicit_bound(raw, inputs), InvalidInputError);
}

TEST_CASE("fit recovers an exact power law") {
    std::vector<std::pair<double, double>> pts;
    for (double T = 256.0; T <= 32768.0; T *= 2.0) pts.emplace_back(T, 3.7 * std::pow(T, 0.7));
    ScalingFit fit = fit_scaling_exponent(pts);
    CHECK(fit.slope == Approx(0.7).margin(1e-9));
    CHECK(fit.intercept == Approx(std::log(3.7)).margin(1e-9));
    CHECK(fit.r_squared >= 1.0 - 1e-12);
    CHECK(fit.r_squared <= 1.0);
    CHECK(fit.dropped == 0);
    CHECK(fit.points.size() == 8);
}

TEST_CASE("fit on a constant series gives slope zero") {
    std::vector<std::pair<double, double>> pts{{100.0, 5.0}, {1000.0, 5.0}, {10000.0, 5.0}};
    ScalingFit fit = fit_scaling_exponent(pts);
    CHECK(fit.slope == Approx(0.0).margin(1e-12));
    CHECK(fit.r_squared == 1.0);
}

TEST_CASE("fit drops non-positive regrets but keeps count") {
    std::vector<std::pair<double, double>> pts{
        {100.0, 0.0}, {200.0, -3.0}, {256.0, 16.0}, {1024.0, 32.0}, {4096.0, 64.0}};
    ScalingFit fit = fit_scaling_exponent(pts);
    CHECK(fit.dropped == 2);
    CHECK(fit.points.size() == 3);
    CHECK(fit.slope == Approx(0.5).margin(1e-9));  // 16/32/64 over 256/1024/4096
}

TEST_CASE("fit errors on insufficient or degenerate data") {
    std::vector<std::pair<double, double>> two{{100.0, 1.0}, {200.0, 2.0}};
    CHECK_THROWS_AS(fit_scaling_exponent(two), InsufficientDataError);

    std::vector<std::pair<double, double>> zeros{{100.0, 0.0}, {200.0, 0.0}, {300.0, 0.0}};
    CHECK_THROWS_AS(fit_scaling_exponent(zeros), InsufficientDataError);

    std::vector<std::pair<double, double>> same{{100.0, 1.0}, {100.0, 2.0}, {100.0, 3.0}};
    CHECK_THROWS_AS(fit_scaling_exponent(same), InsufficientDataError);
}

TEST_CASE("fit r_squared stays within the unit interval") {
    std::vector<std::pair<double, double>> pts;
    std::uint64_t state = 12345;
    auto next = [&state] {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        return double(state >> 40) / double(1 << 24);
    };
    for (int trial = 0; trial < 50; ++trial) {
        pts.clear();
        for (int i = 0; i < 6; ++i) pts.emplace_back(100.0 * (i + 1), 0.1 + 10.0 * next());
        ScalingFit fit = fit_scaling_exponent(pts);
        REQUIRE(fit.r_squared >= 0.0);
        REQUIRE(fit.r_squared <= 1.0);
    }
}
