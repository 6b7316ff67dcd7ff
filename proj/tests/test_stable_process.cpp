#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rlt/frac_calc.hpp"
#include "rlt/stable_process.hpp"
#include "test_support.hpp"

using namespace rlt;

TEST_CASE("alpha domain is enforced") {
    CHECK_THROWS_AS(Alpha(1.0), DomainError);
    CHECK_THROWS_AS(Alpha(2.0), DomainError);
    CHECK_THROWS_AS(Alpha(0.5), DomainError);
    CHECK_NOTHROW(Alpha(1.5));
}

TEST_CASE("simulate_path initialization contract") {
    auto p = simulate_path(Alpha(1.5), 1.0, 1, 0.5, 42);
    REQUIRE(p.values.size() == 2);
    CHECK(p.values[0] == 0.0);
    CHECK(p.times[0] == 0.0);
    CHECK(p.times[1] == 1.0);
}

TEST_CASE("simulate_path rejects bad arguments") {
    CHECK_THROWS_AS(simulate_path(Alpha(1.5), -1.0, 8, 0.5, 1), DomainError);
    CHECK_THROWS_AS(simulate_path(Alpha(1.5), 1.0, 8, 0.0, 1), DomainError);
}

TEST_CASE("same seed gives byte-identical paths") {
    auto a = simulate_path(Alpha(1.7), 2.0, 4096, 0.2, 987654321u);
    auto b = simulate_path(Alpha(1.7), 2.0, 4096, 0.2, 987654321u);
    REQUIRE(a.values.size() == b.values.size());
    for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(a.values[i] == b.values[i]);
    REQUIRE(a.jumps.size() == b.jumps.size());
    for (std::size_t i = 0; i < a.jumps.size(); ++i) {
        CHECK(a.jumps[i].time == b.jumps[i].time);
        CHECK(a.jumps[i].size == b.jumps[i].size);
    }
}

TEST_CASE("jumps record exactly the increments above threshold") {
    auto p = simulate_path(Alpha(1.5), 1.0, 2048, 0.05, 7);
    std::size_t above = 0;
    for (std::size_t k = 1; k < p.values.size(); ++k)
        if (std::abs(p.values[k] - p.values[k - 1]) >= 0.05) ++above;
    CHECK(p.jumps.size() == above);
    for (const auto& j : p.jumps) {
        CHECK(std::abs(j.size) >= 0.05);
        CHECK(j.time > 0.0);
        CHECK(j.time <= 1.0);
    }
}

TEST_CASE("empirical characteristic function matches exp(-t|theta|^alpha)", "[slow][mc]") {
    const double alpha = 1.5, theta = 1.0;
    const std::size_t n_steps = 1 << 14;
    const int n_paths = 10000;
    RunningStats re;
    for (int i = 0; i < n_paths; ++i) {
        auto p = simulate_path(Alpha(alpha), 1.0, n_steps, 10.0, split_seed(1234, i));
        re.add(std::cos(theta * p.values.back()));
    }
    double target = std::exp(-1.0);
    CHECK(std::abs(re.mean() - target) <= 3.0 * re.std_error());
}

TEST_CASE("stationary increments pass a two-sample KS test", "[slow][mc]") {
    // two disjoint windows of the same width; 100 trials at level 0.01
    int pass = 0;
    for (int trial = 0; trial < 100; ++trial) {
        auto p = simulate_path(Alpha(1.5), 1.0, 4096, 10.0, split_seed(777, trial));
        std::vector<double> w1, w2;
        for (std::size_t k = 1; k <= 1024; ++k) w1.push_back(p.values[k] - p.values[k - 1]);
        for (std::size_t k = 2049; k <= 3072; ++k) w2.push_back(p.values[k] - p.values[k - 1]);
        if (oracle::ks_two_sample_pvalue(w1, w2) > 0.01) ++pass;
    }
    CHECK(pass >= 95);
}

TEST_CASE("self-similarity of marginals via empirical quantiles", "[slow][mc]") {
    // X_{ct} =d c^{1/alpha} X_t with c = 4
    const double alpha = 1.5;
    const int n = 4000;
    std::vector<double> at_t, at_ct;
    for (int i = 0; i < n; ++i) {
        at_t.push_back(simulate_path(Alpha(alpha), 1.0, 512, 10.0, split_seed(10, i)).values.back());
        at_ct.push_back(simulate_path(Alpha(alpha), 4.0, 512, 10.0, split_seed(20, i)).values.back());
    }
    std::sort(at_t.begin(), at_t.end());
    std::sort(at_ct.begin(), at_ct.end());
    double scale = std::pow(4.0, 1.0 / alpha);
    for (double prob : {0.25, 0.5, 0.75}) {
        std::size_t idx = static_cast<std::size_t>(prob * n);
        double q_t = at_t[idx] * scale;
        double q_ct = at_ct[idx];
        // quantile MC error at these sample sizes is a few percent of the IQR
        double iqr = (at_ct[3 * n / 4] - at_ct[n / 4]);
        CHECK(std::abs(q_ct - q_t) < 0.15 * iqr + 0.05);
    }
}

TEST_CASE("transition density: Cauchy boundary diagnostic") {
    // alpha -> 1 limit is the Cauchy law; evaluate just inside the domain
    double v = transition_density(Alpha(1.0 + 1e-9), 1.0, 0.0);
    CHECK(std::abs(v - 1.0 / kPi) < 1e-6);
}

TEST_CASE("transition density at the origin matches the closed form") {
    // p_1(0) = Gamma(1 + 1/alpha)/pi
    double v = transition_density(Alpha(1.5), 1.0, 0.0);
    double target = std::tgamma(1.0 + 2.0 / 3.0) / kPi;
    CHECK(std::abs(v - target) < 1e-8);
    // independent quadrature of (1/pi) int exp(-xi^1.5)
    double q = oracle::simpson([](double xi) { return std::exp(-std::pow(xi, 1.5)); }, 0.0, 60.0,
                               20000) /
               kPi;
    CHECK(std::abs(v - q) < 1e-7);
}

TEST_CASE("transition density symmetry and peak bound") {
    for (double x : {0.3, 0.9, 2.2, 5.0}) {
        double plus = transition_density(Alpha(1.5), 1.0, x);
        double minus = transition_density(Alpha(1.5), 1.0, -x);
        CHECK(plus == Catch::Approx(minus).margin(1e-12));
        CHECK(plus <= transition_density(Alpha(1.5), 1.0, 0.0) + 1e-12);
    }
}

TEST_CASE("transition density integrates to one", "[slow]") {
    auto f = [](double x) { return transition_density(Alpha(1.5), 1.0, x); };
    double mass = oracle::simpson(f, -60.0, 60.0, 4000);
    // tail beyond |x| = 60 is below nu-tail scale ~ 60^-1.5 * const
    CHECK(std::abs(mass - 1.0) < 1e-3);
}

TEST_CASE("levy density values and symmetry") {
    CHECK(levy_density(Alpha(1.5), 1.0, 1.0) == Catch::Approx(1.0));
    CHECK(levy_density(Alpha(1.5), 2.0, 1.0) == Catch::Approx(std::pow(2.0, -2.5)));
    CHECK(levy_density(Alpha(1.3), -0.7, 2.0) == Catch::Approx(levy_density(Alpha(1.3), 0.7, 2.0)));
    CHECK_THROWS_AS(levy_density(Alpha(1.5), 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(levy_density(Alpha(1.5), 1.0, 0.0), DomainError);
}
