#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rlt/frac_calc.hpp"
#include "rlt/local_time.hpp"
#include "rlt/stable_process.hpp"
#include "rlt/young.hpp"

using namespace rlt;

TEST_CASE("young precondition is a hard error") {
    auto f = GridFunction::sample(0.0, 1.0, 11, [](double u) { return u; }, false);
    auto g = GridFunction::sample(0.0, 1.0, 11, [](double u) { return u * u; }, false);
    CHECK_THROWS_AS(young_integral(f, g, 2.0, 2.0), YoungConditionError);
    CHECK_THROWS_AS(young_integral(f, g, 3.0, 1.6), YoungConditionError);
    CHECK_NOTHROW(young_integral(f, g, 2.0, 1.9));
}

TEST_CASE("smooth Stieltjes closed form: int x d(x^2) = 2/3") {
    auto f = GridFunction::sample(0.0, 1.0, 2001, [](double u) { return u; }, false);
    auto g = GridFunction::sample(0.0, 1.0, 2001, [](double u) { return u * u; }, false);
    auto r = young_integral(f, g, 1.0, 1.0);
    CHECK(std::abs(r.value - 2.0 / 3.0) < 1e-6);
    CHECK(std::abs(r.last_gap) < 1e-8 * (1.0 + std::abs(r.value)));
}

TEST_CASE("constant integrand telescopes exactly") {
    auto f = GridFunction::sample(0.0, 1.0, 11, [](double) { return 3.25; }, false);
    auto g = GridFunction::sample(0.0, 1.0, 11, [](double u) { return std::sin(5.0 * u); }, false);
    auto r = young_integral(f, g, 1.0, 1.0);
    CHECK(r.value == Catch::Approx(3.25 * (std::sin(5.0) - 0.0)).epsilon(1e-12));
}

TEST_CASE("integration by parts on smooth pairs") {
    auto f = GridFunction::sample(0.0, 1.0, 4001, [](double u) { return std::cos(u); }, false);
    auto g = GridFunction::sample(0.0, 1.0, 4001, [](double u) { return u * u * u + u; }, false);
    double fg_boundary = std::cos(1.0) * 2.0 - std::cos(0.0) * 0.0;
    double sum = young_integral(f, g, 1.0, 1.0).value + young_integral(g, f, 1.0, 1.0).value;
    CHECK(std::abs(sum - fg_boundary) < 1e-6);
}

TEST_CASE("bilinearity and increment invariance") {
    auto f = GridFunction::sample(0.0, 1.0, 101, [](double u) { return std::exp(u); }, false);
    auto g = GridFunction::sample(0.0, 1.0, 101, [](double u) { return u * u; }, false);
    auto h = GridFunction::sample(0.0, 1.0, 101, [](double u) { return std::sin(u); }, false);

    std::vector<double> combo(101);
    for (std::size_t i = 0; i < 101; ++i) combo[i] = 2.0 * g.values()[i] + h.values()[i];
    GridFunction gh(g.grid(), combo);
    double left = young_integral(f, gh, 1.0, 1.0).value;
    double right = 2.0 * young_integral(f, g, 1.0, 1.0).value +
                   young_integral(f, h, 1.0, 1.0).value;
    CHECK(left == Catch::Approx(right).margin(1e-12));

    std::vector<double> shifted(101);
    for (std::size_t i = 0; i < 101; ++i) shifted[i] = g.values()[i] + 7.5;
    GridFunction gs(g.grid(), shifted);
    CHECK(young_integral(f, gs, 1.0, 1.0).value ==
          Catch::Approx(young_integral(f, g, 1.0, 1.0).value).margin(1e-12));
}

TEST_CASE("chasles over an interior grid point") {
    auto sample_on = [](double lo, double hi, std::size_t n) {
        return std::pair{GridFunction::sample(lo, hi, n, [](double u) { return std::cos(3.0 * u); },
                                              false),
                         GridFunction::sample(lo, hi, n, [](double u) { return u * u; }, false)};
    };
    auto [f_all, g_all] = sample_on(0.0, 1.0, 513);
    auto [f_lo, g_lo] = sample_on(0.0, 0.5, 257);
    auto [f_hi, g_hi] = sample_on(0.5, 1.0, 257);
    double whole = young_integral(f_all, g_all, 1.0, 1.0).value;
    double parts = young_integral(f_lo, g_lo, 1.0, 1.0).value +
                   young_integral(f_hi, g_hi, 1.0, 1.0).value;
    CHECK(whole == Catch::Approx(parts).margin(1e-9));
}

TEST_CASE("no common discontinuities") {
    auto f = GridFunction::sample(0.0, 1.0, 11, [](double u) { return u; }, false);
    auto g = GridFunction::sample(0.0, 1.0, 11, [](double u) { return 1.0 - u; }, false);
    f.add_jump({5, 0.3});
    g.add_jump({5, 0.8});
    CHECK_THROWS_AS(young_integral(f, g, 1.0, 1.0), DomainError);
}

TEST_CASE("cadlag integrator: jump contributes f(x-) times the jump size") {
    // g: ramp with a unit jump at x = 0.5 (index 5), f smooth
    auto f = GridFunction::sample(0.0, 1.0, 11, [](double u) { return u; }, false);
    std::vector<double> gv(11);
    for (std::size_t i = 0; i < 11; ++i) {
        double x = static_cast<double>(i) / 10.0;
        gv[i] = 0.2 * x + (x >= 0.5 ? 1.0 : 0.0);
    }
    GridFunction g(f.grid(), gv);
    g.add_jump({5, 0.2 * 0.5});  // left limit excludes the jump
    double val = young_integral(f, g, 1.0, 1.0).value;
    // int f dg_c + f(0.5) * 1 = 0.2 * 1/2 + 0.5
    CHECK(val == Catch::Approx(0.2 * 0.5 + 0.5).margin(1e-8));
}

TEST_CASE("evaluator-backed refinement converges and reports gaps") {
    auto f = GridFunction::sample(0.0, 1.0, 17, [](double u) { return std::exp(u); });
    auto g = GridFunction::sample(0.0, 1.0, 17, [](double u) { return u * u; });
    auto r = young_integral(f, g, 1.0, 1.0, 1e-7);
    // int e^u d(u^2) = 2 int u e^u du = 2(u-1)e^u | = 2
    CHECK(std::abs(r.value - 2.0) < 1e-4);
    CHECK(std::abs(r.richardson - 2.0) < 1e-6);
    CHECK(r.levels >= 2);
}

TEST_CASE("young vs local time: padding and trivial cases") {
    auto p = simulate_path(Alpha(1.8), 1.0, 1 << 13, 10.0, 99);
    double bw = default_bandwidth(Alpha(1.8), 1.0, 1 << 13);
    auto field = estimate_local_time(p, adapted_grid(p, bw), bw);

    auto one = GridFunction::sample(field.grid.front(), field.grid.back(), 33,
                                    [](double) { return 1.0; });
    CHECK(young_integral_vs_local_time(one, field, 3.0, 1.0).value ==
          Catch::Approx(0.0).margin(1e-12));

    double far = field.grid.back() + 10.0;
    auto outside = GridFunction::sample(field.grid.front(), field.grid.back() + 20.0, 65,
                                        [far](double x) {
                                            double d = x - far;
                                            return d > 0.0 ? d * d : 0.0;
                                        });
    CHECK(std::abs(young_integral_vs_local_time(outside, field, 3.0, 1.0).value) < 1e-12);
}

TEST_CASE("young vs local time agrees with integration by parts for C1 integrand") {
    auto p = simulate_path(Alpha(1.8), 1.0, 1 << 14, 10.0, 4242);
    double bw = default_bandwidth(Alpha(1.8), 1.0, 1 << 14);
    auto field = estimate_local_time(p, adapted_grid(p, bw), bw);

    auto g = GridFunction::sample(field.grid.front() - 1.0, field.grid.back() + 1.0, 257,
                                  [](double x) { return std::tanh(x); });
    double direct = young_integral_vs_local_time(g, field, 3.0, 1.0).value;

    // other side: -int L dg, dense trapezoid against the derivative of tanh
    KahanSum other;
    std::size_t n = 20000;
    double lo = field.grid.front(), hi = field.grid.back();
    for (std::size_t i = 0; i < n; ++i) {
        double x = lo + (hi - lo) * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        double sech = 1.0 / std::cosh(x);
        other.add(-field.value_at(x) * sech * sech * (hi - lo) / static_cast<double>(n));
    }
    CHECK(direct == Catch::Approx(other.value()).margin(5e-4));
}

TEST_CASE("term by term: identical sequences give a zero array") {
    auto f = GridFunction::sample(0.0, 1.0, 65, [](double u) { return std::sin(u); }, false);
    auto g = GridFunction::sample(0.0, 1.0, 65, [](double u) { return u; }, false);
    std::vector<GridFunction> fs = {f, f, f};
    std::vector<GridFunction> gs = {g, g, g};
    for (double e : term_by_term_check(fs, gs, f, g, 2.0, 1.0)) CHECK(e == 0.0);
}

TEST_CASE("term by term: constant shifts of g do not matter") {
    auto f = GridFunction::sample(0.0, 1.0, 65, [](double u) { return std::cos(u); }, false);
    auto g = GridFunction::sample(0.0, 1.0, 65, [](double u) { return u * u; }, false);
    std::vector<GridFunction> fs, gs;
    for (int n = 1; n <= 4; ++n) {
        fs.push_back(f);
        std::vector<double> shifted(g.values());
        for (auto& v : shifted) v += 1.0 / static_cast<double>(n);
        gs.emplace_back(g.grid(), std::move(shifted));
    }
    // constant shifts perturb increments only at rounding level
    for (double e : term_by_term_check(fs, gs, f, g, 2.0, 1.0)) CHECK(e < 1e-12);
}

TEST_CASE("term by term: mollified sequence converges", "[slow]") {
    // f_n = mollify(f, 2^n) for a Lipschitz f against a smooth integrator
    auto f = GridFunction::sample(-3.0, 3.0, 1201, [](double u) { return std::abs(u); }, false);
    auto g = GridFunction::sample(-3.0, 3.0, 1201,
                                  [](double u) { return std::tanh(u) + 0.5 * u; }, false);
    std::vector<GridFunction> fs, gs;
    for (int k = 0; k <= 5; ++k) {
        auto fn_full = mollify(f, 1 << k);
        // restrict to the common trimmed grid of the deepest level
        fs.push_back(fn_full);
        gs.push_back(g);
    }
    // compare on the full grid: mollify trims the left margin, so evaluate
    // each integral on its own grid and track the error sequence directly
    double limit = young_integral(f, g, 2.0, 1.0).value;
    std::vector<double> errs;
    for (const auto& fn : fs) {
        std::vector<double> gv(fn.size());
        for (std::size_t i = 0; i < fn.size(); ++i) gv[i] = g.value_at(fn.grid()[i]);
        GridFunction grest(fn.grid(), std::move(gv));
        // account for the trimmed initial stretch by integrating f over it
        double head_lo = g.lo(), head_hi = fn.lo();
        double head = young_integral(
            GridFunction::sample(head_lo, head_hi, 65, [&f](double x) { return f.value_at(x); },
                                 false),
            GridFunction::sample(head_lo, head_hi, 65, [&g](double x) { return g.value_at(x); },
                                 false),
            2.0, 1.0).value;
        errs.push_back(std::abs(young_integral(fn, grest, 2.0, 1.0).value + head - limit));
    }
    CHECK(errs.back() < 1e-4);
    CHECK(errs.back() < errs.front());
}
