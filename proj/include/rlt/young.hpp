#pragma once

#include <cmath>
#include <vector>

#include "rlt/common.hpp"
#include "rlt/grid.hpp"
#include "rlt/local_time.hpp"

namespace rlt {

struct YoungResult {
    double value = 0.0;       // left-point refinement limit estimate
    double last_gap = 0.0;    // change across the final refinement
    double richardson = 0.0;  // extrapolated value, diagnostic only
    int levels = 0;           // refinements performed
};

namespace detail {

inline void check_young_condition(double p, double q) {
    require(p > 0.0 && q > 0.0, "young_integral: p and q must be positive");
    if (1.0 / p + 1.0 / q <= 1.0)
        throw YoungConditionError(
            "young_integral: 1/p + 1/q <= 1, outside the Young regime; use the rough-path route");
}

inline void check_no_common_jumps(const GridFunction& f, const GridFunction& g) {
    for (const auto& jf : f.jumps())
        for (const auto& jg : g.jumps())
            if (jf.index == jg.index)
                throw DomainError("young_integral: integrand and integrator share a discontinuity");
}

// Left-point sums of sampled (piecewise-linear) pairs admit a closed form
// per refinement level: splitting one segment 2^r-fold turns its left sum
// into f_a dg + (1/2) df dg (1 - 2^-r), plus f(x_j) times any tagged jump.
// Each level is therefore O(G), and the refinement contract can run to
// tolerance at no cost.
inline YoungResult young_sampled(const GridFunction& f, const GridFunction& g, double tol) {
    const auto& xs = f.grid();
    const auto& fv = f.values();
    const auto& gv = g.values();
    KahanSum base_sum;    // sum f_{i-1} dg_c + jump terms
    KahanSum cross_sum;   // sum df dg_c
    for (std::size_t i = 1; i < xs.size(); ++i) {
        double g_left = gv[i];
        double g_jump = 0.0;
        for (const auto& t : g.jumps())
            if (t.index == i) {
                g_left = t.left_limit;
                g_jump = gv[i] - t.left_limit;
            }
        double f_left = fv[i];  // left limit of f at x_i
        for (const auto& t : f.jumps())
            if (t.index == i) f_left = t.left_limit;
        double dgc = g_left - gv[i - 1];
        base_sum.add(fv[i - 1] * dgc);
        base_sum.add(f_left * g_jump);  // g's jump at x_i is hit by f(x_i-)
        cross_sum.add((f_left - fv[i - 1]) * dgc);
    }
    double base = base_sum.value();
    double cross = 0.5 * cross_sum.value();

    YoungResult out;
    double prev = base;  // level 0
    for (int r = 1; r <= 60; ++r) {
        double cur = base + cross * (1.0 - std::pow(0.5, r));
        out.value = cur;
        out.last_gap = cur - prev;
        out.levels = r;
        if (std::abs(out.last_gap) < tol * (1.0 + std::abs(cur))) break;
        prev = cur;
    }
    out.richardson = base + cross;
    return out;
}

// Genuine refinement loop for evaluator-backed inputs: each base segment is
// split 2^r-fold and the left-point sum re-evaluated.
inline YoungResult young_refined(const GridFunction& f, const GridFunction& g, double tol) {
    const auto& xs = f.grid();
    auto level_sum = [&](int r) {
        std::size_t splits = std::size_t{1} << r;
        KahanSum s;
        for (std::size_t i = 1; i < xs.size(); ++i) {
            double a = xs[i - 1], b = xs[i];
            double h = (b - a) / static_cast<double>(splits);
            double g_prev = g.value_at(a);
            for (std::size_t k = 1; k <= splits; ++k) {
                double x_left = a + static_cast<double>(k - 1) * h;
                double x_right = (k == splits) ? b : a + static_cast<double>(k) * h;
                double g_next = g.value_at(x_right);
                s.add(f.value_at(x_left) * (g_next - g_prev));
                g_prev = g_next;
            }
        }
        return s.value();
    };

    // keep the total work bounded regardless of the base grid size
    int max_levels = 2;
    while ((xs.size() << (max_levels + 1)) < (std::size_t{1} << 22)) ++max_levels;

    YoungResult out;
    double prev = level_sum(0);
    double prev_gap = 1e300;
    int stalls = 0;
    for (int r = 1; r <= max_levels; ++r) {
        double cur = level_sum(r);
        out.value = cur;
        out.last_gap = cur - prev;
        out.levels = r;
        out.richardson = cur + (cur - prev);
        if (std::abs(out.last_gap) < tol * (1.0 + std::abs(cur))) return out;
        if (std::abs(out.last_gap) >= std::abs(prev_gap)) {
            if (++stalls >= 3)
                throw ConvergenceError("young_integral: refinement is not Cauchy");
        } else {
            stalls = 0;
        }
        prev_gap = out.last_gap;
        prev = cur;
    }
    return out;
}

}  // namespace detail

// Young integral int f dg by left-point Riemann-Stieltjes sums over dyadic
// refinements of the shared grid. Requires 1/p + 1/q > 1 and no common
// discontinuities.
inline YoungResult young_integral(const GridFunction& f, const GridFunction& g, double p, double q,
                                  double tol = 1e-8) {
    detail::check_young_condition(p, q);
    require(f.size() == g.size() && std::abs(f.lo() - g.lo()) < 1e-12 &&
                std::abs(f.hi() - g.hi()) < 1e-12,
            "young_integral: integrand and integrator must share a grid");
    detail::check_no_common_jumps(f, g);
    if (!f.has_evaluator() && !g.has_evaluator()) return detail::young_sampled(f, g, tol);
    require(g.jumps().empty() && f.jumps().empty(),
            "young_integral: jump tags are only supported on sampled inputs");
    return detail::young_refined(f, g, tol);
}

// int g d_x L_t^x on the field's grid, with one zero-local-time pad point on
// each side so the integrator starts and ends at zero (compact support).
inline YoungResult young_integral_vs_local_time(const GridFunction& g, const LocalTimeField& field,
                                                double p, double q, double tol = 1e-8) {
    detail::check_young_condition(p, q);
    std::size_t n = field.grid.size();
    double h_lo = field.grid[1] - field.grid[0];
    double h_hi = field.grid[n - 1] - field.grid[n - 2];
    std::vector<double> grid;
    grid.reserve(n + 2);
    grid.push_back(field.grid.front() - h_lo);
    grid.insert(grid.end(), field.grid.begin(), field.grid.end());
    grid.push_back(field.grid.back() + h_hi);
    std::vector<double> L(grid.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) L[i + 1] = field.values[i];
    std::vector<double> gs(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) gs[i] = g.value_at(grid[i]);
    GridFunction integrand(grid, std::move(gs));
    GridFunction integrator(std::move(grid), std::move(L));
    return detail::young_sampled(integrand, integrator, tol);
}

// |int f_n dg_n - int f dg| per n; callers assert the eventual decrease.
inline std::vector<double> term_by_term_check(const std::vector<GridFunction>& f_seq,
                                              const std::vector<GridFunction>& g_seq,
                                              const GridFunction& f, const GridFunction& g,
                                              double p, double q) {
    require(f_seq.size() == g_seq.size(), "term_by_term_check: sequence length mismatch");
    double limit = young_integral(f, g, p, q).value;
    std::vector<double> errs(f_seq.size());
    for (std::size_t i = 0; i < f_seq.size(); ++i)
        errs[i] = std::abs(young_integral(f_seq[i], g_seq[i], p, q).value - limit);
    return errs;
}

}  // namespace rlt
