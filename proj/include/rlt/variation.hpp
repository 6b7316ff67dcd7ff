#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <vector>

#include "rlt/common.hpp"
#include "rlt/grid.hpp"
#include "rlt/tensor.hpp"

namespace rlt {

// Exact sup over all sub-partitions of the grid of sum |f(x_i)-f(x_{i-1})|^p,
// endpoints held fixed, by dynamic programming over grid indices. O(G^2).
inline double p_variation_exact(const std::vector<double>& values, double p) {
    require(p >= 1.0, "p_variation_exact: p must be >= 1");
    require(values.size() >= 2, "p_variation_exact: need at least two values");
    std::size_t n = values.size();
    std::vector<double> best(n, 0.0);
    for (std::size_t j = 1; j < n; ++j) {
        double b = -1.0;
        double vj = values[j];
        for (std::size_t i = 0; i < j; ++i) {
            double cand = best[i] + std::pow(std::abs(vj - values[i]), p);
            if (cand > b) b = cand;
        }
        best[j] = b;
    }
    return best[n - 1];
}

// Constant of the dyadic domination: C(p,gamma) = 2^{p-1} zeta(gamma/(p-1))^{p-1},
// from chaining each partition interval through at most two dyadic intervals
// per level and Holder with weights n^gamma.
inline double dyadic_variation_constant(double p, double gamma) {
    require(p > 1.0, "dyadic_variation_bound: p must exceed 1");
    require(gamma > p - 1.0, "dyadic_variation_bound: gamma must exceed p - 1");
    return std::pow(2.0, p - 1.0) * std::pow(riemann_zeta(gamma / (p - 1.0)), p - 1.0);
}

struct DyadicVariationBound {
    double bound = 0.0;     // C(p,gamma) * truncated double sum
    double constant = 0.0;  // C(p,gamma)
    double tail = 0.0;      // contribution of the deepest level, as a truncation report
    int levels = 0;
};

// C(p,gamma) sum_n n^gamma sum_k |Delta_{n,k}|^p over the dyadic levels the
// samples support. `values` must hold 2^N + 1 samples on the deepest level.
inline DyadicVariationBound dyadic_variation_bound(const std::vector<double>& values, double p,
                                                   double gamma) {
    std::size_t n_pts = values.size();
    int N = 0;
    while ((std::size_t{1} << (N + 1)) + 1 <= n_pts) ++N;
    require((std::size_t{1} << N) + 1 == n_pts,
            "dyadic_variation_bound: need 2^N + 1 samples on the deepest dyadic level");
    require(N >= 2, "dyadic_variation_bound: fewer than 2 dyadic levels supplied");

    DyadicVariationBound out;
    out.constant = dyadic_variation_constant(p, gamma);
    out.levels = N;
    double total = 0.0;
    for (int n = 1; n <= N; ++n) {
        std::size_t stride = std::size_t{1} << (N - n);
        KahanSum level;
        for (std::size_t k = stride; k < n_pts; k += stride)
            level.add(std::pow(std::abs(values[k] - values[k - stride]), p));
        double term = std::pow(static_cast<double>(n), gamma) * level.value();
        total += term;
        if (n == N) out.tail = out.constant * term;
    }
    out.bound = out.constant * total;
    return out;
}

// Superadditive nonnegative function w(a,b) on the simplex; `augmented`
// selects w1(a,b) = w(a,b) + (b-a), which is strictly increasing in b and is
// what the control-equalized partitions invert.
struct ControlFunction {
    std::function<double(double, double)> evaluator;
    bool augmented = false;

    double operator()(double a, double b) const {
        require(b >= a, "ControlFunction: need a <= b");
        double w = evaluator(a, b);
        return augmented ? w + (b - a) : w;
    }

    ControlFunction augment() const {
        ControlFunction c = *this;
        c.augmented = true;
        return c;
    }
};

// w(a,b) = 0; augmented it is the pure length control b - a.
inline ControlFunction length_control(bool augmented = true) {
    ControlFunction c;
    c.evaluator = [](double, double) { return 0.0; };
    c.augmented = augmented;
    return c;
}

namespace detail {

// Prefix-DP cache for q-variation from a fixed left endpoint. Repeated
// queries w(a, b) with the same a (the bisection pattern) cost O(G) each
// instead of a fresh O(G^2) dynamic program.
struct VariationCache {
    std::mutex mu;
    double a = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> xs;    // a, then grid points > a
    std::vector<double> vals;  // matching function values
    std::vector<double> dp;    // dp[i] = q-variation of [a, xs[i]] ending at xs[i]
    std::size_t filled = 0;    // dp entries computed so far
};

}  // namespace detail

// w(a,b) = exact q-variation of the (piecewise-linear) grid function g
// restricted to [a,b], endpoint values interpolated. Superadditive by
// construction: partitions of [a,b] and [b,c] concatenate.
inline ControlFunction total_variation_control(const GridFunction& g, double q) {
    require(q >= 1.0, "total_variation_control: q must be >= 1");
    auto cache = std::make_shared<detail::VariationCache>();
    ControlFunction c;
    c.evaluator = [g, q, cache](double a, double b) -> double {
        if (b <= a) return 0.0;
        std::lock_guard<std::mutex> lock(cache->mu);
        if (!(cache->a == a)) {
            cache->a = a;
            cache->xs.assign(1, a);
            cache->vals.assign(1, g.value_at(a));
            const auto& grid = g.grid();
            const auto& v = g.values();
            for (std::size_t i = 0; i < grid.size(); ++i)
                if (grid[i] > a) {
                    cache->xs.push_back(grid[i]);
                    cache->vals.push_back(v[i]);
                }
            cache->dp.assign(cache->xs.size(), 0.0);
            cache->filled = 1;
        }
        // extend the prefix DP to the last grid point strictly below b
        std::size_t need = 1;
        while (need < cache->xs.size() && cache->xs[need] < b) ++need;
        for (std::size_t j = cache->filled; j < need; ++j) {
            double best = 0.0;
            for (std::size_t i = 0; i < j; ++i) {
                double cand =
                    cache->dp[i] + std::pow(std::abs(cache->vals[j] - cache->vals[i]), q);
                if (cand > best) best = cand;
            }
            cache->dp[j] = best;
        }
        cache->filled = std::max(cache->filled, need);
        double vb = g.value_at(b);
        double best = 0.0;
        for (std::size_t i = 0; i < need; ++i) {
            double cand = cache->dp[i] + std::pow(std::abs(vb - cache->vals[i]), q);
            if (cand > best) best = cand;
        }
        return best;
    };
    return c;
}

// The 2^m + 1 points with w1(x', x_l) = (l/2^m) w1(x', x''), each found by
// bisection to 1e-10 relative. Equal targets give identical bisection
// sequences, so the level-m points are exactly a subset of the level-(m+1)
// points.
inline Partition control_equalized_partition(const ControlFunction& w1, double x_lo, double x_hi,
                                             int m) {
    require(m >= 0, "control_equalized_partition: m must be >= 0");
    require(x_hi > x_lo, "control_equalized_partition: empty interval");
    double total = w1(x_lo, x_hi);
    require(total > 0.0,
            "control_equalized_partition: control not strictly increasing on the interval");

    std::size_t n = std::size_t{1} << m;
    std::vector<double> pts(n + 1);
    pts[0] = x_lo;
    pts[n] = x_hi;
    for (std::size_t l = 1; l < n; ++l) {
        double target = total * static_cast<double>(l) / static_cast<double>(n);
        double lo = x_lo, hi = x_hi;
        double w_lo = 0.0, w_hi = total;
        if (!(w_lo <= target && target <= w_hi))
            throw DomainError("control_equalized_partition: bisection cannot bracket");
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            double w_mid = w1(x_lo, mid);
            if (w_mid < target) {
                lo = mid;
                w_lo = w_mid;
            } else {
                hi = mid;
                w_hi = w_mid;
            }
            if (std::abs(w_hi - w_lo) <= 1e-10 * total ||
                hi - lo <= 1e-15 * (std::abs(x_lo) + std::abs(x_hi) + 1.0))
                break;
        }
        pts[l] = 0.5 * (lo + hi);
    }
    for (std::size_t l = 1; l <= n; ++l)
        if (!(pts[l] > pts[l - 1]))
            throw DomainError("control_equalized_partition: control not strictly increasing");
    return Partition(std::move(pts));
}

namespace detail {

inline double level_norm_diff(const TensorLevels& x, const TensorLevels& y, int level) {
    if (level == 1) return norm(x.level1 - y.level1);
    if (level == 2) {
        Mat2 d;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) d[i][j] = x.level2[i][j] - y.level2[i][j];
        return norm(d);
    }
    Ten3 d;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) d[i][j][k] = x.level3[i][j][k] - y.level3[i][j][k];
    return norm(d);
}

}  // namespace detail

// theta-variation distance restricted to the supplied point family:
// max over levels i of sup_D ( sum_l |X^i - Y^i|^{theta/i} )^{i/theta},
// the sup running over sub-partitions of the family (DP, O(G^2) per level).
inline double theta_distance(const TensorPath& X, const TensorPath& Y, double theta, int levels) {
    require(theta >= 2.0 && theta < 4.0, "theta_distance: theta must lie in [2,4)");
    require(levels >= 1 && levels <= 3, "theta_distance: levels must be 1..3");
    if (!X.same_family(Y)) throw DomainError("theta_distance: mismatched index families");
    int top = std::min(levels, static_cast<int>(theta));
    std::size_t n = X.size();
    double worst = 0.0;
    for (int level = 1; level <= top; ++level) {
        double expo = theta / static_cast<double>(level);
        std::vector<double> best(n, 0.0);
        for (std::size_t j = 1; j < n; ++j) {
            double b = -1.0;
            for (std::size_t i = 0; i < j; ++i) {
                double c = detail::level_norm_diff(X.pair(i, j), Y.pair(i, j), level);
                double cand = best[i] + std::pow(c, expo);
                if (cand > b) b = cand;
            }
            best[j] = b;
        }
        worst = std::max(worst, std::pow(best[n - 1], 1.0 / expo));
    }
    return worst;
}

}  // namespace rlt
