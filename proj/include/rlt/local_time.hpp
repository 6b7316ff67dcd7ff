#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "rlt/common.hpp"
#include "rlt/grid.hpp"
#include "rlt/stable_process.hpp"

namespace rlt {

// The occupation-density field x -> L_t^x of one path at its final time,
// estimated with a box kernel of the stated bandwidth.
struct LocalTimeField {
    std::vector<double> grid;    // increasing spatial points
    std::vector<double> values;  // nonnegative occupation densities
    double t = 0.0;
    double bandwidth = 0.0;
    std::uint64_t source_seed = 0;

    double value_at(double x) const {
        if (x <= grid.front() || x >= grid.back()) return 0.0;
        auto it = std::upper_bound(grid.begin(), grid.end(), x);
        std::size_t i = static_cast<std::size_t>(it - grid.begin());
        double w = (x - grid[i - 1]) / (grid[i] - grid[i - 1]);
        return values[i - 1] + w * (values[i] - values[i - 1]);
    }

    double trapezoid_mass() const {
        KahanSum s;
        for (std::size_t i = 1; i < grid.size(); ++i)
            s.add(0.5 * (values[i] + values[i - 1]) * (grid[i] - grid[i - 1]));
        return s.value();
    }

    double max_value() const {
        double m = 0.0;
        for (double v : values) m = std::max(m, v);
        return m;
    }

    GridFunction as_grid_function() const { return GridFunction(grid, values); }
};

// Twice the typical step scale; bins need O(n) hits to be informative.
inline double default_bandwidth(Alpha alpha, double t, std::size_t n_steps) {
    return 2.0 * std::pow(t / static_cast<double>(n_steps), 1.0 / alpha.value());
}

// Occupation density at a single level:
// (1/bandwidth) sum_k dt 1{ |X_{t_k} - x| < bandwidth/2 }.
inline double local_time_at(const SamplePath& path, double x, double bandwidth) {
    require(bandwidth > 0.0, "local_time_at: bandwidth must be positive");
    double dt = path.dt();
    double half = 0.5 * bandwidth;
    std::size_t hits = 0;
    for (std::size_t k = 1; k < path.values.size(); ++k)
        if (std::abs(path.values[k] - x) < half) ++hits;
    return static_cast<double>(hits) * dt / bandwidth;
}

// Box-kernel occupation density on a grid. The grid must cover the path's
// range with a bandwidth of slack so the field carries full mass and
// vanishes at both ends.
inline LocalTimeField estimate_local_time(const SamplePath& path, std::vector<double> grid,
                                          double bandwidth) {
    require(bandwidth > 0.0, "estimate_local_time: bandwidth must be positive");
    require(grid.size() >= 2, "estimate_local_time: need at least two grid points");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        require(grid[i] > grid[i - 1], "estimate_local_time: grid must be increasing");
        require(grid[i] - grid[i - 1] <= bandwidth * (1.0 + 1e-9),
                "estimate_local_time: grid spacing must not exceed bandwidth");
    }
    if (grid.front() > path.min_value() - bandwidth || grid.back() < path.max_value() + bandwidth)
        throw DomainError("estimate_local_time: grid does not cover the path range");

    LocalTimeField field;
    field.t = path.t_end();
    field.bandwidth = bandwidth;
    field.source_seed = path.seed;
    field.values.assign(grid.size(), 0.0);
    double dt = path.dt();
    double half = 0.5 * bandwidth;
    double lo = grid.front(), spacing = grid[1] - grid[0];
    // Uniform grids admit direct index windows; general grids fall back to
    // binary search per sample.
    bool uniform = true;
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (std::abs(grid[i] - (lo + static_cast<double>(i) * spacing)) > 1e-9 * bandwidth) {
            uniform = false;
            break;
        }
    for (std::size_t k = 1; k < path.values.size(); ++k) {
        double v = path.values[k];
        std::size_t i_lo, i_hi;
        if (uniform) {
            double a = (v - half - lo) / spacing, b = (v + half - lo) / spacing;
            i_lo = a <= 0.0 ? 0 : static_cast<std::size_t>(std::ceil(a));
            i_hi = b < 0.0 ? 0 : std::min(grid.size(), static_cast<std::size_t>(std::floor(b)) + 1);
        } else {
            i_lo = static_cast<std::size_t>(
                std::lower_bound(grid.begin(), grid.end(), v - half) - grid.begin());
            i_hi = static_cast<std::size_t>(
                std::upper_bound(grid.begin(), grid.end(), v + half) - grid.begin());
        }
        for (std::size_t i = i_lo; i < i_hi; ++i)
            if (std::abs(v - grid[i]) < half) field.values[i] += dt;
    }
    for (double& v : field.values) v /= bandwidth;
    field.grid = std::move(grid);
    return field;
}

// Grid adapted to one path: covers the range with the stated slack factor.
inline std::vector<double> adapted_grid(const SamplePath& path, double bandwidth,
                                        double slack_bandwidths = 2.0) {
    double lo = path.min_value() - slack_bandwidths * bandwidth;
    double hi = path.max_value() + slack_bandwidths * bandwidth;
    std::size_t n = static_cast<std::size_t>(std::ceil((hi - lo) / bandwidth)) + 1;
    std::vector<double> grid(n + 1);
    double h = (hi - lo) / static_cast<double>(n);
    for (std::size_t i = 0; i <= n; ++i) grid[i] = lo + static_cast<double>(i) * h;
    return grid;
}

// Both sides of the occupation-times formula:
// lhs = sum_k phi(X_{t_k}) dt, rhs = trapezoid of phi * L over the grid.
inline std::pair<double, double> occupation_check(const SamplePath& path,
                                                  const LocalTimeField& field,
                                                  const std::function<double(double)>& phi) {
    KahanSum lhs;
    double dt = path.dt();
    for (std::size_t k = 1; k < path.values.size(); ++k) lhs.add(phi(path.values[k]) * dt);
    KahanSum rhs;
    for (std::size_t i = 1; i < field.grid.size(); ++i) {
        double a = phi(field.grid[i - 1]) * field.values[i - 1];
        double b = phi(field.grid[i]) * field.values[i];
        rhs.add(0.5 * (a + b) * (field.grid[i] - field.grid[i - 1]));
    }
    return {lhs.value(), rhs.value()};
}

// Monte-Carlo second moment of the spatial increment, sigma^2(h).
inline double sigma_sq(const std::vector<LocalTimeField>& ensemble, double x, double h) {
    require(ensemble.size() >= 2, "sigma_sq: need an ensemble of at least 2 fields");
    RunningStats stats;
    for (const auto& f : ensemble) {
        require(x >= f.grid.front() && x <= f.grid.back() && x + h >= f.grid.front() &&
                    x + h <= f.grid.back(),
                "sigma_sq: x and x+h must lie inside every field's grid");
        double d = f.value_at(x + h) - f.value_at(x);
        stats.add(d * d);
    }
    return stats.mean();
}

// sup over grid pairs with |a-b| < delta of
// |L^a - L^b| / (|b-a|^{(alpha-1)/2} log(1/|b-a|)^{1/2}); vacuous sup is 0.
inline double barlow_modulus_ratio(const LocalTimeField& field, Alpha alpha, double delta) {
    require(delta > 0.0, "barlow_modulus_ratio: delta must be positive");
    double best = 0.0;
    double ex = (alpha.value() - 1.0) / 2.0;
    std::size_t n = field.grid.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double gap = field.grid[j] - field.grid[i];
            if (gap >= delta) break;
            if (gap >= 1.0) continue;  // log factor must stay positive
            double denom = std::pow(gap, ex) * std::sqrt(std::log(1.0 / gap));
            if (denom <= 0.0) continue;
            best = std::max(best, std::abs(field.values[j] - field.values[i]) / denom);
        }
    }
    return best;
}

}  // namespace rlt
