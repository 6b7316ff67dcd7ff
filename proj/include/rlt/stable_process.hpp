#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "rlt/common.hpp"
#include "rlt/quadrature.hpp"

namespace rlt {

// Stability index, restricted to the window every operation here assumes.
// Level-2 rough lifts additionally need alpha > 5/3 and level-3 lifts
// alpha > 3/2; those are enforced by the callers that care.
class Alpha {
  public:
    explicit Alpha(double value) : value_(value) {
        require(value > 1.0 && value < 2.0, "Alpha: stability index must lie in (1,2)");
    }
    double value() const { return value_; }

  private:
    double value_;
};

struct Jump {
    double time;
    double size;
};

struct SamplePath {
    std::vector<double> times;   // strictly increasing, starts at 0
    std::vector<double> values;  // values[0] == 0
    std::vector<Jump> jumps;     // per-step increments with |size| >= threshold
    double alpha = 0.0;
    std::uint64_t seed = 0;
    double jump_threshold = 0.0;

    double t_end() const { return times.back(); }
    double dt() const { return times[1] - times[0]; }
    double min_value() const {
        double m = values[0];
        for (double v : values) m = std::min(m, v);
        return m;
    }
    double max_value() const {
        double m = values[0];
        for (double v : values) m = std::max(m, v);
        return m;
    }
};

namespace detail {

// Uniform in (0,1) from the top 53 bits; avoids the implementation-defined
// std::uniform_real_distribution so identical seeds give identical paths on
// any platform.
inline double uniform01(std::mt19937_64& rng) {
    double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return u > 0.0 ? u : 0x1.0p-53;
}

}  // namespace detail

// One standard symmetric alpha-stable variate (unit scale, characteristic
// function e^{-|theta|^alpha}) by the Chambers-Mallows-Stuck transform with
// beta = 0.
inline double sample_standard_stable(double alpha, std::mt19937_64& rng) {
    const double pi = 3.14159265358979323846;
    double phi = pi * (detail::uniform01(rng) - 0.5);  // U(-pi/2, pi/2)
    double w = -std::log(detail::uniform01(rng));      // Exp(1)
    double a = std::sin(alpha * phi) / std::pow(std::cos(phi), 1.0 / alpha);
    double b = std::pow(std::cos((1.0 - alpha) * phi) / w, (1.0 - alpha) / alpha);
    return a * b;
}

inline std::uint64_t split_seed(std::uint64_t base_seed, std::uint64_t i) {
    return base_seed ^ i;
}

// Euler grid of i.i.d. stable increments at scale (t_end/n_steps)^{1/alpha}.
// Steps with |increment| >= jump_threshold are additionally recorded as jumps
// at the step midpoint; everything below threshold stays in the residual.
inline SamplePath simulate_path(Alpha alpha, double t_end, std::size_t n_steps,
                                double jump_threshold, std::uint64_t seed) {
    require(t_end > 0.0, "simulate_path: t_end must be positive");
    require(n_steps >= 1, "simulate_path: need at least one step");
    require(jump_threshold > 0.0, "simulate_path: jump_threshold must be positive");

    std::mt19937_64 rng(seed);
    double dt = t_end / static_cast<double>(n_steps);
    double scale = std::pow(dt, 1.0 / alpha.value());

    SamplePath path;
    path.alpha = alpha.value();
    path.seed = seed;
    path.jump_threshold = jump_threshold;
    path.times.resize(n_steps + 1);
    path.values.resize(n_steps + 1);
    path.times[0] = 0.0;
    path.values[0] = 0.0;
    for (std::size_t k = 0; k < n_steps; ++k) {
        double inc = scale * sample_standard_stable(alpha.value(), rng);
        path.times[k + 1] = dt * static_cast<double>(k + 1);
        path.values[k + 1] = path.values[k] + inc;
        if (std::abs(inc) >= jump_threshold)
            path.jumps.push_back({dt * (static_cast<double>(k) + 0.5), inc});
    }
    return path;
}

// Density of the symmetric alpha-stable law at time t by Fourier inversion,
// p_t(x) = (1/pi) int_0^inf cos(x xi) exp(-t xi^alpha) d(xi). The cutoff is
// placed where the damping factor is below 1e-12; panel count tracks the
// oscillation of cos(x xi).
inline double transition_density(Alpha alpha, double t, double x) {
    require(t > 0.0, "transition_density: t must be positive");
    const double pi = 3.14159265358979323846;
    double a = alpha.value();
    double xi_max = std::pow(12.0 * std::log(10.0) / t, 1.0 / a);
    auto f = [&](double xi) { return std::cos(x * xi) * std::exp(-t * std::pow(xi, a)); };
    int panels = 8 + static_cast<int>(std::abs(x) * xi_max / 3.0);
    panels = std::min(panels, 4096);
    double value = adaptive_gauss(f, 0.0, xi_max, 1e-8, 12, panels) / pi;
    return value;
}

// Closed form for E(L_t^y) started at y: int_0^t p_s(0) ds with
// p_s(0) = Gamma(1 + 1/alpha) / (pi s^{1/alpha}).
inline double expected_local_time_at_start(Alpha alpha, double t) {
    const double pi = 3.14159265358979323846;
    double a = alpha.value();
    return std::tgamma(1.0 + 1.0 / a) / pi * a / (a - 1.0) * std::pow(t, (a - 1.0) / a);
}

// Levy density C |x|^{-alpha-1}.
inline double levy_density(Alpha alpha, double x, double C) {
    require(C > 0.0, "levy_density: C must be positive");
    if (x == 0.0) throw DomainError("levy_density: undefined at x = 0");
    return C * std::pow(std::abs(x), -alpha.value() - 1.0);
}

}  // namespace rlt
