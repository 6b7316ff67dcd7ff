#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rlt {

// Error hierarchy. The CLI maps these onto exit codes, so keep the
// categories stable: schema -> 2, regime -> 3, convergence -> 4.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : Error {
    using Error::Error;
};

// 1/p + 1/q <= 1: the Riemann-Stieltjes limit is not guaranteed to exist,
// callers should route to the rough-path machinery instead.
struct YoungConditionError : Error {
    using Error::Error;
};

struct ConvergenceError : Error {
    using Error::Error;
};

// Requested (alpha, q, level) combination outside the admissible window.
struct RegimeError : Error {
    using Error::Error;
};

// Grid does not extend far enough for a convolution tail / mollifier support.
struct MarginError : Error {
    using Error::Error;
};

struct SchemaError : Error {
    using Error::Error;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw DomainError(msg);
}

// Compensated accumulator for long sums (occupation sums, Stieltjes sums).
class KahanSum {
  public:
    void add(double x) {
        double y = x - c_;
        double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

  private:
    double s_ = 0.0;
    double c_ = 0.0;
};

inline double sqr(double x) { return x * x; }

// Hurwitz-free Riemann zeta via Euler-Maclaurin; needed for the explicit
// dyadic-variation constant. Accurate to ~1e-12 for s > 1.
inline double riemann_zeta(double s) {
    require(s > 1.0, "riemann_zeta: requires s > 1");
    const int n = 64;
    double sum = 0.0;
    for (int k = 1; k < n; ++k) sum += std::pow(k, -s);
    double ns = std::pow(n, -s);
    sum += ns * n / (s - 1.0) + 0.5 * ns;
    // first Euler-Maclaurin corrections
    double t1 = s / 12.0 * ns / n;
    double t3 = s * (s + 1.0) * (s + 2.0) / 720.0 * ns / (n * n * n);
    return sum + t1 - t3;
}

// Welford-style streaming moments with associative merge, used by the
// Monte-Carlo ensembles.
class RunningStats {
  public:
    void add(double x) {
        ++n_;
        double d = x - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (x - mean_);
    }
    void merge(const RunningStats& o) {
        if (o.n_ == 0) return;
        if (n_ == 0) {
            *this = o;
            return;
        }
        std::int64_t n = n_ + o.n_;
        double d = o.mean_ - mean_;
        double mean = mean_ + d * static_cast<double>(o.n_) / static_cast<double>(n);
        m2_ += o.m2_ + d * d * static_cast<double>(n_) * static_cast<double>(o.n_) /
                           static_cast<double>(n);
        mean_ = mean;
        n_ = n;
    }
    std::int64_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
    double stddev() const { return std::sqrt(variance()); }
    double std_error() const {
        return n_ > 0 ? stddev() / std::sqrt(static_cast<double>(n_)) : 0.0;
    }

  private:
    std::int64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

}  // namespace rlt
