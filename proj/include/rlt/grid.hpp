#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "rlt/common.hpp"

namespace rlt {

// A discontinuity marker: the function jumps at grid[index], with the stated
// left limit; the stored sample is the cadlag (right) value.
struct JumpTag {
    std::size_t index = 0;
    double left_limit = 0.0;
};

// A real function sampled on a uniform grid. An optional evaluator tags the
// analytic test functions; without it the samples define a piecewise-linear
// function, which is the convention every integrator here relies on.
class GridFunction {
  public:
    GridFunction() = default;
    GridFunction(std::vector<double> grid, std::vector<double> values)
        : grid_(std::move(grid)), values_(std::move(values)) {
        validate();
    }
    GridFunction(std::vector<double> grid, std::vector<double> values,
                 std::function<double(double)> evaluator)
        : grid_(std::move(grid)), values_(std::move(values)), eval_(std::move(evaluator)) {
        validate();
    }

    static GridFunction sample(double lo, double hi, std::size_t n,
                               const std::function<double(double)>& f, bool keep_evaluator = true) {
        require(n >= 2 && hi > lo, "GridFunction::sample: need n >= 2 and hi > lo");
        std::vector<double> g(n), v(n);
        double h = (hi - lo) / static_cast<double>(n - 1);
        for (std::size_t i = 0; i < n; ++i) {
            g[i] = lo + static_cast<double>(i) * h;
            v[i] = f(g[i]);
        }
        GridFunction out(std::move(g), std::move(v));
        if (keep_evaluator) out.eval_ = f;
        return out;
    }

    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& mutable_values() { return values_; }
    double spacing() const { return spacing_; }
    double lo() const { return grid_.front(); }
    double hi() const { return grid_.back(); }
    std::size_t size() const { return grid_.size(); }

    bool has_evaluator() const { return static_cast<bool>(eval_); }
    const std::function<double(double)>& evaluator() const { return eval_; }

    const std::vector<JumpTag>& jumps() const { return jumps_; }
    void add_jump(JumpTag tag) {
        require(tag.index < grid_.size(), "GridFunction::add_jump: index out of range");
        jumps_.push_back(tag);
        std::sort(jumps_.begin(), jumps_.end(),
                  [](const JumpTag& a, const JumpTag& b) { return a.index < b.index; });
    }
    bool has_jump_at(std::size_t idx) const {
        for (const auto& j : jumps_)
            if (j.index == idx) return true;
        return false;
    }

    // Evaluator if tagged, else piecewise-linear interpolation of the samples
    // (constant extrapolation outside the span).
    double value_at(double x) const {
        if (eval_) return eval_(x);
        if (x <= grid_.front()) return values_.front();
        if (x >= grid_.back()) return values_.back();
        auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
        std::size_t i = static_cast<std::size_t>(it - grid_.begin());
        double t = (x - grid_[i - 1]) / (grid_[i] - grid_[i - 1]);
        return values_[i - 1] + t * (values_[i] - values_[i - 1]);
    }

    GridFunction map(const std::function<double(double)>& op) const {
        std::vector<double> v(values_.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = op(values_[i]);
        return GridFunction(grid_, std::move(v));
    }

  private:
    void validate() {
        require(grid_.size() >= 2, "GridFunction: need at least two grid points");
        require(grid_.size() == values_.size(), "GridFunction: grid/values size mismatch");
        spacing_ = grid_[1] - grid_[0];
        require(spacing_ > 0.0, "GridFunction: grid must be increasing");
        for (std::size_t i = 1; i + 1 < grid_.size(); ++i) {
            double h = grid_[i + 1] - grid_[i];
            require(std::abs(h - spacing_) <= 1e-12 * std::max(1.0, std::abs(spacing_)),
                    "GridFunction: grid must be uniform");
        }
    }

    std::vector<double> grid_;
    std::vector<double> values_;
    std::function<double(double)> eval_;
    std::vector<JumpTag> jumps_;
    double spacing_ = 0.0;
};

// A finite increasing sequence of spatial points spanning [front, back].
struct Partition {
    std::vector<double> points;

    Partition() = default;
    explicit Partition(std::vector<double> pts) : points(std::move(pts)) {
        require(points.size() >= 2, "Partition: need at least two points");
        for (std::size_t i = 1; i < points.size(); ++i)
            require(points[i] > points[i - 1], "Partition: points must be strictly increasing");
    }

    double mesh() const {
        double m = 0.0;
        for (std::size_t i = 1; i < points.size(); ++i)
            m = std::max(m, points[i] - points[i - 1]);
        return m;
    }
    std::size_t size() const { return points.size(); }
};

}  // namespace rlt
