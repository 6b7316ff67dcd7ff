#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "rlt/common.hpp"

namespace rlt {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;
using Ten3 = std::array<std::array<std::array<double, 2>, 2>, 2>;

inline Vec2 operator+(const Vec2& a, const Vec2& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Vec2 operator-(const Vec2& a, const Vec2& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Vec2 operator*(double c, const Vec2& a) { return {c * a[0], c * a[1]}; }

inline Mat2 outer(const Vec2& a, const Vec2& b) {
    Mat2 m;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m[i][j] = a[i] * b[j];
    return m;
}

inline Ten3 outer(const Vec2& a, const Mat2& b) {
    Ten3 t;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) t[i][j][k] = a[i] * b[j][k];
    return t;
}

inline Ten3 outer(const Mat2& a, const Vec2& b) {
    Ten3 t;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) t[i][j][k] = a[i][j] * b[k];
    return t;
}

inline double norm(const Vec2& a) { return std::sqrt(a[0] * a[0] + a[1] * a[1]); }
inline double norm(const Mat2& m) {
    double s = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) s += m[i][j] * m[i][j];
    return std::sqrt(s);
}
inline double norm(const Ten3& t) {
    double s = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) s += t[i][j][k] * t[i][j][k];
    return std::sqrt(s);
}

// Truncated multiplicative functional (1, Z^1, Z^2, Z^3) over R^2 on one
// simplex pair. Component convention: index 1 is the local time, index 2 the
// integrand; (Z^2)_{i,j} integrates dZ^i before dZ^j.
struct TensorLevels {
    Vec2 level1{{0.0, 0.0}};
    Mat2 level2{{{{0.0, 0.0}}, {{0.0, 0.0}}}};
    Ten3 level3{};
    int levels = 3;  // how many levels are meaningful

    static TensorLevels identity(int levels = 3) {
        TensorLevels t;
        t.levels = levels;
        return t;
    }

    // Signature of a single linear segment with increment dz:
    // level j = dz^{tensor j} / j!.
    static TensorLevels segment(const Vec2& dz, int levels = 3) {
        TensorLevels t;
        t.levels = levels;
        t.level1 = dz;
        if (levels >= 2) {
            Mat2 sq = outer(dz, dz);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) t.level2[i][j] = 0.5 * sq[i][j];
        }
        if (levels >= 3) {
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    for (int k = 0; k < 2; ++k)
                        t.level3[i][j][k] = dz[i] * dz[j] * dz[k] / 6.0;
        }
        return t;
    }
};

// Chen composition over a shared midpoint:
//   level1 = A1 + B1
//   level2 = A2 + B2 + A1 (x) B1
//   level3 = A3 + B3 + A1 (x) B2 + A2 (x) B1.
inline TensorLevels chen_multiply(const TensorLevels& A, const TensorLevels& B) {
    TensorLevels C;
    C.levels = std::min(A.levels, B.levels);
    C.level1 = A.level1 + B.level1;
    if (C.levels >= 2) {
        Mat2 cross = outer(A.level1, B.level1);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                C.level2[i][j] = A.level2[i][j] + B.level2[i][j] + cross[i][j];
    }
    if (C.levels >= 3) {
        Ten3 t12 = outer(A.level1, B.level2);
        Ten3 t21 = outer(A.level2, B.level1);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k)
                    C.level3[i][j][k] =
                        A.level3[i][j][k] + B.level3[i][j][k] + t12[i][j][k] + t21[i][j][k];
    }
    return C;
}

// Group inverse in the truncated tensor algebra:
// (1,a,b,c)^{-1} = (1, -a, a(x)a - b, -a(x)a(x)a + a(x)b + b(x)a - c).
inline TensorLevels chen_inverse(const TensorLevels& A) {
    TensorLevels I;
    I.levels = A.levels;
    I.level1 = -1.0 * A.level1;
    if (A.levels >= 2) {
        Mat2 aa = outer(A.level1, A.level1);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) I.level2[i][j] = aa[i][j] - A.level2[i][j];
    }
    if (A.levels >= 3) {
        Ten3 ab = outer(A.level1, A.level2);
        Ten3 ba = outer(A.level2, A.level1);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k)
                    I.level3[i][j][k] = -A.level1[i] * A.level1[j] * A.level1[k] + ab[i][j][k] +
                                        ba[i][j][k] - A.level3[i][j][k];
    }
    return I;
}

// Largest deviation from the level-2 shuffle identity
// sym(Z^2) = (1/2) Z^1 (x) Z^1; zero for lifts of actual paths.
inline double shuffle_defect(const TensorLevels& t) {
    double worst = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            double sym = 0.5 * (t.level2[i][j] + t.level2[j][i]);
            worst = std::max(worst, std::abs(sym - 0.5 * t.level1[i] * t.level1[j]));
        }
    return worst;
}

// A multiplicative functional evaluated over a family of spatial points.
// Stores prefix signatures from the first point, so the tensor over any pair
// (points[a], points[b]) is one group operation away. This is the "TensorLevels
// map over pairs" that the variation metric and the rough integrals consume.
class TensorPath {
  public:
    TensorPath() = default;

    // Lift of the piecewise-linear path through (points[i], values[i]).
    static TensorPath lift_linear(std::vector<double> points, const std::vector<Vec2>& values,
                                  int levels = 3) {
        require(points.size() == values.size() && points.size() >= 2,
                "TensorPath: need matching points/values with >= 2 entries");
        TensorPath tp;
        tp.points_ = std::move(points);
        tp.levels_ = levels;
        tp.prefix_.resize(tp.points_.size());
        tp.prefix_inv_.resize(tp.points_.size());
        tp.prefix_[0] = TensorLevels::identity(levels);
        for (std::size_t i = 1; i < tp.points_.size(); ++i) {
            Vec2 dz = values[i] - values[i - 1];
            tp.prefix_[i] = chen_multiply(tp.prefix_[i - 1], TensorLevels::segment(dz, levels));
        }
        for (std::size_t i = 0; i < tp.points_.size(); ++i)
            tp.prefix_inv_[i] = chen_inverse(tp.prefix_[i]);
        return tp;
    }

    // Fold arbitrary per-segment tensors (not necessarily from a linear path).
    static TensorPath fold_segments(std::vector<double> points,
                                    const std::vector<TensorLevels>& segments, int levels = 3) {
        require(points.size() == segments.size() + 1, "TensorPath: points/segments mismatch");
        TensorPath tp;
        tp.points_ = std::move(points);
        tp.levels_ = levels;
        tp.prefix_.resize(tp.points_.size());
        tp.prefix_inv_.resize(tp.points_.size());
        tp.prefix_[0] = TensorLevels::identity(levels);
        for (std::size_t i = 1; i < tp.points_.size(); ++i)
            tp.prefix_[i] = chen_multiply(tp.prefix_[i - 1], segments[i - 1]);
        for (std::size_t i = 0; i < tp.points_.size(); ++i)
            tp.prefix_inv_[i] = chen_inverse(tp.prefix_[i]);
        return tp;
    }

    const std::vector<double>& points() const { return points_; }
    int levels() const { return levels_; }
    std::size_t size() const { return points_.size(); }

    // Tensor over (points[a], points[b]), a <= b.
    TensorLevels pair(std::size_t a, std::size_t b) const {
        require(a <= b && b < points_.size(), "TensorPath::pair: bad indices");
        return chen_multiply(prefix_inv_[a], prefix_[b]);
    }

    bool same_family(const TensorPath& other) const {
        if (points_.size() != other.points_.size()) return false;
        for (std::size_t i = 0; i < points_.size(); ++i)
            if (std::abs(points_[i] - other.points_[i]) >
                1e-12 * (1.0 + std::abs(points_[i])))
                return false;
        return true;
    }

  private:
    std::vector<double> points_;
    std::vector<TensorLevels> prefix_;
    std::vector<TensorLevels> prefix_inv_;
    int levels_ = 3;
};

}  // namespace rlt
