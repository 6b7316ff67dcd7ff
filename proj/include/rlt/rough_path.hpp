#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "rlt/common.hpp"
#include "rlt/grid.hpp"
#include "rlt/local_time.hpp"
#include "rlt/tensor.hpp"
#include "rlt/variation.hpp"

namespace rlt {

// The R^2-valued path x -> (L_t^x, g(x)). Component 1 (index 0) is the local
// time and stays continuous; jumps live on g only, via tags.
struct TwoPath {
    std::vector<double> x;
    std::vector<double> L;
    std::vector<double> g;
    std::vector<JumpTag> g_jumps;

    TwoPath() = default;
    TwoPath(std::vector<double> xs, std::vector<double> Ls, std::vector<double> gs)
        : x(std::move(xs)), L(std::move(Ls)), g(std::move(gs)) {
        require(x.size() >= 2 && x.size() == L.size() && x.size() == g.size(),
                "TwoPath: need matching arrays with >= 2 entries");
        for (std::size_t i = 1; i < x.size(); ++i)
            require(x[i] > x[i - 1], "TwoPath: x must be strictly increasing");
    }

    static TwoPath from_field(const LocalTimeField& field, const GridFunction& integrand) {
        std::vector<double> gs(field.grid.size());
        for (std::size_t i = 0; i < field.grid.size(); ++i)
            gs[i] = integrand.value_at(field.grid[i]);
        return TwoPath(field.grid, field.values, std::move(gs));
    }

    std::size_t size() const { return x.size(); }

    double L_at(double xq) const { return interp(L, xq); }

    // cadlag interpolation: inside a tagged segment the samples interpolate
    // toward the left limit, the stored value is taken from the point on.
    double g_at(double xq) const {
        if (xq <= x.front()) return g.front();
        if (xq >= x.back()) return g.back();
        auto it = std::upper_bound(x.begin(), x.end(), xq);
        std::size_t i = static_cast<std::size_t>(it - x.begin());
        double right = g[i];
        for (const auto& t : g_jumps)
            if (t.index == i) right = t.left_limit;
        double w = (xq - x[i - 1]) / (x[i] - x[i - 1]);
        return g[i - 1] + w * (right - g[i - 1]);
    }

    Vec2 value_at(double xq) const { return {L_at(xq), g_at(xq)}; }

    bool continuous() const { return g_jumps.empty(); }

  private:
    double interp(const std::vector<double>& v, double xq) const {
        if (xq <= x.front()) return v.front();
        if (xq >= x.back()) return v.back();
        auto it = std::upper_bound(x.begin(), x.end(), xq);
        std::size_t i = static_cast<std::size_t>(it - x.begin());
        double w = (xq - x[i - 1]) / (x[i] - x[i - 1]);
        return v[i - 1] + w * (v[i] - v[i - 1]);
    }
};

// ---------------------------------------------------------------------------
// Z(m): control-reparameterized piecewise-linear interpolation
// ---------------------------------------------------------------------------

// Z(m)_x = Z_{a_{l-1}} + (w1(x)-w1(a_{l-1}))/(w1(a_l)-w1(a_{l-1})) Delta_l Z
// on the control-equalized anchors a_l; sampled on the union of the original
// grid and the anchors, so it agrees with Z exactly at every anchor.
inline TwoPath interpolate_Zm(const TwoPath& Z, const ControlFunction& w1, int m) {
    require(w1.augmented, "interpolate_Zm: control must be augmented (strictly increasing)");
    require(Z.continuous(), "interpolate_Zm: path must be continuous (apply tau_delta first)");
    Partition anchors = control_equalized_partition(w1, Z.x.front(), Z.x.back(), m);

    std::vector<double> pts(Z.x);
    pts.insert(pts.end(), anchors.points.begin(), anchors.points.end());
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [&](double a, double b) { return b - a < 1e-13 * (Z.x.back() - Z.x.front()); }),
              pts.end());

    double x0 = Z.x.front();
    std::vector<double> Ls(pts.size()), gs(pts.size());
    std::size_t l = 1;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double xq = pts[i];
        while (l + 1 < anchors.points.size() && xq > anchors.points[l]) ++l;
        double a = anchors.points[l - 1], b = anchors.points[l];
        Vec2 za = Z.value_at(a), zb = Z.value_at(b);
        double den = w1(x0, b) - w1(x0, a);
        double num = std::clamp(w1(x0, xq) - w1(x0, a), 0.0, den);
        double w = den > 0.0 ? num / den : 0.0;
        Ls[i] = za[0] + w * (zb[0] - za[0]);
        gs[i] = za[1] + w * (zb[1] - za[1]);
    }
    return TwoPath(std::move(pts), std::move(Ls), std::move(gs));
}

// ---------------------------------------------------------------------------
// Lifts
// ---------------------------------------------------------------------------

// Iterated-integral lift of a piecewise-linear two-dimensional path: per
// segment level j is (Delta Z)^{tensor j} / j!, segments composed by Chen
// multiplication. Pairs beyond consecutive ones come from the prefix group
// structure of TensorPath.
inline TensorPath lift_piecewise_linear(const TwoPath& Z, int levels = 3) {
    require(levels >= 1 && levels <= 3, "lift_piecewise_linear: levels must be 1..3");
    std::vector<Vec2> vals(Z.size());
    for (std::size_t i = 0; i < Z.size(); ++i) vals[i] = {Z.L[i], Z.g[i]};
    return TensorPath::lift_linear(Z.x, vals, levels);
}

// Lift of Z(m), evaluated over an arbitrary point family that must contain
// the anchors (so Z(m) is linear between consecutive family points).
inline TensorPath lift_Zm_on_family(const TwoPath& Zm, const std::vector<double>& family,
                                    int levels) {
    std::vector<Vec2> vals(family.size());
    for (std::size_t i = 0; i < family.size(); ++i) vals[i] = Zm.value_at(family[i]);
    return TensorPath::lift_linear(family, vals, levels);
}

// ---------------------------------------------------------------------------
// Cauchy construction of the geometric rough path
// ---------------------------------------------------------------------------

struct GeometricRoughPath {
    TensorPath lift;                  // lift of Z(m_star) over its anchor family
    std::vector<double> cauchy_gaps;  // d_theta(Z(m+1), Z(m)) per m
    int m_star = 0;
    bool non_cauchy_warning = false;  // gaps failed to decrease 3 times in a row
    bool reached_m_max = false;
};

// Iterates m -> d_theta(Z(m+1), Z(m)) on the nested control-equalized
// families until the gap drops below tol (or m_max). The distances are the
// dyadic-restricted theta-variation metric over the level-(m+1) anchors.
inline GeometricRoughPath build_geometric_rough_path(const TwoPath& Z, const ControlFunction& w1,
                                                     double theta, int m_max, double tol) {
    require(theta >= 2.0 && theta < 4.0, "build_geometric_rough_path: theta in [2,4)");
    require(m_max >= 1, "build_geometric_rough_path: m_max >= 1");
    int levels = std::min(3, static_cast<int>(theta));

    GeometricRoughPath out;
    int rises = 0;
    double prev_gap = 1e300;
    int m = 0;
    TwoPath zm = interpolate_Zm(Z, w1, 0);
    for (; m < m_max; ++m) {
        TwoPath zm1 = interpolate_Zm(Z, w1, m + 1);
        // common family: the finer path's grid already contains the coarser anchors
        TensorPath fine = lift_Zm_on_family(zm1, zm1.x, levels);
        TensorPath coarse = lift_Zm_on_family(zm, zm1.x, levels);
        double gap = theta_distance(fine, coarse, theta, levels);
        out.cauchy_gaps.push_back(gap);
        if (gap < tol) break;
        if (gap >= prev_gap) {
            if (++rises >= 3) out.non_cauchy_warning = true;
        } else {
            rises = 0;
        }
        prev_gap = gap;
        zm = std::move(zm1);
    }
    out.m_star = m;
    out.reached_m_max = (m == m_max);
    out.lift = lift_Zm_on_family(zm, zm.x, levels);
    return out;
}

// ---------------------------------------------------------------------------
// Rough integrals
// ---------------------------------------------------------------------------

struct RoughIntegralResult {
    double value = 0.0;
    double last_gap = 0.0;
    int refinements = 0;
};

namespace detail {

// Compensated sums over index-strided partitions of the family:
// sum first_order(a,b) + area(a,b), refined until Cauchy within rel_tol.
template <class FirstOrder, class Area>
RoughIntegralResult compensated_refinement(std::size_t n_points, const FirstOrder& first_order,
                                           const Area& area, double rel_tol) {
    require(n_points >= 2, "rough integral: need at least two family points");
    auto sum_at = [&](std::size_t stride) {
        KahanSum s;
        std::size_t a = 0;
        while (a + 1 < n_points) {
            std::size_t b = std::min(a + stride, n_points - 1);
            s.add(first_order(a, b) + area(a, b));
            a = b;
        }
        return s.value();
    };

    std::size_t stride = 1;
    while (stride * 2 < n_points - 1) stride *= 2;
    RoughIntegralResult out;
    double prev = sum_at(stride);
    double prev_gap = 1e300;
    int stalls = 0;
    while (stride > 1) {
        stride /= 2;
        double cur = sum_at(stride);
        out.value = cur;
        out.last_gap = cur - prev;
        ++out.refinements;
        if (std::abs(out.last_gap) < rel_tol * (1.0 + std::abs(cur))) return out;
        if (std::abs(out.last_gap) >= std::abs(prev_gap) && std::abs(prev_gap) > 0.0) {
            if (++stalls >= 3)
                throw ConvergenceError("rough integral: compensated sums are not Cauchy");
        } else {
            stalls = 0;
        }
        prev_gap = out.last_gap;
        prev = cur;
    }
    if (std::abs(out.last_gap) >= rel_tol * (1.0 + std::abs(out.value)) && out.refinements >= 1 &&
        std::abs(out.last_gap) >= std::abs(prev_gap))
        throw ConvergenceError("rough integral: refinement exhausted without Cauchy gap");
    return out;
}

}  // namespace detail

// int_a^b g dL as the limit of first-order sums g(x_i)(L^{x_{i+1}}-L^{x_i})
// corrected by the (2,1) entry of the level-2 tensor (the paper's component
// indices; level2[1][0] in 0-based storage).
inline RoughIntegralResult rough_integral_gdL(const TwoPath& Z, const TensorPath& RP,
                                              double rel_tol = 1e-8) {
    const auto& pts = RP.points();
    auto first_order = [&](std::size_t a, std::size_t b) {
        return Z.g_at(pts[a]) * (Z.L_at(pts[b]) - Z.L_at(pts[a]));
    };
    auto area = [&](std::size_t a, std::size_t b) { return RP.pair(a, b).level2[1][0]; };
    return detail::compensated_refinement(pts.size(), first_order, area, rel_tol);
}

inline RoughIntegralResult rough_integral_gdL(const GridFunction& g, const LocalTimeField& field,
                                              const TensorPath& RP, double rel_tol = 1e-8) {
    TwoPath Z = TwoPath::from_field(field, g);
    return rough_integral_gdL(Z, RP, rel_tol);
}

// Self-integral int L dL via the (1,1) component.
inline RoughIntegralResult rough_integral_LdL(const TwoPath& Z, const TensorPath& RP,
                                              double rel_tol = 1e-8) {
    const auto& pts = RP.points();
    auto first_order = [&](std::size_t a, std::size_t b) {
        return Z.L_at(pts[a]) * (Z.L_at(pts[b]) - Z.L_at(pts[a]));
    };
    auto area = [&](std::size_t a, std::size_t b) { return RP.pair(a, b).level2[0][0]; };
    return detail::compensated_refinement(pts.size(), first_order, area, rel_tol);
}

// ---------------------------------------------------------------------------
// One-form integration
// ---------------------------------------------------------------------------

// Almost-rough-path of the linear one-form f(z) xi = (xi_1, z_2 xi_1) along
// the lifted path, sewn into a rough path by Chen-folding the per-segment
// tensors. The degree-1 component is (Delta L, int g dL); the degree-3 part
// of the one-form vanishes identically.
inline TensorPath one_form_integral(const TensorPath& RP, const TwoPath& Z) {
    const auto& pts = RP.points();
    std::vector<TensorLevels> segs;
    segs.reserve(pts.size() - 1);
    for (std::size_t i = 1; i < pts.size(); ++i) {
        TensorLevels T = RP.pair(i - 1, i);
        double ga = Z.g_at(pts[i - 1]);
        double dL = T.level1[0], dg = T.level1[1];
        Vec2 c = {1.0, ga};

        TensorLevels Y;
        Y.levels = RP.levels();
        Y.level1 = {dL, ga * dL + T.level2[1][0]};
        if (Y.levels >= 2) {
            // cross iterated integrals of a linear segment:
            // int dZ^1 (x) dZ^2 = (1/3) dz^{x3}, int dZ^2 (x) dZ^1 = (1/6) dz^{x3}
            double c112 = (1.0 / 3.0) * dL * dg * dL;
            double c121 = (1.0 / 6.0) * dg * dL * dL;
            for (int u = 0; u < 2; ++u)
                for (int v = 0; v < 2; ++v) {
                    double val = c[u] * c[v] * T.level2[0][0];
                    if (v == 1) val += c[u] * c112;
                    if (u == 1) val += c[v] * c121;
                    Y.level2[u][v] = val;
                }
        }
        if (Y.levels >= 3) {
            for (int u = 0; u < 2; ++u)
                for (int v = 0; v < 2; ++v)
                    for (int w = 0; w < 2; ++w)
                        Y.level3[u][v][w] = c[u] * c[v] * c[w] * T.level3[0][0][0];
        }
        segs.push_back(Y);
    }
    return TensorPath::fold_segments(pts, segs, RP.levels());
}

// ---------------------------------------------------------------------------
// tau_delta: removing cadlag jumps by inserted linear segments
// ---------------------------------------------------------------------------

struct TauDeltaResult {
    TwoPath path;                        // continuous path on the extended interval
    std::vector<std::size_t> index_map;  // original index -> extended index
    double extension = 0.0;              // total inserted parameter length
};

// tau_delta(x) = x + delta sum_n |h_n|^q 1{x_n <= x}. Each tagged jump of g
// becomes a linear segment of parameter length delta |h_n|^q; L is carried
// constantly across the insertion.
inline TauDeltaResult tau_delta_transform(const TwoPath& Z, double delta, double q) {
    require(delta > 0.0, "tau_delta_transform: delta must be positive");
    require(q >= 1.0, "tau_delta_transform: q must be >= 1");
    for (const auto& t : Z.g_jumps)
        require(t.index >= 1 && t.index < Z.size() && std::isfinite(t.left_limit),
                "tau_delta_transform: malformed jump tag");

    TauDeltaResult out;
    std::vector<double> xs, Ls, gs;
    out.index_map.resize(Z.size());
    double shift = 0.0;
    for (std::size_t i = 0; i < Z.size(); ++i) {
        const JumpTag* tag = nullptr;
        for (const auto& t : Z.g_jumps)
            if (t.index == i) tag = &t;
        if (tag != nullptr) {
            double h = Z.g[i] - tag->left_limit;
            double len = delta * std::pow(std::abs(h), q);
            // pre-jump sample, then the post-jump point after the insertion
            xs.push_back(Z.x[i] + shift);
            Ls.push_back(Z.L[i]);
            gs.push_back(tag->left_limit);
            shift += len;
        }
        xs.push_back(Z.x[i] + shift);
        Ls.push_back(Z.L[i]);
        gs.push_back(Z.g[i]);
        out.index_map[i] = xs.size() - 1;
    }
    out.extension = shift;
    out.path = TwoPath(std::move(xs), std::move(Ls), std::move(gs));
    return out;
}

// ---------------------------------------------------------------------------
// Continuity in the integrand
// ---------------------------------------------------------------------------

// |int g_j dL - int g dL| per j, each side computed through the full lift
// and compensated-sum pipeline.
inline std::vector<double> integrand_continuity_check(const std::vector<GridFunction>& g_seq,
                                                      const GridFunction& g,
                                                      const LocalTimeField& field, double theta) {
    require(theta >= 2.0 && theta < 4.0, "integrand_continuity_check: theta in [2,4)");
    int levels = std::min(3, static_cast<int>(theta));
    auto integral_of = [&](const GridFunction& gj) {
        TwoPath Z = TwoPath::from_field(field, gj);
        TensorPath RP = lift_piecewise_linear(Z, levels);
        return rough_integral_gdL(Z, RP).value;
    };
    double limit = integral_of(g);
    std::vector<double> errs(g_seq.size());
    for (std::size_t j = 0; j < g_seq.size(); ++j)
        errs[j] = std::abs(integral_of(g_seq[j]) - limit);
    return errs;
}

// ---------------------------------------------------------------------------
// Regime classification
// ---------------------------------------------------------------------------

enum class ItoRegime { lebesgue_stieltjes, young, rough_level2, rough_level3 };

inline const char* regime_name(ItoRegime r) {
    switch (r) {
        case ItoRegime::lebesgue_stieltjes: return "lebesgue-stieltjes";
        case ItoRegime::young: return "young";
        case ItoRegime::rough_level2: return "rough-level2";
        case ItoRegime::rough_level3: return "rough-level3";
    }
    return "?";
}

inline double default_p_exponent(Alpha alpha) { return 2.0 / (alpha.value() - 1.0) + 0.05; }

// Admissible theta window (lo, hi) for the requested level at h = 1/max(p,q);
// empty when the level cannot host this (alpha, q).
inline std::optional<std::pair<double, double>> theta_window(Alpha alpha, double q, int level) {
    double q_hat = std::max(default_p_exponent(alpha), q);
    double h = 1.0 / q_hat;
    double lo = std::max({q_hat, 2.0, 4.0 / (2.0 * h + alpha.value() - 1.0)});
    double hi = (level == 2) ? 3.0 : 4.0;
    if (lo >= hi) return std::nullopt;
    return std::make_pair(lo, hi);
}

inline ItoRegime classify_regime(Alpha alpha, double q) {
    double a = alpha.value();
    require(q >= 1.0, "classify_regime: q must be >= 1");
    if (q == 1.0) return ItoRegime::lebesgue_stieltjes;
    if (q < 2.0 / (3.0 - a)) return ItoRegime::young;
    if (q < 3.0 && a > 5.0 / 3.0 && theta_window(alpha, q, 2).has_value())
        return ItoRegime::rough_level2;
    if (q < 4.0 && a > 1.5 && theta_window(alpha, q, 3).has_value())
        return ItoRegime::rough_level3;
    throw RegimeError("classify_regime: (alpha, q) outside every admissible regime");
}

}  // namespace rlt
