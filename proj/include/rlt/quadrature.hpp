#pragma once

#include <array>
#include <cmath>
#include <functional>

#include "rlt/common.hpp"

namespace rlt {

// 20-point Gauss-Legendre nodes/weights on [-1, 1].
inline const std::array<double, 10>& gl20_nodes() {
    static const std::array<double, 10> x = {
        0.0765265211334973, 0.2277858511416451, 0.3737060887154195, 0.5108670019508271,
        0.6360536807265150, 0.7463319064601508, 0.8391169718222188, 0.9122344282513259,
        0.9639719272779138, 0.9931285991850949};
    return x;
}
inline const std::array<double, 10>& gl20_weights() {
    static const std::array<double, 10> w = {
        0.1527533871307258, 0.1491729864726037, 0.1420961093183820, 0.1316886384491766,
        0.1181945319615184, 0.1019301198172404, 0.0832767415767048, 0.0626720483341091,
        0.0406014298003869, 0.0176140071391521};
    return w;
}

template <class F>
double gauss_panel(const F& f, double a, double b) {
    const auto& xs = gl20_nodes();
    const auto& ws = gl20_weights();
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        s += ws[i] * (f(mid + half * xs[i]) + f(mid - half * xs[i]));
    return s * half;
}

template <class F>
double gauss_panels(const F& f, double a, double b, int n_panels) {
    KahanSum s;
    double h = (b - a) / n_panels;
    for (int i = 0; i < n_panels; ++i) s.add(gauss_panel(f, a + i * h, a + (i + 1) * h));
    return s.value();
}

// Panel-doubling quadrature with a relative Cauchy stop. Throws
// ConvergenceError when the refinement stalls above tolerance.
template <class F>
double adaptive_gauss(const F& f, double a, double b, double rel_tol = 1e-10,
                      int max_doublings = 14, int initial_panels = 4) {
    double prev = gauss_panels(f, a, b, initial_panels);
    int n = initial_panels;
    for (int it = 0; it < max_doublings; ++it) {
        n *= 2;
        double cur = gauss_panels(f, a, b, n);
        if (std::abs(cur - prev) <= rel_tol * (1.0 + std::abs(cur))) return cur;
        prev = cur;
    }
    throw ConvergenceError("adaptive_gauss: quadrature did not reach tolerance");
}

}  // namespace rlt
