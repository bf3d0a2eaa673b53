#pragma once

#include <cmath>
#include <cstdlib>
#include <functional>

namespace mfq {

struct IntegrateResult {
    double value = 0.0;
    double error = 0.0;
    bool converged = true;
};

namespace detail {

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1].
inline constexpr double kGkNodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kGkWeights[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelEstimate {
    double kronrod;
    double err;
};

inline PanelEstimate gk15_panel(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
    const double fc = f(c);
    double gauss = kGaussWeights[3] * fc;
    double kron = kGkWeights[7] * fc;
    for (int j = 0; j < 7; ++j) {
        const double x = hw * kGkNodes[j];
        const double s = f(c - x) + f(c + x);
        kron += kGkWeights[j] * s;
        if (j % 2 == 1) gauss += kGaussWeights[j / 2] * s;
    }
    return {kron * hw, std::abs((kron - gauss) * hw)};
}

inline double gk15_recurse(const std::function<double(double)>& f, double a, double b, double tol,
                           int depth, int max_depth, bool& ok) {
    const PanelEstimate e = gk15_panel(f, a, b);
    if (e.err <= tol || depth >= max_depth) {
        if (e.err > tol) ok = false;
        return e.kronrod;
    }
    const double c = 0.5 * (a + b);
    return gk15_recurse(f, a, c, 0.5 * tol, depth + 1, max_depth, ok) +
           gk15_recurse(f, c, b, 0.5 * tol, depth + 1, max_depth, ok);
}

}  // namespace detail

// Adaptive Gauss-Kronrod integration by panel bisection. The panel tolerance
// combines the absolute target with a relative one based on a first whole
// interval estimate.
inline IntegrateResult adaptive_gk15(const std::function<double(double)>& f, double a, double b,
                                     double abs_tol, double rel_tol, int max_depth = 40) {
    IntegrateResult out;
    if (a == b) return out;
    const detail::PanelEstimate whole = detail::gk15_panel(f, a, b);
    const double tol = std::max(abs_tol, rel_tol * std::abs(whole.kronrod));
    bool ok = true;
    out.value = detail::gk15_recurse(f, a, b, tol, 0, max_depth, ok);
    out.error = tol;
    out.converged = ok;
    return out;
}

}  // namespace mfq
