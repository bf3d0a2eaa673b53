#include "mfq/reference.hpp"

#include "mfq/integrate.hpp"

namespace mfq {

namespace {

double integrate_or_throw(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, double rel_tol, const char* what) {
    const IntegrateResult r = adaptive_gk15(f, a, b, abs_tol, rel_tol);
    if (!r.converged)
        throw AccuracyError(std::string(what) + ": adaptive integration stalled at error " +
                                fmt_g17(r.error),
                            r.value);
    return r.value;
}

// First component of the divergence-trick potential: a line integral of f
// from the left face of the bounding box to p along axis 0.
template <int D>
double potential_f1(const Domain<D>& dom, const std::function<double(const Pt<D>&)>& f,
                    const Pt<D>& p) {
    return integrate_or_throw(
        [&](double t) {
            Pt<D> q = p;
            q[0] = t;
            return f(q);
        },
        dom.box.lo[0], p[0], 1e-14, 1e-14, "interior reference (line integral)");
}

}  // namespace

template <>
double reference_integral<2>(const Domain<2>& dom,
                             const std::function<double(const Pt<2>&)>& f,
                             IntegralTarget target) {
    if (dom.patches.empty())
        throw std::runtime_error("reference integrals need parametric patches; " + dom.name +
                                 " has none");
    double total = 0.0;
    for (const auto& patch : dom.patches) {
        std::function<double(double)> integrand;
        if (target == IntegralTarget::Boundary) {
            integrand = [&](double t) {
                return f(patch.at(t)) * patch.velocity(t).norm();
            };
        } else {
            integrand = [&](double t) {
                const Pt<2> p = patch.at(t);
                const double nu1 = patch.normal(t)[0];
                if (nu1 == 0.0) return 0.0;
                return nu1 * potential_f1(dom, f, p) * patch.velocity(t).norm();
            };
        }
        total += integrate_or_throw(integrand, patch.t0, patch.t1, 1e-13, 1e-13,
                                    "boundary patch integral");
    }
    return total;
}

template <>
double reference_integral<3>(const Domain<3>& dom,
                             const std::function<double(const Pt<3>&)>& f,
                             IntegralTarget target) {
    if (dom.patches.empty())
        throw std::runtime_error("reference integrals need parametric patches; " + dom.name +
                                 " has none");
    double total = 0.0;
    // The interior target nests a third integration level, so its outer
    // tolerance leaves headroom above the noise floor of the inner levels.
    const double outer_tol = target == IntegralTarget::Boundary ? 1e-13 : 1e-12;
    for (const auto& patch : dom.patches) {
        std::function<double(double, double)> integrand;
        if (target == IntegralTarget::Boundary) {
            integrand = [&](double u, double v) {
                return f(patch.at(u, v)) * patch.area_element(u, v);
            };
        } else {
            integrand = [&](double u, double v) {
                const double ae = patch.area_element(u, v);
                if (ae == 0.0) return 0.0;
                const double nu1 = patch.normal(u, v)[0];
                if (nu1 == 0.0) return 0.0;
                return nu1 * potential_f1(dom, f, patch.at(u, v)) * ae;
            };
        }
        total += integrate_or_throw(
            [&](double u) {
                return integrate_or_throw([&](double v) { return integrand(u, v); }, patch.v0,
                                          patch.v1, 1e-13, 1e-13, "inner patch axis");
            },
            patch.u0, patch.u1, outer_tol, outer_tol, "outer patch axis");
    }
    return total;
}

}  // namespace mfq
