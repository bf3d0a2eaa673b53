#include "mfq/bspline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mfq {

std::vector<double> open_uniform_knots(double a, double spacing, int n_cells, int q) {
    std::vector<double> t;
    t.reserve(n_cells + 1 + 2 * (q - 1));
    for (int i = 0; i < q - 1; ++i) t.push_back(a);
    for (int i = 0; i <= n_cells; ++i) t.push_back(a + spacing * i);
    const double b = a + spacing * n_cells;
    for (int i = 0; i < q - 1; ++i) t.push_back(b);
    return t;
}

Spline1D spline_eval_1d(const std::vector<double>& t, int q, double x, int deriv) {
    if (q < 2 || q > kMaxSplineOrder) throw std::invalid_argument("spline order out of range");
    const int n_basis = static_cast<int>(t.size()) - q;
    int i = static_cast<int>(std::upper_bound(t.begin(), t.end(), x) - t.begin()) - 1;
    i = std::min(std::max(i, q - 1), n_basis - 1);

    Spline1D out;
    out.first = i - q + 1;

    std::array<double, kMaxSplineOrder> N{}, left{}, right{};
    N[0] = 1.0;
    for (int j = 1; j < q; ++j) {
        left[j] = x - t[i + 1 - j];
        right[j] = t[i + j] - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double den = right[r + 1] + left[j - r];
            const double tmp = den != 0.0 ? N[r] / den : 0.0;
            N[r] = saved + right[r + 1] * tmp;
            saved = left[j - r] * tmp;
        }
        N[j] = saved;
    }
    if (deriv == 0) {
        out.val = N;
        return out;
    }

    std::array<double, kMaxSplineOrder> Q{};
    Q[0] = 1.0;
    for (int j = 1; j < q - 1; ++j) {
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double den = t[i + r + 1] - t[i + 1 - j + r];
            const double tmp = den != 0.0 ? Q[r] / den : 0.0;
            Q[r] = saved + (t[i + r + 1] - x) * tmp;
            saved = (x - t[i + 1 - j + r]) * tmp;
        }
        Q[j] = saved;
    }
    const int p = q - 1;
    for (int r = 0; r < q; ++r) {
        const int j = i - q + 1 + r;
        const double d1 = t[j + p] - t[j];
        const double d2 = t[j + p + 1] - t[j + 1];
        const double a1 = (r - 1 >= 0 && d1 != 0.0) ? Q[r - 1] / d1 : 0.0;
        const double a2 = (r <= q - 2 && d2 != 0.0) ? Q[r] / d2 : 0.0;
        out.val[r] = p * (a1 - a2);
    }
    return out;
}

template <int D>
TensorSplineSpace<D> make_spline_space(const Domain<D>& dom, double h, int q, double ratio) {
    if (h <= 0.0) throw std::invalid_argument("make_spline_space: h must be positive");
    if (q < 2) throw std::invalid_argument("make_spline_space: order must be at least 2");
    const double hs = ratio * h;
    TensorSplineSpace<D> space;
    space.q = q;
    long long n_coeff = 1;
    for (int k = 0; k < D; ++k) {
        SplineAxis& ax = space.axes[k];
        const double side = dom.box.hi[k] - dom.box.lo[k];
        ax.spacing = hs;
        ax.n_cells = static_cast<int>(std::ceil(side / hs));
        ax.a = dom.box.lo[k];
        ax.b = ax.a + hs * ax.n_cells;
        ax.n_basis = ax.n_cells + q - 1;
        ax.knots = open_uniform_knots(ax.a, hs, ax.n_cells, q);
        n_coeff *= ax.n_basis;
    }
    if (n_coeff * D > (1LL << 31) - 1)
        throw std::runtime_error("make_spline_space: spline space too large");
    space.n_coeff = static_cast<int>(n_coeff);
    return space;
}

namespace {

template <int D>
void check_in_box(const TensorSplineSpace<D>& space, const Pt<D>& p) {
    if (!space.contains(p)) throw std::domain_error("point outside the spline box");
}

// Calls fn(flat_index, product) for the q^D local tensor basis functions at p,
// with the factor along deriv_axis replaced by the derivative values.
template <int D, class F>
void local_products(const TensorSplineSpace<D>& space, const Pt<D>& p, int deriv_axis, F&& fn) {
    const int q = space.q;
    std::array<Spline1D, D> f;
    for (int k = 0; k < D; ++k)
        f[k] = spline_eval_1d(space.axes[k].knots, q, p[k], k == deriv_axis ? 1 : 0);
    if constexpr (D == 2) {
        for (int c1 = 0; c1 < q; ++c1)
            for (int c0 = 0; c0 < q; ++c0) {
                const int j = (f[0].first + c0) + space.axes[0].n_basis * (f[1].first + c1);
                fn(j, f[0].val[c0] * f[1].val[c1]);
            }
    } else {
        for (int c2 = 0; c2 < q; ++c2)
            for (int c1 = 0; c1 < q; ++c1)
                for (int c0 = 0; c0 < q; ++c0) {
                    const int j =
                        (f[0].first + c0) +
                        space.axes[0].n_basis *
                            ((f[1].first + c1) + space.axes[1].n_basis * (f[2].first + c2));
                    fn(j, f[0].val[c0] * f[1].val[c1] * f[2].val[c2]);
                }
    }
}

}  // namespace

template <int D>
std::vector<std::pair<int, double>> eval_local(const TensorSplineSpace<D>& space,
                                               const Pt<D>& p, int deriv_axis) {
    check_in_box(space, p);
    std::vector<std::pair<int, double>> out;
    out.reserve(static_cast<std::size_t>(std::pow(space.q, D)));
    local_products(space, p, deriv_axis,
                   [&out](int j, double v) { out.emplace_back(j, v); });
    return out;
}

template <int D>
SparseMatrix assemble_L_div_bsp(const TensorSplineSpace<D>& space,
                                const std::vector<Pt<D>>& Y) {
    const int q = space.q;
    const int ns = space.n_coeff;
    SparseMatrix L(static_cast<int>(Y.size()), D * ns);
    for (int i = 0; i < static_cast<int>(Y.size()); ++i) {
        check_in_box(space, Y[i]);
        std::array<Spline1D, D> val, der;
        for (int k = 0; k < D; ++k) {
            val[k] = spline_eval_1d(space.axes[k].knots, q, Y[i][k], 0);
            der[k] = spline_eval_1d(space.axes[k].knots, q, Y[i][k], 1);
        }
        if constexpr (D == 2) {
            for (int c1 = 0; c1 < q; ++c1)
                for (int c0 = 0; c0 < q; ++c0) {
                    const int j =
                        (val[0].first + c0) + space.axes[0].n_basis * (val[1].first + c1);
                    L.add(i, 0 * ns + j, der[0].val[c0] * val[1].val[c1]);
                    L.add(i, 1 * ns + j, val[0].val[c0] * der[1].val[c1]);
                }
        } else {
            for (int c2 = 0; c2 < q; ++c2)
                for (int c1 = 0; c1 < q; ++c1)
                    for (int c0 = 0; c0 < q; ++c0) {
                        const int j =
                            (val[0].first + c0) +
                            space.axes[0].n_basis *
                                ((val[1].first + c1) +
                                 space.axes[1].n_basis * (val[2].first + c2));
                        L.add(i, 0 * ns + j, der[0].val[c0] * val[1].val[c1] * val[2].val[c2]);
                        L.add(i, 1 * ns + j, val[0].val[c0] * der[1].val[c1] * val[2].val[c2]);
                        L.add(i, 2 * ns + j, val[0].val[c0] * val[1].val[c1] * der[2].val[c2]);
                    }
        }
    }
    L.finalize();
    return L;
}

template <int D>
SparseMatrix assemble_B_normal_bsp(const TensorSplineSpace<D>& space,
                                   const std::vector<BoundarySample<D>>& Z) {
    const int ns = space.n_coeff;
    SparseMatrix B(static_cast<int>(Z.size()), D * ns);
    for (int i = 0; i < static_cast<int>(Z.size()); ++i) {
        local_products(space, Z[i].point, -1, [&](int j, double v) {
            for (int k = 0; k < D; ++k) B.add(i, k * ns + j, Z[i].normal[k] * v);
        });
    }
    B.finalize();
    return B;
}

std::vector<double> greville_abscissae(const SplineAxis& axis, int q) {
    std::vector<double> g(axis.n_basis);
    for (int j = 0; j < axis.n_basis; ++j) {
        double s = 0.0;
        for (int r = 1; r <= q - 1; ++r) s += axis.knots[j + r];
        g[j] = s / (q - 1);
    }
    return g;
}

template <int D>
double eval_spline(const TensorSplineSpace<D>& space, const Eigen::VectorXd& coef,
                   const Pt<D>& p, int deriv_axis) {
    if (coef.size() != space.n_coeff)
        throw std::invalid_argument("eval_spline: coefficient count mismatch");
    check_in_box(space, p);
    double s = 0.0;
    local_products(space, p, deriv_axis, [&](int j, double v) { s += coef[j] * v; });
    return s;
}

template struct TensorSplineSpace<2>;
template struct TensorSplineSpace<3>;
template TensorSplineSpace<2> make_spline_space<2>(const Domain<2>&, double, int, double);
template TensorSplineSpace<3> make_spline_space<3>(const Domain<3>&, double, int, double);
template std::vector<std::pair<int, double>> eval_local<2>(const TensorSplineSpace<2>&,
                                                           const Pt<2>&, int);
template std::vector<std::pair<int, double>> eval_local<3>(const TensorSplineSpace<3>&,
                                                           const Pt<3>&, int);
template SparseMatrix assemble_L_div_bsp<2>(const TensorSplineSpace<2>&,
                                            const std::vector<Pt<2>>&);
template SparseMatrix assemble_L_div_bsp<3>(const TensorSplineSpace<3>&,
                                            const std::vector<Pt<3>>&);
template SparseMatrix assemble_B_normal_bsp<2>(const TensorSplineSpace<2>&,
                                               const std::vector<BoundarySample<2>>&);
template SparseMatrix assemble_B_normal_bsp<3>(const TensorSplineSpace<3>&,
                                               const std::vector<BoundarySample<3>>&);
template double eval_spline<2>(const TensorSplineSpace<2>&, const Eigen::VectorXd&,
                               const Pt<2>&, int);
template double eval_spline<3>(const TensorSplineSpace<3>&, const Eigen::VectorXd&,
                               const Pt<3>&, int);

}  // namespace mfq
