#pragma once

#include "mfq/core.hpp"
#include "mfq/geometry.hpp"
#include "mfq/sparse.hpp"

#include <Eigen/Dense>

#include <array>
#include <utility>
#include <vector>

namespace mfq {

constexpr int kMaxSplineOrder = 16;

struct SplineAxis {
    double a = 0.0, b = 0.0;  // b - a = n_cells * spacing after outward rounding
    double spacing = 0.0;
    int n_cells = 0;
    int n_basis = 0;  // n_cells + q - 1 for open uniform knots
    std::vector<double> knots;
};

// Uniform tensor-product B-spline space of order q (degree q-1) on the
// domain bounding box rounded outward to whole cells per axis.
template <int D>
struct TensorSplineSpace {
    int q = 0;
    std::array<SplineAxis, D> axes;
    int n_coeff = 0;  // product of per-axis basis counts

    bool contains(const Pt<D>& p) const {
        for (int k = 0; k < D; ++k)
            if (p[k] < axes[k].a || p[k] > axes[k].b) return false;
        return true;
    }
};

// Open uniform knot vector: the end knots carry multiplicity q, interior
// knots step by `spacing`. Knot count n_cells + 1 + 2(q-1).
std::vector<double> open_uniform_knots(double a, double spacing, int n_cells, int q);

struct Spline1D {
    int first = 0;  // index of the first of the q splines supported at x
    std::array<double, kMaxSplineOrder> val{};
};

// Values (deriv = 0) or first derivatives (deriv = 1) of the q order-q
// B-splines supported at x, by the Cox-de Boor recursion. The span is
// clamped to the knot range, so x outside extrapolates.
Spline1D spline_eval_1d(const std::vector<double>& knots, int q, double x, int deriv);

template <int D>
TensorSplineSpace<D> make_spline_space(const Domain<D>& dom, double h, int q,
                                       double ratio = 4.0);

// The q^D tensor basis functions supported at p as (flat index, value) pairs,
// either values (deriv_axis = -1) or the first partial along deriv_axis.
// Flat index runs with axis 0 fastest. Throws if p is outside the box.
template <int D>
std::vector<std::pair<int, double>> eval_local(const TensorSplineSpace<D>& space,
                                               const Pt<D>& p, int deriv_axis = -1);

// Gradient-component collocation rows: row i holds d_{x_k} s_j(y_i) in
// component-major columns k*N_S + j. Shape N_Y x (D*N_S).
template <int D>
SparseMatrix assemble_L_div_bsp(const TensorSplineSpace<D>& space,
                                const std::vector<Pt<D>>& Y);

// Normal-trace rows nu_k(z_i) s_j(z_i), same layout, positive signs.
// Shape N_Z x (D*N_S).
template <int D>
SparseMatrix assemble_B_normal_bsp(const TensorSplineSpace<D>& space,
                                   const std::vector<BoundarySample<D>>& Z);

// Greville abscissae of the axis: the coefficients that reproduce the
// identity function on [a, b].
std::vector<double> greville_abscissae(const SplineAxis& axis, int q);

// Scalar spline (one component) evaluated at p from its coefficient vector.
template <int D>
double eval_spline(const TensorSplineSpace<D>& space, const Eigen::VectorXd& coef,
                   const Pt<D>& p, int deriv_axis = -1);

}  // namespace mfq
