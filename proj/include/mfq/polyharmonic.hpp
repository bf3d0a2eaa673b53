#pragma once

#include "mfq/core.hpp"
#include "mfq/geometry.hpp"
#include "mfq/nodegen.hpp"
#include "mfq/sparse.hpp"

#include <Eigen/Dense>

#include <array>
#include <vector>

namespace mfq {

// Nodal functional applied at the stencil center.
enum class StencilFunctional { Value, Partial, Laplacian };

// All exponent vectors alpha with |alpha| < order, in a fixed nested order
// (first component slowest).
template <int D>
std::vector<std::array<int, D>> monomial_exponents(int order);

long long binom(int n, int k);

// Stencil sizes for the divergence-form rows: the operator rows use twice the
// dimension of polynomials of degree below q, the boundary rows twice the
// dimension of degree below q-1.
int stencil_count_L(int q, int d);
int stencil_count_B(int q, int d);

// Weights reproducing the chosen functional of the polyharmonic interpolant
// with kernel r^(2m-1) and polynomial tail of degree below m. Returns an
// n x 1 matrix (Value, Laplacian) or n x D matrix (Partial, one column per
// derivative direction). Throws if the local saddle system is numerically
// singular.
template <int D>
Eigen::MatrixXd polyharmonic_weights(const Pt<D>& center, const std::vector<Pt<D>>& stencil,
                                     int m, StencilFunctional fn);

// Gradient-component collocation rows: row i holds the weights that map nodal
// field values on X to the k-th field component's partial at y_i, laid out in
// component-major columns k*N_X + j. Shape N_Y x (D*N_X).
template <int D>
SparseMatrix assemble_L_div(const KdTree<D>& xtree, const std::vector<Pt<D>>& Y, int q);

// Normal-trace rows for the divergence form: row i holds nu_k(z_i) times the
// value-reconstruction weights of order q-1, same component-major layout.
// Shape N_Z x (D*N_X). Signs here are positive; the system assembly negates.
template <int D>
SparseMatrix assemble_B_normal(const KdTree<D>& xtree,
                               const std::vector<BoundarySample<D>>& Z, int q);

// Laplacian collocation rows for the elliptic pair, shape N_Y x N_X.
template <int D>
SparseMatrix assemble_L_laplacian(const KdTree<D>& xtree, const std::vector<Pt<D>>& Y, int q);

// Normal-derivative rows for the elliptic pair via nu . grad of order q-1,
// shape N_Z x N_X. Positive signs, negated at system assembly.
template <int D>
SparseMatrix assemble_B_dnu(const KdTree<D>& xtree, const std::vector<BoundarySample<D>>& Z,
                            int q);

}  // namespace mfq
