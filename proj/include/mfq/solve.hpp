#pragma once

#include "mfq/sparse.hpp"

#include <Eigen/Dense>

namespace mfq {

enum class SolverPath { RankRevealingQR, RegularizedNormalEquations };

struct MinNormSolveReport {
    Eigen::VectorXd x;
    double residual_inf = 0.0;  // recomputed as max |Ax - b|, never solver-internal
    int numeric_rank = -1;      // -1 when the solver does not compute a rank
    double omega = 0.0;         // regularization used; 0 on the QR path
    SolverPath path = SolverPath::RankRevealingQR;
};

// rank_tol defaults chosen per dimension by callers: 1e-15 in 2D, 1e-12 in 3D.
constexpr double kRankTol2D = 1e-15;
constexpr double kRankTol3D = 1e-12;

// Minimum-2-norm solution of the (typically underdetermined) system Ax = b
// via column-pivoted QR of A^T. Numeric rank is the number of pivots whose
// magnitude exceeds rank_tol times the largest pivot. If the system is
// inconsistent at that tolerance the least-squares solution over the retained
// pivot rows is returned and the recomputed residual exposes the mismatch.
MinNormSolveReport solve_min_norm_qr(const SparseMatrix& A, const Eigen::VectorXd& b,
                                     double rank_tol);

// Normal equations of the second kind: x = A^T y with (A A^T + omega I) y = b,
// omega = 4e-16 * 2^k escalated from k = 0 until the Cholesky factorization
// succeeds. Throws after k = 40.
MinNormSolveReport solve_min_norm_chol(const SparseMatrix& A, const Eigen::VectorXd& b);

// Dense symmetric-indefinite solve (Bunch-Kaufman) used for the per-stencil
// saddle systems; rhs columns are solved in place. Returns false when some
// pivot block falls below pivot_tol relative to the largest one, signalling
// a deficient stencil.
bool solve_sym_indefinite(Eigen::MatrixXd& M, Eigen::MatrixXd& rhs, double pivot_tol);

}  // namespace mfq
