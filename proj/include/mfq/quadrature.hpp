#pragma once

#include "mfq/bspline.hpp"
#include "mfq/core.hpp"
#include "mfq/geometry.hpp"
#include "mfq/nodegen.hpp"
#include "mfq/polyharmonic.hpp"
#include "mfq/solve.hpp"
#include "mfq/sparse.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfq {

enum class Method { MFD, BSP };
enum class OperatorPair { Divergence, Elliptic };

std::string method_name(Method m);
Method method_from_name(const std::string& s);
std::string operator_name(OperatorPair op);
OperatorPair operator_from_name(const std::string& s);

// Constraint pairs (fhat, ghat) supplying the single non-homogeneous row(s)
// of the weight system.
enum class ConstraintKind {
    BoundaryConstant,     // (0, 1), moment -|dOmega|
    InteriorConstant,     // (1, 0), moment |Omega|
    Combined,             // (1, -1), moment |Omega| + |dOmega|
    FundamentalSolution,  // (0, normal derivative of the free-space Green kernel at x0)
    Both,                 // two rows: (1, 0) and (0, 1)
};

std::string constraint_name(ConstraintKind k);
ConstraintKind constraint_from_name(const std::string& s);

template <int D>
struct ConstraintSpec {
    ConstraintKind kind = ConstraintKind::BoundaryConstant;
    Pt<D> x0 = Pt<D>::Zero();  // FundamentalSolution center
};

// Validates that the measures the kind needs are known and, for the
// fundamental-solution kind, that x0 (defaulting to the domain's x0) is
// strictly interior. Throws std::invalid_argument otherwise.
template <int D>
ConstraintSpec<D> make_constraint(const Domain<D>& dom, ConstraintKind kind,
                                  std::optional<Pt<D>> x0 = std::nullopt);

// Normal derivative of the free-space Green kernel:
// nu^T (z - x0) / (d * omega_d * |z - x0|^d), omega_2 = pi, omega_3 = 4pi/3.
template <int D>
double fundamental_ghat(const Pt<D>& z, const Pt<D>& nu, const Pt<D>& x0);

// Thrown when a configuration is declined rather than solved: stencil larger
// than the source set, or an overdetermined system.
class RefusalError : public std::runtime_error {
  public:
    RefusalError(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

  private:
    std::string code_;
};

struct AssembledSystem {
    SparseMatrix A;
    Eigen::VectorXd b;
    int rows_pruned = 0;
    std::vector<int> row_map;  // kept row -> row index before pruning
};

// Stacks A = [L^T, -B^T] over the unknowns (w over Y, v over Z), appends one
// constraint row per pair (f|_Y^T, -g|_Z^T) with right-hand side
// I(f, g) = f*|Omega| - integral of g, and prunes structurally empty rows.
template <int D>
AssembledSystem build_system(const SparseMatrix& L, const SparseMatrix& B,
                             const ConstraintSpec<D>& constraint, const std::vector<Pt<D>>& Y,
                             const std::vector<BoundarySample<D>>& Z, const Domain<D>& dom);

struct QuadratureRule {
    Eigen::VectorXd w;  // interior-integral weights over Y
    Eigen::VectorXd v;  // boundary-integral weights over Z
    double K_w = 0.0, K_v = 0.0;
    bool K_w_normalized = false;  // true: |w|_1 / |Omega|; false: raw |w|_1
    bool K_v_normalized = false;
    double residual_inf = 0.0;
    Method method = Method::MFD;
    OperatorPair op = OperatorPair::Divergence;
    int q = 0;
    double h = 0.0;
    std::uint64_t seed = 0;
    ConstraintKind constraint = ConstraintKind::BoundaryConstant;
    SolverPath path = SolverPath::RankRevealingQR;
    int numeric_rank = -1;
    double omega = 0.0;
    int n_sources = 0;  // N_X (MFD) or spline coefficient count (BSP)
    int rows_pruned = 0;
};

template <int D>
struct WeightsOptions {
    Method method = Method::MFD;
    OperatorPair op = OperatorPair::Divergence;
    int q = 4;
    ConstraintKind constraint = ConstraintKind::BoundaryConstant;
    std::optional<Pt<D>> x0;  // fundamental-solution center override
    SolverPath solver = SolverPath::RankRevealingQR;
    double rank_tol = -1.0;  // <= 0 selects the per-dimension default
    double x_ratio = 1.6;    // MFD source spacing h_X = x_ratio * h
    double spline_ratio = 4.0;
};

// End-to-end pipeline: assemble the method's L and B on the node set, build
// the constrained system, solve for the minimum-norm weights, and split into
// (w, v). The MFD divergence path generates its source set X at spacing
// x_ratio * h unless supplied_X is given; the elliptic pair collocates on
// X = Y. Throws RefusalError when n_L exceeds the source count or the system
// is overdetermined.
template <int D>
QuadratureRule compute_weights(const Domain<D>& dom, const NodeSet<D>& nodes,
                               const WeightsOptions<D>& opt,
                               const std::vector<Pt<D>>* supplied_X = nullptr);

// Sum of w f(y) minus sum of v g(z); a null sample vector drops that term.
double apply_rule(const QuadratureRule& rule, const Eigen::VectorXd* f_on_Y,
                  const Eigen::VectorXd* g_on_Z);

// Discrete incompatibility diagnostic: true iff the stacked least-squares
// problem L c = f|_Y, B c = g|_Z leaves a residual above
// tol_factor * max|rhs|, predicting inconsistency of the weight system.
bool check_discrete_incompatibility(const SparseMatrix& L, const SparseMatrix& B,
                                    const Eigen::VectorXd& f_on_Y,
                                    const Eigen::VectorXd& g_on_Z,
                                    double tol_factor = 1e-8);

// CSV: one header line method,q,h,seed,constraint,residual,K_w,K_v followed
// by rows kind,x[,y[,z]],weight with 17 significant digits.
template <int D>
void write_weights_csv(const std::string& path, const QuadratureRule& rule,
                       const NodeSet<D>& nodes);

}  // namespace mfq
