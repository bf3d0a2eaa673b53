#include "mfq/quadrature.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace mfq {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::string method_name(Method m) { return m == Method::MFD ? "mfd" : "bsp"; }

Method method_from_name(const std::string& s) {
    if (s == "mfd") return Method::MFD;
    if (s == "bsp") return Method::BSP;
    throw std::invalid_argument("unknown method: " + s);
}

std::string operator_name(OperatorPair op) {
    return op == OperatorPair::Divergence ? "divergence" : "elliptic";
}

OperatorPair operator_from_name(const std::string& s) {
    if (s == "divergence") return OperatorPair::Divergence;
    if (s == "elliptic") return OperatorPair::Elliptic;
    throw std::invalid_argument("unknown operator pair: " + s);
}

std::string constraint_name(ConstraintKind k) {
    switch (k) {
        case ConstraintKind::BoundaryConstant: return "boundary-constant";
        case ConstraintKind::InteriorConstant: return "interior-constant";
        case ConstraintKind::Combined: return "combined";
        case ConstraintKind::FundamentalSolution: return "fundamental-solution";
        case ConstraintKind::Both: return "both";
    }
    throw std::logic_error("unreachable");
}

ConstraintKind constraint_from_name(const std::string& s) {
    if (s == "boundary-constant") return ConstraintKind::BoundaryConstant;
    if (s == "interior-constant") return ConstraintKind::InteriorConstant;
    if (s == "combined") return ConstraintKind::Combined;
    if (s == "fundamental-solution") return ConstraintKind::FundamentalSolution;
    if (s == "both") return ConstraintKind::Both;
    throw std::invalid_argument("unknown constraint kind: " + s);
}

template <int D>
ConstraintSpec<D> make_constraint(const Domain<D>& dom, ConstraintKind kind,
                                  std::optional<Pt<D>> x0) {
    const bool needs_boundary = kind == ConstraintKind::BoundaryConstant ||
                                kind == ConstraintKind::Combined ||
                                kind == ConstraintKind::Both;
    const bool needs_interior = kind == ConstraintKind::InteriorConstant ||
                                kind == ConstraintKind::Combined ||
                                kind == ConstraintKind::Both;
    if (needs_boundary && !dom.measure_boundary)
        throw std::invalid_argument("constraint " + constraint_name(kind) +
                                    " needs a known boundary measure on " + dom.name);
    if (needs_interior && !dom.measure_interior)
        throw std::invalid_argument("constraint " + constraint_name(kind) +
                                    " needs a known interior measure on " + dom.name);
    ConstraintSpec<D> spec;
    spec.kind = kind;
    if (kind == ConstraintKind::FundamentalSolution) {
        spec.x0 = x0.value_or(dom.x0);
        if (!(dom.phi(spec.x0) < 0.0))
            throw std::invalid_argument("fundamental-solution center must be strictly interior");
    }
    return spec;
}

template <int D>
double fundamental_ghat(const Pt<D>& z, const Pt<D>& nu, const Pt<D>& x0) {
    const Pt<D> r = z - x0;
    const double rn = r.norm();
    if (rn == 0.0) throw std::domain_error("fundamental_ghat: z coincides with x0");
    const double d_omega_d = (D == 2) ? 2.0 * kPi : 4.0 * kPi;
    double rpow = rn;
    for (int k = 1; k < D; ++k) rpow *= rn;
    return nu.dot(r) / (d_omega_d * rpow);
}

namespace {

struct ConstraintRow {
    double fhat = 0.0;          // constant value over Y
    std::vector<double> ghat;   // per-z values (empty means identically zero)
    double ghat_const = 0.0;    // used when ghat is empty
    double moment = 0.0;        // integral of fhat minus integral of ghat
};

template <int D>
std::vector<ConstraintRow> constraint_rows(const ConstraintSpec<D>& spec,
                                           const std::vector<BoundarySample<D>>& Z,
                                           const Domain<D>& dom) {
    std::vector<ConstraintRow> rows;
    const auto area = [&]() { return dom.measure_interior.value(); };
    const auto blen = [&]() { return dom.measure_boundary.value(); };
    switch (spec.kind) {
        case ConstraintKind::BoundaryConstant:
            rows.push_back({0.0, {}, 1.0, -blen()});
            break;
        case ConstraintKind::InteriorConstant:
            rows.push_back({1.0, {}, 0.0, area()});
            break;
        case ConstraintKind::Combined:
            rows.push_back({1.0, {}, -1.0, area() + blen()});
            break;
        case ConstraintKind::Both:
            rows.push_back({1.0, {}, 0.0, area()});
            rows.push_back({0.0, {}, 1.0, -blen()});
            break;
        case ConstraintKind::FundamentalSolution: {
            ConstraintRow row;
            row.fhat = 0.0;
            row.ghat.reserve(Z.size());
            for (const auto& z : Z)
                row.ghat.push_back(fundamental_ghat<D>(z.point, z.normal, spec.x0));
            row.moment = -1.0;
            rows.push_back(std::move(row));
            break;
        }
    }
    return rows;
}

}  // namespace

template <int D>
AssembledSystem build_system(const SparseMatrix& L, const SparseMatrix& B,
                             const ConstraintSpec<D>& constraint, const std::vector<Pt<D>>& Y,
                             const std::vector<BoundarySample<D>>& Z, const Domain<D>& dom) {
    const int n_y = static_cast<int>(Y.size());
    const int n_z = static_cast<int>(Z.size());
    if (L.rows() != n_y || B.rows() != n_z)
        throw std::invalid_argument("build_system: row counts do not match the node sets");
    if (L.cols() != B.cols())
        throw std::invalid_argument("build_system: L and B column counts differ");
    const int m = L.cols();

    const auto rows = constraint_rows(constraint, Z, dom);
    const int n_c = static_cast<int>(rows.size());

    SparseMatrix A(m + n_c, n_y + n_z);
    for (int r = 0; r < n_y; ++r) {
        const int nn = L.row_nnz(r);
        const int* cols = L.row_cols(r);
        const double* vals = L.row_vals(r);
        for (int t = 0; t < nn; ++t) A.add(cols[t], r, vals[t]);
    }
    for (int r = 0; r < n_z; ++r) {
        const int nn = B.row_nnz(r);
        const int* cols = B.row_cols(r);
        const double* vals = B.row_vals(r);
        for (int t = 0; t < nn; ++t) A.add(cols[t], n_y + r, -vals[t]);
    }
    Eigen::VectorXd b_full = Eigen::VectorXd::Zero(m + n_c);
    for (int j = 0; j < n_c; ++j) {
        const ConstraintRow& row = rows[j];
        bool any = false;
        if (row.fhat != 0.0) {
            for (int i = 0; i < n_y; ++i) A.add(m + j, i, row.fhat);
            any = n_y > 0;
        }
        for (int i = 0; i < n_z; ++i) {
            const double g = row.ghat.empty() ? row.ghat_const : row.ghat[i];
            if (g != 0.0) {
                A.add(m + j, n_y + i, -g);
                any = true;
            }
        }
        if (!any) throw std::invalid_argument("build_system: constraint row identically zero");
        b_full[m + j] = row.moment;
    }
    A.finalize();

    AssembledSystem out;
    out.A = A.prune_empty_rows(out.row_map);
    out.rows_pruned = A.rows() - out.A.rows();
    out.b.resize(out.A.rows());
    for (int i = 0; i < out.A.rows(); ++i) out.b[i] = b_full[out.row_map[i]];
    return out;
}

template <int D>
QuadratureRule compute_weights(const Domain<D>& dom, const NodeSet<D>& nodes,
                               const WeightsOptions<D>& opt,
                               const std::vector<Pt<D>>* supplied_X) {
    const ConstraintSpec<D> spec = make_constraint<D>(dom, opt.constraint, opt.x0);
    const std::vector<Pt<D>> Y = nodes.quadrature_nodes();
    const std::vector<BoundarySample<D>>& Z = nodes.boundary;
    if (Y.empty() || Z.empty())
        throw std::invalid_argument("compute_weights: empty node set");

    SparseMatrix L, B;
    int n_sources = 0;
    if (opt.method == Method::MFD) {
        std::vector<Pt<D>> X;
        if (opt.op == OperatorPair::Elliptic) {
            X = Y;
        } else if (supplied_X) {
            X = *supplied_X;
        } else {
            X = make_X(dom, nodes.h, nodes.seed, opt.x_ratio).quadrature_nodes();
        }
        n_sources = static_cast<int>(X.size());
        const int n_l = stencil_count_L(opt.q, D);
        if (n_l > n_sources)
            throw RefusalError("stencil-exceeds-sources",
                               "stencil size " + std::to_string(n_l) +
                                   " exceeds source count " + std::to_string(n_sources));
        KdTree<D> tree(std::move(X));
        if (opt.op == OperatorPair::Elliptic) {
            L = assemble_L_laplacian(tree, Y, opt.q);
            B = assemble_B_dnu(tree, Z, opt.q);
        } else {
            L = assemble_L_div(tree, Y, opt.q);
            B = assemble_B_normal(tree, Z, opt.q);
        }
    } else {
        if (opt.op == OperatorPair::Elliptic)
            throw std::invalid_argument("the elliptic pair is only available on the MFD path");
        const TensorSplineSpace<D> space =
            make_spline_space(dom, nodes.h, opt.q, opt.spline_ratio);
        n_sources = space.n_coeff;
        L = assemble_L_div_bsp(space, Y);
        B = assemble_B_normal_bsp(space, Z);
    }

    AssembledSystem sys = build_system<D>(L, B, spec, Y, Z, dom);
    if (sys.A.rows() > sys.A.cols())
        throw RefusalError("overdetermined",
                           "system has " + std::to_string(sys.A.rows()) + " rows and " +
                               std::to_string(sys.A.cols()) + " columns");

    MinNormSolveReport rep;
    if (opt.solver == SolverPath::RankRevealingQR) {
        const double tol = opt.rank_tol > 0.0 ? opt.rank_tol : (D == 2 ? kRankTol2D : kRankTol3D);
        rep = solve_min_norm_qr(sys.A, sys.b, tol);
    } else {
        rep = solve_min_norm_chol(sys.A, sys.b);
    }

    QuadratureRule rule;
    const int n_y = static_cast<int>(Y.size());
    rule.w = rep.x.head(n_y);
    rule.v = rep.x.tail(static_cast<int>(Z.size()));
    rule.K_w_normalized = dom.measure_interior.has_value();
    rule.K_w = rule.w.lpNorm<1>() / (rule.K_w_normalized ? *dom.measure_interior : 1.0);
    rule.K_v_normalized = dom.measure_boundary.has_value();
    rule.K_v = rule.v.lpNorm<1>() / (rule.K_v_normalized ? *dom.measure_boundary : 1.0);
    rule.residual_inf = rep.residual_inf;
    rule.method = opt.method;
    rule.op = opt.op;
    rule.q = opt.q;
    rule.h = nodes.h;
    rule.seed = nodes.seed;
    rule.constraint = opt.constraint;
    rule.path = rep.path;
    rule.numeric_rank = rep.numeric_rank;
    rule.omega = rep.omega;
    rule.n_sources = n_sources;
    rule.rows_pruned = sys.rows_pruned;
    return rule;
}

double apply_rule(const QuadratureRule& rule, const Eigen::VectorXd* f_on_Y,
                  const Eigen::VectorXd* g_on_Z) {
    double s = 0.0;
    if (f_on_Y) {
        if (f_on_Y->size() != rule.w.size())
            throw std::invalid_argument("apply_rule: interior sample length mismatch");
        s += rule.w.dot(*f_on_Y);
    }
    if (g_on_Z) {
        if (g_on_Z->size() != rule.v.size())
            throw std::invalid_argument("apply_rule: boundary sample length mismatch");
        s -= rule.v.dot(*g_on_Z);
    }
    return s;
}

bool check_discrete_incompatibility(const SparseMatrix& L, const SparseMatrix& B,
                                    const Eigen::VectorXd& f_on_Y,
                                    const Eigen::VectorXd& g_on_Z, double tol_factor) {
    if (L.cols() != B.cols())
        throw std::invalid_argument("check_discrete_incompatibility: column counts differ");
    if (f_on_Y.size() != L.rows() || g_on_Z.size() != B.rows())
        throw std::invalid_argument("check_discrete_incompatibility: sample length mismatch");
    const int rows = L.rows() + B.rows();
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(rows, L.cols());
    M.topRows(L.rows()) = Eigen::MatrixXd(L.to_eigen());
    M.bottomRows(B.rows()) = Eigen::MatrixXd(B.to_eigen());
    Eigen::VectorXd rhs(rows);
    rhs << f_on_Y, g_on_Z;
    const Eigen::VectorXd c = M.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs);
    const double res = (M * c - rhs).cwiseAbs().maxCoeff();
    return res > tol_factor * rhs.cwiseAbs().maxCoeff();
}

template <int D>
void write_weights_csv(const std::string& path, const QuadratureRule& rule,
                       const NodeSet<D>& nodes) {
    const std::vector<Pt<D>> Y = nodes.quadrature_nodes();
    if (static_cast<int>(Y.size()) != rule.w.size() ||
        static_cast<int>(nodes.boundary.size()) != rule.v.size())
        throw std::invalid_argument("write_weights_csv: rule does not match the node set");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << method_name(rule.method) << ',' << rule.q << ',' << fmt_g17(rule.h) << ','
        << rule.seed << ',' << constraint_name(rule.constraint) << ','
        << fmt_g17(rule.residual_inf) << ',' << fmt_g17(rule.K_w) << ',' << fmt_g17(rule.K_v)
        << '\n';
    for (int i = 0; i < static_cast<int>(Y.size()); ++i) {
        out << "interior";
        for (int k = 0; k < D; ++k) out << ',' << fmt_g17(Y[i][k]);
        out << ',' << fmt_g17(rule.w[i]) << '\n';
    }
    for (int i = 0; i < static_cast<int>(nodes.boundary.size()); ++i) {
        out << "boundary";
        for (int k = 0; k < D; ++k) out << ',' << fmt_g17(nodes.boundary[i].point[k]);
        out << ',' << fmt_g17(rule.v[i]) << '\n';
    }
    if (!out) throw std::runtime_error("failed writing " + path);
}

template ConstraintSpec<2> make_constraint<2>(const Domain<2>&, ConstraintKind,
                                              std::optional<Pt<2>>);
template ConstraintSpec<3> make_constraint<3>(const Domain<3>&, ConstraintKind,
                                              std::optional<Pt<3>>);
template double fundamental_ghat<2>(const Pt<2>&, const Pt<2>&, const Pt<2>&);
template double fundamental_ghat<3>(const Pt<3>&, const Pt<3>&, const Pt<3>&);
template AssembledSystem build_system<2>(const SparseMatrix&, const SparseMatrix&,
                                         const ConstraintSpec<2>&, const std::vector<Pt<2>>&,
                                         const std::vector<BoundarySample<2>>&,
                                         const Domain<2>&);
template AssembledSystem build_system<3>(const SparseMatrix&, const SparseMatrix&,
                                         const ConstraintSpec<3>&, const std::vector<Pt<3>>&,
                                         const std::vector<BoundarySample<3>>&,
                                         const Domain<3>&);
template QuadratureRule compute_weights<2>(const Domain<2>&, const NodeSet<2>&,
                                           const WeightsOptions<2>&, const std::vector<Pt<2>>*);
template QuadratureRule compute_weights<3>(const Domain<3>&, const NodeSet<3>&,
                                           const WeightsOptions<3>&, const std::vector<Pt<3>>*);
template void write_weights_csv<2>(const std::string&, const QuadratureRule&,
                                   const NodeSet<2>&);
template void write_weights_csv<3>(const std::string&, const QuadratureRule&,
                                   const NodeSet<3>&);

}  // namespace mfq
