#include "mfq/polyharmonic.hpp"

#include "mfq/solve.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mfq {

namespace {

double powi(double x, int n) {
    double r = 1.0;
    while (n-- > 0) r *= x;
    return r;
}

// r^(2m-1) from the squared distance, m >= 1.
double odd_power(double r2, int m) { return std::sqrt(r2) * powi(r2, m - 1); }

}  // namespace

long long binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

int stencil_count_L(int q, int d) { return 2 * static_cast<int>(binom(q - 1 + d, d)); }
int stencil_count_B(int q, int d) { return 2 * static_cast<int>(binom(q - 2 + d, d)); }

template <int D>
std::vector<std::array<int, D>> monomial_exponents(int order) {
    std::vector<std::array<int, D>> out;
    if constexpr (D == 2) {
        for (int a = 0; a < order; ++a)
            for (int b = 0; b < order - a; ++b) out.push_back({a, b});
    } else {
        for (int a = 0; a < order; ++a)
            for (int b = 0; b < order - a; ++b)
                for (int c = 0; c < order - a - b; ++c) out.push_back({a, b, c});
    }
    return out;
}

template <int D>
Eigen::MatrixXd polyharmonic_weights(const Pt<D>& center, const std::vector<Pt<D>>& stencil,
                                     int m, StencilFunctional fn) {
    const int n = static_cast<int>(stencil.size());
    const int min_m = (fn == StencilFunctional::Value) ? 1 : 2;
    if (m < min_m) throw std::invalid_argument("polyharmonic_weights: order too low");
    const int power = 2 * m - 1;
    const auto alphas = monomial_exponents<D>(m);
    const int mp = static_cast<int>(alphas.size());
    const int nm = n + mp;
    if (n < mp) throw std::runtime_error("polyharmonic_weights: stencil smaller than tail");

    double rho = 0.0;
    for (const auto& p : stencil) rho = std::max(rho, (p - center).norm());
    rho = std::max(rho, 1e-300);

    // Working in stencil-scaled coordinates keeps every block of the saddle
    // matrix O(1), so the pivot threshold measures unisolvency rather than
    // the h-dependent decay of the kernel. The weights are unscaled at the
    // end by the functional's derivative order.
    std::vector<Pt<D>> S;
    S.reserve(n);
    for (const auto& p : stencil) S.push_back((p - center) / rho);

    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nm, nm);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) {
            const double k = odd_power((S[i] - S[j]).squaredNorm(), m);
            M(i, j) = k;
            M(j, i) = k;
        }
    for (int j = 0; j < mp; ++j) {
        const auto& al = alphas[j];
        for (int i = 0; i < n; ++i) {
            double val = 1.0;
            for (int k = 0; k < D; ++k) val *= powi(S[i][k], al[k]);
            M(i, n + j) = val;
            M(n + j, i) = val;
        }
    }

    const int ncol = (fn == StencilFunctional::Partial) ? D : 1;
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(nm, ncol);
    for (int i = 0; i < n; ++i) {
        const double rr2 = S[i].squaredNorm();
        switch (fn) {
            case StencilFunctional::Value:
                rhs(i, 0) = odd_power(rr2, m);
                break;
            case StencilFunctional::Partial:
                for (int k = 0; k < D; ++k)
                    rhs(i, k) = power * odd_power(rr2, m - 1) * (-S[i][k]);
                break;
            case StencilFunctional::Laplacian:
                rhs(i, 0) = power * (power + D - 2) * odd_power(rr2, m - 1);
                break;
        }
    }
    for (int j = 0; j < mp; ++j) {
        const auto& al = alphas[j];
        int total = 0, maxe = 0;
        for (int k = 0; k < D; ++k) {
            total += al[k];
            maxe = std::max(maxe, al[k]);
        }
        switch (fn) {
            case StencilFunctional::Value:
                if (total == 0) rhs(n + j, 0) = 1.0;
                break;
            case StencilFunctional::Partial:
                if (total == 1)
                    for (int k = 0; k < D; ++k)
                        if (al[k] == 1) rhs(n + j, k) = 1.0;
                break;
            case StencilFunctional::Laplacian:
                if (total == 2 && maxe == 2) rhs(n + j, 0) = 2.0;
                break;
        }
    }

    if (!solve_sym_indefinite(M, rhs, 1e-12))
        throw std::runtime_error("polyharmonic_weights: singular stencil system (order " +
                                 std::to_string(m) + ", n " + std::to_string(n) + ")");
    const double unscale = (fn == StencilFunctional::Value) ? 1.0
                           : (fn == StencilFunctional::Partial) ? 1.0 / rho
                                                                : 1.0 / (rho * rho);
    return rhs.topRows(n) * unscale;
}

namespace {

template <int D>
std::vector<Pt<D>> gather(const KdTree<D>& tree, const std::vector<int>& idx) {
    std::vector<Pt<D>> pts;
    pts.reserve(idx.size());
    for (int j : idx) pts.push_back(tree.point(j));
    return pts;
}

[[noreturn]] void rethrow_with_row(const std::exception& e, const char* what, int i) {
    throw std::runtime_error(std::string(what) + " row " + std::to_string(i) + ": " + e.what());
}

}  // namespace

template <int D>
SparseMatrix assemble_L_div(const KdTree<D>& xtree, const std::vector<Pt<D>>& Y, int q) {
    const int nx = xtree.size();
    const int n_l = stencil_count_L(q, D);
    SparseMatrix L(static_cast<int>(Y.size()), D * nx);
    for (int i = 0; i < static_cast<int>(Y.size()); ++i) {
        const auto idx = xtree.knn(Y[i], n_l);
        Eigen::MatrixXd ww;
        try {
            ww = polyharmonic_weights<D>(Y[i], gather(xtree, idx), q, StencilFunctional::Partial);
        } catch (const std::exception& e) {
            rethrow_with_row(e, "gradient collocation", i);
        }
        for (int k = 0; k < D; ++k)
            for (int j = 0; j < static_cast<int>(idx.size()); ++j)
                L.add(i, k * nx + idx[j], ww(j, k));
    }
    L.finalize();
    return L;
}

template <int D>
SparseMatrix assemble_B_normal(const KdTree<D>& xtree,
                               const std::vector<BoundarySample<D>>& Z, int q) {
    const int nx = xtree.size();
    const int n_b = stencil_count_B(q, D);
    SparseMatrix B(static_cast<int>(Z.size()), D * nx);
    for (int i = 0; i < static_cast<int>(Z.size()); ++i) {
        const auto idx = xtree.knn(Z[i].point, n_b);
        Eigen::MatrixXd ww;
        try {
            ww = polyharmonic_weights<D>(Z[i].point, gather(xtree, idx), q - 1,
                                         StencilFunctional::Value);
        } catch (const std::exception& e) {
            rethrow_with_row(e, "normal trace", i);
        }
        for (int k = 0; k < D; ++k)
            for (int j = 0; j < static_cast<int>(idx.size()); ++j)
                B.add(i, k * nx + idx[j], Z[i].normal[k] * ww(j, 0));
    }
    B.finalize();
    return B;
}

template <int D>
SparseMatrix assemble_L_laplacian(const KdTree<D>& xtree, const std::vector<Pt<D>>& Y, int q) {
    const int nx = xtree.size();
    const int n_l = stencil_count_L(q, D);
    SparseMatrix L(static_cast<int>(Y.size()), nx);
    for (int i = 0; i < static_cast<int>(Y.size()); ++i) {
        const auto idx = xtree.knn(Y[i], n_l);
        Eigen::MatrixXd ww;
        try {
            ww = polyharmonic_weights<D>(Y[i], gather(xtree, idx), q,
                                         StencilFunctional::Laplacian);
        } catch (const std::exception& e) {
            rethrow_with_row(e, "laplacian collocation", i);
        }
        for (int j = 0; j < static_cast<int>(idx.size()); ++j) L.add(i, idx[j], ww(j, 0));
    }
    L.finalize();
    return L;
}

template <int D>
SparseMatrix assemble_B_dnu(const KdTree<D>& xtree, const std::vector<BoundarySample<D>>& Z,
                            int q) {
    const int nx = xtree.size();
    const int n_b = stencil_count_B(q, D);
    SparseMatrix B(static_cast<int>(Z.size()), nx);
    for (int i = 0; i < static_cast<int>(Z.size()); ++i) {
        const auto idx = xtree.knn(Z[i].point, n_b);
        Eigen::MatrixXd ww;
        try {
            ww = polyharmonic_weights<D>(Z[i].point, gather(xtree, idx), q - 1,
                                         StencilFunctional::Partial);
        } catch (const std::exception& e) {
            rethrow_with_row(e, "normal derivative", i);
        }
        for (int j = 0; j < static_cast<int>(idx.size()); ++j) {
            double v = 0.0;
            for (int k = 0; k < D; ++k) v += Z[i].normal[k] * ww(j, k);
            B.add(i, idx[j], v);
        }
    }
    B.finalize();
    return B;
}

template std::vector<std::array<int, 2>> monomial_exponents<2>(int);
template std::vector<std::array<int, 3>> monomial_exponents<3>(int);
template Eigen::MatrixXd polyharmonic_weights<2>(const Pt<2>&, const std::vector<Pt<2>>&, int,
                                                 StencilFunctional);
template Eigen::MatrixXd polyharmonic_weights<3>(const Pt<3>&, const std::vector<Pt<3>>&, int,
                                                 StencilFunctional);
template SparseMatrix assemble_L_div<2>(const KdTree<2>&, const std::vector<Pt<2>>&, int);
template SparseMatrix assemble_L_div<3>(const KdTree<3>&, const std::vector<Pt<3>>&, int);
template SparseMatrix assemble_B_normal<2>(const KdTree<2>&,
                                           const std::vector<BoundarySample<2>>&, int);
template SparseMatrix assemble_B_normal<3>(const KdTree<3>&,
                                           const std::vector<BoundarySample<3>>&, int);
template SparseMatrix assemble_L_laplacian<2>(const KdTree<2>&, const std::vector<Pt<2>>&, int);
template SparseMatrix assemble_L_laplacian<3>(const KdTree<3>&, const std::vector<Pt<3>>&, int);
template SparseMatrix assemble_B_dnu<2>(const KdTree<2>&, const std::vector<BoundarySample<2>>&,
                                        int);
template SparseMatrix assemble_B_dnu<3>(const KdTree<3>&, const std::vector<BoundarySample<3>>&,
                                        int);

}  // namespace mfq
