#include "mfq/solve.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>
#include <stdexcept>
#include <vector>

extern "C" {
void dgeqp3_(const int* m, const int* n, double* a, const int* lda, int* jpvt, double* tau,
             double* work, const int* lwork, int* info);
void dormqr_(const char* side, const char* trans, const int* m, const int* n, const int* k,
             const double* a, const int* lda, const double* tau, double* c, const int* ldc,
             double* work, const int* lwork, int* info);
void dtrtrs_(const char* uplo, const char* trans, const char* diag, const int* n, const int* nrhs,
             const double* a, const int* lda, double* b, const int* ldb, int* info);
void dsytrf_(const char* uplo, const int* n, double* a, const int* lda, int* ipiv, double* work,
             const int* lwork, int* info);
void dsytrs_(const char* uplo, const int* n, const int* nrhs, const double* a, const int* lda,
             const int* ipiv, double* b, const int* ldb, int* info);
}

namespace mfq {

MinNormSolveReport solve_min_norm_qr(const SparseMatrix& A, const Eigen::VectorXd& b,
                                     double rank_tol) {
    if (b.size() != A.rows()) throw std::invalid_argument("solve_min_norm_qr: dimension mismatch");
    if (!b.allFinite()) throw std::invalid_argument("solve_min_norm_qr: non-finite right-hand side");
    if (rank_tol <= 0.0) throw std::invalid_argument("solve_min_norm_qr: rank_tol must be positive");

    const int m = A.cols();  // rows of A^T
    const int n = A.rows();  // cols of A^T
    Eigen::MatrixXd at = A.dense_transpose();
    if (!at.allFinite()) throw std::invalid_argument("solve_min_norm_qr: non-finite matrix entries");

    MinNormSolveReport rep;
    rep.path = SolverPath::RankRevealingQR;
    rep.omega = 0.0;

    const int minmn = std::min(m, n);
    if (minmn == 0) {
        rep.x = Eigen::VectorXd::Zero(m);
        rep.numeric_rank = 0;
        rep.residual_inf = b.size() ? b.cwiseAbs().maxCoeff() : 0.0;
        return rep;
    }

    std::vector<int> jpvt(n, 0);
    std::vector<double> tau(minmn);
    int info = 0, lwork = -1;
    double wq = 0.0;
    dgeqp3_(&m, &n, at.data(), &m, jpvt.data(), tau.data(), &wq, &lwork, &info);
    lwork = static_cast<int>(wq);
    std::vector<double> work(lwork);
    dgeqp3_(&m, &n, at.data(), &m, jpvt.data(), tau.data(), work.data(), &lwork, &info);
    if (info != 0) throw std::runtime_error("solve_min_norm_qr: dgeqp3 failed");

    double max_piv = 0.0;
    for (int i = 0; i < minmn; ++i) max_piv = std::max(max_piv, std::abs(at(i, i)));
    int rank = 0;
    while (rank < minmn && std::abs(at(rank, rank)) > rank_tol * max_piv) ++rank;
    rep.numeric_rank = rank;

    Eigen::VectorXd xf = Eigen::VectorXd::Zero(m);
    if (rank > 0) {
        // Forward solve R(1:r,1:r)^T u = (P^T b)(1:r), then x = Q (u, 0).
        for (int i = 0; i < rank; ++i) xf[i] = b[jpvt[i] - 1];
        const char uplo = 'U', trans = 'T', diag = 'N';
        const int nrhs = 1;
        dtrtrs_(&uplo, &trans, &diag, &rank, &nrhs, at.data(), &m, xf.data(), &m, &info);
        if (info != 0) throw std::runtime_error("solve_min_norm_qr: triangular solve failed");

        const char side = 'L', notrans = 'N';
        const int one = 1;
        lwork = -1;
        dormqr_(&side, &notrans, &m, &one, &minmn, at.data(), &m, tau.data(), xf.data(), &m, &wq,
                &lwork, &info);
        lwork = static_cast<int>(wq);
        work.resize(lwork);
        dormqr_(&side, &notrans, &m, &one, &minmn, at.data(), &m, tau.data(), xf.data(), &m,
                work.data(), &lwork, &info);
        if (info != 0) throw std::runtime_error("solve_min_norm_qr: dormqr failed");
    }

    rep.x = xf;
    rep.residual_inf = (A.multiply(rep.x) - b).cwiseAbs().maxCoeff();
    return rep;
}

MinNormSolveReport solve_min_norm_chol(const SparseMatrix& A, const Eigen::VectorXd& b) {
    if (b.size() != A.rows()) throw std::invalid_argument("solve_min_norm_chol: dimension mismatch");
    if (!b.allFinite()) throw std::invalid_argument("solve_min_norm_chol: non-finite right-hand side");

    const Eigen::SparseMatrix<double> ae = A.to_eigen();
    Eigen::SparseMatrix<double> g = (ae * Eigen::SparseMatrix<double>(ae.transpose())).pruned();
    g.makeCompressed();

    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt;
    llt.analyzePattern(g);
    double omega = 4e-16;
    bool ok = false;
    for (int k = 0; k <= 40; ++k) {
        llt.setShift(omega);
        llt.factorize(g);
        if (llt.info() == Eigen::Success) {
            ok = true;
            break;
        }
        omega *= 2.0;
    }
    if (!ok) throw std::runtime_error("solve_min_norm_chol: factorization failed for all shifts");

    MinNormSolveReport rep;
    rep.path = SolverPath::RegularizedNormalEquations;
    rep.omega = omega;
    rep.numeric_rank = -1;
    const Eigen::VectorXd y = llt.solve(b);
    rep.x = A.multiply_transpose(y);
    rep.residual_inf = (A.multiply(rep.x) - b).cwiseAbs().maxCoeff();
    return rep;
}

bool solve_sym_indefinite(Eigen::MatrixXd& M, Eigen::MatrixXd& rhs, double pivot_tol) {
    const int n = static_cast<int>(M.rows());
    std::vector<int> ipiv(n);
    int info = 0, lwork = -1;
    double wq = 0.0;
    const char uplo = 'L';
    dsytrf_(&uplo, &n, M.data(), &n, ipiv.data(), &wq, &lwork, &info);
    lwork = static_cast<int>(wq);
    std::vector<double> work(lwork);
    dsytrf_(&uplo, &n, M.data(), &n, ipiv.data(), work.data(), &lwork, &info);
    if (info != 0) return false;

    // Magnitudes of the 1x1 and 2x2 diagonal blocks of D decide deficiency.
    double pmin = std::numeric_limits<double>::infinity(), pmax = 0.0;
    for (int i = 0; i < n; ++i) {
        double p;
        if (ipiv[i] > 0) {
            p = std::abs(M(i, i));
        } else {
            const double det =
                M(i, i) * M(i + 1, i + 1) - M(i + 1, i) * M(i + 1, i);
            p = std::sqrt(std::abs(det));
            ++i;
        }
        pmin = std::min(pmin, p);
        pmax = std::max(pmax, p);
    }
    if (!(pmin > pivot_tol * pmax)) return false;

    const int nrhs = static_cast<int>(rhs.cols());
    dsytrs_(&uplo, &n, &nrhs, M.data(), &n, ipiv.data(), rhs.data(), &n, &info);
    return info == 0;
}

}  // namespace mfq
