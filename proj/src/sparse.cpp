#include "mfq/sparse.hpp"

#include <algorithm>
#include <cstdio>

namespace mfq {

std::string fmt_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void SparseMatrix::add(int r, int c, double v) {
    if (finalized_) throw std::logic_error("SparseMatrix: add after finalize");
    if (r < 0 || r >= rows_ || c < 0 || c >= cols_)
        throw std::out_of_range("SparseMatrix: entry index out of bounds");
    buf_.push_back({r, c, v});
}

void SparseMatrix::finalize() {
    if (finalized_) throw std::logic_error("SparseMatrix: already finalized");
    std::sort(buf_.begin(), buf_.end(), [](const Entry& a, const Entry& b) {
        return a.r != b.r ? a.r < b.r : a.c < b.c;
    });
    indptr_.assign(rows_ + 1, 0);
    indices_.clear();
    values_.clear();
    std::size_t i = 0;
    for (int r = 0; r < rows_; ++r) {
        while (i < buf_.size() && buf_[i].r == r) {
            const int c = buf_[i].c;
            double v = 0.0;
            while (i < buf_.size() && buf_[i].r == r && buf_[i].c == c) v += buf_[i++].v;
            if (v != 0.0) {
                indices_.push_back(c);
                values_.push_back(v);
            }
        }
        indptr_[r + 1] = static_cast<int>(indices_.size());
    }
    buf_.clear();
    buf_.shrink_to_fit();
    finalized_ = true;
}

std::int64_t SparseMatrix::nnz() const {
    if (!finalized_) throw std::logic_error("SparseMatrix: nnz before finalize");
    return static_cast<std::int64_t>(values_.size());
}

Eigen::VectorXd SparseMatrix::multiply(const Eigen::VectorXd& x) const {
    if (!finalized_) throw std::logic_error("SparseMatrix: multiply before finalize");
    if (x.size() != cols_) throw std::invalid_argument("SparseMatrix: spmv dimension mismatch");
    Eigen::VectorXd y(rows_);
    for (int r = 0; r < rows_; ++r) {
        double s = 0.0;
        for (int k = indptr_[r]; k < indptr_[r + 1]; ++k) s += values_[k] * x[indices_[k]];
        y[r] = s;
    }
    return y;
}

Eigen::VectorXd SparseMatrix::multiply_transpose(const Eigen::VectorXd& x) const {
    if (!finalized_) throw std::logic_error("SparseMatrix: multiply before finalize");
    if (x.size() != rows_) throw std::invalid_argument("SparseMatrix: spmv dimension mismatch");
    Eigen::VectorXd y = Eigen::VectorXd::Zero(cols_);
    for (int r = 0; r < rows_; ++r)
        for (int k = indptr_[r]; k < indptr_[r + 1]; ++k) y[indices_[k]] += values_[k] * x[r];
    return y;
}

SparseMatrix SparseMatrix::prune_empty_rows(std::vector<int>& row_map) const {
    if (!finalized_) throw std::logic_error("SparseMatrix: prune before finalize");
    SparseMatrix out;
    out.cols_ = cols_;
    out.indptr_.push_back(0);
    for (int r = 0; r < rows_; ++r) {
        if (row_nnz(r) == 0) continue;
        row_map.push_back(r);
        for (int k = indptr_[r]; k < indptr_[r + 1]; ++k) {
            out.indices_.push_back(indices_[k]);
            out.values_.push_back(values_[k]);
        }
        out.indptr_.push_back(static_cast<int>(out.indices_.size()));
    }
    out.rows_ = static_cast<int>(out.indptr_.size()) - 1;
    out.finalized_ = true;
    return out;
}

Eigen::SparseMatrix<double> SparseMatrix::to_eigen() const {
    if (!finalized_) throw std::logic_error("SparseMatrix: export before finalize");
    Eigen::SparseMatrix<double> m(rows_, cols_);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(values_.size());
    for (int r = 0; r < rows_; ++r)
        for (int k = indptr_[r]; k < indptr_[r + 1]; ++k)
            trips.emplace_back(r, indices_[k], values_[k]);
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
}

Eigen::MatrixXd SparseMatrix::dense_transpose() const {
    if (!finalized_) throw std::logic_error("SparseMatrix: export before finalize");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
        for (int k = indptr_[r]; k < indptr_[r + 1]; ++k) m(indices_[k], r) = values_[k];
    return m;
}

}  // namespace mfq
