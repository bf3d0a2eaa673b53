#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace mfq {

// Triplet-buffered sparse matrix with a compressed row storage form after
// finalize(). Finalization sums duplicates, sorts entries within each row by
// column, and drops entries that are exactly zero.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(int rows, int cols) : rows_(rows), cols_(cols) {}

    void add(int r, int c, double v);
    void finalize();
    bool finalized() const { return finalized_; }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::int64_t nnz() const;

    // y = A x with a fixed summation order (CSR row-major), deterministic.
    Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;
    // y = A^T x, deterministic.
    Eigen::VectorXd multiply_transpose(const Eigen::VectorXd& x) const;

    // Row r as (column, value) spans into the compressed arrays.
    int row_nnz(int r) const { return indptr_[r + 1] - indptr_[r]; }
    const int* row_cols(int r) const { return indices_.data() + indptr_[r]; }
    const double* row_vals(int r) const { return values_.data() + indptr_[r]; }

    // Removes structurally empty rows; appends kept original row indices to
    // row_map. Requires finalized input, returns a finalized matrix.
    SparseMatrix prune_empty_rows(std::vector<int>& row_map) const;

    Eigen::SparseMatrix<double> to_eigen() const;
    // Dense A^T, column-major, for the orthogonal-factorization solver.
    Eigen::MatrixXd dense_transpose() const;

private:
    struct Entry {
        int r, c;
        double v;
    };

    int rows_ = 0, cols_ = 0;
    bool finalized_ = false;
    std::vector<Entry> buf_;
    std::vector<int> indptr_, indices_;
    std::vector<double> values_;
};

}  // namespace mfq
