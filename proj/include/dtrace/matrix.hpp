#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "dtrace/ring.hpp"

namespace dtrace {

using Vector = std::vector<Scalar>;

/// Dense matrix over a base ring, row-major. Entries are kept reduced.
class Matrix {
public:
    Matrix() = default;
    Matrix(BaseRing ring, std::size_t rows, std::size_t cols)
        : ring_(ring), rows_(rows), cols_(cols), data_(rows * cols)
    {
    }

    static Matrix identity(BaseRing ring, std::size_t n);
    /// Builds from integer rows; convenient for tests and fixtures.
    static Matrix from_rows(BaseRing ring, const std::vector<std::vector<long>>& rows);

    const BaseRing& ring() const { return ring_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    const Scalar& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    void set(std::size_t i, std::size_t j, const Scalar& v) { data_[i * cols_ + j] = ring_.normalize(v); }
    void add_to(std::size_t i, std::size_t j, const Scalar& v)
    {
        Scalar& e = data_[i * cols_ + j];
        e = ring_.normalize(e + v);
    }

    Vector column(std::size_t j) const;
    Vector row(std::size_t i) const;
    Vector apply(const Vector& x) const;
    Matrix transpose() const;
    /// Rows [r0, r1) and all columns.
    Matrix row_block(std::size_t r0, std::size_t r1) const;
    Matrix col_block(std::size_t c0, std::size_t c1) const;
    bool is_zero() const;
    bool is_diagonal() const;

    friend Matrix operator*(const Matrix& a, const Matrix& b);
    friend Matrix operator+(const Matrix& a, const Matrix& b);
    friend Matrix operator-(const Matrix& a, const Matrix& b);
    friend bool operator==(const Matrix& a, const Matrix& b);
    friend bool operator!=(const Matrix& a, const Matrix& b) { return !(a == b); }

private:
    BaseRing ring_;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Scalar> data_;
};

/// Sparse coefficient vector (a chain): index -> nonzero coefficient.
class SparseVector {
public:
    using Terms = std::map<std::size_t, Scalar>;

    SparseVector() = default;

    static SparseVector basis(std::size_t index) { SparseVector v; v.terms_[index] = 1; return v; }
    static SparseVector from_dense(const Vector& x);

    void add(std::size_t index, const Scalar& coeff, const BaseRing& ring);
    void add(const SparseVector& other, const Scalar& coeff, const BaseRing& ring);
    const Terms& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    Scalar coeff(std::size_t index) const;
    Vector to_dense(std::size_t dim) const;

    friend bool operator==(const SparseVector& a, const SparseVector& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const SparseVector& a, const SparseVector& b) { return !(a == b); }

private:
    Terms terms_;
};

/// Column-sparse matrix used for structure maps between chain modules.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(BaseRing ring, std::size_t rows, std::size_t cols)
        : ring_(ring), rows_(rows), columns_(cols)
    {
    }

    static SparseMatrix identity(BaseRing ring, std::size_t n);
    static SparseMatrix from_dense(const Matrix& m);

    const BaseRing& ring() const { return ring_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return columns_.size(); }

    const SparseVector& column(std::size_t j) const { return columns_[j]; }
    void set_column(std::size_t j, SparseVector v) { columns_[j] = std::move(v); }
    void add(std::size_t i, std::size_t j, const Scalar& v) { columns_[j].add(i, v, ring_); }

    SparseVector apply(const SparseVector& x) const;
    Matrix to_dense() const;
    bool is_zero() const;
    std::size_t nonzeros() const;

    /// a * b (apply b first).
    friend SparseMatrix operator*(const SparseMatrix& a, const SparseMatrix& b);
    friend SparseMatrix operator+(const SparseMatrix& a, const SparseMatrix& b);
    friend SparseMatrix operator-(const SparseMatrix& a, const SparseMatrix& b);
    SparseMatrix scaled(const Scalar& c) const;
    friend bool operator==(const SparseMatrix& a, const SparseMatrix& b)
    {
        return a.ring_ == b.ring_ && a.rows_ == b.rows_ && a.columns_ == b.columns_;
    }
    friend bool operator!=(const SparseMatrix& a, const SparseMatrix& b) { return !(a == b); }

private:
    BaseRing ring_;
    std::size_t rows_ = 0;
    std::vector<SparseVector> columns_;
};

}  // namespace dtrace
