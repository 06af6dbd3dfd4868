#include "dtrace/matrix.hpp"

#include "dtrace/errors.hpp"
#include "kernels.hpp"

namespace dtrace {

namespace detail {

LocalModPolicy local_policy(const BaseRing& ring)
{
    auto pk = ring.prime_power();
    if (!pk)
        throw DomainError("coefficient ring " + ring.name() + " is not Z/p^k; unsupported here");
    LocalModPolicy pol;
    pol.m = ring.modulus();
    pol.p = pk->first;
    pol.k = pk->second;
    return pol;
}

}  // namespace detail

namespace {

void require_same_ring(const BaseRing& a, const BaseRing& b, const char* what)
{
    if (a != b)
        throw DomainError(std::string(what) + ": ring mismatch " + a.name() + " vs " + b.name());
}

template <class T, class Mul, class Add>
detail::Dense<T> dense_product(const detail::Dense<T>& x, const detail::Dense<T>& y, Mul mul, Add add)
{
    detail::Dense<T> z(x.rows, y.cols);
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t k = 0; k < x.cols; ++k) {
            const T& xik = x(i, k);
            if (xik == 0)
                continue;
            for (std::size_t j = 0; j < y.cols; ++j)
                if (y(k, j) != 0)
                    add(z(i, j), mul(xik, y(k, j)));
        }
    return z;
}

}  // namespace

Matrix Matrix::identity(BaseRing ring, std::size_t n)
{
    Matrix m(ring, n, n);
    for (std::size_t i = 0; i < n; ++i)
        m.set(i, i, 1);
    return m;
}

Matrix Matrix::from_rows(BaseRing ring, const std::vector<std::vector<long>>& rows)
{
    std::size_t c = rows.empty() ? 0 : rows[0].size();
    Matrix m(ring, rows.size(), c);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != c)
            throw DomainError("ragged matrix rows");
        for (std::size_t j = 0; j < c; ++j)
            m.set(i, j, rows[i][j]);
    }
    return m;
}

Vector Matrix::column(std::size_t j) const
{
    Vector v(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        v[i] = (*this)(i, j);
    return v;
}

Vector Matrix::row(std::size_t i) const
{
    return Vector(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                  data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
}

Vector Matrix::apply(const Vector& x) const
{
    if (x.size() != cols_)
        throw DomainError("matrix-vector dimension mismatch");
    Vector y(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
        Scalar s = 0;
        for (std::size_t j = 0; j < cols_; ++j)
            if (sgn((*this)(i, j)) != 0 && sgn(x[j]) != 0)
                s += (*this)(i, j) * x[j];
        y[i] = ring_.normalize(s);
    }
    return y;
}

Matrix Matrix::transpose() const
{
    Matrix t(ring_, cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            t.data_[j * rows_ + i] = (*this)(i, j);
    return t;
}

Matrix Matrix::row_block(std::size_t r0, std::size_t r1) const
{
    Matrix b(ring_, r1 - r0, cols_);
    for (std::size_t i = r0; i < r1; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            b.data_[(i - r0) * cols_ + j] = (*this)(i, j);
    return b;
}

Matrix Matrix::col_block(std::size_t c0, std::size_t c1) const
{
    Matrix b(ring_, rows_, c1 - c0);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = c0; j < c1; ++j)
            b.data_[i * (c1 - c0) + (j - c0)] = (*this)(i, j);
    return b;
}

bool Matrix::is_zero() const
{
    for (const auto& x : data_)
        if (sgn(x) != 0)
            return false;
    return true;
}

bool Matrix::is_diagonal() const
{
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            if (i != j && sgn((*this)(i, j)) != 0)
                return false;
    return true;
}

Matrix operator*(const Matrix& a, const Matrix& b)
{
    require_same_ring(a.ring_, b.ring_, "matrix product");
    if (a.cols_ != b.rows_)
        throw DomainError("matrix product dimension mismatch");
    const BaseRing& ring = a.ring_;
    if (ring.is_finite()) {
        const std::int64_t m = ring.modulus();
        auto conv = [&](const Matrix& x) {
            detail::Dense<std::int64_t> d(x.rows_, x.cols_);
            for (std::size_t i = 0; i < x.data_.size(); ++i)
                d.a[i] = x.data_[i].get_num().get_si();
            return d;
        };
        auto z = dense_product(
            conv(a), conv(b), [&](std::int64_t x, std::int64_t y) { return static_cast<std::int64_t>((static_cast<__int128>(x) * y) % m); },
            [&](std::int64_t& acc, std::int64_t v) { acc = (acc + v) % m; });
        Matrix out(ring, a.rows_, b.cols_);
        for (std::size_t i = 0; i < z.a.size(); ++i)
            out.data_[i] = Scalar(static_cast<long>(z.a[i]));
        return out;
    }
    if (ring.kind() == RingKind::Integers) {
        auto conv = [](const Matrix& x) {
            detail::Dense<mpz_class> d(x.rows_, x.cols_);
            for (std::size_t i = 0; i < x.data_.size(); ++i)
                d.a[i] = x.data_[i].get_num();
            return d;
        };
        auto z = dense_product(
            conv(a), conv(b), [](const mpz_class& x, const mpz_class& y) { return mpz_class(x * y); },
            [](mpz_class& acc, const mpz_class& v) { acc += v; });
        Matrix out(ring, a.rows_, b.cols_);
        for (std::size_t i = 0; i < z.a.size(); ++i)
            out.data_[i] = Scalar(z.a[i]);
        return out;
    }
    Matrix out(ring, a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
        for (std::size_t k = 0; k < a.cols_; ++k) {
            const Scalar& x = a(i, k);
            if (sgn(x) == 0)
                continue;
            for (std::size_t j = 0; j < b.cols_; ++j)
                if (sgn(b(k, j)) != 0)
                    out.data_[i * b.cols_ + j] += x * b(k, j);
        }
    return out;
}

Matrix operator+(const Matrix& a, const Matrix& b)
{
    require_same_ring(a.ring_, b.ring_, "matrix sum");
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
        throw DomainError("matrix sum dimension mismatch");
    Matrix c = a;
    for (std::size_t i = 0; i < c.data_.size(); ++i)
        c.data_[i] = a.ring_.normalize(a.data_[i] + b.data_[i]);
    return c;
}

Matrix operator-(const Matrix& a, const Matrix& b)
{
    require_same_ring(a.ring_, b.ring_, "matrix difference");
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
        throw DomainError("matrix difference dimension mismatch");
    Matrix c = a;
    for (std::size_t i = 0; i < c.data_.size(); ++i)
        c.data_[i] = a.ring_.normalize(a.data_[i] - b.data_[i]);
    return c;
}

bool operator==(const Matrix& a, const Matrix& b)
{
    return a.ring_ == b.ring_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
}

// ---------------------------------------------------------------------------

SparseVector SparseVector::from_dense(const Vector& x)
{
    SparseVector v;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (sgn(x[i]) != 0)
            v.terms_[i] = x[i];
    return v;
}

void SparseVector::add(std::size_t index, const Scalar& coeff, const BaseRing& ring)
{
    if (sgn(coeff) == 0)
        return;
    auto [it, inserted] = terms_.try_emplace(index, 0);
    it->second = ring.normalize(it->second + coeff);
    if (sgn(it->second) == 0)
        terms_.erase(it);
}

void SparseVector::add(const SparseVector& other, const Scalar& coeff, const BaseRing& ring)
{
    if (sgn(coeff) == 0)
        return;
    for (const auto& [i, c] : other.terms_)
        add(i, c * coeff, ring);
}

Scalar SparseVector::coeff(std::size_t index) const
{
    auto it = terms_.find(index);
    return it == terms_.end() ? Scalar(0) : it->second;
}

Vector SparseVector::to_dense(std::size_t dim) const
{
    Vector x(dim);
    for (const auto& [i, c] : terms_) {
        if (i >= dim)
            throw DomainError("sparse vector index out of range");
        x[i] = c;
    }
    return x;
}

SparseMatrix SparseMatrix::identity(BaseRing ring, std::size_t n)
{
    SparseMatrix m(ring, n, n);
    for (std::size_t i = 0; i < n; ++i)
        m.columns_[i] = SparseVector::basis(i);
    return m;
}

SparseMatrix SparseMatrix::from_dense(const Matrix& d)
{
    SparseMatrix m(d.ring(), d.rows(), d.cols());
    for (std::size_t j = 0; j < d.cols(); ++j)
        m.columns_[j] = SparseVector::from_dense(d.column(j));
    return m;
}

SparseVector SparseMatrix::apply(const SparseVector& x) const
{
    SparseVector y;
    for (const auto& [j, c] : x.terms()) {
        if (j >= columns_.size())
            throw DomainError("sparse apply: index out of range");
        y.add(columns_[j], c, ring_);
    }
    return y;
}

Matrix SparseMatrix::to_dense() const
{
    Matrix d(ring_, rows_, columns_.size());
    for (std::size_t j = 0; j < columns_.size(); ++j)
        for (const auto& [i, c] : columns_[j].terms())
            d.set(i, j, c);
    return d;
}

bool SparseMatrix::is_zero() const
{
    for (const auto& c : columns_)
        if (!c.empty())
            return false;
    return true;
}

std::size_t SparseMatrix::nonzeros() const
{
    std::size_t n = 0;
    for (const auto& c : columns_)
        n += c.size();
    return n;
}

SparseMatrix operator*(const SparseMatrix& a, const SparseMatrix& b)
{
    require_same_ring(a.ring_, b.ring_, "sparse product");
    if (a.cols() != b.rows_)
        throw DomainError("sparse product dimension mismatch");
    SparseMatrix c(a.ring_, a.rows_, b.cols());
    for (std::size_t j = 0; j < b.cols(); ++j)
        c.columns_[j] = a.apply(b.columns_[j]);
    return c;
}

SparseMatrix operator+(const SparseMatrix& a, const SparseMatrix& b)
{
    require_same_ring(a.ring_, b.ring_, "sparse sum");
    if (a.rows_ != b.rows_ || a.cols() != b.cols())
        throw DomainError("sparse sum dimension mismatch");
    SparseMatrix c = a;
    for (std::size_t j = 0; j < b.cols(); ++j)
        c.columns_[j].add(b.columns_[j], 1, a.ring_);
    return c;
}

SparseMatrix operator-(const SparseMatrix& a, const SparseMatrix& b)
{
    return a + b.scaled(-1);
}

SparseMatrix SparseMatrix::scaled(const Scalar& s) const
{
    SparseMatrix c(ring_, rows_, cols());
    for (std::size_t j = 0; j < cols(); ++j)
        c.columns_[j].add(columns_[j], s, ring_);
    return c;
}

}  // namespace dtrace
