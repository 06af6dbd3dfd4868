#pragma once

// Internal dense kernels over concrete element types. Public matrices store
// exact rationals; the heavy routines convert to the cheapest exact
// representation for the ring at hand and back.

#include <cstdint>
#include <utility>
#include <vector>

#include "dtrace/matrix.hpp"

namespace dtrace::detail {

template <class T>
struct Dense {
    std::size_t rows = 0, cols = 0;
    std::vector<T> a;

    Dense() = default;
    Dense(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c) {}

    T& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

// Euclidean-ring policies. norm() orders pivot candidates, quot(a, b)
// returns q with norm(a - q b) < norm(b) (or a - q b = 0), unit_part(b)
// returns the unit u with b / u canonical.

struct IntegerPolicy {
    using T = mpz_class;
    using Norm = mpz_class;

    static T zero() { return 0; }
    static T one() { return 1; }
    static bool is_zero(const T& x) { return sgn(x) == 0; }
    static Norm norm(const T& x) { return abs(x); }
    static T quot(const T& a, const T& b)
    {
        T q;
        mpz_tdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
        return q;
    }
    static bool divides(const T& b, const T& a) { return mpz_divisible_p(a.get_mpz_t(), b.get_mpz_t()) != 0; }
    static void axpy(T& y, const T& q, const T& x) { y -= q * x; }  // y -= q x
    static void add(T& y, const T& x) { y += x; }
    static T mul(const T& a, const T& b) { return a * b; }
    static T unit_part(const T& b) { return sgn(b) < 0 ? T(-1) : T(1); }
    static T unit_inverse(const T& u) { return u; }
    static T from(const Scalar& s) { return s.get_num(); }
    static Scalar to(const T& x) { return Scalar(x); }
};

struct RationalPolicy {
    using T = mpq_class;
    using Norm = int;

    static T zero() { return 0; }
    static T one() { return 1; }
    static bool is_zero(const T& x) { return sgn(x) == 0; }
    static Norm norm(const T& x) { return is_zero(x) ? 0 : 1; }
    static T quot(const T& a, const T& b) { return a / b; }
    static bool divides(const T& b, const T&) { return !is_zero(b); }
    static void axpy(T& y, const T& q, const T& x) { y -= q * x; }
    static void add(T& y, const T& x) { y += x; }
    static T mul(const T& a, const T& b) { return a * b; }
    static T unit_part(const T& b) { return b; }
    static T unit_inverse(const T& u) { return 1 / u; }
    static T from(const Scalar& s) { return s; }
    static Scalar to(const T& x) { return x; }
};

/// Z/p^k (k = 1 gives the prime field). Elements are int64 residues.
struct LocalModPolicy {
    using T = std::int64_t;
    using Norm = int;

    std::int64_t m = 2, p = 2;
    int k = 1;

    T zero() const { return 0; }
    T one() const { return 1 % m; }
    bool is_zero(T x) const { return x == 0; }
    int valuation(T x) const
    {
        if (x == 0)
            return k;
        int v = 0;
        while (x % p == 0) {
            x /= p;
            ++v;
        }
        return v;
    }
    Norm norm(T x) const { return x == 0 ? 0 : 1 + valuation(x); }
    T reduce(__int128 x) const
    {
        __int128 r = x % m;
        if (r < 0)
            r += m;
        return static_cast<T>(r);
    }
    T mul(T a, T b) const { return reduce(static_cast<__int128>(a) * b); }
    T unit_inverse(T u) const
    {
        auto inv = inverse_mod(u, m);
        return inv ? *inv : 0;
    }
    // b = p^v u with u a unit; returns u.
    T unit_part(T b) const
    {
        int v = valuation(b);
        T pv = 1;
        for (int i = 0; i < v; ++i)
            pv *= p;
        // b / p^v as an integer representative is coprime to p.
        return (b / pv) % m;
    }
    T quot(T a, T b) const
    {
        int va = valuation(a), vb = valuation(b);
        if (a == 0)
            return 0;
        T ua = unit_part(a), ub = unit_part(b);
        T pw = 1;
        for (int i = vb; i < va; ++i)
            pw *= p;
        return mul(mul(pw % m, ua), unit_inverse(ub));
    }
    bool divides(T b, T a) const { return valuation(b) <= valuation(a); }
    void axpy(T& y, T q, T x) const { y = reduce(static_cast<__int128>(y) - static_cast<__int128>(q) * x); }
    void add(T& y, T x) const { y = reduce(static_cast<__int128>(y) + x); }
    T from(const Scalar& s) const { return reduce(s.get_num().get_si()); }
    Scalar to(T x) const { return Scalar(static_cast<long>(x)); }
};

template <class P>
Dense<typename P::T> to_dense(const P& pol, const Matrix& m)
{
    Dense<typename P::T> d(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            d(i, j) = pol.from(m(i, j));
    return d;
}

template <class P>
Matrix from_dense(const P& pol, const BaseRing& ring, const Dense<typename P::T>& d)
{
    Matrix m(ring, d.rows, d.cols);
    for (std::size_t i = 0; i < d.rows; ++i)
        for (std::size_t j = 0; j < d.cols; ++j)
            if (!pol.is_zero(d(i, j)))
                m.set(i, j, pol.to(d(i, j)));
    return m;
}

LocalModPolicy local_policy(const BaseRing& ring);

/// Runs f(policy) with the policy matching the ring. Z/m must be a prime power.
template <class F>
decltype(auto) with_policy(const BaseRing& ring, F&& f)
{
    switch (ring.kind()) {
    case RingKind::Integers:
        return f(IntegerPolicy{});
    case RingKind::Rationals:
        return f(RationalPolicy{});
    default:
        return f(local_policy(ring));
    }
}

struct SmithTracking {
    bool u = false, u_inv = false, v = false, v_inv = false;
};

template <class T>
struct SmithResult {
    Dense<T> s, u, u_inv, v, v_inv;
    std::size_t rank = 0;
};

/// Smith normal form by unimodular row/column operations.
/// Pivot rule: smallest norm over the active submatrix, ties in row-major order.
template <class P>
SmithResult<typename P::T> smith(const P& pol, Dense<typename P::T> a, SmithTracking track)
{
    using T = typename P::T;
    SmithResult<T> res;
    const std::size_t r = a.rows, c = a.cols;
    auto ident = [&](std::size_t n) {
        Dense<T> d(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                d(i, j) = i == j ? pol.one() : pol.zero();
        return d;
    };
    if (track.u)
        res.u = ident(r);
    if (track.u_inv)
        res.u_inv = ident(r);
    if (track.v)
        res.v = ident(c);
    if (track.v_inv)
        res.v_inv = ident(c);

    // row_i -= q row_t
    auto row_axpy = [&](std::size_t i, std::size_t t, const T& q, std::size_t from_col) {
        for (std::size_t j = from_col; j < c; ++j)
            if (!pol.is_zero(a(t, j)))
                pol.axpy(a(i, j), q, a(t, j));
        if (track.u)
            for (std::size_t j = 0; j < r; ++j)
                if (!pol.is_zero(res.u(t, j)))
                    pol.axpy(res.u(i, j), q, res.u(t, j));
        if (track.u_inv) {  // col_t += q col_i
            T mq = pol.zero();
            pol.axpy(mq, q, pol.one());
            for (std::size_t j = 0; j < r; ++j)
                if (!pol.is_zero(res.u_inv(j, i)))
                    pol.axpy(res.u_inv(j, t), mq, res.u_inv(j, i));
        }
    };
    // col_j -= q col_t
    auto col_axpy = [&](std::size_t j, std::size_t t, const T& q, std::size_t from_row) {
        for (std::size_t i = from_row; i < r; ++i)
            if (!pol.is_zero(a(i, t)))
                pol.axpy(a(i, j), q, a(i, t));
        if (track.v)
            for (std::size_t i = 0; i < c; ++i)
                if (!pol.is_zero(res.v(i, t)))
                    pol.axpy(res.v(i, j), q, res.v(i, t));
        if (track.v_inv) {  // row_t += q row_j
            T mq = pol.zero();
            pol.axpy(mq, q, pol.one());
            for (std::size_t i = 0; i < c; ++i)
                if (!pol.is_zero(res.v_inv(j, i)))
                    pol.axpy(res.v_inv(t, i), mq, res.v_inv(j, i));
        }
    };
    auto swap_rows = [&](std::size_t i, std::size_t t) {
        if (i == t)
            return;
        for (std::size_t j = 0; j < c; ++j)
            std::swap(a(i, j), a(t, j));
        if (track.u)
            for (std::size_t j = 0; j < r; ++j)
                std::swap(res.u(i, j), res.u(t, j));
        if (track.u_inv)
            for (std::size_t j = 0; j < r; ++j)
                std::swap(res.u_inv(j, i), res.u_inv(j, t));
    };
    auto swap_cols = [&](std::size_t j, std::size_t t) {
        if (j == t)
            return;
        for (std::size_t i = 0; i < r; ++i)
            std::swap(a(i, j), a(i, t));
        if (track.v)
            for (std::size_t i = 0; i < c; ++i)
                std::swap(res.v(i, j), res.v(i, t));
        if (track.v_inv)
            for (std::size_t i = 0; i < c; ++i)
                std::swap(res.v_inv(j, i), res.v_inv(t, i));
    };
    // row_t += row_i
    auto row_add = [&](std::size_t t, std::size_t i) {
        for (std::size_t j = 0; j < c; ++j)
            pol.add(a(t, j), a(i, j));
        if (track.u)
            for (std::size_t j = 0; j < r; ++j)
                pol.add(res.u(t, j), res.u(i, j));
        if (track.u_inv)  // col_i -= col_t
            for (std::size_t j = 0; j < r; ++j)
                pol.axpy(res.u_inv(j, i), pol.one(), res.u_inv(j, t));
    };
    auto scale_row = [&](std::size_t t, const T& unit) {
        // multiply row t by unit^{-1}
        T inv = pol.unit_inverse(unit);
        for (std::size_t j = 0; j < c; ++j)
            a(t, j) = pol.mul(a(t, j), inv);
        if (track.u)
            for (std::size_t j = 0; j < r; ++j)
                res.u(t, j) = pol.mul(res.u(t, j), inv);
        if (track.u_inv)
            for (std::size_t j = 0; j < r; ++j)
                res.u_inv(j, t) = pol.mul(res.u_inv(j, t), unit);
    };

    std::size_t t = 0;
    for (; t < r && t < c; ++t) {
        // global pivot
        bool found = false;
        std::size_t pi = 0, pj = 0;
        typename P::Norm best{};
        for (std::size_t i = t; i < r; ++i)
            for (std::size_t j = t; j < c; ++j)
                if (!pol.is_zero(a(i, j))) {
                    auto n = pol.norm(a(i, j));
                    if (!found || n < best) {
                        found = true;
                        best = n;
                        pi = i;
                        pj = j;
                    }
                }
        if (!found)
            break;
        swap_rows(pi, t);
        swap_cols(pj, t);
        for (;;) {
            bool clean = true;
            for (std::size_t i = t + 1; i < r; ++i)
                if (!pol.is_zero(a(i, t))) {
                    T q = pol.quot(a(i, t), a(t, t));
                    row_axpy(i, t, q, t);
                    if (!pol.is_zero(a(i, t)))
                        clean = false;
                }
            for (std::size_t j = t + 1; j < c; ++j)
                if (!pol.is_zero(a(t, j))) {
                    T q = pol.quot(a(t, j), a(t, t));
                    col_axpy(j, t, q, t);
                    if (!pol.is_zero(a(t, j)))
                        clean = false;
                }
            if (!clean) {
                // smallest remainder in row t / column t becomes the pivot
                bool in_row = false;
                std::size_t best_idx = t;
                typename P::Norm bn = pol.norm(a(t, t));
                for (std::size_t i = t + 1; i < r; ++i)
                    if (!pol.is_zero(a(i, t)) && pol.norm(a(i, t)) < bn) {
                        bn = pol.norm(a(i, t));
                        best_idx = i;
                        in_row = false;
                    }
                for (std::size_t j = t + 1; j < c; ++j)
                    if (!pol.is_zero(a(t, j)) && pol.norm(a(t, j)) < bn) {
                        bn = pol.norm(a(t, j));
                        best_idx = j;
                        in_row = true;
                    }
                if (best_idx != t) {
                    if (in_row)
                        swap_cols(best_idx, t);
                    else
                        swap_rows(best_idx, t);
                }
                continue;
            }
            // divisibility of the remaining block
            bool bad = false;
            for (std::size_t i = t + 1; i < r && !bad; ++i)
                for (std::size_t j = t + 1; j < c; ++j)
                    if (!pol.is_zero(a(i, j)) && !pol.divides(a(t, t), a(i, j))) {
                        row_add(t, i);
                        bad = true;
                        break;
                    }
            if (!bad)
                break;
        }
        scale_row(t, pol.unit_part(a(t, t)));
    }
    res.rank = t;
    res.s = std::move(a);
    return res;
}

}  // namespace dtrace::detail
