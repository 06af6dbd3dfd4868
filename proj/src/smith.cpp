#include "dtrace/smith.hpp"

#include "dtrace/errors.hpp"
#include "kernels.hpp"

namespace dtrace {

std::vector<Scalar> SmithForm::diagonal() const
{
    std::vector<Scalar> d;
    for (std::size_t i = 0; i < rank; ++i)
        d.push_back(s(i, i));
    return d;
}

SmithForm smith_normal_form(const Matrix& m)
{
    const BaseRing& ring = m.ring();
    return detail::with_policy(ring, [&](const auto& pol) {
        auto res = detail::smith(pol, detail::to_dense(pol, m), {true, true, true, true});
        SmithForm out;
        out.rank = res.rank;
        out.s = detail::from_dense(pol, ring, res.s);
        out.u = detail::from_dense(pol, ring, res.u);
        out.u_inv = detail::from_dense(pol, ring, res.u_inv);
        out.v = detail::from_dense(pol, ring, res.v);
        out.v_inv = detail::from_dense(pol, ring, res.v_inv);
        return out;
    });
}

namespace {

Matrix lift_to_integers(const Matrix& m)
{
    Matrix z(BaseRing::integers(), m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            z.set(i, j, m(i, j));
    return z;
}

MembershipResult solve_direct(const Matrix& m, const Vector& v)
{
    const BaseRing& ring = m.ring();
    return detail::with_policy(ring, [&](const auto& pol) -> MembershipResult {
        using Pol = std::decay_t<decltype(pol)>;
        auto res = detail::smith(pol, detail::to_dense(pol, m), {true, false, true, false});
        const std::size_t r = m.rows(), c = m.cols();
        std::vector<typename Pol::T> w(r, pol.zero());
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < r; ++j) {
                auto vj = pol.from(v[j]);
                if (!pol.is_zero(res.u(i, j)) && !pol.is_zero(vj))
                    pol.add(w[i], pol.mul(res.u(i, j), vj));
            }
        std::vector<typename Pol::T> y(c, pol.zero());
        for (std::size_t i = 0; i < r; ++i) {
            if (i < res.rank) {
                const auto& d = res.s(i, i);
                if (!pol.divides(d, w[i])) {
                    auto q = pol.quot(w[i], d);
                    auto rem = w[i];
                    pol.axpy(rem, q, d);
                    return NotInImage{i, pol.to(rem), pol.to(d)};
                }
                y[i] = pol.quot(w[i], d);
            } else if (!pol.is_zero(w[i])) {
                return NotInImage{i, pol.to(w[i]), Scalar(0)};
            }
        }
        Vector x(c);
        for (std::size_t i = 0; i < c; ++i) {
            auto acc = pol.zero();
            for (std::size_t j = 0; j < c; ++j)
                if (!pol.is_zero(res.v(i, j)) && !pol.is_zero(y[j]))
                    pol.add(acc, pol.mul(res.v(i, j), y[j]));
            x[i] = ring.normalize(pol.to(acc));
        }
        return x;
    });
}

}  // namespace

MembershipResult solve_membership(const Matrix& m, const Vector& v)
{
    if (v.size() != m.rows())
        throw DomainError("solve_membership: dimension mismatch");
    const BaseRing& ring = m.ring();
    if (!ring.is_finite() || ring.prime_power())
        return solve_direct(m, v);
    // Z/m for composite non-prime-power m: solve [M | m I] x = v over Z.
    const std::size_t r = m.rows(), c = m.cols();
    Matrix aug(BaseRing::integers(), r, c + r);
    Matrix lifted = lift_to_integers(m);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < c; ++j)
            aug.set(i, j, lifted(i, j));
        aug.set(i, c + i, Scalar(static_cast<long>(ring.modulus())));
    }
    Vector vz(r);
    for (std::size_t i = 0; i < r; ++i)
        vz[i] = ring.normalize(v[i]);
    auto res = solve_direct(aug, vz);
    if (auto* bad = std::get_if<NotInImage>(&res))
        return *bad;
    const auto& xz = std::get<Vector>(res);
    Vector x(c);
    for (std::size_t j = 0; j < c; ++j)
        x[j] = ring.normalize(xz[j]);
    return x;
}

std::size_t rank_over_field(const Matrix& m)
{
    if (!m.ring().is_field())
        throw DomainError("rank_over_field requires a field");
    return detail::with_policy(m.ring(), [&](const auto& pol) {
        return detail::smith(pol, detail::to_dense(pol, m), {}).rank;
    });
}

}  // namespace dtrace
