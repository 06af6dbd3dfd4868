#include "dtrace/homology.hpp"

#include <algorithm>
#include <sstream>

#include "dtrace/smith.hpp"
#include "kernels.hpp"

namespace dtrace {

namespace {

std::string ring_symbol(const BaseRing& ring)
{
    switch (ring.kind()) {
    case RingKind::Integers:
        return "Z";
    case RingKind::Rationals:
        return "Q";
    case RingKind::PrimeField:
        return "F" + std::to_string(ring.modulus());
    case RingKind::IntegersMod:
        return "(Z/" + std::to_string(ring.modulus()) + ")";
    }
    return "?";
}

Matrix lift(const Matrix& m)
{
    Matrix z(BaseRing::integers(), m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (sgn(m(i, j)) != 0)
                z.set(i, j, m(i, j));
    return z;
}

}  // namespace

FPAbelianGroup::FPAbelianGroup(BaseRing ring, std::size_t free_rank, std::vector<Integer> torsion)
    : ring_(ring), free_rank_(free_rank), torsion_(std::move(torsion))
{
    for (std::size_t i = 0; i < torsion_.size(); ++i) {
        if (torsion_[i] < 2)
            throw DomainError("invariant factor must be >= 2");
        if (i > 0 && !mpz_divisible_p(torsion_[i].get_mpz_t(), torsion_[i - 1].get_mpz_t()))
            throw DomainError("invariant factors must form a divisibility chain");
    }
    if (ring_.is_field() && !torsion_.empty())
        throw DomainError("a module over a field has no torsion");
}

std::string FPAbelianGroup::to_string() const
{
    if (is_zero())
        return "0";
    std::vector<std::string> parts;
    const std::string sym = ring_symbol(ring_);
    if (free_rank_ == 1)
        parts.push_back(sym);
    else if (free_rank_ > 1)
        parts.push_back(sym + "^" + std::to_string(free_rank_));
    for (const auto& d : torsion_)
        parts.push_back("Z/" + d.get_str());
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i)
        out += (i ? " + " : "") + parts[i];
    return out;
}

FPAbelianGroup FPAbelianGroup::parse(const BaseRing& ring, const std::string& text)
{
    if (text == "0")
        return FPAbelianGroup(ring, 0);
    const std::string sym = ring_symbol(ring);
    std::size_t free_rank = 0;
    std::vector<Integer> torsion;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find(" + ", pos);
        std::string part = text.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
        if (part == sym) {
            free_rank += 1;
        } else if (part.rfind(sym + "^", 0) == 0) {
            std::string n = part.substr(sym.size() + 1);
            if (n.empty() || n.find_first_not_of("0123456789") != std::string::npos)
                throw ParseError("bad group term '" + part + "'");
            free_rank += std::stoul(n);
        } else if (part.rfind("Z/", 0) == 0) {
            std::string n = part.substr(2);
            if (n.empty() || n.find_first_not_of("0123456789") != std::string::npos)
                throw ParseError("bad group term '" + part + "'");
            torsion.emplace_back(n);
        } else {
            throw ParseError("bad group term '" + part + "' for ring " + ring.name());
        }
        if (end == std::string::npos)
            break;
        pos = end + 3;
    }
    try {
        return FPAbelianGroup(ring, free_rank, std::move(torsion));
    } catch (const DomainError& e) {
        throw ParseError(e.what());
    }
}

// ---------------------------------------------------------------------------

bool HomologyGroup::is_cycle(const Vector& z) const
{
    if (z.size() != chain_rank_)
        return false;
    for (const auto& x : outgoing_.apply(z))
        if (sgn(x) != 0)
            return false;
    return true;
}

Vector HomologyGroup::coordinates(const Vector& z) const
{
    if (!is_cycle(z))
        throw DomainError("not a cycle");
    const BaseRing& work = pre_.ring();
    Vector zz(z.size());
    for (std::size_t i = 0; i < z.size(); ++i)
        zz[i] = work.normalize(z[i]);
    Vector y = pre_.apply(zz);
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (divisors_[i] != 1) {
            Scalar q = y[i] / divisors_[i];
            if (q.get_den() != 1)
                throw InvariantBreach("cycle outside the cycle lattice");
            y[i] = q;
        }
    }
    Vector w = change_.apply(y);
    Vector coords;
    const BaseRing& ring = group_.ring();
    for (std::size_t g = 0; g < kept_.size(); ++g) {
        Scalar c = w[kept_[g]];
        if (orders_[g] != 0) {
            Integer r = c.get_num() % orders_[g];
            if (r < 0)
                r += orders_[g];
            coords.push_back(Scalar(r));
        } else {
            coords.push_back(ring.normalize(c));
        }
    }
    return coords;
}

bool HomologyGroup::is_boundary(const Vector& z) const
{
    for (const auto& c : coordinates(z))
        if (sgn(c) != 0)
            return false;
    return true;
}

namespace {

// Z, Q and prime fields: kernel basis from the column transform of d_out.
void euclidean_homology(const Matrix& d_out, const Matrix& d_in, std::vector<Vector>& gens,
                        std::vector<Integer>& orders, FPAbelianGroup& group, Matrix& pre, Matrix& change,
                        std::vector<std::size_t>& kept)
{
    const BaseRing& ring = d_out.ring();
    const std::size_t c = d_out.cols();
    detail::with_policy(ring, [&](const auto& pol) {
        auto s_out = detail::smith(pol, detail::to_dense(pol, d_out), {false, false, true, true});
        const std::size_t r = s_out.rank;
        const std::size_t k = c - r;
        Matrix v = detail::from_dense(pol, ring, s_out.v);
        Matrix v_inv = detail::from_dense(pol, ring, s_out.v_inv);
        Matrix kernel = v.col_block(r, c);
        pre = v_inv.row_block(r, c);
        Matrix q = pre * d_in;
        auto s_in = detail::smith(pol, detail::to_dense(pol, q), {true, true, false, false});
        change = detail::from_dense(pol, ring, s_in.u);
        Matrix u_inv = detail::from_dense(pol, ring, s_in.u_inv);
        Matrix basis = kernel * u_inv;
        std::vector<Integer> torsion;
        for (std::size_t i = 0; i < k; ++i) {
            if (i < s_in.rank) {
                Scalar d = pol.to(s_in.s(i, i));
                if (ring.is_unit(d))
                    continue;
                torsion.push_back(d.get_num());
                orders.push_back(d.get_num());
            } else {
                orders.push_back(0);
            }
            kept.push_back(i);
            gens.push_back(basis.column(i));
        }
        std::size_t free = k - std::min(k, s_in.rank);
        group = FPAbelianGroup(ring, free, torsion);
    });
}

// Z/p^k with k >= 2: cycles form the lattice {x : d_out x = 0 mod m} and
// boundaries im d_in + m Z^c; the quotient is computed over Z.
void lattice_homology(const Matrix& d_out, const Matrix& d_in, std::vector<Vector>& gens,
                      std::vector<Integer>& orders, FPAbelianGroup& group, Matrix& pre,
                      std::vector<Scalar>& divisors, Matrix& change, std::vector<std::size_t>& kept)
{
    const BaseRing& ring = d_out.ring();
    const BaseRing zz = BaseRing::integers();
    const Integer m = static_cast<long>(ring.modulus());
    const std::size_t a = d_out.rows(), c = d_out.cols(), b = d_in.cols();
    detail::IntegerPolicy pol;

    Matrix aug(zz, a, c + a);
    Matrix lo = lift(d_out);
    for (std::size_t i = 0; i < a; ++i) {
        for (std::size_t j = 0; j < c; ++j)
            aug.set(i, j, lo(i, j));
        aug.set(i, c + i, Scalar(m));
    }
    auto s_aug = detail::smith(pol, detail::to_dense(pol, aug), {false, false, true, false});
    Matrix v = detail::from_dense(pol, zz, s_aug.v);
    // kernel columns rank.. of V projected to the first c coordinates
    Matrix basis(zz, c, c + a - s_aug.rank);
    for (std::size_t j = s_aug.rank; j < c + a; ++j)
        for (std::size_t i = 0; i < c; ++i)
            basis.set(i, j - s_aug.rank, v(i, j));
    if (basis.cols() != c)
        throw InvariantBreach("cycle lattice has unexpected rank");

    auto s_b = detail::smith(pol, detail::to_dense(pol, basis), {true, false, true, false});
    Matrix ub = detail::from_dense(pol, zz, s_b.u);
    Matrix vb = detail::from_dense(pol, zz, s_b.v);
    if (s_b.rank != c)
        throw InvariantBreach("cycle lattice basis is degenerate");
    pre = ub;
    divisors.assign(c, 1);
    for (std::size_t i = 0; i < c; ++i)
        divisors[i] = pol.to(s_b.s(i, i));

    Matrix bnd(zz, c, b + c);
    Matrix li = lift(d_in);
    for (std::size_t i = 0; i < c; ++i) {
        for (std::size_t j = 0; j < b; ++j)
            bnd.set(i, j, li(i, j));
        bnd.set(i, b + i, Scalar(m));
    }
    // coordinates of boundary generators in the lattice basis
    Matrix t = ub * bnd;
    for (std::size_t i = 0; i < c; ++i)
        for (std::size_t j = 0; j < b + c; ++j) {
            Scalar q = t(i, j) / divisors[i];
            if (q.get_den() != 1)
                throw InvariantBreach("boundary outside cycle lattice");
            t.set(i, j, q);
        }
    Matrix y = vb * t;
    auto s_y = detail::smith(pol, detail::to_dense(pol, y), {true, true, false, false});
    Matrix uy = detail::from_dense(pol, zz, s_y.u);
    Matrix uy_inv = detail::from_dense(pol, zz, s_y.u_inv);
    change = uy * vb;
    Matrix gens_z = basis * uy_inv;
    std::size_t free = 0;
    std::vector<Integer> torsion;
    for (std::size_t i = 0; i < c; ++i) {
        Integer d = pol.to(s_y.s(i, i)).get_num();
        if (d == 1)
            continue;
        if (d == m) {
            ++free;
            orders.push_back(0);
        } else {
            torsion.push_back(d);
            orders.push_back(d);
        }
        kept.push_back(i);
        Vector g(c);
        for (std::size_t r = 0; r < c; ++r)
            g[r] = ring.normalize(gens_z(r, i));
        gens.push_back(std::move(g));
    }
    group = FPAbelianGroup(ring, free, torsion);
}

}  // namespace

HomologyGroup homology_from_differentials(const Matrix& d_out, const Matrix& d_in)
{
    if (d_out.ring() != d_in.ring())
        throw DomainError("homology: ring mismatch");
    if (d_out.cols() != d_in.rows())
        throw DomainError("homology: differentials are not composable");
    const BaseRing& ring = d_out.ring();
    if (!ring.supports_homology())
        throw DomainError("homology over " + ring.name() + " is not supported (need Z, Q, a field or Z/p^k)");
    HomologyGroup h;
    h.chain_rank_ = d_out.cols();
    h.outgoing_ = d_out;
    if (!(d_out * d_in).is_zero())
        throw ValidationError("d_n d_{n+1} != 0");
    const bool lattice = ring.is_finite() && !ring.is_field();
    if (lattice) {
        lattice_homology(d_out, d_in, h.generators_, h.orders_, h.group_, h.pre_, h.divisors_, h.change_, h.kept_);
    } else {
        euclidean_homology(d_out, d_in, h.generators_, h.orders_, h.group_, h.pre_, h.change_, h.kept_);
        h.divisors_.assign(h.pre_.rows(), 1);
    }
    return h;
}

// ---------------------------------------------------------------------------

ChainComplex::ChainComplex(BaseRing ring, std::vector<std::size_t> ranks, std::vector<Matrix> differentials)
    : ring_(ring), ranks_(std::move(ranks))
{
    if (ranks_.empty())
        throw DomainError("chain complex needs at least degree 0");
    if (differentials.size() != ranks_.size() - 1)
        throw DomainError("chain complex: expected one differential per positive degree");
    differentials_.reserve(ranks_.size());
    differentials_.emplace_back(ring_, 0, ranks_[0]);
    for (auto& d : differentials)
        differentials_.push_back(std::move(d));
}

ValidationReport ChainComplex::validate() const
{
    ValidationReport report;
    for (std::size_t n = 0; n < differentials_.size(); ++n) {
        const Matrix& d = differentials_[n];
        if (d.ring() != ring_)
            report.fail("d_" + std::to_string(n) + " has ring " + d.ring().name());
        if (d.cols() != ranks_[n] || (n > 0 && d.rows() != ranks_[n - 1]))
            report.fail("d_" + std::to_string(n) + " has wrong shape");
    }
    if (!report.ok())
        return report;
    for (std::size_t n = 1; n + 1 < differentials_.size(); ++n)
        if (!(differentials_[n] * differentials_[n + 1]).is_zero())
            report.fail("d_" + std::to_string(n) + " d_" + std::to_string(n + 1) + " != 0");
    return report;
}

HomologyGroup ChainComplex::homology(std::size_t n) const
{
    if (n >= top_degree())
        throw DomainError("homology degree " + std::to_string(n) + " needs d_" + std::to_string(n + 1) +
                          "; complex stops at degree " + std::to_string(top_degree()));
    return homology_from_differentials(differentials_[n], differentials_[n + 1]);
}

}  // namespace dtrace
