#include "dtrace/hochschild.hpp"

#include <limits>

#include "dtrace/smith.hpp"

namespace dtrace {

std::size_t tensor_index(const std::vector<std::size_t>& a, std::size_t rank)
{
    std::size_t idx = 0;
    for (std::size_t x : a)
        idx = idx * rank + x;
    return idx;
}

std::vector<std::size_t> tensor_digits(std::size_t index, std::size_t rank, std::size_t q)
{
    std::vector<std::size_t> a(q + 1);
    for (std::size_t i = q + 1; i-- > 0;) {
        a[i] = index % rank;
        index /= rank;
    }
    return a;
}

std::size_t tensor_rank(std::size_t rank, std::size_t q, std::size_t cap)
{
    std::size_t n = 1;
    for (std::size_t i = 0; i <= q; ++i) {
        if (rank != 0 && n > cap / rank)
            throw CapExceeded("level " + std::to_string(q) + " has more than " + std::to_string(cap) +
                              " basis tensors");
        n *= rank;
    }
    return n;
}

namespace {

Scalar sign(std::size_t k)
{
    return k % 2 ? Scalar(-1) : Scalar(1);
}

std::vector<std::pair<std::size_t, Scalar>> terms_of(const Vector& v)
{
    std::vector<std::pair<std::size_t, Scalar>> t;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (sgn(v[i]) != 0)
            t.emplace_back(i, v[i]);
    return t;
}

// Builds a level map column by column from a rule on digit tuples.
template <class Rule>
SparseMatrix level_map(const BaseRing& base, std::size_t rows, std::size_t cols, std::size_t r, std::size_t q,
                       Rule rule)
{
    SparseMatrix m(base, rows, cols);
    for (std::size_t j = 0; j < cols; ++j) {
        SparseVector col;
        rule(tensor_digits(j, r, q), col);
        m.set_column(j, std::move(col));
    }
    return m;
}

SparseMatrix power(const SparseMatrix& t, std::size_t k)
{
    SparseMatrix out = SparseMatrix::identity(t.ring(), t.cols());
    for (std::size_t i = 0; i < k; ++i)
        out = t * out;
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------

CyclicModule::CyclicModule(Algebra a, std::size_t max_degree, std::size_t cap) : algebra_(std::move(a))
{
    const std::size_t r = algebra_.rank();
    const std::size_t top = max_degree + 1;
    tensor_rank(r, top, cap);
    const BaseRing& base = algebra_.base();
    const auto unit = terms_of(algebra_.unit());

    faces_.resize(top + 1);
    degeneracies_.resize(top + 1);
    cyclic_.resize(top + 1);
    for (std::size_t q = 0; q <= top; ++q) {
        const std::size_t cols = rank(q);
        if (q >= 1) {
            for (std::size_t i = 0; i <= q; ++i)
                faces_[q].push_back(level_map(base, rank(q - 1), cols, r, q, [&](const auto& d, SparseVector& col) {
                    std::vector<std::size_t> out;
                    out.reserve(q);
                    if (i < q) {
                        for (const auto& [k, c] : algebra_.product(d[i], d[i + 1]).terms()) {
                            out.assign(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(i));
                            out.push_back(k);
                            out.insert(out.end(), d.begin() + static_cast<std::ptrdiff_t>(i + 2), d.end());
                            col.add(tensor_index(out, r), c, base);
                        }
                    } else {
                        for (const auto& [k, c] : algebra_.product(d[q], d[0]).terms()) {
                            out.assign(1, k);
                            out.insert(out.end(), d.begin() + 1, d.begin() + static_cast<std::ptrdiff_t>(q));
                            col.add(tensor_index(out, r), c, base);
                        }
                    }
                }));
        }
        if (q + 1 <= top) {
            for (std::size_t i = 0; i <= q; ++i)
                degeneracies_[q].push_back(
                    level_map(base, rank(q + 1), cols, r, q, [&](const auto& d, SparseVector& col) {
                        for (const auto& [k, c] : unit) {
                            std::vector<std::size_t> out(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(i + 1));
                            out.push_back(k);
                            out.insert(out.end(), d.begin() + static_cast<std::ptrdiff_t>(i + 1), d.end());
                            col.add(tensor_index(out, r), c, base);
                        }
                    }));
        }
        cyclic_[q] = level_map(base, cols, cols, r, q, [&](const auto& d, SparseVector& col) {
            std::vector<std::size_t> out;
            out.push_back(d[q]);
            out.insert(out.end(), d.begin(), d.begin() + static_cast<std::ptrdiff_t>(q));
            col.add(tensor_index(out, r), 1, base);
        });
    }
}

std::size_t CyclicModule::rank(std::size_t q) const
{
    return tensor_rank(algebra_.rank(), q, std::numeric_limits<std::size_t>::max());
}

SparseMatrix CyclicModule::hochschild_boundary(std::size_t q) const
{
    if (q == 0 || q > top_level())
        throw DomainError("hochschild boundary needs 1 <= q <= top level");
    SparseMatrix b(algebra_.base(), rank(q - 1), rank(q));
    for (std::size_t i = 0; i <= q; ++i)
        b = b + face(q, i).scaled(sign(i));
    return b;
}

SparseMatrix CyclicModule::connes_b(std::size_t q) const
{
    if (q + 1 > top_level())
        throw DomainError("connes_B needs level q + 1 <= top level");
    const BaseRing& base = algebra_.base();
    const std::size_t r = algebra_.rank();
    SparseMatrix tq = cyclic(q).scaled(sign(q));
    SparseMatrix norm(base, rank(q), rank(q));
    SparseMatrix tp = SparseMatrix::identity(base, rank(q));
    for (std::size_t i = 0; i <= q; ++i) {
        norm = norm + tp;
        tp = tq * tp;
    }
    const auto unit = terms_of(algebra_.unit());
    SparseMatrix extra = level_map(base, rank(q + 1), rank(q), r, q, [&](const auto& d, SparseVector& col) {
        for (const auto& [k, c] : unit) {
            std::vector<std::size_t> out{k};
            out.insert(out.end(), d.begin(), d.end());
            col.add(tensor_index(out, r), c, base);
        }
    });
    SparseMatrix one_minus_t = SparseMatrix::identity(base, rank(q + 1)) - cyclic(q + 1).scaled(sign(q + 1));
    return one_minus_t * (extra * norm);
}

ValidationReport CyclicModule::validate() const
{
    ValidationReport rep;
    const std::size_t top = top_level();
    const BaseRing& base = algebra_.base();
    auto tag = [](const char* what, std::size_t q, std::size_t i, std::size_t j) {
        return std::string(what) + " at level " + std::to_string(q) + " (i=" + std::to_string(i) +
               ", j=" + std::to_string(j) + ")";
    };
    for (std::size_t q = 2; q <= top; ++q)
        for (std::size_t j = 1; j <= q; ++j)
            for (std::size_t i = 0; i < j; ++i)
                if (face(q - 1, i) * face(q, j) != face(q - 1, j - 1) * face(q, i))
                    rep.fail(tag("d_i d_j != d_{j-1} d_i", q, i, j));
    for (std::size_t q = 0; q + 2 <= top; ++q)
        for (std::size_t j = 0; j <= q; ++j)
            for (std::size_t i = 0; i <= j; ++i)
                if (degeneracy(q + 1, i) * degeneracy(q, j) != degeneracy(q + 1, j + 1) * degeneracy(q, i))
                    rep.fail(tag("s_i s_j != s_{j+1} s_i", q, i, j));
    for (std::size_t q = 0; q + 1 <= top; ++q) {
        const SparseMatrix id = SparseMatrix::identity(base, rank(q));
        for (std::size_t j = 0; j <= q; ++j)
            for (std::size_t i = 0; i <= q + 1; ++i) {
                SparseMatrix lhs = face(q + 1, i) * degeneracy(q, j);
                bool ok;
                if (i < j)
                    ok = lhs == degeneracy(q - 1, j - 1) * face(q, i);
                else if (i == j || i == j + 1)
                    ok = lhs == id;
                else
                    ok = lhs == degeneracy(q - 1, j) * face(q, i - 1);
                if (!ok)
                    rep.fail(tag("face/degeneracy identity", q, i, j));
            }
    }
    for (std::size_t q = 0; q <= top; ++q) {
        if (power(cyclic(q), q + 1) != SparseMatrix::identity(base, rank(q)))
            rep.fail("t^{q+1} != id at level " + std::to_string(q));
        if (q >= 1) {
            if (face(q, 0) * cyclic(q) != face(q, q))
                rep.fail("d_0 t != d_q at level " + std::to_string(q));
            for (std::size_t i = 1; i <= q; ++i)
                if (face(q, i) * cyclic(q) != cyclic(q - 1) * face(q, i - 1))
                    rep.fail(tag("d_i t != t d_{i-1}", q, i, i - 1));
        }
        if (q + 1 <= top) {
            if (degeneracy(q, 0) * cyclic(q) != cyclic(q + 1) * cyclic(q + 1) * degeneracy(q, q))
                rep.fail("s_0 t != t^2 s_q at level " + std::to_string(q));
            for (std::size_t i = 1; i <= q; ++i)
                if (degeneracy(q, i) * cyclic(q) != cyclic(q + 1) * degeneracy(q, i - 1))
                    rep.fail(tag("s_i t != t s_{i-1}", q, i, i - 1));
        }
    }
    return rep;
}

ChainComplex hochschild_complex(const CyclicModule& c, bool normalized)
{
    const std::size_t top = c.top_level();
    if (normalized)
        return NormalizedComplex(c.algebra()).complex(top);
    std::vector<std::size_t> ranks;
    std::vector<Matrix> diffs;
    for (std::size_t q = 0; q <= top; ++q) {
        ranks.push_back(c.rank(q));
        if (q >= 1)
            diffs.push_back(c.hochschild_boundary(q).to_dense());
    }
    return ChainComplex(c.algebra().base(), std::move(ranks), std::move(diffs));
}

// ---------------------------------------------------------------------------

NormalizedComplex::NormalizedComplex(Algebra a, std::size_t cap) : algebra_(std::move(a)), cap_(cap)
{
    const BaseRing& base = algebra_.base();
    const std::size_t r = algebra_.rank();
    const Vector& u = algebra_.unit();
    std::optional<std::size_t> pivot;
    for (std::size_t i = 0; i < r && !pivot; ++i)
        if (u[i] == 1)
            pivot = i;
    for (std::size_t i = 0; i < r && !pivot; ++i)
        if (sgn(u[i]) != 0 && base.is_unit(u[i]))
            pivot = i;
    std::vector<std::string> names{"1"};
    change_ = Matrix(base, r, r);
    change_inv_ = Matrix(base, r, r);
    if (pivot) {
        const std::size_t p = *pivot;
        const Scalar inv = *base.inverse(u[p]);
        for (std::size_t i = 0; i < r; ++i)
            change_.set(i, 0, u[i]);
        change_inv_.set(0, p, inv);
        std::size_t k = 1;
        for (std::size_t j = 0; j < r; ++j) {
            if (j == p)
                continue;
            names.push_back(algebra_.names()[j]);
            change_.set(j, k, 1);
            // y_k = x_j - u_j y_0
            change_inv_.set(k, j, 1);
            change_inv_.set(k, p, base.neg(base.mul(u[j], inv)));
            ++k;
        }
    } else {
        Matrix col(base, r, 1);
        for (std::size_t i = 0; i < r; ++i)
            col.set(i, 0, u[i]);
        SmithForm f = smith_normal_form(col);
        if (f.rank != 1 || !base.is_unit(f.s(0, 0)))
            throw DomainError("unit of the algebra is not part of a basis");
        const Scalar c = base.mul(f.s(0, 0), f.v_inv(0, 0));
        const Scalar c_inv = *base.inverse(c);
        change_ = f.u_inv;
        change_inv_ = f.u;
        for (std::size_t i = 0; i < r; ++i) {
            change_.set(i, 0, base.mul(change_(i, 0), c));
            change_inv_.set(0, i, base.mul(change_inv_(0, i), c_inv));
        }
        for (std::size_t k = 1; k < r; ++k)
            names.push_back("f" + std::to_string(k));
    }
    if (change_ * change_inv_ != Matrix::identity(base, r))
        throw InvariantBreach("unit-adapted basis change is not invertible");
    std::vector<SparseVector> products(r * r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) {
            Vector prod = algebra_.multiply(change_.column(i), change_.column(j));
            products[i * r + j] = SparseVector::from_dense(change_inv_.apply(prod));
        }
    Vector unit(r);
    unit[0] = 1;
    adapted_ = Algebra(base, std::move(names), std::move(unit), std::move(products));
}

std::size_t NormalizedComplex::rank(std::size_t q) const
{
    const std::size_t r = algebra_.rank();
    std::size_t n = r;
    for (std::size_t i = 0; i < q; ++i) {
        if (r > 1 && n > cap_ / (r - 1))
            throw CapExceeded("normalized level " + std::to_string(q) + " exceeds " + std::to_string(cap_));
        n *= r - 1;
    }
    return n;
}

std::size_t NormalizedComplex::index(const std::vector<std::size_t>& a) const
{
    const std::size_t m = algebra_.rank() - 1;
    std::size_t idx = a[0];
    for (std::size_t i = 1; i < a.size(); ++i) {
        if (a[i] == 0)
            throw DomainError("degenerate tuple has no normalized index");
        idx = idx * m + (a[i] - 1);
    }
    return idx;
}

std::vector<std::size_t> NormalizedComplex::tuple(std::size_t q, std::size_t index) const
{
    const std::size_t m = algebra_.rank() - 1;
    std::vector<std::size_t> a(q + 1);
    for (std::size_t i = q; i >= 1; --i) {
        a[i] = index % m + 1;
        index /= m;
    }
    a[0] = index;
    return a;
}

SparseMatrix NormalizedComplex::boundary(std::size_t q) const
{
    if (q == 0)
        throw DomainError("normalized boundary needs q >= 1");
    const BaseRing& base = algebra_.base();
    SparseMatrix b(base, rank(q - 1), rank(q));
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < rank(q); ++j) {
        const auto a = tuple(q, j);
        SparseVector col;
        for (std::size_t i = 0; i < q; ++i)
            for (const auto& [k, c] : adapted_.product(a[i], a[i + 1]).terms()) {
                if (i >= 1 && k == 0)
                    continue;
                out.assign(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(i));
                out.push_back(k);
                out.insert(out.end(), a.begin() + static_cast<std::ptrdiff_t>(i + 2), a.end());
                col.add(index(out), c * sign(i), base);
            }
        for (const auto& [k, c] : adapted_.product(a[q], a[0]).terms()) {
            out.assign(1, k);
            out.insert(out.end(), a.begin() + 1, a.begin() + static_cast<std::ptrdiff_t>(q));
            col.add(index(out), c * sign(q), base);
        }
        b.set_column(j, std::move(col));
    }
    return b;
}

SparseMatrix NormalizedComplex::connes_b(std::size_t q) const
{
    const BaseRing& base = algebra_.base();
    SparseMatrix m(base, rank(q + 1), rank(q));
    for (std::size_t j = 0; j < rank(q); ++j) {
        const auto a = tuple(q, j);
        if (a[0] == 0)
            continue;
        SparseVector col;
        for (std::size_t i = 0; i <= q; ++i) {
            std::vector<std::size_t> out{0};
            out.insert(out.end(), a.begin() + static_cast<std::ptrdiff_t>(i), a.end());
            out.insert(out.end(), a.begin(), a.begin() + static_cast<std::ptrdiff_t>(i));
            col.add(index(out), sign(q * i), base);
        }
        m.set_column(j, std::move(col));
    }
    return m;
}

ChainComplex NormalizedComplex::complex(std::size_t top) const
{
    std::vector<std::size_t> ranks;
    std::vector<Matrix> diffs;
    for (std::size_t q = 0; q <= top; ++q) {
        ranks.push_back(rank(q));
        if (q >= 1)
            diffs.push_back(boundary(q).to_dense());
    }
    return ChainComplex(algebra_.base(), std::move(ranks), std::move(diffs));
}

SparseVector NormalizedComplex::normalize(std::size_t q, const SparseVector& tensor) const
{
    const BaseRing& base = algebra_.base();
    const std::size_t r = algebra_.rank();
    SparseVector out;
    std::vector<std::vector<std::pair<std::size_t, Scalar>>> cols(r);
    for (std::size_t i = 0; i < r; ++i)
        cols[i] = terms_of(change_inv_.column(i));
    for (const auto& [idx, c] : tensor.terms()) {
        const auto d = tensor_digits(idx, r, q);
        // expand position by position, dropping degenerate prefixes early
        std::vector<std::pair<std::vector<std::size_t>, Scalar>> partial{{{}, c}};
        for (std::size_t pos = 0; pos <= q; ++pos) {
            std::vector<std::pair<std::vector<std::size_t>, Scalar>> next;
            for (const auto& [t, coeff] : partial)
                for (const auto& [k, v] : cols[d[pos]]) {
                    if (pos >= 1 && k == 0)
                        continue;
                    auto t2 = t;
                    t2.push_back(k);
                    next.emplace_back(std::move(t2), coeff * v);
                }
            partial = std::move(next);
        }
        for (const auto& [t, coeff] : partial)
            out.add(index(t), coeff, base);
    }
    return out;
}

SparseVector NormalizedComplex::lift(std::size_t q, const SparseVector& chain) const
{
    const BaseRing& base = algebra_.base();
    const std::size_t r = algebra_.rank();
    std::vector<std::vector<std::pair<std::size_t, Scalar>>> cols(r);
    for (std::size_t i = 0; i < r; ++i)
        cols[i] = terms_of(change_.column(i));
    SparseVector out;
    for (const auto& [idx, c] : chain.terms()) {
        const auto a = tuple(q, idx);
        std::vector<std::pair<std::size_t, Scalar>> partial{{0, c}};
        for (std::size_t pos = 0; pos <= q; ++pos) {
            std::vector<std::pair<std::size_t, Scalar>> next;
            for (const auto& [t, coeff] : partial)
                for (const auto& [k, v] : cols[a[pos]])
                    next.emplace_back(t * r + k, coeff * v);
            partial = std::move(next);
        }
        for (const auto& [t, coeff] : partial)
            out.add(t, coeff, base);
    }
    return out;
}

SparseMatrix NormalizedComplex::transfer(const NormalizedComplex& source, std::size_t q,
                                         const std::function<SparseVector(std::size_t)>& tensor_map) const
{
    SparseMatrix m(algebra_.base(), rank(q), source.rank(q));
    for (std::size_t j = 0; j < source.rank(q); ++j) {
        SparseVector lifted = source.lift(q, SparseVector::basis(j));
        SparseVector image;
        for (const auto& [idx, c] : lifted.terms())
            image.add(tensor_map(idx), c, algebra_.base());
        m.set_column(j, normalize(q, image));
    }
    return m;
}

// ---------------------------------------------------------------------------

HochschildHomology::HochschildHomology(std::shared_ptr<const NormalizedComplex> complex, std::size_t degree)
    : complex_(std::move(complex)), degree_(degree)
{
    homology_ = complex_->complex(degree + 1).homology(degree);
}

std::vector<HomologyClass> HochschildHomology::basis() const
{
    std::vector<HomologyClass> out;
    const auto& gens = homology_.generators();
    for (std::size_t g = 0; g < gens.size(); ++g) {
        HomologyClass h;
        h.degree = degree_;
        h.coordinates.assign(gens.size(), 0);
        h.coordinates[g] = 1;
        h.representative = complex_->lift(degree_, SparseVector::from_dense(gens[g]));
        out.push_back(std::move(h));
    }
    return out;
}

HomologyClass HochschildHomology::classify(const SparseVector& cycle) const
{
    HomologyClass h;
    h.degree = degree_;
    h.coordinates = homology_.coordinates(cycle.to_dense(complex_->rank(degree_)));
    h.representative = complex_->lift(degree_, cycle);
    return h;
}

HomologyClass HochschildHomology::classify_tensor(const SparseVector& tensor_cycle) const
{
    HomologyClass h = classify(complex_->normalize(degree_, tensor_cycle));
    h.representative = tensor_cycle;
    return h;
}

HochschildHomology hochschild_homology(const Algebra& a, std::size_t n)
{
    return HochschildHomology(std::make_shared<NormalizedComplex>(a), n);
}

ChainComplex cyclic_total_complex(const NormalizedComplex& c, std::size_t top)
{
    const BaseRing& base = c.algebra().base();
    std::vector<std::size_t> ranks(top + 1, 0);
    // offsets[n][p] = start of column p (holding N_{n-2p}) inside Tot_n
    std::vector<std::vector<std::size_t>> offsets(top + 1);
    for (std::size_t n = 0; n <= top; ++n)
        for (std::size_t p = 0; 2 * p <= n; ++p) {
            offsets[n].push_back(ranks[n]);
            ranks[n] += c.rank(n - 2 * p);
        }
    std::vector<Matrix> diffs;
    for (std::size_t n = 1; n <= top; ++n) {
        Matrix d(base, ranks[n - 1], ranks[n]);
        for (std::size_t p = 0; 2 * p <= n; ++p) {
            const std::size_t q = n - 2 * p;
            if (q >= 1) {
                SparseMatrix b = c.boundary(q);
                for (std::size_t j = 0; j < b.cols(); ++j)
                    for (const auto& [i, v] : b.column(j).terms())
                        d.add_to(offsets[n - 1][p] + i, offsets[n][p] + j, v);
            }
            if (p >= 1) {
                SparseMatrix bb = c.connes_b(q);
                for (std::size_t j = 0; j < bb.cols(); ++j)
                    for (const auto& [i, v] : bb.column(j).terms())
                        d.add_to(offsets[n - 1][p - 1] + i, offsets[n][p] + j, v);
            }
        }
        diffs.push_back(std::move(d));
    }
    return ChainComplex(base, std::move(ranks), std::move(diffs));
}

FPAbelianGroup cyclic_homology(const Algebra& a, std::size_t n)
{
    if (a.base().kind() != RingKind::Rationals)
        throw DomainError("cyclic homology is computed over Q only, got " + a.base().name());
    NormalizedComplex c(a);
    return cyclic_total_complex(c, n + 1).homology(n).group();
}

SparseMatrix induced_chain_map(const AlgebraHom& f, std::size_t q, std::size_t cap)
{
    const std::size_t rs = f.source().rank(), rt = f.target().rank();
    const std::size_t cols = tensor_rank(rs, q, cap), rows = tensor_rank(rt, q, cap);
    const BaseRing& base = f.source().base();
    SparseMatrix m(base, rows, cols);
    std::vector<std::vector<std::pair<std::size_t, Scalar>>> images(rs);
    for (std::size_t i = 0; i < rs; ++i)
        for (const auto& [k, c] : f.matrix().column(i).terms())
            images[i].emplace_back(k, c);
    for (std::size_t j = 0; j < cols; ++j) {
        const auto d = tensor_digits(j, rs, q);
        std::vector<std::pair<std::size_t, Scalar>> partial{{0, 1}};
        for (std::size_t pos = 0; pos <= q; ++pos) {
            std::vector<std::pair<std::size_t, Scalar>> next;
            for (const auto& [t, coeff] : partial)
                for (const auto& [k, v] : images[d[pos]])
                    next.emplace_back(t * rt + k, coeff * v);
            partial = std::move(next);
        }
        SparseVector col;
        for (const auto& [t, coeff] : partial)
            col.add(t, coeff, base);
        m.set_column(j, std::move(col));
    }
    return m;
}

}  // namespace dtrace
