#include "dtrace/trace.hpp"

#include "dtrace/smith.hpp"

namespace dtrace {

namespace {

Scalar sign(std::size_t k)
{
    return k % 2 ? Scalar(-1) : Scalar(1);
}

using Terms = std::vector<std::pair<std::size_t, Scalar>>;

// Entry (i, j) of an element of M_n(A), as sparse coordinates in A.
Terms matrix_entry(const Vector& m, std::size_t n, std::size_t r, std::size_t i, std::size_t j)
{
    Terms t;
    for (std::size_t k = 0; k < r; ++k) {
        const Scalar& c = m[(i * n + j) * r + k];
        if (sgn(c) != 0)
            t.emplace_back(k, c);
    }
    return t;
}

// sum over index cycles (i_0, ..., i_q) of (h_0)_{i_0 i_1} (x) ... (x) (h_q)_{i_q i_0}
SparseVector multitrace_of(const std::vector<Vector>& h, std::size_t n, std::size_t r, const BaseRing& base)
{
    const std::size_t len = h.size();
    SparseVector out;
    std::vector<std::size_t> idx(len, 0);
    for (;;) {
        std::vector<std::pair<std::size_t, Scalar>> partial{{0, 1}};
        for (std::size_t t = 0; t < len && !partial.empty(); ++t) {
            Terms e = matrix_entry(h[t], n, r, idx[t], idx[(t + 1) % len]);
            std::vector<std::pair<std::size_t, Scalar>> next;
            for (const auto& [p, c] : partial)
                for (const auto& [k, v] : e)
                    next.emplace_back(p * r + k, c * v);
            partial = std::move(next);
        }
        for (const auto& [p, c] : partial)
            out.add(p, c, base);
        std::size_t pos = 0;
        while (pos < len && ++idx[pos] == n)
            idx[pos++] = 0;
        if (pos == len)
            break;
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------

BarComplex::BarComplex(FiniteGroup g, BaseRing base, bool normalized, std::size_t cap)
    : group_(std::move(g)), base_(base), normalized_(normalized), cap_(cap)
{
    slot_.assign(group_.order(), 0);
    for (std::size_t e = 0; e < group_.order(); ++e) {
        if (normalized_ && e == group_.identity())
            continue;
        slot_[e] = element_.size();
        element_.push_back(e);
    }
}

std::size_t BarComplex::rank(std::size_t d) const
{
    const std::size_t m = element_.size();
    std::size_t n = 1;
    for (std::size_t i = 0; i < d; ++i) {
        if (m != 0 && n > cap_ / m)
            throw CapExceeded("bar level " + std::to_string(d) + " exceeds " + std::to_string(cap_) + " tuples");
        n *= m;
    }
    return n;
}

std::size_t BarComplex::index(const std::vector<std::size_t>& tuple) const
{
    std::size_t idx = 0;
    for (std::size_t g : tuple) {
        if (normalized_ && g == group_.identity())
            throw DomainError("identity entry has no index in the normalized bar complex");
        idx = idx * element_.size() + slot_[g];
    }
    return idx;
}

std::vector<std::size_t> BarComplex::tuple(std::size_t d, std::size_t index) const
{
    std::vector<std::size_t> t(d);
    for (std::size_t i = d; i-- > 0;) {
        t[i] = element_[index % element_.size()];
        index /= element_.size();
    }
    return t;
}

SparseMatrix BarComplex::boundary(std::size_t d) const
{
    if (d == 0)
        throw DomainError("bar boundary needs d >= 1");
    SparseMatrix m(base_, rank(d - 1), rank(d));
    const std::size_t e = group_.identity();
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < rank(d); ++j) {
        const auto t = tuple(d, j);
        SparseVector col;
        col.add(index(std::vector<std::size_t>(t.begin() + 1, t.end())), 1, base_);
        for (std::size_t i = 1; i < d; ++i) {
            std::size_t prod = group_.multiply(t[i - 1], t[i]);
            if (normalized_ && prod == e)
                continue;
            out.assign(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(i - 1));
            out.push_back(prod);
            out.insert(out.end(), t.begin() + static_cast<std::ptrdiff_t>(i + 1), t.end());
            col.add(index(out), sign(i), base_);
        }
        col.add(index(std::vector<std::size_t>(t.begin(), t.end() - 1)), sign(d), base_);
        m.set_column(j, std::move(col));
    }
    return m;
}

ChainComplex BarComplex::complex(std::size_t top) const
{
    std::vector<std::size_t> ranks;
    std::vector<Matrix> diffs;
    for (std::size_t d = 0; d <= top; ++d) {
        ranks.push_back(rank(d));
        if (d >= 1)
            diffs.push_back(boundary(d).to_dense());
    }
    return ChainComplex(base_, std::move(ranks), std::move(diffs));
}

HomologyGroup group_homology(const FiniteGroup& g, BaseRing base, std::size_t d)
{
    return BarComplex(g, base, true).complex(d + 1).homology(d);
}

SparseMatrix group_to_hh(const FiniteGroup& g, BaseRing base, std::size_t q, std::size_t cap)
{
    BarComplex bar(g, base, false, cap);
    const std::size_t n = g.order();
    SparseMatrix m(base, tensor_rank(n, q, cap), bar.rank(q));
    for (std::size_t j = 0; j < bar.rank(q); ++j) {
        const auto t = bar.tuple(q, j);
        std::size_t prod = g.identity();
        for (std::size_t x : t)
            prod = g.multiply(prod, x);
        std::vector<std::size_t> digits{g.inverse(prod)};
        digits.insert(digits.end(), t.begin(), t.end());
        m.add(tensor_index(digits, n), j, 1);
    }
    return m;
}

SparseMatrix multitrace(const Algebra& a, std::size_t n, std::size_t q, std::size_t cap)
{
    const std::size_t r = a.rank();
    const std::size_t big = n * n * r;
    SparseMatrix m(a.base(), tensor_rank(r, q, cap), tensor_rank(big, q, cap));
    for (std::size_t col = 0; col < m.cols(); ++col) {
        const auto d = tensor_digits(col, big, q);
        bool cycle = true;
        std::vector<std::size_t> out(q + 1);
        for (std::size_t t = 0; t <= q && cycle; ++t) {
            std::size_t ij = d[t] / r, ij_next = d[(t + 1) % (q + 1)] / r;
            cycle = ij % n == ij_next / n;  // j_t = i_{t+1}
            out[t] = d[t] % r;
        }
        if (cycle)
            m.add(tensor_index(out, r), col, 1);
    }
    return m;
}

bool surjective_on_homology(const Matrix& images, const HomologyGroup& target)
{
    const BaseRing& ring = target.group().ring();
    const std::size_t rows = target.group().generator_count();
    if (images.rows() != rows)
        throw DomainError("image matrix does not match the target generators");
    if (rows == 0)
        return true;
    if (ring.is_field())
        return rank_over_field(images) == rows;
    // lift to Z together with the relations of the target
    const auto& orders = target.generator_orders();
    std::vector<Integer> rel;
    for (const auto& o : orders)
        rel.push_back(o != 0 ? o : Integer(static_cast<long>(ring.modulus())));
    Matrix z(BaseRing::integers(), rows, images.cols() + rows);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < images.cols(); ++j)
            z.set(i, j, images(i, j));
        if (rel[i] != 0)
            z.set(i, images.cols() + i, Scalar(rel[i]));
    }
    SmithForm f = smith_normal_form(z);
    if (f.rank != rows)
        return false;
    for (const auto& d : f.diagonal())
        if (d != 1)
            return false;
    return true;
}

InducedMap morita_map(const Algebra& a, std::size_t n, std::size_t d)
{
    Algebra mn = matrix_algebra(a, n);
    auto source = std::make_shared<NormalizedComplex>(mn);
    auto target = std::make_shared<NormalizedComplex>(a);
    const std::size_t r = a.rank(), big = mn.rank();
    const BaseRing& base = a.base();
    auto tensor_map = [&](std::size_t q) {
        return [&, q](std::size_t idx) {
            const auto digits = tensor_digits(idx, big, q);
            SparseVector out;
            std::vector<std::size_t> o(q + 1);
            for (std::size_t t = 0; t <= q; ++t) {
                std::size_t ij = digits[t] / r, ij_next = digits[(t + 1) % (q + 1)] / r;
                if (ij % n != ij_next / n)
                    return out;
                o[t] = digits[t] % r;
            }
            out.add(tensor_index(o, r), 1, base);
            return out;
        };
    };
    std::vector<SparseMatrix> chain;
    const std::size_t lo = d == 0 ? 0 : d - 1;
    for (std::size_t q = lo; q <= d + 1; ++q)
        chain.push_back(target->transfer(*source, q, tensor_map(q)));
    InducedMap out;
    out.chain_map_verified = true;
    for (std::size_t q = lo + 1; q <= d + 1; ++q)
        if (target->boundary(q) * chain[q - lo] != chain[q - 1 - lo] * source->boundary(q))
            out.chain_map_verified = false;
    if (!out.chain_map_verified)
        throw InvariantBreach("multitrace is not a chain map on the normalized complexes");

    HochschildHomology hs(source, d), ht(target, d);
    out.source = hs.group();
    out.target = ht.group();
    const auto& gens = hs.homology().generators();
    out.matrix = Matrix(base, ht.group().generator_count(), gens.size());
    for (std::size_t g = 0; g < gens.size(); ++g) {
        SparseVector image = chain[d - lo].apply(SparseVector::from_dense(gens[g]));
        Vector coords = ht.classify(image).coordinates;
        for (std::size_t i = 0; i < coords.size(); ++i)
            out.matrix.set(i, g, coords[i]);
    }
    out.isomorphism = out.source == out.target && surjective_on_homology(out.matrix, ht.homology());
    return out;
}

SparseVector dennis_cycle(const Algebra& a, std::size_t n, const Vector& g)
{
    Algebra mn = matrix_algebra(a, n);
    if (g.size() != mn.rank())
        throw DomainError("matrix has the wrong size for M_" + std::to_string(n));
    auto inv = unit_inverse(mn, g);
    if (!inv)
        throw DomainError("matrix " + mn.format(g) + " is not invertible");
    SparseVector z = multitrace_of({*inv, g}, n, a.rank(), a.base());
    // b_1(sum x (x) y) = sum xy - yx must vanish
    SparseVector bz;
    const std::size_t r = a.rank();
    for (const auto& [idx, c] : z.terms()) {
        bz.add(a.product(idx / r, idx % r), c, a.base());
        bz.add(a.product(idx % r, idx / r), -c, a.base());
    }
    if (!bz.empty())
        throw InvariantBreach("trace of g^{-1} (x) g is not a cycle");
    return z;
}

HomologyClass dennis_trace_k1(const HochschildHomology& hh1, std::size_t n, const Vector& g)
{
    if (hh1.degree() != 1)
        throw DomainError("dennis_trace_k1 needs HH_1");
    return hh1.classify_tensor(dennis_cycle(hh1.complex().algebra(), n, g));
}

HomologyClass dennis_trace_k1(const Algebra& a, std::size_t n, const Vector& g)
{
    return dennis_trace_k1(hochschild_homology(a, 1), n, g);
}

SparseMatrix dennis_chain_map(const GeneralLinearGroup& gl, const Algebra& a, std::size_t n,
                              const NormalizedComplex& target, const BarComplex& bar, std::size_t q)
{
    const FiniteGroup& g = gl.group;
    SparseMatrix m(a.base(), target.rank(q), bar.rank(q));
    for (std::size_t j = 0; j < bar.rank(q); ++j) {
        const auto t = bar.tuple(q, j);
        std::size_t prod = g.identity();
        for (std::size_t x : t)
            prod = g.multiply(prod, x);
        std::vector<Vector> h{gl.elements[g.inverse(prod)]};
        for (std::size_t x : t)
            h.push_back(gl.elements[x]);
        m.set_column(j, target.normalize(q, multitrace_of(h, n, a.rank(), a.base())));
    }
    return m;
}

DennisTraceResult dennis_trace_homology(const Algebra& a, std::size_t n, std::size_t d, const TraceOptions& options)
{
    if (!a.base().is_finite())
        throw DomainError("the Dennis trace on group homology needs a finite base ring");
    GeneralLinearGroup gl = general_linear_group(a, n, options.enumeration_cap);
    if (gl.group.order() > options.group_order_cap)
        throw CapExceeded("|GL_" + std::to_string(n) + "(A)| = " + std::to_string(gl.group.order()) +
                          " exceeds the group order cap " + std::to_string(options.group_order_cap));
    BarComplex bar(gl.group, a.base(), true, options.level_cap);
    bar.rank(d + 1);
    auto target = std::make_shared<NormalizedComplex>(a, options.level_cap);

    std::vector<SparseMatrix> chain;
    const std::size_t lo = d == 0 ? 0 : d - 1;
    for (std::size_t q = lo; q <= d + 1; ++q)
        chain.push_back(dennis_chain_map(gl, a, n, *target, bar, q));
    DennisTraceResult out;
    out.map.chain_map_verified = true;
    for (std::size_t q = lo + 1; q <= d + 1; ++q)
        if (target->boundary(q) * chain[q - lo] != chain[q - 1 - lo] * bar.boundary(q))
            out.map.chain_map_verified = false;
    if (!out.map.chain_map_verified)
        throw InvariantBreach("Dennis trace composite is not a chain map");

    out.source = bar.complex(d + 1).homology(d);
    HochschildHomology hh(target, d);
    out.map.source = out.source.group();
    out.map.target = hh.group();
    const auto& gens = out.source.generators();
    out.map.matrix = Matrix(a.base(), hh.group().generator_count(), gens.size());
    for (std::size_t gi = 0; gi < gens.size(); ++gi) {
        SparseVector image = chain[d - lo].apply(SparseVector::from_dense(gens[gi]));
        Vector coords = hh.classify(image).coordinates;
        for (std::size_t i = 0; i < coords.size(); ++i)
            out.map.matrix.set(i, gi, coords[i]);
        out.images.push_back(std::move(coords));
    }
    out.map.isomorphism = out.map.source == out.map.target && surjective_on_homology(out.map.matrix, hh.homology());
    out.gl = std::move(gl);
    return out;
}

}  // namespace dtrace
