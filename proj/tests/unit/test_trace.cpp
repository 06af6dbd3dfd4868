#include <doctest.h>

#include <random>

#include "dtrace/smith.hpp"
#include "dtrace/trace.hpp"

using namespace dtrace;

namespace {

Algebra dual_f2()
{
    return truncated_polynomial(BaseRing::prime_field(2), 2);
}

// b_2 on A's normalized complex; a normalized 1-cycle difference is a
// boundary iff solve_membership finds a preimage.
bool is_boundary_by_membership(const NormalizedComplex& c, const SparseVector& tensor_cycle)
{
    Matrix b2 = c.boundary(2).to_dense();
    Vector v = c.normalize(1, tensor_cycle).to_dense(c.rank(1));
    return std::holds_alternative<Vector>(solve_membership(b2, v));
}

Vector block_diag_with_one(const Algebra& a, const Vector& g)
{
    // g in M_1(A) -> diag(g, 1) in M_2(A)
    const std::size_t r = a.rank();
    Vector out(4 * r);
    for (std::size_t k = 0; k < r; ++k) {
        out[k] = g[k];
        out[3 * r + k] = a.unit()[k];
    }
    return out;
}

}  // namespace

TEST_CASE("group homology from the bar complex")
{
    auto z = BaseRing::integers();
    FiniteGroup c2 = FiniteGroup::cyclic(2);
    CHECK(group_homology(c2, z, 0).group().to_string() == "Z");
    CHECK(group_homology(c2, z, 1).group().to_string() == "Z/2");
    CHECK(group_homology(c2, z, 2).group().is_zero());
    CHECK(group_homology(c2, z, 3).group().to_string() == "Z/2");
    CHECK(group_homology(FiniteGroup::trivial(), z, 1).group().is_zero());
    CHECK(group_homology(FiniteGroup::cyclic(3), z, 1).group().to_string() == "Z/3");
    CHECK(group_homology(c2, BaseRing::prime_field(2), 2).group().to_string() == "F2");
    CHECK(group_homology(c2, BaseRing::prime_field(3), 1).group().is_zero());

    // unnormalized bar complex gives the same groups
    BarComplex full(FiniteGroup::cyclic(3), z, false);
    ChainComplex fc = full.complex(3);
    CHECK(fc.validate().ok());
    for (std::size_t d = 0; d <= 2; ++d)
        CHECK(fc.homology(d).group() == group_homology(FiniteGroup::cyclic(3), z, d).group());
}

TEST_CASE("group_to_hh is a chain map")
{
    auto z = BaseRing::integers();
    for (const auto& g : {FiniteGroup::cyclic(2), FiniteGroup::cyclic(3)}) {
        CyclicModule c(group_algebra(g, z), 2);
        BarComplex bar(g, z, false);
        CHECK(group_to_hh(g, z, 0).column(0) == SparseVector::basis(g.identity()));
        for (std::size_t q = 1; q <= 3; ++q)
            CHECK(c.hochschild_boundary(q) * group_to_hh(g, z, q) == group_to_hh(g, z, q - 1) * bar.boundary(q));
    }
    // (x) -> x (x) x in Z[C_2]
    SparseMatrix m = group_to_hh(FiniteGroup::cyclic(2), z, 1);
    CHECK(m.column(1) == SparseVector::basis(tensor_index({1, 1}, 2)));
}

TEST_CASE("multitrace")
{
    auto f2 = BaseRing::prime_field(2);
    Algebra a = ground_algebra(f2);
    CHECK(multitrace(a, 1, 2) == SparseMatrix::identity(f2, 1));
    SparseMatrix tr0 = multitrace(a, 2, 0);
    CHECK(tr0.column(0) == SparseVector::basis(0));  // E11 -> 1
    CHECK(tr0.column(1).empty());                    // E12 -> 0
    Algebra d = dual_f2();
    for (const Algebra& base : {a, d}) {
        CyclicModule big(matrix_algebra(base, 2), 2), small(base, 2);
        for (std::size_t q = 0; q <= 3; ++q) {
            SparseMatrix t = multitrace(base, 2, q);
            CHECK(t * big.cyclic(q) == small.cyclic(q) * t);
            if (q >= 1)
                CHECK(small.hochschild_boundary(q) * t == multitrace(base, 2, q - 1) * big.hochschild_boundary(q));
        }
    }
}

TEST_CASE("Morita maps are isomorphisms")
{
    Algebra f2 = ground_algebra(BaseRing::prime_field(2));
    for (std::size_t d = 0; d <= 3; ++d) {
        InducedMap m = morita_map(f2, 2, d);
        CHECK(m.chain_map_verified);
        CHECK(m.isomorphism);
    }
    InducedMap one = morita_map(dual_f2(), 1, 1);
    CHECK(one.matrix == Matrix::identity(BaseRing::prime_field(2), one.target.generator_count()));
    CHECK(morita_map(dual_f2(), 2, 1).isomorphism);
    CHECK(morita_map(ground_algebra(BaseRing::integers()), 2, 0).isomorphism);
    CHECK(morita_map(group_algebra(FiniteGroup::cyclic(2), BaseRing::integers()), 2, 1).isomorphism);
}

TEST_CASE("Dennis trace on K_1")
{
    Algebra z = ground_algebra(BaseRing::integers());
    CHECK(dennis_trace_k1(z, 1, z.parse_element("-1")).coordinates.empty());
    Algebra d = dual_f2();
    HochschildHomology hh1 = hochschild_homology(d, 1);
    CHECK(dennis_trace_k1(hh1, 1, d.unit()).coordinates == Vector(hh1.group().generator_count(), 0));
    HomologyClass c = dennis_trace_k1(hh1, 1, d.parse_element("1+x"));
    // oracle: (1+x)(x)(1+x) = 1(x)1 + 1(x)x + x(x)1 + x(x)x; the terms with 1 in
    // slot 1 are degenerate, leaving 1(x)x + x(x)x. Over F_2, b_2 = 0 on the
    // normalized complex, so HH_1 has basis {1(x)x, x(x)x}.
    CHECK(c.coordinates.size() == 2);
    SparseVector direct;
    direct.add(tensor_index({0, 1}, 2), 1, d.base());
    direct.add(tensor_index({1, 1}, 2), 1, d.base());
    CHECK(hh1.classify_tensor(direct).coordinates == c.coordinates);
    CHECK(!hh1.homology().is_boundary(hh1.complex().normalize(1, direct).to_dense(2)));
    CHECK_THROWS_AS(dennis_trace_k1(hh1, 1, d.parse_element("x")), DomainError);
}

TEST_CASE("Dennis trace on group homology")
{
    Algebra f2 = ground_algebra(BaseRing::prime_field(2));
    DennisTraceResult r0 = dennis_trace_homology(f2, 2, 0);
    // 1 -> class of trace(identity) = 2 = 0 over F_2
    CHECK(r0.images.at(0) == Vector{0});
    Algebra f3 = ground_algebra(BaseRing::prime_field(3));
    DennisTraceResult z1 = dennis_trace_homology(f3, 1, 1);
    CHECK(z1.map.source.is_zero());
    CHECK(dennis_trace_homology(f3, 1, 0).images.at(0) == Vector{1});

    Algebra d = dual_f2();
    DennisTraceResult r = dennis_trace_homology(d, 1, 1);
    REQUIRE(r.map.chain_map_verified);
    REQUIRE(r.source.group().to_string() == "F2");
    // the generator of H_1(BC_2) is the class of the non-identity element
    std::size_t nontrivial = 1 - r.gl.group.identity();
    HomologyClass k1 = dennis_trace_k1(d, 1, r.gl.elements[nontrivial]);
    CHECK(r.images[0] == k1.coordinates);
    CHECK(dennis_trace_homology(f2, 2, 2).map.chain_map_verified);
}

TEST_CASE("Dennis trace homomorphism, stability and conjugation invariance")
{
    std::mt19937 rng(2024);
    for (BaseRing base : {BaseRing::rationals(), BaseRing::integers()}) {
        Algebra a = group_algebra(FiniteGroup::cyclic(2), base);
        auto nc = std::make_shared<NormalizedComplex>(a);
        HochschildHomology hh1(nc, 1);
        auto random_unit = [&]() {
            for (;;) {
                Vector u(2);
                if (base.kind() == RingKind::Integers) {
                    u[rng() % 2] = rng() % 2 ? 1 : -1;
                } else {
                    std::uniform_int_distribution<int> dist(-5, 5);
                    u[0] = base.normalize(Scalar(dist(rng), 1 + rng() % 3));
                    u[1] = base.normalize(Scalar(dist(rng), 1 + rng() % 3));
                }
                if (unit_inverse(a, u))
                    return u;
            }
        };
        for (int trial = 0; trial < 20; ++trial) {
            Vector u = random_unit(), v = random_unit();
            SparseVector diff = dennis_cycle(a, 1, a.multiply(u, v));
            diff.add(dennis_cycle(a, 1, u), -1, base);
            diff.add(dennis_cycle(a, 1, v), -1, base);
            CHECK(is_boundary_by_membership(*nc, diff));
            CHECK(dennis_trace_k1(hh1, 1, u).coordinates == dennis_trace_k1(a, 2, block_diag_with_one(a, u)).coordinates);
        }
    }
    Algebra f2 = ground_algebra(BaseRing::prime_field(3));
    GeneralLinearGroup gl = general_linear_group(f2, 2);
    HochschildHomology hh1 = hochschild_homology(f2, 1);
    Algebra m2 = gl.matrices;
    for (std::size_t g = 0; g < gl.group.order(); g += 5)
        for (std::size_t h = 0; h < gl.group.order(); h += 7) {
            Vector conj = m2.multiply(m2.multiply(gl.elements[h], gl.elements[g]), gl.elements[gl.group.inverse(h)]);
            CHECK(dennis_trace_k1(hh1, 2, conj).coordinates == dennis_trace_k1(hh1, 2, gl.elements[g]).coordinates);
        }
}
