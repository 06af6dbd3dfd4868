#include <doctest.h>

#include "dtrace/algebra.hpp"

using namespace dtrace;

TEST_CASE("small algebras validate")
{
    auto z = BaseRing::integers();
    auto f2 = BaseRing::prime_field(2);
    CHECK(validate_algebra(group_algebra(FiniteGroup::cyclic(2), z)).ok());
    CHECK(validate_algebra(truncated_polynomial(BaseRing::rationals(), 2)).ok());
    CHECK(validate_algebra(matrix_algebra(ground_algebra(f2), 2)).ok());
    CHECK(validate_algebra(matrix_algebra(truncated_polynomial(f2, 2), 2)).ok());

    Algebra t3 = truncated_polynomial(z, 3);
    CHECK(t3.multiply(t3.basis_vector(1), t3.basis_vector(2)) == t3.zero());

    // e1 e1 = e2, e2 * anything = 0, unit e1: unit law fails
    std::vector<SparseVector> prods(4);
    prods[0] = SparseVector::basis(1);
    Algebra bad(z, {"e1", "e2"}, {Scalar(1), Scalar(0)}, prods);
    ValidationReport rep = validate_algebra(bad);
    CHECK(!rep.ok());
    bool unit_cited = false;
    for (const auto& f : rep.failures)
        unit_cited = unit_cited || f.find("unit") != std::string::npos;
    CHECK(unit_cited);
}

TEST_CASE("matrix units multiply as expected")
{
    Algebra m2 = matrix_algebra(ground_algebra(BaseRing::prime_field(2)), 2);
    CHECK(m2.rank() == 4);
    CHECK(m2.format(m2.unit()) == "E11+E22");
    Vector e12 = m2.parse_element("E12"), e21 = m2.parse_element("E21");
    CHECK(m2.multiply(e12, e21) == m2.parse_element("E11"));
    CHECK(m2.multiply(e21, e12) == m2.parse_element("E22"));

    Algebra a = ground_algebra(BaseRing::prime_field(2));
    Algebra m1 = matrix_algebra(a, 1);
    CHECK(m1.rank() == 1);
    CHECK(m1.product(0, 0) == a.product(0, 0));
}

TEST_CASE("iterated matrix algebras match by a basis bijection")
{
    // M_2(M_2(F_2)) vs M_4(F_2): E_ij (x) E_kl <-> E_{2i+k, 2j+l}
    Algebra f2 = ground_algebra(BaseRing::prime_field(2));
    Algebra outer = matrix_algebra(matrix_algebra(f2, 2), 2);
    Algebra flat = matrix_algebra(f2, 4);
    REQUIRE(outer.rank() == flat.rank());
    std::vector<std::size_t> perm(16);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t k = 0; k < 2; ++k)
                for (std::size_t l = 0; l < 2; ++l)
                    perm[(i * 2 + j) * 4 + (k * 2 + l)] = (2 * i + k) * 4 + (2 * j + l);
    for (std::size_t a = 0; a < 16; ++a)
        for (std::size_t b = 0; b < 16; ++b) {
            SparseVector mapped;
            for (const auto& [k, c] : outer.product(a, b).terms())
                mapped.add(perm[k], c, flat.base());
            CHECK(mapped == flat.product(perm[a], perm[b]));
        }
}

TEST_CASE("general linear groups by enumeration")
{
    auto f2 = BaseRing::prime_field(2);
    CHECK(general_linear_group(ground_algebra(f2), 1).group.order() == 1);
    auto dual = general_linear_group(truncated_polynomial(f2, 2), 1);
    CHECK(dual.group.order() == 2);
    auto gl2 = general_linear_group(ground_algebra(f2), 2);
    CHECK(gl2.group.order() == 6);
    CHECK(gl2.embedding.validate().ok());
    CHECK(validate_algebra(gl2.group_ring).ok());
    CHECK(general_linear_group(ground_algebra(BaseRing::prime_field(3)), 2).group.order() == 48);
    CHECK(general_linear_group(ground_algebra(BaseRing::integers_mod(4)), 1).group.order() == 2);
    CHECK_THROWS_AS(general_linear_group(ground_algebra(BaseRing::integers()), 1), DomainError);
    CHECK_THROWS_AS(general_linear_group(ground_algebra(BaseRing::prime_field(7)), 3), CapExceeded);
}

TEST_CASE("unit inverses")
{
    auto f2 = BaseRing::prime_field(2);
    Algebra d = truncated_polynomial(f2, 2);
    CHECK(unit_inverse(d, d.unit()) == d.unit());
    Vector u = d.parse_element("1+x");
    CHECK(unit_inverse(d, u) == u);
    CHECK(!unit_inverse(d, d.parse_element("x")));

    Algebra zc2 = group_algebra(FiniteGroup::cyclic(2), BaseRing::integers());
    CHECK(!unit_inverse(zc2, zc2.parse_element("1+x")));
    Algebra qc2 = group_algebra(FiniteGroup::cyclic(2), BaseRing::rationals());
    auto inv = unit_inverse(qc2, qc2.parse_element("2+x"));
    REQUIRE(inv);
    CHECK(qc2.multiply(*inv, qc2.parse_element("2+x")) == qc2.unit());
    CHECK(qc2.format(*inv) == "2/3*1-1/3*x");
}

TEST_CASE("group tables are validated")
{
    CHECK_THROWS_AS(FiniteGroup({"a", "b"}, {0, 0, 0, 0}), ValidationError);
    // identity 0, but 1*2 = 1 breaks associativity
    std::vector<std::size_t> t{0, 1, 2, 1, 0, 1, 2, 2, 0};
    ValidationReport rep = validate_group_table(3, t);
    CHECK(!rep.ok());
    CHECK(rep.summary(50).find("associativity") != std::string::npos);

    FiniteGroup c4 = FiniteGroup::cyclic(4), c2 = FiniteGroup::cyclic(2);
    AlgebraHom f = group_algebra_map(c4, c2, {0, 1, 0, 1}, BaseRing::integers());
    CHECK(f.validate().ok());
    CHECK_THROWS_AS(group_algebra_map(c2, c4, {0, 1}, BaseRing::integers()), ValidationError);
}
