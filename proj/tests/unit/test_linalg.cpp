#include <doctest.h>

#include <random>

#include "dtrace/homology.hpp"
#include "dtrace/smith.hpp"

using namespace dtrace;

namespace {

Matrix random_matrix(const BaseRing& ring, std::size_t r, std::size_t c, std::mt19937& rng, long lo, long hi)
{
    std::uniform_int_distribution<long> dist(lo, hi);
    Matrix m(ring, r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j)
            m.set(i, j, dist(rng));
    return m;
}

bool divisibility_chain(const BaseRing& ring, const std::vector<Scalar>& d)
{
    for (std::size_t i = 0; i + 1 < d.size(); ++i) {
        if (ring.is_field())
            continue;
        if (ring.kind() == RingKind::Integers) {
            if (!mpz_divisible_p(d[i + 1].get_num().get_mpz_t(), d[i].get_num().get_mpz_t()))
                return false;
        } else {
            // Z/p^k: entries are powers of p, nondecreasing
            if (d[i] > d[i + 1])
                return false;
        }
    }
    return true;
}

void check_smith(const Matrix& m)
{
    SmithForm f = smith_normal_form(m);
    const BaseRing& ring = m.ring();
    CHECK(f.u * m * f.v == f.s);
    CHECK(f.u * f.u_inv == Matrix::identity(ring, m.rows()));
    CHECK(f.v * f.v_inv == Matrix::identity(ring, m.cols()));
    CHECK(f.s.is_diagonal());
    CHECK(divisibility_chain(ring, f.diagonal()));
    for (std::size_t i = f.rank; i < std::min(m.rows(), m.cols()); ++i)
        CHECK(sgn(f.s(i, i)) == 0);
}

}  // namespace

TEST_CASE("smith form of small integer matrices")
{
    auto z = BaseRing::integers();
    SmithForm id = smith_normal_form(Matrix::identity(z, 3));
    CHECK(id.rank == 3);
    CHECK(id.s == Matrix::identity(z, 3));

    SmithForm zero = smith_normal_form(Matrix(z, 2, 3));
    CHECK(zero.rank == 0);

    SmithForm d = smith_normal_form(Matrix::from_rows(z, {{2, 0}, {0, 3}}));
    REQUIRE(d.rank == 2);
    CHECK(d.diagonal() == std::vector<Scalar>{1, 6});

    SmithForm e = smith_normal_form(Matrix::from_rows(z, {{2, 4, 4}, {-6, 6, 12}, {10, -4, -16}}));
    CHECK(e.diagonal() == std::vector<Scalar>{2, 6, 12});
}

TEST_CASE("smith form transforms are inverse pairs over every ring")
{
    std::mt19937 rng(7);
    std::vector<BaseRing> rings{BaseRing::integers(), BaseRing::rationals(), BaseRing::prime_field(5),
                                BaseRing::integers_mod(8), BaseRing::integers_mod(9)};
    for (const auto& ring : rings)
        for (int trial = 0; trial < 25; ++trial) {
            std::size_t r = 1 + rng() % 5, c = 1 + rng() % 5;
            check_smith(random_matrix(ring, r, c, rng, -6, 6));
        }
    // rank-deficient products
    auto z = BaseRing::integers();
    for (int trial = 0; trial < 10; ++trial) {
        Matrix a = random_matrix(z, 5, 2, rng, -4, 4);
        Matrix b = random_matrix(z, 2, 4, rng, -4, 4);
        check_smith(a * b);
        CHECK(smith_normal_form(a * b).rank <= 2);
    }
}

TEST_CASE("membership over Z certifies non-membership")
{
    auto z = BaseRing::integers();
    Matrix m = Matrix::from_rows(z, {{2, 0}, {0, 4}});
    auto yes = solve_membership(m, {Scalar(4), Scalar(8)});
    REQUIRE(std::holds_alternative<Vector>(yes));
    CHECK(m.apply(std::get<Vector>(yes)) == Vector{4, 8});
    auto no = solve_membership(m, {Scalar(1), Scalar(0)});
    CHECK(std::holds_alternative<NotInImage>(no));

    auto z6 = BaseRing::integers_mod(6);
    Matrix m6 = Matrix::from_rows(z6, {{2}, {3}});
    auto r6 = solve_membership(m6, {Scalar(4), Scalar(3)});
    REQUIRE(std::holds_alternative<Vector>(r6));
    CHECK(m6.apply(std::get<Vector>(r6)) == Vector{4, 3});
    CHECK(std::holds_alternative<NotInImage>(solve_membership(m6, {Scalar(1), Scalar(0)})));
}

TEST_CASE("homology of small complexes")
{
    auto z = BaseRing::integers();
    // Z --2--> Z : H_0 = Z/2
    Matrix d1 = Matrix::from_rows(z, {{2}});
    ChainComplex c(z, {1, 1}, {d1});
    REQUIRE(c.validate().ok());
    HomologyGroup h0 = c.homology(0);
    CHECK(h0.group().to_string() == "Z/2");
    CHECK(h0.coordinates({Scalar(3)}) == Vector{1});
    CHECK(h0.is_boundary({Scalar(4)}));

    // Z/4: 0 -> Z/4 --2--> Z/4 : kernel of 2 is 2Z/4 -> H = Z/2 in degree 1 and Z/2 in degree 0
    auto z4 = BaseRing::integers_mod(4);
    Matrix e = Matrix::from_rows(z4, {{2}});
    HomologyGroup h1 = homology_from_differentials(e, Matrix(z4, 1, 0));
    CHECK(h1.group().to_string() == "Z/2");
    CHECK(h1.coordinates({Scalar(2)}) == Vector{1});
    HomologyGroup hz = homology_from_differentials(Matrix(z4, 0, 1), e);
    CHECK(hz.group().to_string() == "Z/2");
    HomologyGroup hf = homology_from_differentials(Matrix(z4, 0, 2), Matrix(z4, 2, 0));
    CHECK(hf.group().to_string() == "(Z/4)^2");

    auto q = BaseRing::rationals();
    HomologyGroup hq = homology_from_differentials(Matrix(q, 0, 3), Matrix::from_rows(q, {{1}, {1}, {0}}));
    CHECK(hq.group().to_string() == "Q^2");
    CHECK(hq.is_boundary({Scalar(2), Scalar(2), Scalar(0)}));
    CHECK(!hq.is_boundary({Scalar(1), Scalar(0), Scalar(0)}));
}

TEST_CASE("homology generators reduce to unit coordinates")
{
    std::mt19937 rng(11);
    auto z = BaseRing::integers();
    for (int trial = 0; trial < 20; ++trial) {
        Matrix a = random_matrix(z, 3, 4, rng, -3, 3);
        Matrix k = random_matrix(z, 4, 2, rng, -3, 3);
        // force d_out d_in = 0 by taking d_in from the kernel of d_out
        SmithForm f = smith_normal_form(a);
        Matrix kernel = f.v.col_block(f.rank, 4);
        Matrix d_in = kernel * random_matrix(z, kernel.cols(), 3, rng, -2, 2);
        HomologyGroup h = homology_from_differentials(a, d_in);
        const auto& gens = h.generators();
        for (std::size_t g = 0; g < gens.size(); ++g) {
            Vector coords = h.coordinates(gens[g]);
            for (std::size_t j = 0; j < coords.size(); ++j)
                CHECK(coords[j] == (j == g ? 1 : 0));
        }
        for (std::size_t j = 0; j < d_in.cols(); ++j)
            CHECK(h.is_boundary(d_in.column(j)));
        (void)k;
    }
}

TEST_CASE("abelian group strings round trip")
{
    auto z = BaseRing::integers();
    for (std::string s : {"0", "Z", "Z^2 + Z/2 + Z/4", "Z/3"})
        CHECK(FPAbelianGroup::parse(z, s).to_string() == s);
    CHECK(FPAbelianGroup::parse(BaseRing::prime_field(2), "F2^3").free_rank() == 3);
    CHECK_THROWS_AS(FPAbelianGroup::parse(z, "Z/4 + Z/2"), ParseError);
}
