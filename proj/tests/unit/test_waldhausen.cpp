#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <set>

#include "dtrace/sigma_delta.hpp"

using namespace dtrace;

namespace {

// Brute force over F_2: rank of a d_rows x d_cols matrix packed row-wise in bits.
std::size_t rank_f2(std::vector<std::uint32_t> rows)
{
    std::size_t rank = 0;
    for (std::uint32_t bit = 1; bit && !rows.empty(); bit <<= 1) {
        auto it = std::find_if(rows.begin() + static_cast<std::ptrdiff_t>(rank), rows.end(),
                               [&](std::uint32_t r) { return r & bit; });
        if (it == rows.end())
            continue;
        std::swap(*it, rows[rank]);
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (i != rank && (rows[i] & bit))
                rows[i] ^= rows[rank];
        ++rank;
    }
    return rank;
}

// number of r x c matrices over F_2 of rank `want`
std::size_t count_rank_f2(std::size_t r, std::size_t c, std::size_t want)
{
    std::size_t n = 0;
    for (std::uint32_t code = 0; code < (1u << (r * c)); ++code) {
        std::vector<std::uint32_t> rows(r);
        for (std::size_t i = 0; i < r; ++i)
            rows[i] = (code >> (i * c)) & ((1u << c) - 1);
        n += rank_f2(rows) == want;
    }
    return n;
}

bool cites(const ValidationReport& r, const std::string& tag)
{
    return std::any_of(r.failures.begin(), r.failures.end(),
                       [&](const std::string& f) { return f.rfind(tag, 0) == 0; });
}

const SigmaDeltaAction* find_action(const SigmaDeltaDiagram& x, const SigmaDeltaMorphism& f)
{
    for (const auto& a : x.actions)
        if (a.morphism == f)
            return &a;
    return nullptr;
}

bool bijective(const std::vector<std::size_t>& m, std::size_t target_size)
{
    std::set<std::size_t> image(m.begin(), m.end());
    return m.size() == target_size && image.size() == target_size;
}

}  // namespace

TEST_CASE("built-in families satisfy the bounded axioms")
{
    for (const auto& c : {trivial_category(), vect_gf(2, 2), vect_gf(3, 2), vect_gf(5, 1), pointed_sets(3),
                          finite_modules(4, 4), finite_modules(2, 4), finite_modules(6, 6)}) {
        auto r = validate_waldhausen(c);
        INFO(c.name() << ": " << r.summary());
        CHECK(r.ok());
    }
}

TEST_CASE("each corrupted fixture is rejected with its axiom cited")
{
    auto fixtures = corrupted_fixtures();
    REQUIRE(fixtures.size() == 5);
    std::set<std::string> axioms;
    for (const auto& f : fixtures) {
        auto r = validate_waldhausen(f.category);
        INFO(f.name);
        CHECK(!r.ok());
        CHECK(cites(r, f.axiom));
        axioms.insert(f.axiom);
    }
    CHECK(axioms.size() == 5);
}

TEST_CASE("End(C) object counts match sum of |End(F_2^d)|")
{
    // |End(F_2^d)| = 2^(d^2)
    CHECK(end_category(vect_gf(2, 1)).category.object_count() == 1 + 2);
    CHECK(end_category(vect_gf(2, 2)).category.object_count() == 1 + 2 + 16);
    CHECK(end_category(trivial_category()).category.object_count() == 1);
}

TEST_CASE("End(C) functors are exact and forget after iota_1 is the identity")
{
    for (const auto& c : {vect_gf(2, 1), vect_gf(2, 2), pointed_sets(2)}) {
        INFO(c.name());
        EndCategory e = end_category(c);
        CHECK(validate_waldhausen(e.category).ok());
        CHECK(validate_exact(e.iota0, c, e.category).ok());
        CHECK(validate_exact(e.iota1, c, e.category).ok());
        CHECK(validate_exact(e.forget, e.category, c).ok());
        CHECK(is_identity_functor(compose(e.forget, e.iota1), c));
        CHECK(is_identity_functor(compose(e.forget, e.iota0), c));

        // K_0 retract: forget o iota_1 induces the identity on the presentation
        auto pc = grothendieck_presentation(c), pe = grothendieck_presentation(e.category);
        Matrix up = presentation_map(e.iota1, pc, pe), down = presentation_map(e.forget, pe, pc);
        CHECK(respects_relations(up, pc, pe));
        CHECK(respects_relations(down, pe, pc));
        CHECK(induces_identity(down * up, pc));
    }
}

TEST_CASE("S_0 and S_1 enumerations")
{
    for (const auto& c : {trivial_category(), vect_gf(2, 2), pointed_sets(3), finite_modules(4, 4)}) {
        CHECK(s_k_objects(c, 0).size() == 1);
        auto s1 = s_k_objects(c, 1);
        CHECK(s1.size() == c.object_count());
        std::set<std::size_t> tops;
        for (const auto& g : s1)
            tops.insert(g.object(0, 1));
        CHECK(tops.size() == c.object_count());
    }
}

TEST_CASE("S_2 of vect over F_2 counts flags with chosen quotients")
{
    // sum over d1 <= d2 <= 2 of #injections F2^d1 -> F2^d2 times |GL_{d2-d1}|
    std::size_t expected = 0;
    for (std::size_t d2 = 0; d2 <= 2; ++d2)
        for (std::size_t d1 = 0; d1 <= d2; ++d1)
            expected += count_rank_f2(d2, d1, d1) * count_rank_f2(d2 - d1, d2 - d1, d2 - d1);
    auto c = vect_gf(2, 2);
    auto s2 = s_k_objects(c, 2);
    CHECK(s2.size() == expected);
    for (const auto& g : s2)
        CHECK(validate_s_grid(c, g).ok());
    CHECK_THROWS_AS(s_k_objects(c, 4), CapExceeded);
}

TEST_CASE("faces and degeneracies of S-grids stay in the enumeration")
{
    for (const auto& c : {vect_gf(2, 2), pointed_sets(2)}) {
        std::vector<std::vector<SGrid>> s;
        for (std::size_t k = 0; k <= 3; ++k)
            s.push_back(s_k_objects(c, k));
        auto keys = [](const std::vector<SGrid>& v) {
            std::set<std::vector<std::size_t>> out;
            for (const auto& g : v)
                out.insert(g.key());
            return out;
        };
        std::vector<std::set<std::vector<std::size_t>>> index;
        for (const auto& v : s)
            index.push_back(keys(v));
        for (std::size_t k = 0; k <= 3; ++k)
            for (const auto& g : s[k]) {
                for (std::size_t i = 0; k > 0 && i <= k; ++i)
                    CHECK(index[k - 1].count(restrict_grid(c, g, face_operator(k, i)).key()) == 1);
                for (std::size_t i = 0; k < 3 && i <= k; ++i)
                    CHECK(index[k + 1].count(restrict_grid(c, g, degeneracy_operator(k, i)).key()) == 1);
            }
    }
}

TEST_CASE("S_2 C is itself a bounded Waldhausen category")
{
    auto base = std::make_shared<const FiniteWaldhausenCategory>(vect_gf(2, 1));
    SCategory s(base, 2);
    auto r = validate_waldhausen(s.category());
    INFO(r.summary());
    CHECK(r.ok());
}

TEST_CASE("diagonal of w.S.: levels, identities, Z_1")
{
    auto t = ws_diagonal(trivial_category(), 2);
    CHECK(t.sizes == std::vector<std::size_t>{1, 1, 1});

    auto x = ws_diagonal(vect_gf(2, 2), 2);
    CHECK(x.sizes[0] == 1);
    // Z_1: every isomorphism F_2^d -> F_2^d, d <= 2 (the identity of 0 is the basepoint)
    std::size_t isos = 0;
    for (std::size_t d = 0; d <= 2; ++d)
        isos += count_rank_f2(d, d, d);
    CHECK(x.sizes[1] == isos);
    CHECK(x.validate().ok());
}

TEST_CASE("K_0 from the S-construction agrees with the presentation oracle")
{
    // vect: generators [F2], [F2^2], relation [F2^2] = 2[F2]; SNF of (-2 1) gives Z
    Matrix rel(BaseRing::integers(), 2, 1);
    rel.set(0, 0, -2);
    rel.set(1, 0, 1);
    const std::string oracle = homology_from_differentials(Matrix(BaseRing::integers(), 0, 2), rel).group().to_string();
    CHECK(oracle == "Z");
    CHECK(grothendieck_k0(vect_gf(2, 2)).to_string() == oracle);

    for (const auto& c : {trivial_category(), vect_gf(2, 2), finite_modules(4, 4), pointed_sets(3)}) {
        INFO(c.name());
        CHECK(k0_via_sdot(c).to_string() == grothendieck_k0(c).to_string());
    }
    CHECK(grothendieck_k0(trivial_category()).to_string() == "0");
}

TEST_CASE("Sigma_Delta diagrams: free, trivial, corrupted")
{
    auto free = free_sigma_delta(2, 2);
    CHECK(sigma_delta_validate(free).ok());
    CHECK(sigma_delta_validate(ktheory_sigma_delta(trivial_category(), 2, 2)).ok());

    // a non-basepoint simplex at (1; 0)
    auto bad = free;
    auto& e = bad.entries.at({0});
    for (std::size_t p = 0; p < e.sizes.size(); ++p) {
        e.sizes[p] = 2;
        for (auto& d : e.faces[p])
            d = {0, 1};
        for (auto& s : e.degeneracies[p])
            s = {0, 1};
    }
    auto r = sigma_delta_validate(bad);
    CHECK(!r.ok());
    CHECK(std::any_of(r.failures.begin(), r.failures.end(),
                      [](const std::string& f) { return f.find("some k_i = 0") != std::string::npos; }));

    CHECK_THROWS_AS(free_sigma_delta(3, 2), CapExceeded);
}

TEST_CASE("Sigma_Delta diagram of vect over F_2, bound 2")
{
    auto x = ktheory_sigma_delta(vect_gf(2, 2), 2, 2);
    auto r = sigma_delta_validate(x);
    INFO(r.summary());
    CHECK(r.ok());

    // index-1 removal: (1; k) -> (2; k, 1) is a bijection on every level
    for (std::size_t k = 0; k <= 2; ++k) {
        std::vector<std::size_t> id(k + 1);
        for (std::size_t a = 0; a <= k; ++a)
            id[a] = a;
        const auto* a = find_action(x, {{k}, {0}, {id, {0, 1}}});
        REQUIRE(a != nullptr);
        const auto& target = x.entries.at({k, 1});
        CHECK(a->levels.size() == target.sizes.size());
        for (std::size_t p = 0; p < a->levels.size(); ++p)
            CHECK(bijective(a->levels[p], target.sizes[p]));
    }
    // transposition (2, 1) <-> (1, 2)
    const auto* swap = find_action(x, {{2, 1}, {1, 0}, {{0, 1}, {0, 1, 2}}});
    REQUIRE(swap != nullptr);
    const auto& target = x.entries.at({1, 2});
    CHECK(target.sizes == x.entries.at({2, 1}).sizes);
    for (std::size_t p = 0; p < swap->levels.size(); ++p)
        CHECK(bijective(swap->levels[p], target.sizes[p]));
}
