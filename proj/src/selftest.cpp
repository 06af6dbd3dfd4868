#include "dtrace/selftest.hpp"

#include <chrono>
#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "dtrace/sigma_delta.hpp"
#include "dtrace/smith.hpp"
#include "dtrace/trace.hpp"

namespace dtrace {

namespace {

class Checks {
public:
    void check(bool ok, const std::string& what)
    {
        ++count_;
        if (!ok && failures_.size() < 8)
            failures_.push_back(what);
        failed_ |= !ok;
    }
    void report(const ValidationReport& r, const std::string& what)
    {
        check(r.ok(), what + (r.ok() ? "" : ": " + r.summary(3)));
    }
    SuiteResult finish(std::string name) const
    {
        SuiteResult s{std::move(name), !failed_, count_, {}, 0};
        for (const auto& f : failures_)
            s.detail += (s.detail.empty() ? "" : "; ") + f;
        return s;
    }

private:
    std::size_t count_ = 0;
    bool failed_ = false;
    std::vector<std::string> failures_;
};

SuiteResult timed(const std::function<SuiteResult()>& body)
{
    auto start = std::chrono::steady_clock::now();
    SuiteResult r;
    try {
        r = body();
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

std::vector<std::pair<std::string, Algebra>> sample_algebras()
{
    auto z = BaseRing::integers(), q = BaseRing::rationals(), f2 = BaseRing::prime_field(2);
    return {{"Z", ground_algebra(z)},
            {"Q", ground_algebra(q)},
            {"F2[x]/x^2", truncated_polynomial(f2, 2)},
            {"Z[x]/x^3", truncated_polynomial(z, 3)},
            {"Q[C2]", group_algebra(FiniteGroup::cyclic(2), q)},
            {"Z[C3]", group_algebra(FiniteGroup::cyclic(3), z)},
            {"M2(Z)", matrix_algebra(ground_algebra(z), 2)},
            {"M2(F2)", matrix_algebra(ground_algebra(f2), 2)}};
}

}  // namespace

SuiteResult cyclic_identities_suite()
{
    return timed([] {
        Checks c;
        for (const auto& [name, a] : sample_algebras()) {
            CyclicModule m(a, a.rank() > 2 ? 2 : 3);
            c.report(m.validate(), name + " cyclic module");
            for (std::size_t q = 1; q < m.top_level(); ++q)
                c.check((m.hochschild_boundary(q) * m.hochschild_boundary(q + 1)).is_zero(),
                        name + " b^2 at level " + std::to_string(q + 1));
            NormalizedComplex n(a);
            c.report(n.complex(3).validate(), name + " normalized complex");
        }
        return c.finish("simplicial and cyclic identities, b^2 = 0");
    });
}

SuiteResult connes_operator_suite()
{
    return timed([] {
        Checks c;
        for (const auto& [name, a] : sample_algebras()) {
            NormalizedComplex n(a);
            for (std::size_t q = 0; q <= 2; ++q) {
                c.check((n.connes_b(q + 1) * n.connes_b(q)).is_zero(), name + " B^2 at " + std::to_string(q));
                if (q == 0)
                    c.check((n.boundary(1) * n.connes_b(0)).is_zero(), name + " bB at 0");
                else
                    c.check((n.boundary(q + 1) * n.connes_b(q) + n.connes_b(q - 1) * n.boundary(q)).is_zero(),
                            name + " bB + Bb at " + std::to_string(q));
            }
        }
        return c.finish("B^2 = 0 and bB + Bb = 0 on normalized complexes");
    });
}

SuiteResult chain_map_suite()
{
    return timed([] {
        Checks c;
        auto z = BaseRing::integers(), f2 = BaseRing::prime_field(2);
        for (const auto& g : {FiniteGroup::cyclic(2), FiniteGroup::cyclic(3)})
            for (BaseRing r : {z, f2}) {
                CyclicModule m(group_algebra(g, r), 2);
                BarComplex bar(g, r, false);
                for (std::size_t q = 1; q <= 3; ++q)
                    c.check(m.hochschild_boundary(q) * group_to_hh(g, r, q) == group_to_hh(g, r, q - 1) * bar.boundary(q),
                            "group_to_hh C" + std::to_string(g.order()) + " over " + r.name() + " at " + std::to_string(q));
            }

        AlgebraHom proj = group_algebra_map(FiniteGroup::cyclic(4), FiniteGroup::cyclic(2), {0, 1, 0, 1}, z);
        AlgebraHom aug = group_algebra_map(FiniteGroup::cyclic(2), FiniteGroup::trivial(), {0, 0}, z);
        for (const AlgebraHom& f : {proj, aug}) {
            CyclicModule src(f.source(), 2), tgt(f.target(), 2);
            for (std::size_t q = 0; q <= src.top_level(); ++q) {
                SparseMatrix m = induced_chain_map(f, q);
                const std::string at = " at " + std::to_string(q);
                c.check(m * src.cyclic(q) == tgt.cyclic(q) * m, "induced map vs t" + at);
                for (std::size_t i = 0; q >= 1 && i <= q; ++i)
                    c.check(induced_chain_map(f, q - 1) * src.face(q, i) == tgt.face(q, i) * m, "induced map vs d_i" + at);
                for (std::size_t i = 0; q + 1 <= src.top_level() && i <= q; ++i)
                    c.check(induced_chain_map(f, q + 1) * src.degeneracy(q, i) == tgt.degeneracy(q, i) * m,
                            "induced map vs s_i" + at);
            }
        }

        for (const Algebra& base : {ground_algebra(f2), truncated_polynomial(f2, 2), ground_algebra(z)}) {
            CyclicModule big(matrix_algebra(base, 2), 2), small(base, 2);
            for (std::size_t q = 0; q <= 3; ++q) {
                SparseMatrix t = multitrace(base, 2, q);
                const std::string at = " over " + base.base().name() + " rank " + std::to_string(base.rank()) + " at " +
                                       std::to_string(q);
                c.check(t * big.cyclic(q) == small.cyclic(q) * t, "multitrace vs t" + at);
                if (q >= 1)
                    c.check(small.hochschild_boundary(q) * t == multitrace(base, 2, q - 1) * big.hochschild_boundary(q),
                            "multitrace vs b" + at);
            }
        }
        return c.finish("chain maps: group_to_hh, induced_chain_map, multitrace");
    });
}

SuiteResult sigma_delta_suite()
{
    return timed([] {
        Checks c;
        SigmaDeltaDiagram x = ktheory_sigma_delta(vect_gf(2, 2), 2, 2);
        c.report(sigma_delta_validate(x), "vect(F2, 2) diagram");
        c.report(sigma_delta_validate(free_sigma_delta(2, 2)), "free diagram");

        auto find = [&](const SigmaDeltaMorphism& f) -> const SigmaDeltaAction* {
            for (const auto& a : x.actions)
                if (a.morphism == f)
                    return &a;
            return nullptr;
        };
        auto bijective = [](const std::vector<std::size_t>& m, std::size_t n) {
            return m.size() == n && std::set<std::size_t>(m.begin(), m.end()).size() == n;
        };
        auto check_iso = [&](const SigmaDeltaMorphism& f, const std::string& what) {
            const SigmaDeltaAction* a = find(f);
            c.check(a != nullptr, what + " is stored");
            if (!a)
                return;
            const auto& target = x.entries.at(f.target_ks());
            for (std::size_t p = 0; p < a->levels.size(); ++p)
                c.check(bijective(a->levels[p], target.sizes[p]), what + " bijective at w-level " + std::to_string(p));
        };
        // remove a direction of index 1: (1; k) -> (2; k, 1) and (2; 1, k)
        for (std::size_t k = 0; k <= 2; ++k) {
            std::vector<std::size_t> id(k + 1);
            for (std::size_t a = 0; a <= k; ++a)
                id[a] = a;
            check_iso({{k}, {0}, {id, {0, 1}}}, "index-1 insertion after k = " + std::to_string(k));
            check_iso({{k}, {1}, {{0, 1}, id}}, "index-1 insertion before k = " + std::to_string(k));
        }
        check_iso({{2, 1}, {1, 0}, {{0, 1}, {0, 1, 2}}}, "transposition (2, 1) -> (1, 2)");
        check_iso({{2, 2}, {1, 0}, {{0, 1, 2}, {0, 1, 2}}}, "transposition (2, 2)");
        return c.finish("Sigma_Delta axioms and index-1 removal for vect(F2, 2), n <= 2, k <= 2");
    });
}

SuiteResult waldhausen_suite()
{
    return timed([] {
        Checks c;
        for (const auto& cat : {trivial_category(), vect_gf(2, 2), vect_gf(3, 2), pointed_sets(3), finite_modules(4, 4),
                                finite_modules(2, 4)})
            c.report(validate_waldhausen(cat), cat.name() + " accepted");
        std::set<std::string> axioms;
        for (const auto& f : corrupted_fixtures()) {
            ValidationReport r = validate_waldhausen(f.category);
            bool cited = false;
            for (const auto& m : r.failures)
                cited |= m.rfind(f.axiom, 0) == 0;
            c.check(!r.ok() && cited, f.name + " rejected citing " + f.axiom);
            axioms.insert(f.axiom);
        }
        c.check(axioms.size() == 5, "five fixtures, one per axiom");
        return c.finish("Waldhausen validator: families accepted, corrupted fixtures rejected");
    });
}

SuiteResult dennis_trace_suite(std::uint64_t seed)
{
    return timed([seed] {
        Checks c;
        Algebra d = truncated_polynomial(BaseRing::prime_field(2), 2);
        DennisTraceResult r = dennis_trace_homology(d, 1, 1);
        c.check(r.map.chain_map_verified, "chain-level composite is a chain map");
        c.check(r.source.group().to_string() == "F2", "H_1(BGL_1(F2[x]/x^2); F2) = F2");
        if (r.gl.group.order() == 2 && r.images.size() == 1) {
            const std::size_t generator = 1 - r.gl.group.identity();
            c.check(r.gl.elements[generator] == d.parse_element("1+x"), "generator is 1 + x");
            c.check(r.images[0] == dennis_trace_k1(d, 1, d.parse_element("1+x")).coordinates,
                    "degree-1 image equals the K_1 trace of 1 + x");
        }

        std::mt19937_64 rng(seed);
        for (BaseRing base : {BaseRing::rationals(), BaseRing::integers()}) {
            Algebra a = group_algebra(FiniteGroup::cyclic(2), base);
            NormalizedComplex n(a);
            Matrix b2 = n.boundary(2).to_dense();
            auto random_unit = [&] {
                std::uniform_int_distribution<int> coeff(-5, 5), den(1, 3), bit(0, 1);
                for (;;) {
                    Vector u(2);
                    if (base.kind() == RingKind::Integers) {
                        u[bit(rng)] = bit(rng) ? 1 : -1;  // the units of Z[C_2] are +-1, +-x
                    } else {
                        u[0] = Scalar(coeff(rng), den(rng));
                        u[1] = Scalar(coeff(rng), den(rng));
                        u[0].canonicalize();
                        u[1].canonicalize();
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
                Vector z = n.normalize(1, diff).to_dense(n.rank(1));
                c.check(std::holds_alternative<Vector>(solve_membership(b2, z)),
                        "tr(uv) - tr(u) - tr(v) is a boundary over " + base.name() + " for u = " + a.format(u) +
                            ", v = " + a.format(v));
            }
        }
        return c.finish("Dennis trace: BGL_1 generator vs K_1 trace, additivity on random unit pairs");
    });
}

std::vector<SuiteResult> all_suites(std::uint64_t seed)
{
    return {cyclic_identities_suite(), connes_operator_suite(), chain_map_suite(),
            sigma_delta_suite(),       waldhausen_suite(),      dennis_trace_suite(seed)};
}

}  // namespace dtrace
