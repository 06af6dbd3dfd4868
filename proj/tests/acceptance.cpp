// One PASS/FAIL line per acceptance criterion. Expected values come from the
// small oracles below, which use only the unnormalized cyclic module and
// field ranks, never the normalized complex or the Smith form reduction.
#include <chrono>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "dtrace/cli.hpp"
#include "dtrace/io.hpp"
#include "dtrace/sconstruction.hpp"
#include "dtrace/smith.hpp"
#include "dtrace/trace.hpp"

using namespace dtrace;

namespace {

Matrix hstack(const Matrix& a, const Matrix& b)
{
    Matrix m(a.ring(), a.rows(), a.cols() + b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j)
            m.set(i, j, a(i, j));
        for (std::size_t j = 0; j < b.cols(); ++j)
            m.set(i, a.cols() + j, b(i, j));
    }
    return m;
}

// dim HH_n over a field, from ranks of the unnormalized b
std::size_t hh_dimension(const CyclicModule& c, std::size_t n)
{
    std::size_t out = n == 0 ? 0 : rank_over_field(c.hochschild_boundary(n).to_dense());
    return c.rank(n) - out - rank_over_field(c.hochschild_boundary(n + 1).to_dense());
}

// dim HC_n over Q from Connes' complex C_q / (1 - (-1)^q t)
std::size_t hc_dimension(const CyclicModule& c, std::size_t n)
{
    const BaseRing& base = c.algebra().base();
    auto twist = [&](std::size_t q) {
        Scalar s = q % 2 ? -1 : 1;
        return (SparseMatrix::identity(base, c.rank(q)) - c.cyclic(q).scaled(s)).to_dense();
    };
    auto induced_rank = [&](std::size_t q) -> std::size_t {
        if (q == 0)
            return 0;
        Matrix t = twist(q - 1);
        return rank_over_field(hstack(c.hochschild_boundary(q).to_dense(), t)) - rank_over_field(t);
    };
    return c.rank(n) - rank_over_field(twist(n)) - induced_rank(n) - induced_rank(n + 1);
}

std::string field_group(const std::string& field, std::size_t dim)
{
    return dim == 0 ? "0" : dim == 1 ? field : field + "^" + std::to_string(dim);
}

struct Outcome {
    bool passed = false;
    std::string detail;
};

int failures = 0;

void criterion(int number, const std::string& title, double budget_seconds, const std::function<Outcome()>& body)
{
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (s > budget_seconds) {
        o.passed = false;
        o.detail += " (over the " + std::to_string(static_cast<int>(budget_seconds)) + " s budget)";
    }
    failures += !o.passed;
    std::cout << (o.passed ? "PASS" : "FAIL") << " criterion " << number << ": " << title << " [" << std::fixed
              << std::setprecision(2) << s << " s] " << o.detail << std::endl;
}

}  // namespace

int main()
{
    criterion(1, "HH(Z) concentrated in degree zero, degrees 0..4", 1, [] {
        JobConfig cfg;
        cfg.command = "hh";
        cfg.inputs = {"integers"};
        cfg.format = OutputFormat::structured;
        std::ostringstream out, err;
        if (run(cfg, out, err) != 0)
            return Outcome{false, err.str()};
        std::string got;
        const Json doc = Json::parse(out.str());
        for (const auto& r : doc["results"])
            got += (got.empty() ? "" : ",") + r["group"]["text"].get<std::string>();
        return Outcome{got == "Z,0,0,0,0", got};
    });

    criterion(2, "multitrace HH_d(M_2(F2)) -> HH_d(F2) is an isomorphism for d <= 3", 30, [] {
        Algebra f2 = ground_algebra(BaseRing::prime_field(2));
        CyclicModule big(matrix_algebra(f2, 2), 3), small(f2, 3);
        Outcome o{true, ""};
        for (std::size_t d = 0; d <= 3; ++d) {
            InducedMap m = morita_map(f2, 2, d);
            const bool shapes = m.source.to_string() == field_group("F2", hh_dimension(big, d)) &&
                                m.target.to_string() == field_group("F2", hh_dimension(small, d));
            o.passed &= shapes && m.chain_map_verified && m.isomorphism;
            o.detail += "d=" + std::to_string(d) + (m.isomorphism ? " ISO " : " NOT-ISO ");
        }
        return o;
    });

    criterion(3, "HC_n(Q) = Q for even n <= 6, 0 for odd n <= 5, (b, B) bicomplex", 10, [] {
        Algebra q = ground_algebra(BaseRing::rationals());
        CyclicModule c(q, 7);
        Outcome o{true, ""};
        for (std::size_t n = 0; n <= 6; ++n) {
            const std::string got = cyclic_homology(q, n).to_string();
            const std::string oracle = field_group("Q", hc_dimension(c, n));
            const std::string stated = n % 2 == 0 ? "Q" : "0";
            o.passed &= got == oracle && got == stated;
            o.detail += (n ? "," : "") + got;
        }
        return o;
    });

    criterion(4, "K_0 by S-construction equals the Grothendieck presentation", 60, [] {
        Outcome o{true, ""};
        const std::vector<std::pair<FiniteWaldhausenCategory, std::string>> cases{
            {trivial_category(), "0"}, {vect_gf(2, 2), "Z"}, {finite_modules(4, 4), "Z"}};  // abelian 2-groups of order <= 4
        for (const auto& [c, stated] : cases) {
            const std::string a = grothendieck_k0(c).to_string(), b = k0_via_sdot(c).to_string();
            o.passed &= a == b && a == stated;
            o.detail += c.name() + ": " + a + " / " + b + "; ";
        }
        return o;
    });

    criterion(5, "Dennis trace pipeline: BGL_1 generator vs K_1 trace, 20 random unit pairs", 30, [] {
        SuiteResult s = dennis_trace_suite(default_seed);
        return Outcome{s.passed, std::to_string(s.checks) + " checks " + s.detail};
    });

    criterion(6, "structural property suites", 120, [] {
        Outcome o{true, ""};
        for (const auto& s : {cyclic_identities_suite(), connes_operator_suite(), chain_map_suite(),
                              sigma_delta_suite(), waldhausen_suite()}) {
            o.passed &= s.passed;
            o.detail += s.name + ": " + (s.passed ? "ok" : s.detail) + " (" + std::to_string(s.checks) + "); ";
        }
        return o;
    });

    criterion(7, "scope statement", 1, [] {
        return Outcome{true,
                       "pi_* THH(Z), the TC and TR computations and the spectrum-level trace are not reproducible at "
                       "desk scale; only their chain-level shadows are checked by the suites above"};
    });

    return failures == 0 ? 0 : 1;
}
