#include "dtrace/cli.hpp"

#include <algorithm>
#include <memory>
#include <ostream>

#include "dtrace/io.hpp"
#include "dtrace/sconstruction.hpp"
#include "dtrace/sigma_delta.hpp"
#include "dtrace/smith.hpp"
#include "dtrace/trace.hpp"

namespace dtrace {

namespace {

// Rows of cells, printed with left-aligned padded columns.
class Table {
public:
    explicit Table(std::vector<std::string> header) { rows_.push_back(std::move(header)); }
    void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }
    void print(std::ostream& out) const
    {
        std::vector<std::size_t> width;
        for (const auto& r : rows_)
            for (std::size_t i = 0; i < r.size(); ++i) {
                width.resize(std::max(width.size(), r.size()));
                width[i] = std::max(width[i], r[i].size());
            }
        for (const auto& r : rows_) {
            std::string line;
            for (std::size_t i = 0; i < r.size(); ++i)
                line += i + 1 == r.size() ? r[i] : r[i] + std::string(width[i] - r[i].size() + 2, ' ');
            out << line << '\n';
        }
    }

private:
    std::vector<std::vector<std::string>> rows_;
};

std::string coords_text(const Vector& v)
{
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? ", " : "") + to_string(v[i]);
    return s + ")";
}

// a_0 (x) ... (x) a_q with coefficients, in A's basis names
std::string chain_text(const Algebra& a, std::size_t q, const SparseVector& chain)
{
    if (chain.empty())
        return "0";
    std::string s;
    for (const auto& [index, c] : chain.terms()) {
        std::string term;
        for (std::size_t digit : tensor_digits(index, a.rank(), q))
            term += (term.empty() ? "" : " (x) ") + a.names()[digit];
        const bool neg = c < 0;
        const Scalar mag = neg ? Scalar(-c) : c;
        s += s.empty() ? (neg ? "-" : "") : (neg ? " - " : " + ");
        s += (mag == 1 ? "" : to_string(mag) + "*") + (q > 0 ? "(" + term + ")" : term);
    }
    return s;
}

Json conventions()
{
    return Json{{"version", dtrace_version},
                {"connes_operator_convention", connes_operator_convention},
                {"smith_pivot_rule", smith_pivot_rule},
                {"caps",
                 {{"level_rank", default_level_cap},
                  {"enumeration", default_enumeration_cap},
                  {"group_order", default_group_order_cap},
                  {"s_objects", default_object_cap},
                  {"s_k", default_s_cap},
                  {"sigma_delta_n", sigma_delta_n_cap},
                  {"sigma_delta_k", sigma_delta_k_cap},
                  {"sigma_delta_w_budget", sigma_delta_w_budget}}}};
}

class Job {
public:
    Job(const JobConfig& config, std::ostream& out) : cfg_(config), out_(out)
    {
        if (cfg_.ring)
            ring_ = BaseRing::parse(*cfg_.ring);
        if (cfg_.bound && *cfg_.bound == 0)
            throw ParseError("--bound must be positive");
        if (cfg_.n == 0)
            throw ParseError("-n must be positive");
        doc_ = Json{{"command", cfg_.command}, {"inputs", cfg_.inputs}, {"conventions", conventions()}};
    }

    int dispatch()
    {
        const std::string& c = cfg_.command;
        int status = 0;
        if (c == "hh")
            hh();
        else if (c == "hc")
            hc();
        else if (c == "group-homology")
            group_homology_cmd();
        else if (c == "trace-k1")
            trace_k1();
        else if (c == "trace-homology")
            trace_homology();
        else if (c == "morita")
            morita();
        else if (c == "k0")
            k0();
        else if (c == "validate")
            status = validate();
        else if (c == "selftest")
            status = selftest();
        else
            throw ParseError("unknown command '" + c + "'");
        if (cfg_.format == OutputFormat::structured)
            out_ << doc_.dump(2) << '\n';
        return status;
    }

private:
    const std::string& single_input()
    {
        if (cfg_.inputs.size() != 1)
            throw ParseError(cfg_.command + " takes exactly one input, got " + std::to_string(cfg_.inputs.size()));
        return cfg_.inputs[0];
    }

    Algebra algebra()
    {
        Algebra a = load_algebra(single_input(), ring_);
        ValidationReport r = validate_algebra(a);
        if (!r.ok())
            throw ValidationError(single_input() + ": not an algebra: " + r.summary(5));
        doc_["base"] = a.base().name();
        doc_["basis"] = a.names();
        return a;
    }

    bool table() const { return cfg_.format == OutputFormat::table; }

    void hh()
    {
        Algebra a = algebra();
        auto nc = std::make_shared<const NormalizedComplex>(a);
        Table t({"n", "HH_n"});
        Json results = Json::array();
        for (std::size_t n = 0; n <= cfg_.max_degree; ++n) {
            FPAbelianGroup g = HochschildHomology(nc, n).group();
            t.add({std::to_string(n), g.to_string()});
            results.push_back({{"degree", n}, {"group", group_to_json(g)}});
        }
        doc_["results"] = results;
        if (table()) {
            out_ << "Hochschild homology of " << single_input() << " over " << a.base().name() << '\n';
            t.print(out_);
        }
    }

    void hc()
    {
        Algebra a = algebra();
        if (a.base().kind() != RingKind::Rationals)
            throw DomainError("hc needs an algebra over Q (use --ring Q)");
        Table t({"n", "HC_n"});
        Json results = Json::array();
        for (std::size_t n = 0; n <= cfg_.max_degree; ++n) {
            FPAbelianGroup g = cyclic_homology(a, n);
            t.add({std::to_string(n), g.to_string()});
            results.push_back({{"degree", n}, {"group", group_to_json(g)}});
        }
        doc_["results"] = results;
        if (table()) {
            out_ << "cyclic homology of " << single_input() << " over Q, (b, B) bicomplex\n";
            t.print(out_);
        }
    }

    void group_homology_cmd()
    {
        FiniteGroup g = load_group(single_input());
        const BaseRing r = ring_.value_or(BaseRing::integers());
        doc_["ring"] = r.name();
        doc_["order"] = g.order();
        Table t({"d", "H_d(BG)"});
        Json results = Json::array();
        for (std::size_t d = 0; d <= cfg_.max_degree; ++d) {
            FPAbelianGroup h = group_homology(g, r, d).group();
            t.add({std::to_string(d), h.to_string()});
            results.push_back({{"degree", d}, {"group", group_to_json(h)}});
        }
        doc_["results"] = results;
        if (table()) {
            out_ << "group homology of " << single_input() << " (order " << g.order() << ") with coefficients in "
                 << r.name() << '\n';
            t.print(out_);
        }
    }

    void trace_k1()
    {
        if (cfg_.matrix.empty())
            throw ParseError("trace-k1 needs a matrix literal such as [[1+x]]");
        Algebra a = algebra();
        auto [n, g] = parse_matrix_literal(a, cfg_.matrix);
        HochschildHomology hh1 = hochschild_homology(a, 1);
        HomologyClass c = dennis_trace_k1(hh1, n, g);
        SparseVector cycle = dennis_cycle(a, n, g);
        doc_["matrix"] = cfg_.matrix;
        doc_["n"] = n;
        doc_["hh1"] = group_to_json(hh1.group());
        doc_["coordinates"] = vector_to_json(c.coordinates);
        doc_["cycle"] = chain_text(a, 1, cycle);
        doc_["representative"] = chain_text(a, 1, c.representative);
        if (table()) {
            out_ << "Dennis trace of " << cfg_.matrix << " in GL_" << n << "(" << single_input() << ")\n";
            Table t({"field", "value"});
            t.add({"HH_1", hh1.group().to_string()});
            t.add({"cycle", chain_text(a, 1, cycle)});
            t.add({"class", coords_text(c.coordinates)});
            t.add({"representative", chain_text(a, 1, c.representative)});
            t.print(out_);
        }
    }

    void trace_homology()
    {
        Algebra a = algebra();
        const std::size_t top = std::min<std::size_t>(cfg_.max_degree, 3);
        doc_["n"] = cfg_.n;
        Table t({"d", "H_d(BGL_n)", "HH_d", "chain map", "images"});
        Json results = Json::array();
        for (std::size_t d = 0; d <= top; ++d) {
            DennisTraceResult r = dennis_trace_homology(a, cfg_.n, d);
            if (!r.map.chain_map_verified)
                throw InvariantBreach("Dennis trace composite is not a chain map in degree " + std::to_string(d));
            std::string images;
            Json jimages = Json::array();
            for (const auto& v : r.images) {
                images += (images.empty() ? "" : " ") + coords_text(v);
                jimages.push_back(vector_to_json(v));
            }
            t.add({std::to_string(d), r.map.source.to_string(), r.map.target.to_string(), "ok",
                   images.empty() ? "-" : images});
            results.push_back({{"degree", d},
                               {"source", group_to_json(r.map.source)},
                               {"target", group_to_json(r.map.target)},
                               {"gl_order", r.gl.group.order()},
                               {"images", jimages}});
        }
        doc_["results"] = results;
        if (table()) {
            out_ << "Dennis trace H_d(BGL_" << cfg_.n << "(" << single_input() << ")) -> HH_d, d <= " << top << '\n';
            t.print(out_);
        }
    }

    void morita()
    {
        Algebra a = algebra();
        doc_["n"] = cfg_.n;
        Table t({"d", "HH_d(M_n(A))", "HH_d(A)", "verdict"});
        Json results = Json::array();
        for (std::size_t d = 0; d <= cfg_.max_degree; ++d) {
            InducedMap m = morita_map(a, cfg_.n, d);
            if (!m.chain_map_verified)
                throw InvariantBreach("multitrace is not a chain map in degree " + std::to_string(d));
            const char* verdict = m.isomorphism ? "ISO" : "NOT-ISO";
            t.add({std::to_string(d), m.source.to_string(), m.target.to_string(), verdict});
            results.push_back({{"degree", d},
                               {"source", group_to_json(m.source)},
                               {"target", group_to_json(m.target)},
                               {"verdict", verdict}});
        }
        doc_["results"] = results;
        if (table()) {
            out_ << "multitrace HH_d(M_" << cfg_.n << "(" << single_input() << ")) -> HH_d(" << single_input() << ")\n";
            t.print(out_);
        }
    }

    void k0()
    {
        FiniteWaldhausenCategory c = load_category(single_input(), cfg_.bound);
        ValidationReport r = validate_waldhausen(c);
        if (!r.ok())
            throw ValidationError(c.name() + ": " + r.summary(5));
        FPAbelianGroup presented = grothendieck_k0(c), sdot = k0_via_sdot(c);
        const char* verdict = presented == sdot ? "AGREE" : "DISAGREE";
        doc_["category"] = c.name();
        doc_["objects"] = c.object_count();
        doc_["morphisms"] = c.morphism_count();
        doc_["grothendieck_k0"] = group_to_json(presented);
        doc_["k0_via_sdot"] = group_to_json(sdot);
        doc_["verdict"] = verdict;
        if (table()) {
            out_ << "K_0 of " << c.name() << " (" << c.object_count() << " objects, " << c.morphism_count()
                 << " morphisms)\n";
            Table t({"method", "K_0"});
            t.add({"presentation", presented.to_string()});
            t.add({"pi_1 |w.S.|", sdot.to_string()});
            t.print(out_);
            out_ << "verdict: " << verdict << '\n';
        }
    }

    int validate()
    {
        if (cfg_.inputs.empty())
            throw ParseError("validate needs at least one input");
        Json results = Json::array();
        Table t({"input", "kind", "status"});
        bool all_ok = true;
        for (const auto& spec : cfg_.inputs) {
            std::string kind;
            ValidationReport r;
            try {
                if (is_builtin_category(spec)) {
                    kind = "category";
                    r = validate_waldhausen(load_category(spec, cfg_.bound));
                } else if (spec.find('/') == std::string::npos && spec.find(".json") == std::string::npos) {
                    kind = "algebra";  // built-in names other than categories are algebras
                    r = validate_algebra(load_algebra(spec, ring_));
                } else {
                    const Json doc = read_json_file(spec);
                    switch (input_kind(doc, spec)) {
                    case InputKind::algebra:
                        kind = "algebra";
                        r = validate_algebra(parse_algebra(doc, spec, ring_));
                        break;
                    case InputKind::group:
                        kind = "group";
                        parse_group(doc, spec);
                        break;
                    case InputKind::category:
                        kind = "category";
                        r = validate_waldhausen(parse_category(doc, spec, cfg_.bound));
                        break;
                    }
                }
            } catch (const ValidationError& e) {
                r.fail(e.what());
            }
            all_ok &= r.ok();
            t.add({spec, kind, r.ok() ? "valid" : "INVALID"});
            results.push_back({{"input", spec}, {"kind", kind}, {"valid", r.ok()}, {"failures", r.failures}});
        }
        doc_["results"] = results;
        if (table()) {
            t.print(out_);
            for (const auto& j : results)
                for (const auto& f : j["failures"])
                    out_ << f.get<std::string>() << '\n';
        }
        return all_ok ? 0 : 3;
    }

    int selftest()
    {
        doc_["seed"] = cfg_.seed;
        Json results = Json::array();
        Table t({"suite", "checks", "status"});
        bool all_ok = true;
        std::vector<std::string> details;
        for (const SuiteResult& s : all_suites(cfg_.seed)) {
            all_ok &= s.passed;
            t.add({s.name, std::to_string(s.checks), s.passed ? "PASS" : "FAIL"});
            results.push_back({{"suite", s.name}, {"checks", s.checks}, {"passed", s.passed}, {"detail", s.detail}});
            if (!s.passed)
                details.push_back(s.name + ": " + s.detail);
        }
        doc_["results"] = results;
        if (table()) {
            out_ << "property suites, seed " << cfg_.seed << '\n';
            t.print(out_);
            for (const auto& d : details)
                out_ << d << '\n';
        }
        return all_ok ? 0 : 5;
    }

    const JobConfig& cfg_;
    std::ostream& out_;
    std::optional<BaseRing> ring_;
    Json doc_;
};

}  // namespace

const std::vector<std::pair<std::string, std::string>>& command_list()
{
    static const std::vector<std::pair<std::string, std::string>> commands{
        {"hh", "Hochschild homology HH_0..HH_max-degree of an algebra"},
        {"hc", "cyclic homology of an algebra over Q"},
        {"group-homology", "homology of BG from the bar complex"},
        {"trace-k1", "Dennis trace of an invertible matrix in HH_1"},
        {"trace-homology", "Dennis trace H_d(BGL_n(A)) -> HH_d(A), d <= 3"},
        {"morita", "multitrace HH_d(M_n(A)) -> HH_d(A) and its isomorphism verdict"},
        {"k0", "K_0 of a category by presentation and by the S-construction"},
        {"validate", "check algebra, group or category inputs"},
        {"selftest", "run the structural property suites"},
    };
    return commands;
}

int run(const JobConfig& config, std::ostream& out, std::ostream& err)
{
    try {
        return Job(config, out).dispatch();
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return 2;
    } catch (const ValidationError& e) {
        err << "validation failure: " << e.what() << '\n';
        return 3;
    } catch (const DomainError& e) {
        err << "validation failure: " << e.what() << '\n';
        return 3;
    } catch (const CapExceeded& e) {
        err << "cap exceeded: " << e.what() << '\n';
        return 4;
    } catch (const InvariantBreach& e) {
        err << "internal invariant breach: " << e.what() << '\n';
        return 5;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return 5;
    }
}

}  // namespace dtrace
