#include "dtrace/io.hpp"

#include <fstream>
#include <map>
#include <regex>
#include <sstream>

namespace dtrace {

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what)
{
    throw ParseError(where + ": " + what);
}

const Json& field(const Json& doc, const char* name, const std::string& where)
{
    if (!doc.is_object())
        bad(where, "expected an object");
    auto it = doc.find(name);
    if (it == doc.end())
        bad(where, std::string("missing field '") + name + "'");
    return *it;
}

std::string get_string(const Json& j, const std::string& where)
{
    if (!j.is_string())
        bad(where, "expected a string");
    return j.get<std::string>();
}

std::size_t get_count(const Json& j, const std::string& where)
{
    if (!j.is_number_integer() || j.get<std::int64_t>() < 0)
        bad(where, "expected a non-negative integer");
    return j.get<std::size_t>();
}

Scalar get_scalar(const Json& j, const std::string& where)
{
    if (j.is_number_integer())
        return Scalar(Integer(std::to_string(j.get<std::int64_t>())));
    if (j.is_string()) {
        try {
            Scalar s(j.get<std::string>());
            if (s.get_den() == 0)
                bad(where, "zero denominator");
            s.canonicalize();
            return s;
        } catch (const std::invalid_argument&) {
            bad(where, "not a rational number: '" + j.get<std::string>() + "'");
        }
    }
    bad(where, "expected an integer or a rational string such as \"-3/4\"");
}

std::size_t parse_count(const std::string& text, const std::string& where)
{
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos || text.size() > 6)
        bad(where, "expected a count, got '" + text + "'");
    return std::stoul(text);
}

std::vector<std::string> split(const std::string& s, char sep, std::size_t max_parts = std::string::npos)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (out.size() + 1 < max_parts) {
        auto pos = s.find(sep, start);
        if (pos == std::string::npos)
            break;
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    out.push_back(s.substr(start));
    return out;
}

bool looks_like_file(const std::string& spec)
{
    return spec.find('/') != std::string::npos || (spec.size() > 5 && spec.substr(spec.size() - 5) == ".json");
}

Algebra builtin_algebra(const std::string& spec, const std::optional<BaseRing>& ring)
{
    const BaseRing base = ring.value_or(BaseRing::integers());
    const std::string where = "algebra '" + spec + "'";
    if (spec == "integers")
        return ground_algebra(ring.value_or(BaseRing::integers()));
    if (spec == "rationals")
        return ground_algebra(ring.value_or(BaseRing::rationals()));
    if (spec == "ground")
        return ground_algebra(base);
    auto parts = split(spec, ':', 3);
    if (parts[0] == "truncated" && parts.size() == 2) {
        const std::size_t n = parse_count(parts[1], where);
        if (n < 2)
            bad(where, "truncated:N needs N >= 2");
        return truncated_polynomial(base, n);
    }
    if (parts[0] == "cyclic" && parts.size() == 2) {
        const std::size_t n = parse_count(parts[1], where);
        if (n < 1)
            bad(where, "cyclic:N needs N >= 1");
        return group_algebra(FiniteGroup::cyclic(n), base);
    }
    if (parts[0] == "matrix" && parts.size() >= 2) {
        const std::size_t n = parse_count(parts[1], where);
        if (n < 1)
            bad(where, "matrix:N needs N >= 1");
        return matrix_algebra(parts.size() == 3 ? load_algebra(parts[2], ring) : ground_algebra(base), n);
    }
    bad(where, "unknown built-in algebra (integers, rationals, ground, truncated:N, cyclic:N, matrix:N[:spec]) "
               "and not a .json file");
}

}  // namespace

Json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError(path + ": cannot open file");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return Json::parse(buf.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path + ": byte " + std::to_string(e.byte) + ": malformed JSON");
    }
}

InputKind input_kind(const Json& doc, const std::string& where)
{
    const std::string type = get_string(field(doc, "type", where), where + ": type");
    if (type == "algebra")
        return InputKind::algebra;
    if (type == "group")
        return InputKind::group;
    if (type == "category")
        return InputKind::category;
    bad(where, "type must be algebra, group or category, not '" + type + "'");
}

// ---------------------------------------------------------------------------

Algebra parse_algebra(const Json& doc, const std::string& where, const std::optional<BaseRing>& ring)
{
    if (input_kind(doc, where) != InputKind::algebra)
        bad(where, "expected an algebra");
    std::optional<BaseRing> base = ring;
    if (!base && doc.contains("base")) {
        try {
            base = BaseRing::parse(get_string(doc["base"], where + ": base"));
        } catch (const ParseError& e) {
            bad(where + ": base", e.what());
        }
    }
    if (doc.contains("builtin"))
        return builtin_algebra(get_string(doc["builtin"], where + ": builtin"), base);
    if (!base)
        bad(where, "missing field 'base'");

    const Json& basis = field(doc, "basis", where);
    if (!basis.is_array() || basis.empty())
        bad(where + ": basis", "expected a non-empty list of names");
    std::vector<std::string> names;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        names.push_back(get_string(basis[i], where + ": basis[" + std::to_string(i) + "]"));
        if (names.back().empty() || std::find(names.begin(), names.end() - 1, names.back()) != names.end() - 1)
            bad(where + ": basis[" + std::to_string(i) + "]", "names must be non-empty and distinct");
    }
    const std::size_t r = names.size();

    std::vector<SparseVector> products(r * r);
    const Json& mul = field(doc, "mul", where);
    if (!mul.is_array())
        bad(where + ": mul", "expected a list of [i, j, [[k, c], ...]]");
    std::vector<bool> seen(r * r, false);
    for (std::size_t t = 0; t < mul.size(); ++t) {
        const std::string at = where + ": mul[" + std::to_string(t) + "]";
        const Json& e = mul[t];
        if (!e.is_array() || e.size() != 3 || !e[2].is_array())
            bad(at, "expected [i, j, [[k, c], ...]]");
        const std::size_t i = get_count(e[0], at + "[0]"), j = get_count(e[1], at + "[1]");
        if (i >= r || j >= r)
            bad(at, "basis index out of range");
        if (seen[i * r + j])
            bad(at, "product e_" + std::to_string(i) + " e_" + std::to_string(j) + " given twice");
        seen[i * r + j] = true;
        for (std::size_t s = 0; s < e[2].size(); ++s) {
            const Json& term = e[2][s];
            const std::string tat = at + "[2][" + std::to_string(s) + "]";
            if (!term.is_array() || term.size() != 2)
                bad(tat, "expected [k, coefficient]");
            const std::size_t k = get_count(term[0], tat + "[0]");
            if (k >= r)
                bad(tat, "basis index out of range");
            products[i * r + j].add(k, get_scalar(term[1], tat + "[1]"), *base);
        }
    }

    Vector unit(r);
    const Json& u = field(doc, "unit", where);
    if (u.is_array()) {
        if (u.size() != r)
            bad(where + ": unit", "expected " + std::to_string(r) + " coefficients");
        for (std::size_t i = 0; i < r; ++i)
            unit[i] = base->normalize(get_scalar(u[i], where + ": unit[" + std::to_string(i) + "]"));
    } else {
        const std::string name = get_string(u, where + ": unit");
        auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end())
            bad(where + ": unit", "'" + name + "' is not a basis name");
        unit[static_cast<std::size_t>(it - names.begin())] = 1;
    }
    return Algebra(*base, std::move(names), std::move(unit), std::move(products));
}

Algebra load_algebra(const std::string& spec, const std::optional<BaseRing>& ring)
{
    if (!looks_like_file(spec))
        return builtin_algebra(spec, ring);
    return parse_algebra(read_json_file(spec), spec, ring);
}

FiniteGroup parse_group(const Json& doc, const std::string& where)
{
    if (input_kind(doc, where) != InputKind::group)
        bad(where, "expected a group");
    if (doc.contains("builtin"))
        return load_group(get_string(doc["builtin"], where + ": builtin"));
    const Json& elems = field(doc, "elements", where);
    if (!elems.is_array() || elems.empty())
        bad(where + ": elements", "expected a non-empty list of names");
    std::vector<std::string> names;
    for (std::size_t i = 0; i < elems.size(); ++i)
        names.push_back(get_string(elems[i], where + ": elements[" + std::to_string(i) + "]"));
    const std::size_t n = names.size();
    auto index_of = [&](const Json& e, const std::string& at) -> std::size_t {
        if (e.is_string()) {
            auto it = std::find(names.begin(), names.end(), e.get<std::string>());
            if (it == names.end())
                bad(at, "unknown element '" + e.get<std::string>() + "'");
            return static_cast<std::size_t>(it - names.begin());
        }
        const std::size_t i = get_count(e, at);
        if (i >= n)
            bad(at, "element index out of range");
        return i;
    };
    const Json& table = field(doc, "table", where);
    if (!table.is_array() || table.size() != n)
        bad(where + ": table", "expected " + std::to_string(n) + " rows");
    std::vector<std::size_t> flat;
    for (std::size_t i = 0; i < n; ++i) {
        const std::string at = where + ": table[" + std::to_string(i) + "]";
        if (!table[i].is_array() || table[i].size() != n)
            bad(at, "expected " + std::to_string(n) + " entries");
        for (std::size_t j = 0; j < n; ++j)
            flat.push_back(index_of(table[i][j], at + "[" + std::to_string(j) + "]"));
    }
    ValidationReport report = validate_group_table(n, flat);
    if (!report.ok())
        throw ValidationError(where + ": invalid group table: " + report.summary(10));
    return FiniteGroup(std::move(names), std::move(flat));
}

FiniteGroup load_group(const std::string& spec)
{
    if (looks_like_file(spec))
        return parse_group(read_json_file(spec), spec);
    if (spec == "trivial")
        return FiniteGroup::trivial();
    auto parts = split(spec, ':');
    if (parts.size() == 2 && parts[0] == "cyclic") {
        const std::size_t n = parse_count(parts[1], "group '" + spec + "'");
        if (n >= 1)
            return FiniteGroup::cyclic(n);
    }
    bad("group '" + spec + "'", "unknown built-in group (trivial, cyclic:N) and not a .json file");
}

// ---------------------------------------------------------------------------

namespace {

FiniteWaldhausenCategory family_category(const std::string& family, std::int64_t q, std::size_t bound,
                                         const std::string& where)
{
    if (family == "trivial")
        return trivial_category();
    if (family == "vect_gf") {
        if (q < 2 || !BaseRing::integers_mod(q).is_field())
            bad(where, "vect_gf needs a prime q");
        return vect_gf(q, bound);
    }
    if (family == "pointed_sets")
        return pointed_sets(bound);
    if (family == "finite_modules") {
        if (q < 2)
            bad(where, "finite_modules needs m >= 2");
        return finite_modules(q, bound);
    }
    bad(where, "unknown family '" + family + "' (trivial, vect_gf, pointed_sets, finite_modules)");
}

const std::regex builtin_category_pattern(R"(^\s*(trivial|vect_gf|pointed_sets|finite_modules)\s*(\(\s*(\d+)\s*(,\s*(\d+)\s*)?\))?\s*$)");

}  // namespace

bool is_builtin_category(const std::string& spec)
{
    return std::regex_match(spec, builtin_category_pattern);
}

FiniteWaldhausenCategory parse_category(const Json& doc, const std::string& where,
                                        const std::optional<std::size_t>& bound)
{
    if (input_kind(doc, where) != InputKind::category)
        bad(where, "expected a category");
    if (doc.contains("family")) {
        const std::string family = get_string(doc["family"], where + ": family");
        std::int64_t q = 0;
        for (const char* key : {"q", "m"})
            if (doc.contains(key))
                q = static_cast<std::int64_t>(get_count(doc[key], where + ": " + key));
        std::size_t b = bound.value_or(doc.contains("bound") ? get_count(doc["bound"], where + ": bound") : 2);
        return family_category(family, q, b, where);
    }

    FiniteWaldhausenCategory c(doc.contains("name") ? get_string(doc["name"], where + ": name") : where,
                               bound.value_or(get_count(field(doc, "bound", where), where + ": bound")));
    std::map<std::string, std::size_t> objects, morphisms;
    const Json& objs = field(doc, "objects", where);
    if (!objs.is_array() || objs.empty())
        bad(where + ": objects", "expected a non-empty list");
    for (std::size_t i = 0; i < objs.size(); ++i) {
        const std::string at = where + ": objects[" + std::to_string(i) + "]";
        const std::string name = get_string(field(objs[i], "name", at), at + ": name");
        const std::size_t size = get_count(field(objs[i], "size", at), at + ": size");
        if (size > c.bound())
            throw ValidationError(at + ": size " + std::to_string(size) + " exceeds the bound");
        if (!objects.emplace(name, c.add_object(name, size)).second)
            bad(at, "duplicate object '" + name + "'");
    }
    auto object = [&](const Json& j, const std::string& at) {
        auto it = objects.find(get_string(j, at));
        if (it == objects.end())
            bad(at, "unknown object '" + j.get<std::string>() + "'");
        return it->second;
    };
    const Json& mors = field(doc, "morphisms", where);
    if (!mors.is_array())
        bad(where + ": morphisms", "expected a list");
    for (std::size_t i = 0; i < mors.size(); ++i) {
        const std::string at = where + ": morphisms[" + std::to_string(i) + "]";
        const Json& m = mors[i];
        FiniteWaldhausenCategory::Morphism mm;
        mm.name = get_string(field(m, "name", at), at + ": name");
        mm.source = object(field(m, "source", at), at + ": source");
        mm.target = object(field(m, "target", at), at + ": target");
        for (auto [key, flag] : {std::pair{"cofibration", &mm.cofibration}, std::pair{"weak_equivalence", &mm.weak_equivalence}})
            if (m.contains(key)) {
                if (!m[key].is_boolean())
                    bad(at + ": " + key, "expected true or false");
                *flag = m[key].get<bool>();
            }
        const std::string name = mm.name;
        if (!morphisms.emplace(name, c.add_morphism(std::move(mm))).second)
            bad(at, "duplicate morphism '" + name + "'");
    }
    auto morphism = [&](const Json& j, const std::string& at) {
        auto it = morphisms.find(get_string(j, at));
        if (it == morphisms.end())
            bad(at, "unknown morphism '" + j.get<std::string>() + "'");
        return it->second;
    };
    c.set_zero(object(field(doc, "zero", where), where + ": zero"));

    std::map<std::pair<std::size_t, std::size_t>, std::size_t> table;
    const Json& comp = field(doc, "composition", where);
    if (!comp.is_array())
        bad(where + ": composition", "expected a list of [g, f, g o f]");
    for (std::size_t i = 0; i < comp.size(); ++i) {
        const std::string at = where + ": composition[" + std::to_string(i) + "]";
        if (!comp[i].is_array() || comp[i].size() != 3)
            bad(at, "expected [g, f, g o f]");
        const std::size_t g = morphism(comp[i][0], at + "[0]"), f = morphism(comp[i][1], at + "[1]");
        if (!table.emplace(std::pair{g, f}, morphism(comp[i][2], at + "[2]")).second)
            bad(at, "composite given twice");
    }
    c.set_composition([&](std::size_t g, std::size_t f) {
        auto it = table.find({g, f});
        return it == table.end() ? no_morphism : it->second;
    });

    if (!doc.contains("pushouts") || (doc["pushouts"].is_string() && doc["pushouts"] == "search")) {
        c.compute_pushouts();
    } else {
        const Json& pos = doc["pushouts"];
        if (!pos.is_array())
            bad(where + ": pushouts", "expected \"search\" or a list of witnesses");
        for (std::size_t i = 0; i < pos.size(); ++i) {
            const std::string at = where + ": pushouts[" + std::to_string(i) + "]";
            const Json& w = pos[i];
            c.set_pushout(morphism(field(w, "cofibration", at), at + ": cofibration"),
                          morphism(field(w, "map", at), at + ": map"),
                          {object(field(w, "object", at), at + ": object"),
                           morphism(field(w, "from_target", at), at + ": from_target"),
                           morphism(field(w, "leg", at), at + ": leg")});
        }
    }
    return c;
}

FiniteWaldhausenCategory load_category(const std::string& spec, const std::optional<std::size_t>& bound)
{
    std::smatch m;
    if (std::regex_match(spec, m, builtin_category_pattern)) {
        const std::string family = m[1];
        const std::string where = "category '" + spec + "'";
        std::int64_t q = 2;
        std::size_t b = 2;
        if (family == "finite_modules")
            q = 4, b = 4;
        if (family == "pointed_sets")
            b = 3;
        if (m[2].matched) {
            const std::size_t first = parse_count(m[3], where);
            if (m[5].matched) {
                q = static_cast<std::int64_t>(first);
                b = parse_count(m[5], where);
            } else if (family == "pointed_sets") {
                b = first;
            } else {
                bad(where, family + " takes two arguments");
            }
        }
        return family_category(family, q, bound.value_or(b), where);
    }
    if (!looks_like_file(spec))
        bad("category '" + spec + "'",
            "unknown built-in category (trivial, vect_gf(q,B), pointed_sets(B), finite_modules(m,B)) and not a .json file");
    return parse_category(read_json_file(spec), spec, bound);
}

// ---------------------------------------------------------------------------

std::pair<std::size_t, Vector> parse_matrix_literal(const Algebra& a, const std::string& text)
{
    const std::string where = "matrix literal";
    std::string s;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch)))
            s += ch;
    if (s.size() < 4 || s.substr(0, 2) != "[[" || s.substr(s.size() - 2) != "]]")
        bad(where, "expected [[a, b], [c, d]]");
    std::vector<std::vector<std::string>> rows;
    for (const auto& row : split(s.substr(2, s.size() - 4), ']')) {
        std::string r = row;
        if (rows.empty()) {
            rows.push_back(split(r, ','));
            continue;
        }
        if (r.size() < 2 || r.substr(0, 2) != ",[")
            bad(where, "rows must be separated by '], ['");
        rows.push_back(split(r.substr(2), ','));
    }
    const std::size_t n = rows.size();
    const std::size_t r = a.rank();
    Vector g(n * n * r);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n)
            bad(where, "matrix must be square");
        for (std::size_t j = 0; j < n; ++j) {
            Vector e = a.parse_element(rows[i][j]);
            for (std::size_t k = 0; k < r; ++k)
                g[(i * n + j) * r + k] = e[k];
        }
    }
    return {n, g};
}

Json group_to_json(const FPAbelianGroup& g)
{
    Json torsion = Json::array();
    for (const auto& d : g.torsion())
        torsion.push_back(d.get_str());
    return Json{{"ring", g.ring().name()}, {"free_rank", g.free_rank()}, {"torsion", torsion}, {"text", g.to_string()}};
}

FPAbelianGroup group_from_json(const Json& j)
{
    const std::string where = "group";
    const BaseRing ring = BaseRing::parse(get_string(field(j, "ring", where), where + ": ring"));
    FPAbelianGroup g = FPAbelianGroup::parse(ring, get_string(field(j, "text", where), where + ": text"));
    if (j.contains("free_rank") && get_count(j["free_rank"], where + ": free_rank") != g.free_rank())
        bad(where, "free_rank does not match text");
    return g;
}

Json vector_to_json(const Vector& v)
{
    Json out = Json::array();
    for (const auto& x : v)
        out.push_back(x.get_str());
    return out;
}

Vector vector_from_json(const Json& j)
{
    if (!j.is_array())
        bad("vector", "expected a list");
    Vector v;
    for (std::size_t i = 0; i < j.size(); ++i)
        v.push_back(get_scalar(j[i], "vector[" + std::to_string(i) + "]"));
    return v;
}

}  // namespace dtrace
