#include "dtrace/waldhausen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "dtrace/smith.hpp"

namespace dtrace {

namespace {

constexpr std::uint32_t missing = static_cast<std::uint32_t>(-1);

std::uint64_t span_key(std::size_t i, std::size_t f)
{
    return (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint64_t>(f);
}

// Caps the number of messages per check so a badly broken table stays readable.
class Reporter {
public:
    explicit Reporter(ValidationReport& r, std::size_t limit = 25) : report_(r), limit_(limit) {}
    void fail(const std::string& tag, const std::string& message)
    {
        std::size_t& n = counts_[tag];
        if (n < limit_)
            report_.fail(tag + ": " + message);
        else if (n == limit_)
            report_.fail(tag + ": further failures suppressed");
        ++n;
    }

private:
    ValidationReport& report_;
    std::size_t limit_;
    std::map<std::string, std::size_t> counts_;
};

}  // namespace

// ---------------------------------------------------------------------------

std::size_t FiniteWaldhausenCategory::add_object(std::string name, std::size_t size)
{
    if (!morphisms_.empty())
        throw DomainError("objects must be added before morphisms");
    objects_.push_back({std::move(name), size});
    const std::size_t n = objects_.size();
    hom_.assign(n * n, {});
    out_.resize(n);
    return n - 1;
}

std::size_t FiniteWaldhausenCategory::add_morphism(Morphism m)
{
    if (m.source >= objects_.size() || m.target >= objects_.size())
        throw ValidationError("morphism '" + m.name + "' has an unknown endpoint");
    const std::size_t id = morphisms_.size();
    auto& h = hom_[m.source * objects_.size() + m.target];
    hom_position_.push_back(h.size());
    h.push_back(id);
    out_position_.push_back(out_[m.source].size());
    out_[m.source].push_back(id);
    morphisms_.push_back(std::move(m));
    return id;
}

void FiniteWaldhausenCategory::set_composition(const std::function<std::size_t(std::size_t, std::size_t)>& compose)
{
    const std::size_t m = morphisms_.size();
    if (m >= missing)
        throw CapExceeded("too many morphisms for the composition table");
    after_.assign(m, {});
    for (std::size_t f = 0; f < m; ++f) {
        const auto& next = out_[target(f)];
        auto& row = after_[f];
        row.resize(next.size(), missing);
        for (std::size_t p = 0; p < next.size(); ++p) {
            std::size_t gf = compose(next[p], f);
            if (gf != no_morphism)
                row[p] = static_cast<std::uint32_t>(gf);
        }
    }
    identity_.assign(objects_.size(), no_morphism);
    for (std::size_t a = 0; a < objects_.size(); ++a) {
        for (std::size_t e : hom(a, a)) {
            bool ok = true;
            for (std::size_t g : out_[a])
                if (this->compose(g, e) != g) { ok = false; break; }
            for (std::size_t x = 0; ok && x < objects_.size(); ++x)
                for (std::size_t f : hom(x, a))
                    if (this->compose(e, f) != f) { ok = false; break; }
            if (ok) {
                identity_[a] = e;
                break;
            }
        }
    }
    inverse_.assign(m, no_morphism);
    for (std::size_t f = 0; f < m; ++f) {
        const std::size_t s = source(f), t = target(f);
        if (identity_[s] == no_morphism || identity_[t] == no_morphism)
            continue;
        for (std::size_t g : hom(t, s))
            if (this->compose(g, f) == identity_[s] && this->compose(f, g) == identity_[t]) {
                inverse_[f] = g;
                break;
            }
    }
}

std::size_t FiniteWaldhausenCategory::compose(std::size_t g, std::size_t f) const
{
    if (f >= after_.size() || g >= morphisms_.size() || target(f) != source(g))
        return no_morphism;
    std::uint32_t v = after_[f][out_position_[g]];
    return v == missing ? no_morphism : v;
}

std::size_t FiniteWaldhausenCategory::identity(std::size_t a) const
{
    if (identity_.at(a) == no_morphism)
        throw InvariantBreach("object '" + objects_[a].name + "' has no identity");
    return identity_[a];
}

std::size_t FiniteWaldhausenCategory::zero_object() const
{
    if (!zero_)
        throw DomainError("category '" + name_ + "' has no zero object");
    return *zero_;
}

std::size_t FiniteWaldhausenCategory::zero_map(std::size_t a, std::size_t b) const
{
    const std::size_t z = zero_object();
    const auto& in = hom(a, z);
    const auto& out = hom(z, b);
    if (in.size() != 1 || out.size() != 1)
        throw InvariantBreach("zero object of '" + name_ + "' is not a zero object");
    return compose(out[0], in[0]);
}

void FiniteWaldhausenCategory::set_pushout(std::size_t i, std::size_t f, Pushout w)
{
    pushouts_[span_key(i, f)] = w;
}

void FiniteWaldhausenCategory::clear_pushout(std::size_t i, std::size_t f)
{
    pushouts_.erase(span_key(i, f));
}

std::optional<FiniteWaldhausenCategory::Pushout> FiniteWaldhausenCategory::pushout(std::size_t i, std::size_t f) const
{
    auto it = pushouts_.find(span_key(i, f));
    if (it == pushouts_.end())
        return std::nullopt;
    return it->second;
}

std::vector<std::tuple<std::size_t, std::size_t, FiniteWaldhausenCategory::Pushout>>
FiniteWaldhausenCategory::pushouts() const
{
    std::vector<std::tuple<std::size_t, std::size_t, Pushout>> out;
    out.reserve(pushouts_.size());
    for (const auto& [key, w] : pushouts_)
        out.emplace_back(static_cast<std::size_t>(key >> 32), static_cast<std::size_t>(key & 0xffffffffu), w);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
    });
    return out;
}

std::optional<std::size_t> FiniteWaldhausenCategory::find_in_hom(std::size_t a, std::size_t b,
                                                                 const std::function<bool(std::size_t)>& pred) const
{
    for (std::size_t m : hom(a, b))
        if (pred(m))
            return m;
    return std::nullopt;
}

void FiniteWaldhausenCategory::compute_pushouts()
{
    for (std::size_t i = 0; i < morphisms_.size(); ++i) {
        if (!is_cofibration(i))
            continue;
        for (std::size_t f : out_[source(i)])
            if (auto w = find_pushout(*this, i, f))
                set_pushout(i, f, *w);
    }
}

// ---------------------------------------------------------------------------
// Pushouts by enumeration

namespace {

using Pushout = FiniteWaldhausenCategory::Pushout;

// For each object e: how many cocones (u, v) on the span land in e.
std::vector<std::size_t> cocone_counts(const FiniteWaldhausenCategory& c, std::size_t i, std::size_t f)
{
    const std::size_t b = c.target(i), t = c.target(f);
    std::vector<std::size_t> counts(c.object_count(), 0);
    for (std::size_t e = 0; e < c.object_count(); ++e)
        for (std::size_t u : c.hom(b, e)) {
            const std::size_t ui = c.compose(u, i);
            for (std::size_t v : c.hom(t, e))
                if (c.compose(v, f) == ui)
                    ++counts[e];
        }
    return counts;
}

// h -> (h u, h v) is injective on hom(d, e) for every e.
bool separates(const FiniteWaldhausenCategory& c, std::size_t d, std::size_t u, std::size_t v,
               std::size_t b, std::size_t t)
{
    std::vector<char> seen;
    for (std::size_t e = 0; e < c.object_count(); ++e) {
        const auto& hd = c.hom(d, e);
        if (hd.size() < 2)
            continue;
        const std::size_t width = c.hom(t, e).size();
        seen.assign(c.hom(b, e).size() * width, 0);
        for (std::size_t h : hd) {
            const std::size_t hu = c.compose(h, u), hv = c.compose(h, v);
            if (hu == no_morphism || hv == no_morphism)
                return false;
            char& s = seen[c.hom_position(hu) * width + c.hom_position(hv)];
            if (s)
                return false;
            s = 1;
        }
    }
    return true;
}

}  // namespace

bool is_pushout(const FiniteWaldhausenCategory& c, std::size_t i, std::size_t f, const Pushout& w)
{
    if (c.source(i) != c.source(f))
        return false;
    const std::size_t b = c.target(i), t = c.target(f);
    if (c.source(w.from_target) != b || c.target(w.from_target) != w.object || c.source(w.cofibration) != t ||
        c.target(w.cofibration) != w.object)
        return false;
    if (c.compose(w.from_target, i) != c.compose(w.cofibration, f))
        return false;
    auto counts = cocone_counts(c, i, f);
    for (std::size_t e = 0; e < c.object_count(); ++e)
        if (c.hom(w.object, e).size() != counts[e])
            return false;
    return separates(c, w.object, w.from_target, w.cofibration, b, t);
}

std::optional<Pushout> find_pushout(const FiniteWaldhausenCategory& c, std::size_t i, std::size_t f)
{
    if (c.source(i) != c.source(f))
        throw DomainError("find_pushout: maps do not form a span");
    const std::size_t b = c.target(i), t = c.target(f);
    auto counts = cocone_counts(c, i, f);
    for (std::size_t d = 0; d < c.object_count(); ++d) {
        bool profile = true;
        for (std::size_t e = 0; e < c.object_count() && profile; ++e)
            profile = c.hom(d, e).size() == counts[e];
        if (!profile)
            continue;
        for (std::size_t u : c.hom(b, d)) {
            const std::size_t ui = c.compose(u, i);
            for (std::size_t v : c.hom(t, d))
                if (c.compose(v, f) == ui && separates(c, d, u, v, b, t))
                    return Pushout{d, u, v};
        }
    }
    return std::nullopt;
}

std::optional<std::size_t> induced_map(const FiniteWaldhausenCategory& c, const Pushout& from, std::size_t e,
                                       std::size_t u2, std::size_t v2)
{
    return c.find_in_hom(from.object, e, [&](std::size_t h) {
        return c.compose(h, from.from_target) == u2 && c.compose(h, from.cofibration) == v2;
    });
}

// ---------------------------------------------------------------------------
// Validator

ValidationReport validate_waldhausen(const FiniteWaldhausenCategory& c)
{
    ValidationReport report;
    Reporter r(report);
    const std::size_t n = c.object_count(), m = c.morphism_count();
    auto name = [&](std::size_t x) { return "'" + c.morphism(x).name + "'"; };
    auto oname = [&](std::size_t a) { return "'" + c.object(a).name + "'"; };

    // category laws
    bool complete = true;
    for (std::size_t f = 0; f < m; ++f)
        for (std::size_t g : c.out(c.target(f))) {
            std::size_t gf = c.compose(g, f);
            if (gf == no_morphism) {
                r.fail("category", "no composite of " + name(g) + " after " + name(f));
                complete = false;
            } else if (c.source(gf) != c.source(f) || c.target(gf) != c.target(g)) {
                r.fail("category", "composite of " + name(g) + " after " + name(f) + " has wrong endpoints");
                complete = false;
            }
        }
    for (std::size_t a = 0; a < n; ++a)
        if (!c.has_identity(a)) {
            r.fail("category", "no identity on " + oname(a));
            complete = false;
        }
    if (complete) {
        for (std::size_t f = 0; f < m; ++f)
            for (std::size_t g : c.out(c.target(f))) {
                const std::size_t gf = c.compose(g, f);
                for (std::size_t h : c.out(c.target(g)))
                    if (c.compose(h, gf) != c.compose(c.compose(h, g), f))
                        r.fail("category", "composition not associative on " + name(h) + ", " + name(g) + ", " +
                                               name(f));
            }
    }
    if (!complete)
        return report;  // the axioms below need a full table

    for (std::size_t a = 0; a < n; ++a)
        if (c.object(a).size > c.bound())
            r.fail("category", "object " + oname(a) + " exceeds the size bound");

    // subcategories
    for (std::size_t a = 0; a < n; ++a) {
        if (!c.is_cofibration(c.identity(a)))
            r.fail("axiom 1", "identity of " + oname(a) + " is not a cofibration");
        if (!c.is_weak_equivalence(c.identity(a)))
            r.fail("axiom 1", "identity of " + oname(a) + " is not a weak equivalence");
    }
    for (std::size_t f = 0; f < m; ++f)
        for (std::size_t g : c.out(c.target(f))) {
            const std::size_t gf = c.compose(g, f);
            if (c.is_cofibration(f) && c.is_cofibration(g) && !c.is_cofibration(gf))
                r.fail("category", "cofibrations not closed under composition: " + name(g) + " after " + name(f));
            if (c.is_weak_equivalence(f) && c.is_weak_equivalence(g) && !c.is_weak_equivalence(gf))
                r.fail("category",
                       "weak equivalences not closed under composition: " + name(g) + " after " + name(f));
        }

    // (1) isomorphisms are cofibrations and weak equivalences
    for (std::size_t f = 0; f < m; ++f)
        if (c.is_isomorphism(f)) {
            if (!c.is_cofibration(f))
                r.fail("axiom 1", "isomorphism " + name(f) + " is not flagged as a cofibration");
            if (!c.is_weak_equivalence(f))
                r.fail("axiom 1", "isomorphism " + name(f) + " is not flagged as a weak equivalence");
        }

    // (2) zero object, every object cofibrant
    bool zero_ok = c.zero().has_value();
    if (!zero_ok) {
        r.fail("axiom 2", "no zero object");
    } else {
        const std::size_t z = *c.zero();
        for (std::size_t a = 0; a < n; ++a) {
            if (c.hom(z, a).size() != 1 || c.hom(a, z).size() != 1) {
                r.fail("axiom 2", oname(z) + " is not a zero object: maps to or from " + oname(a) + " not unique");
                zero_ok = false;
            } else if (!c.is_cofibration(c.hom(z, a)[0])) {
                r.fail("axiom 2", "0 -> " + oname(a) + " is not a cofibration");
            }
        }
    }

    // (3) chosen pushouts are pushouts; (4) their legs are cofibrations
    for (std::size_t i = 0; i < m; ++i) {
        if (!c.is_cofibration(i))
            continue;
        for (std::size_t f : c.out(c.source(i))) {
            auto w = c.pushout(i, f);
            const std::string span = "span " + name(i) + ", " + name(f);
            if (!w) {
                if (auto found = find_pushout(c, i, f))
                    r.fail("axiom 3", span + " has a pushout " + oname(found->object) + " in the table but none recorded");
                continue;
            }
            if (!is_pushout(c, i, f, *w)) {
                r.fail("axiom 3", "recorded pushout of " + span + " is not a pushout");
                continue;
            }
            if (!c.is_cofibration(w->cofibration))
                r.fail("axiom 4", "pushout leg " + name(w->cofibration) + " of " + span + " is not a cofibration");
        }
    }

    // (5) gluing: weak equivalences of spans induce weak equivalences of pushouts.
    // When all three components are isomorphisms the induced map is an
    // isomorphism between pushouts, already covered by (1) and (3), so only
    // triples with a non-invertible weak equivalence are enumerated.
    auto weak_out = [&](std::size_t a) {
        std::vector<std::size_t> out;
        for (std::size_t x : c.out(a))
            if (c.is_weak_equivalence(x))
                out.push_back(x);
        return out;
    };
    std::vector<char> strict(n, 0);  // object with a non-invertible weak equivalence out of it
    for (std::size_t x = 0; x < m; ++x)
        if (c.is_weak_equivalence(x) && !c.is_isomorphism(x))
            strict[c.source(x)] = 1;
    for (const auto& [i, f, w] : c.pushouts()) {
        if (!c.is_cofibration(i))
            continue;
        const std::size_t a = c.source(i), b = c.target(i), t = c.target(f);
        if (!strict[a] && !strict[b] && !strict[t])
            continue;
        for (std::size_t alpha : weak_out(a)) {
            const std::size_t a2 = c.target(alpha);
            for (std::size_t beta : weak_out(b)) {
                const std::size_t b2 = c.target(beta);
                const std::size_t bi = c.compose(beta, i);
                for (std::size_t i2 : c.hom(a2, b2)) {
                    if (!c.is_cofibration(i2) || c.compose(i2, alpha) != bi)
                        continue;
                    for (std::size_t gamma : weak_out(t)) {
                        if (c.is_isomorphism(alpha) && c.is_isomorphism(beta) && c.is_isomorphism(gamma))
                            continue;
                        const std::size_t t2 = c.target(gamma);
                        const std::size_t gf = c.compose(gamma, f);
                        for (std::size_t f2 : c.hom(a2, t2)) {
                            if (c.compose(f2, alpha) != gf)
                                continue;
                            auto w2 = c.pushout(i2, f2);
                            if (!w2)
                                continue;
                            auto h = induced_map(c, w, w2->object, c.compose(w2->from_target, beta),
                                                 c.compose(w2->cofibration, gamma));
                            if (!h)
                                r.fail("axiom 5", "no induced map between pushouts of " + name(i) + ", " + name(f) +
                                                      " and " + name(i2) + ", " + name(f2));
                            else if (!c.is_weak_equivalence(*h))
                                r.fail("axiom 5", "weak equivalence of spans " + name(i) + ", " + name(f) + " -> " +
                                                      name(i2) + ", " + name(f2) + " induces " + name(*h) +
                                                      ", not a weak equivalence");
                        }
                    }
                }
            }
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Built-in families, from concrete finite structures: a carrier is a finite
// set with basepoint 0, optionally an abelian group Z/n_1 x ... x Z/n_k with
// elements in mixed radix (first factor most significant).

namespace {

struct Carrier {
    std::string name;
    std::size_t size = 0;
    std::size_t card = 1;
    bool group = false;
    std::vector<std::int64_t> factors;
};

using Function = std::vector<std::uint16_t>;

std::vector<std::int64_t> coords(const Carrier& c, std::size_t x)
{
    std::vector<std::int64_t> out(c.factors.size());
    for (std::size_t j = c.factors.size(); j-- > 0;) {
        out[j] = static_cast<std::int64_t>(x % c.factors[j]);
        x /= c.factors[j];
    }
    return out;
}

std::size_t encode(const Carrier& c, const std::vector<std::int64_t>& v)
{
    std::size_t x = 0;
    for (std::size_t j = 0; j < c.factors.size(); ++j) {
        std::int64_t r = v[j] % c.factors[j];
        if (r < 0)
            r += c.factors[j];
        x = x * c.factors[j] + static_cast<std::size_t>(r);
    }
    return x;
}

std::string tuple_name(const std::vector<std::int64_t>& v)
{
    if (v.size() == 1)
        return std::to_string(v[0]);
    std::string s = "(";
    for (std::size_t j = 0; j < v.size(); ++j)
        s += (j ? "," : "") + std::to_string(v[j]);
    return s + ")";
}

// Homomorphisms: images of the generators, each killed by the generator's order.
std::vector<std::pair<Function, std::string>> group_maps(const Carrier& s, const Carrier& t)
{
    std::vector<std::vector<std::size_t>> choices(s.factors.size());
    for (std::size_t j = 0; j < s.factors.size(); ++j)
        for (std::size_t h = 0; h < t.card; ++h) {
            auto hc = coords(t, h);
            bool ok = true;
            for (std::size_t i = 0; i < hc.size() && ok; ++i)
                ok = (s.factors[j] * hc[i]) % t.factors[i] == 0;
            if (ok)
                choices[j].push_back(h);
        }
    std::size_t total = 1;
    for (const auto& ch : choices)
        total *= ch.size();
    std::vector<std::pair<Function, std::string>> out;
    std::vector<std::size_t> pick(s.factors.size(), 0);
    for (std::size_t idx = 0; idx < total; ++idx) {
        for (std::size_t j = pick.size(), rest = idx; j-- > 0;) {
            pick[j] = rest % choices[j].size();
            rest /= choices[j].size();
        }
        Function fn(s.card);
        std::string name = "[";
        for (std::size_t j = 0; j < pick.size(); ++j)
            name += (j ? "," : "") + tuple_name(coords(t, choices[j][pick[j]]));
        name += "]";
        for (std::size_t x = 0; x < s.card; ++x) {
            auto xc = coords(s, x);
            std::vector<std::int64_t> y(t.factors.size(), 0);
            for (std::size_t j = 0; j < xc.size(); ++j) {
                auto hc = coords(t, choices[j][pick[j]]);
                for (std::size_t i = 0; i < y.size(); ++i)
                    y[i] += xc[j] * hc[i];
            }
            fn[x] = static_cast<std::uint16_t>(encode(t, y));
        }
        out.emplace_back(std::move(fn), std::move(name));
    }
    return out;
}

// Pointed maps: any images for 1..n, basepoint fixed.
std::vector<std::pair<Function, std::string>> pointed_maps(const Carrier& s, const Carrier& t)
{
    std::size_t total = 1;
    for (std::size_t x = 1; x < s.card; ++x)
        total *= t.card;
    std::vector<std::pair<Function, std::string>> out;
    for (std::size_t idx = 0; idx < total; ++idx) {
        Function fn(s.card, 0);
        for (std::size_t x = s.card, rest = idx; x-- > 1;) {
            fn[x] = static_cast<std::uint16_t>(rest % t.card);
            rest /= t.card;
        }
        std::string name = "[";
        for (std::size_t x = 1; x < s.card; ++x)
            name += (x > 1 ? "," : "") + (fn[x] == 0 ? std::string("*") : std::to_string(fn[x]));
        out.emplace_back(std::move(fn), name + "]");
    }
    return out;
}

// |Hom(a, b)|, as a double so that huge families are caught before enumeration
double hom_count(const Carrier& a, const Carrier& b)
{
    double n = 1;
    if (a.group) {
        for (auto x : a.factors)
            for (auto y : b.factors)
                n *= static_cast<double>(std::gcd(x, y));
    } else {
        n = std::pow(static_cast<double>(b.card), static_cast<double>(a.card - 1));
    }
    return n;
}

constexpr double max_composition_entries = 1 << 24;

FiniteWaldhausenCategory concrete_category(std::string name, std::size_t bound, const std::vector<Carrier>& carriers)
{
    // the composition table holds one entry per composable pair
    double pairs = 0;
    for (const auto& a : carriers)
        for (const auto& b : carriers)
            for (const auto& c : carriers)
                pairs += hom_count(a, b) * hom_count(b, c);
    if (pairs > max_composition_entries)
        throw CapExceeded(name + ": more than " + std::to_string(static_cast<std::uint64_t>(max_composition_entries)) +
                          " composable pairs of morphisms");
    FiniteWaldhausenCategory c(std::move(name), bound);
    for (const auto& k : carriers)
        c.add_object(k.name, k.size);
    std::vector<Function> fns;
    std::map<std::tuple<std::size_t, std::size_t, Function>, std::size_t> lookup;  // (source, target, fn) -> id
    for (std::size_t a = 0; a < carriers.size(); ++a)
        for (std::size_t b = 0; b < carriers.size(); ++b) {
            auto maps = carriers[a].group ? group_maps(carriers[a], carriers[b]) : pointed_maps(carriers[a], carriers[b]);
            for (auto& [fn, mname] : maps) {
                std::vector<char> hit(carriers[b].card, 0);
                std::size_t distinct = 0;
                for (auto y : fn)
                    if (!hit[y]) {
                        hit[y] = 1;
                        ++distinct;
                    }
                const bool injective = distinct == fn.size();
                const bool bijective = injective && distinct == carriers[b].card;
                std::size_t id = c.add_morphism({a, b, mname, injective, bijective});
                lookup[{a, b, fn}] = id;
                fns.push_back(std::move(fn));
            }
        }
    c.set_zero(0);
    c.set_composition([&](std::size_t g, std::size_t f) {
        Function gf(fns[f].size());
        for (std::size_t x = 0; x < gf.size(); ++x)
            gf[x] = fns[g][fns[f][x]];
        auto it = lookup.find({c.source(f), c.target(g), gf});
        return it == lookup.end() ? no_morphism : it->second;
    });
    c.compute_pushouts();
    return c;
}

Carrier group_carrier(std::string name, std::size_t size, std::vector<std::int64_t> factors)
{
    Carrier k;
    k.name = std::move(name);
    k.size = size;
    k.group = true;
    k.factors = std::move(factors);
    for (auto f : k.factors)
        k.card *= static_cast<std::size_t>(f);
    return k;
}

constexpr std::size_t max_carrier = 4096;

}  // namespace

FiniteWaldhausenCategory trivial_category()
{
    return concrete_category("trivial", 0, {group_carrier("0", 0, {})});
}

FiniteWaldhausenCategory vect_gf(std::int64_t p, std::size_t bound)
{
    if (!is_prime(p))
        throw DomainError("vect_gf needs a prime field size, got " + std::to_string(p));
    std::vector<Carrier> carriers;
    std::size_t card = 1;
    for (std::size_t d = 0; d <= bound; ++d) {
        if (d > 0)
            card *= static_cast<std::size_t>(p);
        if (card > max_carrier)
            throw CapExceeded("vect_gf: F_" + std::to_string(p) + "^" + std::to_string(d) + " is too large");
        std::string field = "F" + std::to_string(p);
        std::string nm = d == 0 ? "0" : d == 1 ? field : field + "^" + std::to_string(d);
        carriers.push_back(group_carrier(nm, d, std::vector<std::int64_t>(d, p)));
    }
    return concrete_category("vect_gf(" + std::to_string(p) + "," + std::to_string(bound) + ")", bound, carriers);
}

FiniteWaldhausenCategory pointed_sets(std::size_t bound)
{
    if (bound > 6)
        throw CapExceeded("pointed_sets: bound above 6");
    std::vector<Carrier> carriers;
    for (std::size_t n = 0; n <= bound; ++n) {
        Carrier k;
        k.name = "{*";
        for (std::size_t x = 1; x <= n; ++x)
            k.name += "," + std::to_string(x);
        k.name += "}";
        k.size = n;
        k.card = n + 1;
        carriers.push_back(k);
    }
    return concrete_category("pointed_sets(" + std::to_string(bound) + ")", bound, carriers);
}

FiniteWaldhausenCategory finite_modules(std::int64_t m, std::size_t bound)
{
    if (m < 2)
        throw DomainError("finite_modules needs m >= 2");
    if (bound > max_carrier)
        throw CapExceeded("finite_modules: order bound above " + std::to_string(max_carrier));
    std::vector<std::int64_t> divisors;
    for (std::int64_t d = 2; d <= m; ++d)
        if (m % d == 0)
            divisors.push_back(d);
    // invariant factor lists d_1 | d_2 | ... with product <= bound
    std::vector<std::vector<std::int64_t>> lists{{}};
    for (std::size_t at = 0; at < lists.size(); ++at) {
        auto base = lists[at];
        std::int64_t order = 1;
        for (auto d : base)
            order *= d;
        for (auto d : divisors) {
            if (!base.empty() && d % base.back() != 0)
                continue;
            if (order * d > static_cast<std::int64_t>(bound))
                continue;
            auto next = base;
            next.push_back(d);
            lists.push_back(next);
        }
    }
    std::vector<Carrier> carriers;
    for (const auto& l : lists) {
        std::size_t order = 1;
        for (auto d : l)
            order *= static_cast<std::size_t>(d);
        std::string nm;
        for (std::size_t j = 0; j < l.size(); ++j)
            nm += (j ? "+" : "") + std::string("Z/") + std::to_string(l[j]);
        carriers.push_back(group_carrier(l.empty() ? "0" : nm, order, l));
    }
    std::stable_sort(carriers.begin() + 1, carriers.end(), [](const Carrier& a, const Carrier& b) {
        return std::tie(a.size, a.name) < std::tie(b.size, b.name);
    });
    return concrete_category("finite_modules(" + std::to_string(m) + "," + std::to_string(bound) + ")", bound,
                             carriers);
}

std::vector<CorruptedFixture> corrupted_fixtures()
{
    const FiniteWaldhausenCategory v = vect_gf(2, 2);
    const std::size_t z = v.zero_object();
    std::size_t line = no_morphism, plane = no_morphism;
    for (std::size_t a = 0; a < v.object_count(); ++a) {
        if (v.object(a).size == 1)
            line = a;
        if (v.object(a).size == 2)
            plane = a;
    }
    const std::size_t in_line = v.hom(z, line).at(0);
    std::vector<CorruptedFixture> out;

    CorruptedFixture f1{"unflagged-isomorphism", "axiom 1", v};
    for (std::size_t m : v.hom(plane, plane))
        if (v.is_isomorphism(m) && m != v.identity(plane)) {
            f1.category.set_cofibration(m, false);
            break;
        }
    out.push_back(std::move(f1));

    CorruptedFixture f2{"zero-map-not-cofibration", "axiom 2", v};
    f2.category.set_cofibration(in_line, false);
    out.push_back(std::move(f2));

    // the pushout F2 <- 0 -> F2 fits in the bound but is not recorded
    CorruptedFixture f3{"missing-pushout", "axiom 3", v};
    f3.category.clear_pushout(in_line, in_line);
    out.push_back(std::move(f3));

    CorruptedFixture f4{"pushout-leg-not-cofibration", "axiom 4", v};
    f4.category.set_cofibration(v.pushout(in_line, in_line).value().cofibration, false);
    out.push_back(std::move(f4));

    // F2 -> 0 as a weak equivalence: (F2 <- 0 -> F2) ~ (0 <- 0 -> F2), but F2^2 -> F2 is not one
    CorruptedFixture f5{"collapse-weak-equivalence", "axiom 5", v};
    f5.category.set_weak_equivalence(v.hom(line, z).at(0), true);
    out.push_back(std::move(f5));
    return out;
}

// ---------------------------------------------------------------------------
// Functors and End(C)

ValidationReport validate_exact(const ExactFunctor& F, const FiniteWaldhausenCategory& s,
                                const FiniteWaldhausenCategory& t)
{
    ValidationReport report;
    Reporter r(report);
    const std::string tag = "functor " + F.name;
    if (F.on_objects.size() != s.object_count() || F.on_morphisms.size() != s.morphism_count()) {
        r.fail(tag, "maps have the wrong size");
        return report;
    }
    for (std::size_t a = 0; a < s.object_count(); ++a)
        if (F.on_objects[a] >= t.object_count()) {
            r.fail(tag, "object image out of range");
            return report;
        }
    for (std::size_t f = 0; f < s.morphism_count(); ++f) {
        const std::size_t g = F.on_morphisms[f];
        if (g >= t.morphism_count() || t.source(g) != F.on_objects[s.source(f)] ||
            t.target(g) != F.on_objects[s.target(f)]) {
            r.fail(tag, "image of '" + s.morphism(f).name + "' has wrong endpoints");
            return report;
        }
        if (s.is_cofibration(f) && !t.is_cofibration(g))
            r.fail(tag, "cofibration '" + s.morphism(f).name + "' not sent to a cofibration");
        if (s.is_weak_equivalence(f) && !t.is_weak_equivalence(g))
            r.fail(tag, "weak equivalence '" + s.morphism(f).name + "' not sent to a weak equivalence");
    }
    for (std::size_t a = 0; a < s.object_count(); ++a)
        if (F.on_morphisms[s.identity(a)] != t.identity(F.on_objects[a]))
            r.fail(tag, "identity of '" + s.object(a).name + "' not preserved");
    for (std::size_t f = 0; f < s.morphism_count(); ++f)
        for (std::size_t g : s.out(s.target(f)))
            if (F.on_morphisms[s.compose(g, f)] != t.compose(F.on_morphisms[g], F.on_morphisms[f]))
                r.fail(tag, "composition not preserved");
    if (F.on_objects[s.zero_object()] != t.zero_object())
        r.fail(tag, "zero object not preserved");
    for (const auto& [i, f, w] : s.pushouts()) {
        const std::size_t fi = F.on_morphisms[i], ff = F.on_morphisms[f];
        Pushout image{F.on_objects[w.object], F.on_morphisms[w.from_target], F.on_morphisms[w.cofibration]};
        bool ok;
        if (auto w2 = t.pushout(fi, ff)) {
            auto h = induced_map(t, *w2, image.object, image.from_target, image.cofibration);
            ok = h && t.is_isomorphism(*h);
        } else {
            ok = is_pushout(t, fi, ff, image);
        }
        if (!ok)
            r.fail(tag, "pushout of '" + s.morphism(i).name + "', '" + s.morphism(f).name + "' not preserved");
    }
    return report;
}

ExactFunctor compose(const ExactFunctor& g, const ExactFunctor& f)
{
    ExactFunctor out;
    out.name = g.name + " o " + f.name;
    for (auto a : f.on_objects)
        out.on_objects.push_back(g.on_objects.at(a));
    for (auto m : f.on_morphisms)
        out.on_morphisms.push_back(g.on_morphisms.at(m));
    return out;
}

bool is_identity_functor(const ExactFunctor& f, const FiniteWaldhausenCategory& c)
{
    if (f.on_objects.size() != c.object_count() || f.on_morphisms.size() != c.morphism_count())
        return false;
    for (std::size_t a = 0; a < c.object_count(); ++a)
        if (f.on_objects[a] != a)
            return false;
    for (std::size_t m = 0; m < c.morphism_count(); ++m)
        if (f.on_morphisms[m] != m)
            return false;
    return true;
}

EndCategory end_category(const FiniteWaldhausenCategory& c)
{
    EndCategory e;
    auto& d = e.category;
    d = FiniteWaldhausenCategory("End(" + c.name() + ")", c.bound());
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> object_id;  // (a, f) -> id
    for (std::size_t a = 0; a < c.object_count(); ++a)
        for (std::size_t f : c.hom(a, a)) {
            object_id[{a, f}] = d.add_object(c.object(a).name + ":" + c.morphism(f).name, c.object(a).size);
            e.base_object.push_back(a);
            e.endomorphism.push_back(f);
        }
    std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::size_t> morphism_id;
    for (std::size_t x = 0; x < d.object_count(); ++x)
        for (std::size_t y = 0; y < d.object_count(); ++y)
            for (std::size_t i : c.hom(e.base_object[x], e.base_object[y])) {
                if (c.compose(i, e.endomorphism[x]) != c.compose(e.endomorphism[y], i))
                    continue;
                const auto& bm = c.morphism(i);
                morphism_id[{x, y, i}] = d.add_morphism({x, y, bm.name, bm.cofibration, bm.weak_equivalence});
                e.base_morphism.push_back(i);
            }
    auto find = [&](std::size_t x, std::size_t y, std::size_t i) {
        auto it = morphism_id.find({x, y, i});
        return it == morphism_id.end() ? no_morphism : it->second;
    };
    d.set_zero(object_id.at({c.zero_object(), c.identity(c.zero_object())}));
    d.set_composition([&](std::size_t g, std::size_t f) {
        return find(d.source(f), d.target(g), c.compose(e.base_morphism[g], e.base_morphism[f]));
    });
    // pushouts: the chosen pushout in C with its induced endomorphism
    for (std::size_t i = 0; i < d.morphism_count(); ++i) {
        if (!d.is_cofibration(i))
            continue;
        const std::size_t y = d.target(i);
        for (std::size_t f : d.out(d.source(i))) {
            const std::size_t z = d.target(f);
            auto w = c.pushout(e.base_morphism[i], e.base_morphism[f]);
            if (!w)
                continue;
            auto endo = induced_map(c, *w, w->object, c.compose(w->from_target, e.endomorphism[y]),
                                    c.compose(w->cofibration, e.endomorphism[z]));
            if (!endo)
                throw InvariantBreach("End(C): no induced endomorphism on a pushout");
            const std::size_t obj = object_id.at({w->object, *endo});
            const std::size_t u = find(y, obj, w->from_target), v = find(z, obj, w->cofibration);
            if (u == no_morphism || v == no_morphism)
                throw InvariantBreach("End(C): pushout legs are not maps of endomorphisms");
            d.set_pushout(i, f, {obj, u, v});
        }
    }

    auto inclusion = [&](std::string name, bool identity) {
        ExactFunctor F;
        F.name = std::move(name);
        for (std::size_t a = 0; a < c.object_count(); ++a)
            F.on_objects.push_back(object_id.at({a, identity ? c.identity(a) : c.zero_map(a, a)}));
        for (std::size_t m = 0; m < c.morphism_count(); ++m)
            F.on_morphisms.push_back(find(F.on_objects[c.source(m)], F.on_objects[c.target(m)], m));
        return F;
    };
    e.iota0 = inclusion("iota0", false);
    e.iota1 = inclusion("iota1", true);
    e.forget.name = "forget";
    e.forget.on_objects = e.base_object;
    e.forget.on_morphisms = e.base_morphism;
    return e;
}

// ---------------------------------------------------------------------------
// Grothendieck presentation

GrothendieckPresentation grothendieck_presentation(const FiniteWaldhausenCategory& c)
{
    GrothendieckPresentation p;
    const std::size_t z = c.zero_object();
    p.generator_index.assign(c.object_count(), no_morphism);
    for (std::size_t a = 0; a < c.object_count(); ++a)
        if (a != z) {
            p.generator_index[a] = p.generators.size();
            p.generators.push_back(a);
        }
    const std::size_t g = p.generators.size();
    std::set<std::vector<long>> columns;
    auto add = [&](std::vector<long> col) {
        if (std::any_of(col.begin(), col.end(), [](long v) { return v != 0; }))
            columns.insert(std::move(col));
    };
    auto bump = [&](std::vector<long>& col, std::size_t a, long by) {
        if (a != z)
            col[p.generator_index[a]] += by;
    };
    for (std::size_t m = 0; m < c.morphism_count(); ++m) {
        if (c.is_weak_equivalence(m)) {
            std::vector<long> col(g, 0);
            bump(col, c.source(m), 1);
            bump(col, c.target(m), -1);
            add(std::move(col));
        }
        if (c.is_cofibration(m)) {
            auto w = c.pushout(m, c.hom(c.source(m), z).at(0));
            if (!w)
                continue;
            std::vector<long> col(g, 0);
            bump(col, c.target(m), 1);
            bump(col, c.source(m), -1);
            bump(col, w->object, -1);
            add(std::move(col));
        }
    }
    const BaseRing zz = BaseRing::integers();
    p.relations = Matrix(zz, g, columns.size());
    std::size_t j = 0;
    for (const auto& col : columns) {
        for (std::size_t i = 0; i < g; ++i)
            p.relations.set(i, j, Scalar(col[i]));
        ++j;
    }
    p.group = homology_from_differentials(Matrix(zz, 0, g), p.relations).group();
    return p;
}

FPAbelianGroup grothendieck_k0(const FiniteWaldhausenCategory& c)
{
    return grothendieck_presentation(c).group;
}

Matrix presentation_map(const ExactFunctor& f, const GrothendieckPresentation& s, const GrothendieckPresentation& t)
{
    Matrix m(BaseRing::integers(), t.generators.size(), s.generators.size());
    for (std::size_t j = 0; j < s.generators.size(); ++j) {
        const std::size_t row = t.generator_index.at(f.on_objects.at(s.generators[j]));
        if (row != no_morphism)
            m.set(row, j, 1);
    }
    return m;
}

namespace {

bool in_lattice(const Matrix& relations, const Vector& v)
{
    if (relations.cols() == 0)
        return std::all_of(v.begin(), v.end(), [](const Scalar& x) { return sgn(x) == 0; });
    return std::holds_alternative<Vector>(solve_membership(relations, v));
}

}  // namespace

bool respects_relations(const Matrix& m, const GrothendieckPresentation& s, const GrothendieckPresentation& t)
{
    for (std::size_t j = 0; j < s.relations.cols(); ++j)
        if (!in_lattice(t.relations, m.apply(s.relations.column(j))))
            return false;
    return true;
}

bool induces_identity(const Matrix& m, const GrothendieckPresentation& p)
{
    if (m.rows() != p.generators.size() || m.cols() != p.generators.size())
        return false;
    const Matrix diff = m - Matrix::identity(BaseRing::integers(), p.generators.size());
    for (std::size_t j = 0; j < diff.cols(); ++j)
        if (!in_lattice(p.relations, diff.column(j)))
            return false;
    return true;
}

}  // namespace dtrace
