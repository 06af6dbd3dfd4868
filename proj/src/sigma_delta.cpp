#include "dtrace/sigma_delta.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

namespace dtrace {

namespace {

std::vector<std::size_t> identity_operator(std::size_t k)
{
    std::vector<std::size_t> theta(k + 1);
    std::iota(theta.begin(), theta.end(), std::size_t{0});
    return theta;
}

std::string join(const std::vector<std::size_t>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

std::string ks_name(const std::vector<std::size_t>& ks)
{
    return "(" + std::to_string(ks.size()) + ";" + join(ks) + ")";
}

// every ks with n <= n_max, k_i <= k_cap, ordered by (n, ks)
std::vector<std::vector<std::size_t>> all_indices(std::size_t n_max, std::size_t k_cap)
{
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t n = 0; n <= n_max; ++n) {
        std::vector<std::size_t> ks(n, 0);
        while (true) {
            out.push_back(ks);
            std::size_t j = n;
            while (j > 0 && ++ks[j - 1] > k_cap)
                ks[--j] = 0;
            if (j == 0)
                break;
        }
    }
    return out;
}

std::size_t level_count(const SigmaDeltaDiagram& x, const std::vector<std::size_t>& ks)
{
    return x.entries.at(ks).sizes.size();
}

}  // namespace

std::vector<std::size_t> SigmaDeltaMorphism::pushed_ks() const
{
    std::vector<std::size_t> k(target_n(), 1);
    for (std::size_t j = 0; j < injection.size(); ++j)
        k.at(injection[j]) = source_ks.at(j);
    return k;
}

std::vector<std::size_t> SigmaDeltaMorphism::target_ks() const
{
    std::vector<std::size_t> l;
    for (const auto& theta : operators)
        l.push_back(theta.size() - 1);
    return l;
}

bool SigmaDeltaMorphism::identity_operators() const
{
    const auto k = pushed_ks();
    for (std::size_t r = 0; r < operators.size(); ++r)
        if (operators[r] != identity_operator(k[r]))
            return false;
    return true;
}

std::string SigmaDeltaMorphism::to_string() const
{
    std::string s = ks_name(source_ks) + " -[" + join(injection) + "]";
    for (const auto& theta : operators)
        s += "{" + join(theta) + "}";
    return s + "-> " + ks_name(target_ks());
}

SigmaDeltaMorphism compose(const SigmaDeltaMorphism& b, const SigmaDeltaMorphism& a)
{
    if (a.target_ks() != b.source_ks)
        throw DomainError("Sigma_Delta morphisms are not composable: " + a.to_string() + " then " + b.to_string());
    SigmaDeltaMorphism c;
    c.source_ks = a.source_ks;
    for (std::size_t j : a.injection)
        c.injection.push_back(b.injection[j]);
    c.operators.resize(b.target_n());
    std::vector<bool> hit(b.target_n(), false);
    for (std::size_t j = 0; j < b.injection.size(); ++j) {
        const std::size_t r = b.injection[j];
        hit[r] = true;
        for (std::size_t x : b.operators[r])
            c.operators[r].push_back(a.operators[j][x]);
    }
    for (std::size_t r = 0; r < b.target_n(); ++r)
        if (!hit[r])
            c.operators[r] = b.operators[r];
    return c;
}

std::vector<SigmaDeltaMorphism> sigma_delta_generators(std::size_t n_max, std::size_t k_cap)
{
    std::set<SigmaDeltaMorphism> gens;
    const auto indices = all_indices(n_max, k_cap);
    for (const auto& ks : indices) {
        const std::size_t n = ks.size();
        std::vector<std::size_t> ident(n);
        std::iota(ident.begin(), ident.end(), std::size_t{0});
        for (std::size_t j = 0; j < n; ++j) {
            SigmaDeltaMorphism f{ks, ident, {}};
            for (std::size_t r = 0; r < n; ++r)
                f.operators.push_back(identity_operator(ks[r]));
            for (std::size_t i = 0; ks[j] > 0 && i <= ks[j]; ++i) {
                f.operators[j] = face_operator(ks[j], i);
                gens.insert(f);
            }
            for (std::size_t i = 0; ks[j] < k_cap && i <= ks[j]; ++i) {
                f.operators[j] = degeneracy_operator(ks[j], i);
                gens.insert(f);
            }
        }
        // injections into every n' >= n, identity operators
        for (std::size_t target_n = n; target_n <= n_max; ++target_n) {
            if (target_n > n && k_cap < 1)
                break;
            std::vector<std::size_t> f(n);
            std::function<void(std::size_t)> choose = [&](std::size_t j) {
                if (j == n) {
                    SigmaDeltaMorphism m{ks, f, {}};
                    m.operators.resize(target_n);
                    const auto k = m.pushed_ks();
                    for (std::size_t r = 0; r < target_n; ++r)
                        m.operators[r] = identity_operator(k[r]);
                    gens.insert(m);
                    return;
                }
                for (std::size_t r = 0; r < target_n; ++r)
                    if (std::find(f.begin(), f.begin() + static_cast<std::ptrdiff_t>(j), r) ==
                        f.begin() + static_cast<std::ptrdiff_t>(j)) {
                        f[j] = r;
                        choose(j + 1);
                    }
            };
            choose(0);
        }
    }
    std::vector<SigmaDeltaMorphism> base(gens.begin(), gens.end());
    for (const auto& a : base)
        for (const auto& b : base)
            if (a.target_ks() == b.source_ks)
                gens.insert(compose(b, a));
    return {gens.begin(), gens.end()};
}

SigmaDeltaDiagram build_sigma_delta(SigmaDeltaModel& model, std::size_t n_max, std::size_t k_cap)
{
    if (n_max > sigma_delta_n_cap || k_cap > sigma_delta_k_cap)
        throw CapExceeded("Sigma_Delta diagrams are enumerated for n <= " + std::to_string(sigma_delta_n_cap) +
                          " and k <= " + std::to_string(sigma_delta_k_cap));
    SigmaDeltaDiagram x;
    x.name = model.name();
    x.n_max = n_max;
    x.k_cap = k_cap;
    for (const auto& ks : all_indices(n_max, k_cap))
        x.entries.emplace(ks, model.entry(ks));
    for (auto& f : sigma_delta_generators(n_max, k_cap)) {
        SigmaDeltaAction a;
        const auto& src = x.entries.at(f.source_ks);
        const std::size_t levels = std::min(src.sizes.size(), level_count(x, f.target_ks()));
        for (std::size_t p = 0; p < levels; ++p) {
            std::vector<std::size_t> map(src.sizes[p]);
            for (std::size_t e = 0; e < map.size(); ++e)
                map[e] = model.act(f, p, e);
            a.levels.push_back(std::move(map));
        }
        a.morphism = std::move(f);
        x.actions.push_back(std::move(a));
    }
    return x;
}

// ---------------------------------------------------------------------------

namespace {

class KTheoryModel : public SigmaDeltaModel {
public:
    KTheoryModel(const FiniteWaldhausenCategory& c, std::size_t w_max, std::size_t cap)
        : base_(std::make_shared<const FiniteWaldhausenCategory>(c)), w_max_(w_max), cap_(cap)
    {
    }

    std::string name() const override { return "K(" + base_->name() + ")"; }

    PointedSimplicialSet entry(const std::vector<std::size_t>& ks) override { return level(ks).simplicial_set(); }

    std::size_t act(const SigmaDeltaMorphism& f, std::size_t p, std::size_t x) override
    {
        const auto& c = *base_;
        FlatChain fc = level(f.source_ks).flatten(p, x);
        const std::size_t m = f.source_ks.size(), n = f.target_n();
        for (std::size_t j = m; j < n; ++j)
            fc = insert_coordinate(c, fc, j);
        // new coordinate r is current coordinate perm[r]
        std::vector<std::size_t> perm(n);
        std::vector<bool> hit(n, false);
        for (std::size_t j = 0; j < m; ++j) {
            perm[f.injection[j]] = j;
            hit[f.injection[j]] = true;
        }
        for (std::size_t r = 0, fresh = m; r < n; ++r)
            if (!hit[r])
                perm[r] = fresh++;
        if (n > 0)
            fc = permute_coordinates(fc, perm);
        const auto k = f.pushed_ks();
        for (std::size_t r = 0; r < n; ++r)
            if (f.operators[r] != identity_operator(k[r]))
                fc = restrict_coordinate(c, fc, r, f.operators[r]);
        auto id = level(f.target_ks()).find(fc);
        if (!id)
            throw InvariantBreach("Sigma_Delta action of " + f.to_string() + " leaves the enumerated entry");
        return *id;
    }

private:
    const IteratedS& level(const std::vector<std::size_t>& ks)
    {
        auto it = levels_.find(ks);
        if (it == levels_.end()) {
            const std::size_t total = std::accumulate(ks.begin(), ks.end(), std::size_t{0});
            const std::size_t w = total > sigma_delta_w_budget ? 0 : w_max_;
            it = levels_.emplace(ks, std::make_unique<IteratedS>(base_, ks, w, cap_)).first;
        }
        return *it->second;
    }

    std::shared_ptr<const FiniteWaldhausenCategory> base_;
    std::size_t w_max_, cap_;
    std::map<std::vector<std::size_t>, std::unique_ptr<IteratedS>> levels_;
};

// Simplex 0 is the basepoint; t = (t_1..t_n), 1 <= t_j <= k_j, is 1 + mixed radix.
class FreeModel : public SigmaDeltaModel {
public:
    explicit FreeModel(std::size_t w_max) : w_max_(w_max) {}

    std::string name() const override { return "free(S^0)"; }

    PointedSimplicialSet entry(const std::vector<std::size_t>& ks) override
    {
        std::size_t size = 1;
        for (std::size_t k : ks)
            size *= k;
        ++size;
        PointedSimplicialSet x;
        std::vector<std::size_t> id(size);
        std::iota(id.begin(), id.end(), std::size_t{0});
        x.faces.resize(w_max_ + 1);
        x.degeneracies.resize(w_max_ + 1);
        for (std::size_t p = 0; p <= w_max_; ++p) {
            x.sizes.push_back(size);
            x.basepoints.push_back(0);
            if (p > 0)
                x.faces[p].assign(p + 1, id);
            if (p < w_max_)
                x.degeneracies[p].assign(p + 1, id);
        }
        return x;
    }

    std::size_t act(const SigmaDeltaMorphism& f, std::size_t, std::size_t x) override
    {
        if (x == 0)
            return 0;
        const auto& k = f.source_ks;
        std::vector<std::size_t> t(k.size());
        std::size_t rest = x - 1;
        for (std::size_t j = k.size(); j-- > 0;) {
            t[j] = rest % k[j] + 1;
            rest /= k[j];
        }
        std::vector<std::size_t> u(f.target_n(), 1);
        for (std::size_t j = 0; j < k.size(); ++j)
            u[f.injection[j]] = t[j];
        const auto l = f.target_ks();
        std::size_t out = 0;
        for (std::size_t r = 0; r < u.size(); ++r) {
            // alpha: [k] -> [1] sending the first u entries to 0, pulled back along theta
            std::size_t v = 0;
            for (std::size_t a : f.operators[r])
                v += a < u[r] ? 1 : 0;
            if (v == 0 || v > l[r])
                return 0;
            out = out * l[r] + (v - 1);
        }
        return out + 1;
    }

private:
    std::size_t w_max_;
};

}  // namespace

SigmaDeltaDiagram ktheory_sigma_delta(const FiniteWaldhausenCategory& c, std::size_t n_max, std::size_t k_cap,
                                      std::size_t w_max, std::size_t cap)
{
    KTheoryModel model(c, w_max, cap);
    return build_sigma_delta(model, n_max, k_cap);
}

SigmaDeltaDiagram free_sigma_delta(std::size_t n_max, std::size_t k_cap, std::size_t w_max)
{
    FreeModel model(w_max);
    return build_sigma_delta(model, n_max, k_cap);
}

// ---------------------------------------------------------------------------

ValidationReport sigma_delta_validate(const SigmaDeltaDiagram& x)
{
    ValidationReport r;
    for (const auto& [ks, e] : x.entries) {
        const std::string at = "entry " + ks_name(ks) + ": ";
        r.merge(e.validate(), at);
        if (std::find(ks.begin(), ks.end(), 0) != ks.end())
            for (std::size_t p = 0; p < e.sizes.size(); ++p)
                if (e.sizes[p] != 1)
                    r.fail(at + "some k_i = 0 but level " + std::to_string(p) + " has " + std::to_string(e.sizes[p]) +
                           " simplices");
    }
    std::map<SigmaDeltaMorphism, std::size_t> index;
    for (std::size_t a = 0; a < x.actions.size(); ++a) {
        const auto& act = x.actions[a];
        const auto& f = act.morphism;
        const std::string at = "action " + f.to_string() + ": ";
        index[f] = a;
        auto si = x.entries.find(f.source_ks), ti = x.entries.find(f.target_ks());
        if (si == x.entries.end() || ti == x.entries.end()) {
            r.fail(at + "missing entry");
            continue;
        }
        const auto &s = si->second, &t = ti->second;
        if (act.levels.size() != std::min(s.sizes.size(), t.sizes.size())) {
            r.fail(at + "wrong number of levels");
            continue;
        }
        bool shaped = true;
        for (std::size_t p = 0; p < act.levels.size(); ++p) {
            const auto& m = act.levels[p];
            if (m.size() != s.sizes[p] || std::any_of(m.begin(), m.end(), [&](std::size_t v) { return v >= t.sizes[p]; })) {
                r.fail(at + "level " + std::to_string(p) + " is not a map between the entries");
                shaped = false;
            }
        }
        if (!shaped)
            continue;
        for (std::size_t p = 0; p < act.levels.size(); ++p) {
            const auto& m = act.levels[p];
            if (m[s.basepoints[p]] != t.basepoints[p])
                r.fail(at + "moves the basepoint on level " + std::to_string(p));
            for (std::size_t i = 0; p > 0 && i <= p; ++i)
                for (std::size_t e = 0; e < m.size(); ++e)
                    if (act.levels[p - 1][s.faces[p][i][e]] != t.faces[p][i][m[e]]) {
                        r.fail(at + "does not commute with d_" + std::to_string(i) + " on level " + std::to_string(p));
                        break;
                    }
            for (std::size_t i = 0; p + 1 < act.levels.size() && i <= p; ++i)
                for (std::size_t e = 0; e < m.size(); ++e)
                    if (act.levels[p + 1][s.degeneracies[p][i][e]] != t.degeneracies[p][i][m[e]]) {
                        r.fail(at + "does not commute with s_" + std::to_string(i) + " on level " + std::to_string(p));
                        break;
                    }
            if (f.identity_operators()) {
                std::vector<char> seen(t.sizes[p], 0);
                for (std::size_t v : m)
                    seen[v] = 1;
                if (m.size() != t.sizes[p] || std::find(seen.begin(), seen.end(), 0) != seen.end())
                    r.fail(at + "identity operators but not a bijection on level " + std::to_string(p));
            }
        }
    }
    // functoriality
    for (const auto& a : x.actions)
        for (const auto& b : x.actions) {
            if (a.morphism.target_ks() != b.morphism.source_ks)
                continue;
            auto it = index.find(compose(b.morphism, a.morphism));
            if (it == index.end())
                continue;
            const auto& c = x.actions[it->second];
            const std::size_t levels = std::min({a.levels.size(), b.levels.size(), c.levels.size()});
            for (std::size_t p = 0; p < levels; ++p)
                for (std::size_t e = 0; e < a.levels[p].size(); ++e) {
                    const std::size_t mid = a.levels[p][e];
                    if (mid >= b.levels[p].size() || b.levels[p][mid] != c.levels[p][e]) {
                        r.fail("functoriality fails for " + a.morphism.to_string() + " then " + b.morphism.to_string() +
                               " on level " + std::to_string(p));
                        break;
                    }
                }
        }
    return r;
}

}  // namespace dtrace
