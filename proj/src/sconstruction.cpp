#include "dtrace/sconstruction.hpp"

#include <algorithm>
#include <functional>

namespace dtrace {

std::size_t VectorKeyHash::operator()(const std::vector<std::size_t>& v) const noexcept
{
    std::uint64_t h = 1469598103934665603ull ^ v.size();
    for (std::size_t x : v) {
        h ^= static_cast<std::uint64_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
}

std::vector<std::size_t> SGrid::key() const
{
    std::vector<std::size_t> out;
    out.reserve(1 + objects.size() + right.size() + down.size());
    out.push_back(k);
    out.insert(out.end(), objects.begin(), objects.end());
    out.insert(out.end(), right.begin(), right.end());
    out.insert(out.end(), down.begin(), down.end());
    return out;
}

std::size_t grid_map(const FiniteWaldhausenCategory& c, const SGrid& g, std::size_t i, std::size_t j, std::size_t i2,
                     std::size_t j2)
{
    if (i2 < i || j2 < j || i2 > g.k || j2 > g.k)
        throw DomainError("grid_map: no arrow between these positions");
    std::size_t m = c.identity(g.object(i, j));
    for (std::size_t jj = j; jj < j2; ++jj)
        m = c.compose(g.right_map(i, jj), m);
    for (std::size_t ii = i; ii < i2; ++ii)
        m = c.compose(g.down_map(ii, j2), m);
    return m;
}

std::vector<std::size_t> face_operator(std::size_t k, std::size_t i)
{
    if (k == 0 || i > k)
        throw DomainError("face operator out of range");
    std::vector<std::size_t> theta(k);
    for (std::size_t a = 0; a < k; ++a)
        theta[a] = a < i ? a : a + 1;
    return theta;
}

std::vector<std::size_t> degeneracy_operator(std::size_t k, std::size_t i)
{
    if (i > k)
        throw DomainError("degeneracy operator out of range");
    std::vector<std::size_t> theta(k + 2);
    for (std::size_t a = 0; a < k + 2; ++a)
        theta[a] = a <= i ? a : a - 1;
    return theta;
}

SGrid restrict_grid(const FiniteWaldhausenCategory& c, const SGrid& g, const std::vector<std::size_t>& theta)
{
    if (theta.empty())
        throw DomainError("restrict_grid: empty operator");
    for (std::size_t a = 0; a < theta.size(); ++a)
        if (theta[a] > g.k || (a > 0 && theta[a] < theta[a - 1]))
            throw DomainError("restrict_grid: operator is not monotone into [k]");
    SGrid out;
    const std::size_t l = theta.size() - 1;
    out.k = l;
    out.objects.resize((l + 1) * (l + 1));
    out.right.resize((l + 1) * l);
    out.down.resize(l * (l + 1));
    for (std::size_t a = 0; a <= l; ++a)
        for (std::size_t b = 0; b <= l; ++b) {
            out.objects[a * (l + 1) + b] = g.object(theta[a], theta[b]);
            if (b < l)
                out.right[a * l + b] = grid_map(c, g, theta[a], theta[b], theta[a], theta[b + 1]);
            if (a < l)
                out.down[a * (l + 1) + b] = grid_map(c, g, theta[a], theta[b], theta[a + 1], theta[b]);
        }
    return out;
}

namespace {

// The cocone (d, u, v) on i, f is a pushout: compared with the chosen one when recorded.
bool pushout_square(const FiniteWaldhausenCategory& c, std::size_t i, std::size_t f, std::size_t d, std::size_t u,
                    std::size_t v)
{
    if (c.compose(u, i) != c.compose(v, f))
        return false;
    if (auto w = c.pushout(i, f)) {
        auto h = induced_map(c, *w, d, u, v);
        return h && c.is_isomorphism(*h);
    }
    return is_pushout(c, i, f, {d, u, v});
}

// The unique m: source(q) -> target with m q = rhs (q is a pushout leg, hence epi).
std::optional<std::size_t> factor_through(const FiniteWaldhausenCategory& c, std::size_t q, std::size_t target,
                                          std::size_t rhs)
{
    return c.find_in_hom(c.target(q), target, [&](std::size_t m) { return c.compose(m, q) == rhs; });
}

}  // namespace

ValidationReport validate_s_grid(const FiniteWaldhausenCategory& c, const SGrid& g)
{
    ValidationReport r;
    const std::size_t k = g.k;
    if (g.objects.size() != (k + 1) * (k + 1) || g.right.size() != (k + 1) * k || g.down.size() != k * (k + 1)) {
        r.fail("grid has the wrong shape");
        return r;
    }
    const std::size_t z = c.zero_object();
    for (std::size_t i = 0; i <= k; ++i)
        for (std::size_t j = 0; j <= k; ++j) {
            if (i >= j && g.object(i, j) != z)
                r.fail("entry (" + std::to_string(i) + "," + std::to_string(j) + ") is not the zero object");
            if (j < k && (c.source(g.right_map(i, j)) != g.object(i, j) || c.target(g.right_map(i, j)) != g.object(i, j + 1)))
                r.fail("horizontal map at (" + std::to_string(i) + "," + std::to_string(j) + ") has wrong endpoints");
            if (i < k && (c.source(g.down_map(i, j)) != g.object(i, j) || c.target(g.down_map(i, j)) != g.object(i + 1, j)))
                r.fail("vertical map at (" + std::to_string(i) + "," + std::to_string(j) + ") has wrong endpoints");
        }
    if (!r.ok())
        return r;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            if (c.compose(g.right_map(i + 1, j), g.down_map(i, j)) != c.compose(g.down_map(i, j + 1), g.right_map(i, j)))
                r.fail("square at (" + std::to_string(i) + "," + std::to_string(j) + ") does not commute");
    for (std::size_t i = 0; i <= k; ++i)
        for (std::size_t j = i; j < k; ++j)
            if (!c.is_cofibration(g.right_map(i, j)))
                r.fail("map (" + std::to_string(i) + "," + std::to_string(j) + ") -> (" + std::to_string(i) + "," +
                       std::to_string(j + 1) + ") is not a cofibration");
    if (!r.ok())
        return r;
    for (std::size_t i = 0; i <= k; ++i)
        for (std::size_t j = i; j <= k; ++j)
            for (std::size_t l = j; l <= k; ++l) {
                const std::size_t in = grid_map(c, g, i, j, i, l), to_zero = grid_map(c, g, i, j, j, j);
                const std::size_t u = grid_map(c, g, i, l, j, l), v = grid_map(c, g, j, j, j, l);
                if (!pushout_square(c, in, to_zero, g.object(j, l), u, v))
                    r.fail("square (" + std::to_string(i) + "," + std::to_string(j) + ") -> (" + std::to_string(j) +
                           "," + std::to_string(l) + ") is not a pushout");
            }
    return r;
}

namespace {

// Fills the grid from the first row and q[j][l] : A(0,l) -> A(j,l).
SGrid complete_grid(const FiniteWaldhausenCategory& c, std::size_t k, const std::vector<std::size_t>& row_maps,
                    const std::vector<std::vector<std::size_t>>& q)
{
    SGrid g;
    g.k = k;
    g.objects.resize((k + 1) * (k + 1));
    g.right.resize((k + 1) * k);
    g.down.resize(k * (k + 1));
    for (std::size_t j = 0; j <= k; ++j)
        for (std::size_t l = 0; l <= k; ++l)
            g.objects[j * (k + 1) + l] = c.target(q[j][l]);
    for (std::size_t j = 0; j <= k; ++j)
        for (std::size_t l = 0; l <= k; ++l) {
            if (l < k) {
                auto m = factor_through(c, q[j][l], g.object(j, l + 1), c.compose(q[j][l + 1], row_maps[l]));
                if (!m)
                    throw InvariantBreach("S_k: no induced horizontal map");
                g.right[j * k + l] = *m;
            }
            if (j < k) {
                auto m = factor_through(c, q[j][l], g.object(j + 1, l), q[j + 1][l]);
                if (!m)
                    throw InvariantBreach("S_k: no induced vertical map");
                g.down[j * (k + 1) + l] = *m;
            }
        }
    return g;
}

}  // namespace

std::vector<SGrid> s_k_objects(const FiniteWaldhausenCategory& c, std::size_t k, std::size_t max_k, std::size_t cap)
{
    if (k > max_k)
        throw CapExceeded("s_k_objects: k = " + std::to_string(k) + " above the cap " + std::to_string(max_k));
    const std::size_t z = c.zero_object();
    std::vector<SGrid> out;
    std::vector<std::size_t> row_objects{z}, row_maps;

    std::function<void()> extend = [&]() {
        const std::size_t j = row_objects.size() - 1;
        if (j < k) {
            for (std::size_t m : c.out(row_objects[j])) {
                if (!c.is_cofibration(m))
                    continue;
                row_objects.push_back(c.target(m));
                row_maps.push_back(m);
                extend();
                row_objects.pop_back();
                row_maps.pop_back();
            }
            return;
        }
        // quotient choices for 1 <= j < l <= k
        std::vector<std::vector<std::size_t>> q(k + 1, std::vector<std::size_t>(k + 1));
        std::vector<std::pair<std::size_t, std::size_t>> slots;
        std::vector<std::vector<std::size_t>> choices;
        for (std::size_t l = 0; l <= k; ++l) {
            q[0][l] = c.identity(row_objects[l]);
            for (std::size_t jj = l; jj <= k; ++jj)
                if (jj > 0)
                    q[jj][l] = c.hom(row_objects[l], z).at(0);
        }
        for (std::size_t a = 1; a <= k; ++a)
            for (std::size_t l = a + 1; l <= k; ++l) {
                std::size_t in = c.identity(row_objects[a]);
                for (std::size_t t = a; t < l; ++t)
                    in = c.compose(row_maps[t], in);
                auto w = c.pushout(in, c.hom(row_objects[a], z).at(0));
                if (!w)
                    return;  // quotient outside the table
                std::vector<std::size_t> opts;
                for (std::size_t phi : c.out(w->object))
                    if (c.is_isomorphism(phi))
                        opts.push_back(c.compose(phi, w->from_target));
                std::sort(opts.begin(), opts.end());
                opts.erase(std::unique(opts.begin(), opts.end()), opts.end());
                slots.emplace_back(a, l);
                choices.push_back(std::move(opts));
            }
        std::vector<std::size_t> pick(slots.size(), 0);
        while (true) {
            for (std::size_t s = 0; s < slots.size(); ++s)
                q[slots[s].first][slots[s].second] = choices[s][pick[s]];
            out.push_back(complete_grid(c, k, row_maps, q));
            if (out.size() > cap)
                throw CapExceeded("s_k_objects: more than " + std::to_string(cap) + " grids");
            std::size_t s = slots.size();
            while (s > 0 && ++pick[s - 1] == choices[s - 1].size())
                pick[--s] = 0;
            if (s == 0)
                break;
        }
    };
    extend();
    std::sort(out.begin(), out.end(), [](const SGrid& a, const SGrid& b) { return a.key() < b.key(); });
    return out;
}

// ---------------------------------------------------------------------------

SCategory::SCategory(std::shared_ptr<const FiniteWaldhausenCategory> base, std::size_t k, SMorphisms mode,
                     std::size_t cap)
    : base_(std::move(base)), k_(k), mode_(mode)
{
    const auto& c = *base_;
    const std::size_t z = c.zero_object();
    const std::size_t side = k + 1, cells = side * side;
    const bool weak_only = mode != SMorphisms::all;
    grids_ = s_k_objects(c, k, k, cap);
    category_ = std::make_shared<FiniteWaldhausenCategory>("S_" + std::to_string(k) + "(" + c.name() + ")", c.bound());
    auto& d = *category_;
    for (std::size_t x = 0; x < grids_.size(); ++x) {
        grid_index_[grids_[x].key()] = x;
        std::string name = "[";
        for (std::size_t i = 0; i < side; ++i)
            for (std::size_t j = i + 1; j < side; ++j)
                name += (name.size() > 1 ? " " : "") + c.object(grids_[x].object(i, j)).name;
        d.add_object(name + "]#" + std::to_string(x), c.object(grids_[x].object(0, k)).size);
    }

    // whether A -> B is a cofibration of S_k C (first-row criterion)
    auto cofibration = [&](const SGrid& a, const SGrid& b, const std::vector<std::size_t>& comp) {
        for (std::size_t l = 0; l < k; ++l) {
            if (!c.is_cofibration(comp[l]))
                return false;
            auto w = c.pushout(a.right_map(0, l), comp[l]);
            if (!w)
                return false;
            auto m = induced_map(c, *w, b.object(0, l + 1), comp[l + 1], b.right_map(0, l));
            if (!m || !c.is_cofibration(*m))
                return false;
        }
        return c.is_cofibration(comp[k]);
    };

    std::vector<std::size_t> phi(side);
    for (std::size_t x = 0; x < grids_.size(); ++x)
        for (std::size_t y = 0; y < grids_.size(); ++y) {
            if (mode == SMorphisms::identities && x != y)
                continue;
            const SGrid &a = grids_[x], &b = grids_[y];
            std::function<void(std::size_t)> choose = [&](std::size_t l) {
                if (l <= k) {
                    for (std::size_t m : c.hom(a.object(0, l), b.object(0, l))) {
                        if (weak_only && !c.is_weak_equivalence(m))
                            continue;
                        if (mode == SMorphisms::identities && m != c.identity(a.object(0, l)))
                            continue;
                        if (l > 0 && c.compose(m, a.right_map(0, l - 1)) != c.compose(b.right_map(0, l - 1), phi[l - 1]))
                            continue;
                        phi[l] = m;
                        choose(l + 1);
                    }
                    return;
                }
                std::vector<std::size_t> comp(cells);
                for (std::size_t i = 0; i < side; ++i)
                    for (std::size_t j = 0; j < side; ++j) {
                        std::size_t& slot = comp[i * side + j];
                        if (i >= j) {
                            slot = c.identity(z);
                        } else if (i == 0) {
                            slot = phi[j];
                        } else {
                            const std::size_t qa = grid_map(c, a, 0, j, i, j), qb = grid_map(c, b, 0, j, i, j);
                            auto m = factor_through(c, qa, b.object(i, j), c.compose(qb, phi[j]));
                            if (!m)
                                throw InvariantBreach("S_k: transformation does not descend to a quotient");
                            if (weak_only && !c.is_weak_equivalence(*m))
                                return;
                            slot = *m;
                        }
                    }
                for (std::size_t i = 0; i < side; ++i)
                    for (std::size_t j = 0; j < side; ++j) {
                        if (j < k &&
                            c.compose(comp[i * side + j + 1], a.right_map(i, j)) != c.compose(b.right_map(i, j), comp[i * side + j]))
                            throw InvariantBreach("S_k: transformation not natural");
                        if (i < k &&
                            c.compose(comp[(i + 1) * side + j], a.down_map(i, j)) != c.compose(b.down_map(i, j), comp[i * side + j]))
                            throw InvariantBreach("S_k: transformation not natural");
                    }
                bool weak = std::all_of(comp.begin(), comp.end(), [&](std::size_t m) { return c.is_weak_equivalence(m); });
                bool cof = !weak_only && cofibration(a, b, phi);
                const std::size_t id = d.add_morphism({x, y, "#" + std::to_string(d.morphism_count()), cof, weak});
                std::vector<std::size_t> key{x, y};
                key.insert(key.end(), comp.begin(), comp.end());
                morphism_index_[std::move(key)] = id;
                components_.push_back(std::move(comp));
                if (components_.size() > cap)
                    throw CapExceeded("S_k: more than " + std::to_string(cap) + " morphisms");
            };
            phi[0] = c.identity(z);
            choose(1);
        }

    SGrid zero_grid;
    zero_grid.k = k;
    zero_grid.objects.assign(cells, z);
    zero_grid.right.assign(side * k, c.identity(z));
    zero_grid.down.assign(k * side, c.identity(z));
    d.set_zero(find_object(zero_grid).value());

    d.set_composition([&](std::size_t g, std::size_t f) {
        std::vector<std::size_t> comp(cells);
        for (std::size_t p = 0; p < cells; ++p)
            comp[p] = c.compose(components_[g][p], components_[f][p]);
        return find_morphism(d.source(f), d.target(g), comp).value_or(no_morphism);
    });

    if (weak_only)
        return;
    // levelwise pushouts
    for (std::size_t i = 0; i < d.morphism_count(); ++i) {
        if (!d.is_cofibration(i))
            continue;
        const std::size_t y = d.target(i);
        for (std::size_t f : d.out(d.source(i))) {
            const std::size_t t = d.target(f);
            std::vector<FiniteWaldhausenCategory::Pushout> w(cells);
            bool ok = true;
            for (std::size_t p = 0; p < cells && ok; ++p) {
                auto wp = c.pushout(components_[i][p], components_[f][p]);
                if (wp)
                    w[p] = *wp;
                ok = wp.has_value();
            }
            if (!ok)
                continue;
            SGrid g;
            g.k = k;
            g.objects.resize(cells);
            g.right.resize(side * k);
            g.down.resize(k * side);
            for (std::size_t p = 0; p < cells; ++p)
                g.objects[p] = w[p].object;
            const SGrid &gy = grids_[y], &gt = grids_[t];
            for (std::size_t a = 0; a < side && ok; ++a)
                for (std::size_t b = 0; b < side && ok; ++b) {
                    const std::size_t p = a * side + b;
                    if (b < k) {
                        auto m = induced_map(c, w[p], w[p + 1].object, c.compose(w[p + 1].from_target, gy.right_map(a, b)),
                                             c.compose(w[p + 1].cofibration, gt.right_map(a, b)));
                        if (!m)
                            throw InvariantBreach("S_k: no induced map on a levelwise pushout");
                        g.right[a * k + b] = *m;
                    }
                    if (a < k) {
                        auto m = induced_map(c, w[p], w[p + side].object,
                                             c.compose(w[p + side].from_target, gy.down_map(a, b)),
                                             c.compose(w[p + side].cofibration, gt.down_map(a, b)));
                        if (!m)
                            throw InvariantBreach("S_k: no induced map on a levelwise pushout");
                        g.down[a * side + b] = *m;
                    }
                }
            auto obj = find_object(g);
            if (!obj)
                continue;  // not an object of S_k within the table
            std::vector<std::size_t> cu(cells), cv(cells);
            for (std::size_t p = 0; p < cells; ++p) {
                cu[p] = w[p].from_target;
                cv[p] = w[p].cofibration;
            }
            auto u = find_morphism(y, *obj, cu), v = find_morphism(t, *obj, cv);
            if (!u || !v)
                throw InvariantBreach("S_k: levelwise pushout legs are not transformations");
            d.set_pushout(i, f, {*obj, *u, *v});
        }
    }
}

std::optional<std::size_t> SCategory::find_object(const SGrid& g) const
{
    auto it = grid_index_.find(g.key());
    if (it == grid_index_.end())
        return std::nullopt;
    return it->second;
}

std::optional<std::size_t> SCategory::find_morphism(std::size_t source, std::size_t target,
                                                    const std::vector<std::size_t>& components) const
{
    std::vector<std::size_t> key{source, target};
    key.insert(key.end(), components.begin(), components.end());
    auto it = morphism_index_.find(key);
    if (it == morphism_index_.end())
        return std::nullopt;
    return it->second;
}

// ---------------------------------------------------------------------------

std::vector<std::vector<std::size_t>> weak_chains(const FiniteWaldhausenCategory& d, std::size_t p, std::size_t cap)
{
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> chain;
    std::function<void(std::size_t, std::size_t)> grow = [&](std::size_t last, std::size_t left) {
        if (left == 0) {
            out.push_back(chain);
            if (out.size() > cap)
                throw CapExceeded("weak_chains: more than " + std::to_string(cap) + " chains");
            return;
        }
        for (std::size_t m : d.out(last))
            if (d.is_weak_equivalence(m)) {
                chain.push_back(m);
                grow(d.target(m), left - 1);
                chain.pop_back();
            }
    };
    for (std::size_t x = 0; x < d.object_count(); ++x) {
        chain = {x};
        grow(x, p);
    }
    return out;
}

ValidationReport PointedSimplicialSet::validate() const
{
    ValidationReport r;
    const std::size_t top_level = top();
    if (basepoints.size() != sizes.size() || faces.size() != sizes.size() || degeneracies.size() != sizes.size()) {
        r.fail("simplicial set: level data has inconsistent length");
        return r;
    }
    auto tag = [](const char* what, std::size_t n, std::size_t i) {
        return std::string(what) + "_" + std::to_string(i) + " on level " + std::to_string(n);
    };
    for (std::size_t n = 0; n <= top_level; ++n) {
        if (basepoints[n] >= sizes[n])
            r.fail("basepoint out of range on level " + std::to_string(n));
        if (n > 0 && faces[n].size() != n + 1)
            r.fail("level " + std::to_string(n) + " needs " + std::to_string(n + 1) + " faces");
        if (n < top_level && degeneracies[n].size() != n + 1)
            r.fail("level " + std::to_string(n) + " needs " + std::to_string(n + 1) + " degeneracies");
    }
    if (!r.ok())
        return r;
    for (std::size_t n = 0; n <= top_level; ++n) {
        for (std::size_t i = 0; n > 0 && i <= n; ++i) {
            const auto& d = faces[n][i];
            if (d.size() != sizes[n] || std::any_of(d.begin(), d.end(), [&](std::size_t v) { return v >= sizes[n - 1]; }))
                r.fail(tag("d", n, i) + " is not a map of the right shape");
            else if (d[basepoints[n]] != basepoints[n - 1])
                r.fail(tag("d", n, i) + " moves the basepoint");
        }
        for (std::size_t i = 0; n < top_level && i <= n; ++i) {
            const auto& s = degeneracies[n][i];
            if (s.size() != sizes[n] || std::any_of(s.begin(), s.end(), [&](std::size_t v) { return v >= sizes[n + 1]; }))
                r.fail(tag("s", n, i) + " is not a map of the right shape");
            else if (s[basepoints[n]] != basepoints[n + 1])
                r.fail(tag("s", n, i) + " moves the basepoint");
        }
    }
    if (!r.ok())
        return r;
    for (std::size_t n = 0; n <= top_level; ++n)
        for (std::size_t x = 0; x < sizes[n]; ++x) {
            // d_i d_j = d_{j-1} d_i for i < j
            for (std::size_t j = 0; n >= 2 && j <= n; ++j)
                for (std::size_t i = 0; i < j; ++i)
                    if (faces[n - 1][i][faces[n][j][x]] != faces[n - 1][j - 1][faces[n][i][x]])
                        r.fail("d_" + std::to_string(i) + " d_" + std::to_string(j) + " identity fails on level " +
                               std::to_string(n));
            if (n + 1 > top_level)
                continue;
            for (std::size_t j = 0; j <= n; ++j) {
                const std::size_t sx = degeneracies[n][j][x];
                for (std::size_t i = 0; i <= n + 1; ++i) {
                    const std::size_t lhs = faces[n + 1][i][sx];
                    std::size_t rhs;
                    if (i < j)
                        rhs = degeneracies[n - 1][j - 1][faces[n][i][x]];
                    else if (i == j || i == j + 1)
                        rhs = x;
                    else
                        rhs = degeneracies[n - 1][j][faces[n][i - 1][x]];
                    if (lhs != rhs)
                        r.fail("d_" + std::to_string(i) + " s_" + std::to_string(j) + " identity fails on level " +
                               std::to_string(n));
                }
                if (n + 2 > top_level)
                    continue;
                for (std::size_t i = 0; i <= j; ++i)
                    if (degeneracies[n + 1][i][sx] != degeneracies[n + 1][j + 1][degeneracies[n][i][x]])
                        r.fail("s_" + std::to_string(i) + " s_" + std::to_string(j) + " identity fails on level " +
                               std::to_string(n));
            }
        }
    return r;
}

std::vector<char> PointedSimplicialSet::nondegenerate(std::size_t n) const
{
    std::vector<char> keep(sizes.at(n), 1);
    if (n > 0)
        for (const auto& s : degeneracies.at(n - 1))
            for (std::size_t y : s)
                keep[y] = 0;
    return keep;
}

ChainComplex reduced_normalized_complex(const PointedSimplicialSet& x)
{
    const BaseRing zz = BaseRing::integers();
    const std::size_t top = x.top();
    std::vector<std::vector<std::size_t>> index(top + 1);
    std::vector<std::size_t> ranks(top + 1);
    for (std::size_t n = 0; n <= top; ++n) {
        auto keep = x.nondegenerate(n);
        keep[x.basepoints[n]] = 0;
        index[n].assign(x.sizes[n], no_morphism);
        for (std::size_t e = 0; e < x.sizes[n]; ++e)
            if (keep[e])
                index[n][e] = ranks[n]++;
    }
    std::vector<Matrix> diffs;
    for (std::size_t n = 1; n <= top; ++n) {
        Matrix d(zz, ranks[n - 1], ranks[n]);
        for (std::size_t e = 0; e < x.sizes[n]; ++e) {
            if (index[n][e] == no_morphism)
                continue;
            for (std::size_t i = 0; i <= n; ++i) {
                const std::size_t f = index[n - 1][x.faces[n][i][e]];
                if (f != no_morphism)
                    d.add_to(f, index[n][e], i % 2 ? -1 : 1);
            }
        }
        diffs.push_back(std::move(d));
    }
    return ChainComplex(zz, ranks, std::move(diffs));
}

// ---------------------------------------------------------------------------
// Flattened diagrams

namespace {

std::vector<std::size_t> decode(std::size_t pos, const std::vector<std::size_t>& ks)
{
    std::vector<std::size_t> c(2 * ks.size());
    for (std::size_t j = ks.size(); j-- > 0;) {
        const std::size_t side = ks[j] + 1;
        c[2 * j + 1] = pos % side;
        pos /= side;
        c[2 * j] = pos % side;
        pos /= side;
    }
    return c;
}

std::size_t encode(const std::vector<std::size_t>& c, const std::vector<std::size_t>& ks)
{
    std::size_t pos = 0;
    for (std::size_t j = 0; j < ks.size(); ++j) {
        const std::size_t side = ks[j] + 1;
        pos = (pos * side + c[2 * j]) * side + c[2 * j + 1];
    }
    return pos;
}

std::size_t position_count(const std::vector<std::size_t>& ks)
{
    std::size_t n = 1;
    for (auto k : ks)
        n *= (k + 1) * (k + 1);
    return n;
}

// Composite along coordinate j from coordinates c to (a2, b2) in that coordinate.
std::size_t along(const FiniteWaldhausenCategory& cat, const FlatDiagram& d, std::vector<std::size_t> c, std::size_t j,
                  std::size_t a2, std::size_t b2)
{
    const std::size_t dirs = d.directions();
    std::size_t m = cat.identity(d.objects[encode(c, d.ks)]);
    while (c[2 * j + 1] < b2) {
        m = cat.compose(d.maps[encode(c, d.ks) * dirs + 2 * j], m);
        ++c[2 * j + 1];
    }
    while (c[2 * j] < a2) {
        m = cat.compose(d.maps[encode(c, d.ks) * dirs + 2 * j + 1], m);
        ++c[2 * j];
    }
    return m;
}

FlatDiagram restrict_diagram(const FiniteWaldhausenCategory& cat, const FlatDiagram& d, std::size_t j,
                             const std::vector<std::size_t>& theta, std::vector<std::size_t>& old_of_new)
{
    FlatDiagram out;
    out.ks = d.ks;
    out.ks[j] = theta.size() - 1;
    const std::size_t l = out.ks[j], dirs = d.directions();
    const std::size_t n = position_count(out.ks);
    out.objects.resize(n);
    out.maps.assign(n * dirs, no_morphism);
    old_of_new.resize(n);
    for (std::size_t p = 0; p < n; ++p) {
        auto c = decode(p, out.ks);
        auto oc = c;
        oc[2 * j] = theta[c[2 * j]];
        oc[2 * j + 1] = theta[c[2 * j + 1]];
        const std::size_t op = encode(oc, d.ks);
        old_of_new[p] = op;
        out.objects[p] = d.objects[op];
        for (std::size_t e = 0; e < dirs; ++e)
            if (e / 2 != j)
                out.maps[p * dirs + e] = d.maps[op * dirs + e];
        if (c[2 * j + 1] < l)
            out.maps[p * dirs + 2 * j] = along(cat, d, oc, j, oc[2 * j], theta[c[2 * j + 1] + 1]);
        if (c[2 * j] < l)
            out.maps[p * dirs + 2 * j + 1] = along(cat, d, oc, j, theta[c[2 * j] + 1], oc[2 * j + 1]);
    }
    return out;
}

}  // namespace

FlatChain restrict_coordinate(const FiniteWaldhausenCategory& c, const FlatChain& x, std::size_t coordinate,
                              const std::vector<std::size_t>& theta)
{
    if (x.objects.empty() || coordinate >= x.objects[0].ks.size())
        throw DomainError("restrict_coordinate: no such coordinate");
    const std::size_t k = x.objects[0].ks[coordinate];
    for (std::size_t a = 0; a < theta.size(); ++a)
        if (theta[a] > k || (a > 0 && theta[a] < theta[a - 1]))
            throw DomainError("restrict_coordinate: operator is not monotone into [k]");
    FlatChain out;
    std::vector<std::size_t> old_of_new;
    for (const auto& d : x.objects)
        out.objects.push_back(restrict_diagram(c, d, coordinate, theta, old_of_new));
    for (const auto& comp : x.components) {
        std::vector<std::size_t> nc(old_of_new.size());
        for (std::size_t p = 0; p < nc.size(); ++p)
            nc[p] = comp[old_of_new[p]];
        out.components.push_back(std::move(nc));
    }
    return out;
}

FlatChain insert_coordinate(const FiniteWaldhausenCategory& c, const FlatChain& x, std::size_t slot)
{
    const std::size_t z = c.zero_object();
    const auto& ks = x.objects.at(0).ks;
    if (slot > ks.size())
        throw DomainError("insert_coordinate: slot out of range");
    std::vector<std::size_t> nks = ks;
    nks.insert(nks.begin() + static_cast<std::ptrdiff_t>(slot), 1);
    const std::size_t n = position_count(nks), odirs = 2 * ks.size(), dirs = 2 * nks.size();
    std::vector<std::size_t> old_pos(n);
    std::vector<std::pair<std::size_t, std::size_t>> pair(n);
    for (std::size_t p = 0; p < n; ++p) {
        auto cc = decode(p, nks);
        pair[p] = {cc[2 * slot], cc[2 * slot + 1]};
        cc.erase(cc.begin() + static_cast<std::ptrdiff_t>(2 * slot), cc.begin() + static_cast<std::ptrdiff_t>(2 * slot + 2));
        old_pos[p] = encode(cc, ks);
    }
    FlatChain out;
    for (const auto& d : x.objects) {
        FlatDiagram nd;
        nd.ks = nks;
        nd.objects.resize(n);
        nd.maps.assign(n * dirs, no_morphism);
        for (std::size_t p = 0; p < n; ++p) {
            const std::size_t op = old_pos[p];
            const auto [a, b] = pair[p];
            const bool live = a == 0 && b == 1;
            nd.objects[p] = live ? d.objects[op] : z;
            for (std::size_t e = 0; e < odirs; ++e) {
                const std::size_t ne = e / 2 < slot ? e : e + 2;
                const std::size_t om = d.maps[op * odirs + e];
                nd.maps[p * dirs + ne] = om == no_morphism ? no_morphism : live ? om : c.identity(z);
            }
            std::size_t& r = nd.maps[p * dirs + 2 * slot];
            std::size_t& dn = nd.maps[p * dirs + 2 * slot + 1];
            if (a == 0 && b == 0) {
                r = c.hom(z, d.objects[op]).at(0);
                dn = c.identity(z);
            } else if (live) {
                dn = c.hom(d.objects[op], z).at(0);
            } else if (a == 1 && b == 0) {
                r = c.identity(z);
            }
        }
        out.objects.push_back(std::move(nd));
    }
    for (const auto& comp : x.components) {
        std::vector<std::size_t> nc(n);
        for (std::size_t p = 0; p < n; ++p)
            nc[p] = pair[p] == std::make_pair(std::size_t{0}, std::size_t{1}) ? comp[old_pos[p]] : c.identity(z);
        out.components.push_back(std::move(nc));
    }
    return out;
}

FlatChain permute_coordinates(const FlatChain& x, const std::vector<std::size_t>& perm)
{
    const auto& ks = x.objects.at(0).ks;
    if (perm.size() != ks.size())
        throw DomainError("permute_coordinates: permutation has the wrong length");
    std::vector<std::size_t> nks(ks.size());
    for (std::size_t j = 0; j < perm.size(); ++j)
        nks[j] = ks.at(perm[j]);
    const std::size_t n = position_count(nks), dirs = 2 * ks.size();
    std::vector<std::size_t> old_pos(n);
    for (std::size_t p = 0; p < n; ++p) {
        auto cc = decode(p, nks);
        std::vector<std::size_t> oc(cc.size());
        for (std::size_t j = 0; j < perm.size(); ++j) {
            oc[2 * perm[j]] = cc[2 * j];
            oc[2 * perm[j] + 1] = cc[2 * j + 1];
        }
        old_pos[p] = encode(oc, ks);
    }
    FlatChain out;
    for (const auto& d : x.objects) {
        FlatDiagram nd;
        nd.ks = nks;
        nd.objects.resize(n);
        nd.maps.resize(n * dirs);
        for (std::size_t p = 0; p < n; ++p) {
            nd.objects[p] = d.objects[old_pos[p]];
            for (std::size_t j = 0; j < perm.size(); ++j)
                for (std::size_t e = 0; e < 2; ++e)
                    nd.maps[p * dirs + 2 * j + e] = d.maps[old_pos[p] * dirs + 2 * perm[j] + e];
        }
        out.objects.push_back(std::move(nd));
    }
    for (const auto& comp : x.components) {
        std::vector<std::size_t> nc(n);
        for (std::size_t p = 0; p < n; ++p)
            nc[p] = comp[old_pos[p]];
        out.components.push_back(std::move(nc));
    }
    return out;
}

FlatChain chain_face(const FiniteWaldhausenCategory& c, const FlatChain& x, std::size_t i)
{
    const std::size_t p = x.components.size();
    if (p == 0 || i > p)
        throw DomainError("chain_face out of range");
    FlatChain out = x;
    out.objects.erase(out.objects.begin() + static_cast<std::ptrdiff_t>(i));
    if (i == 0) {
        out.components.erase(out.components.begin());
    } else if (i == p) {
        out.components.pop_back();
    } else {
        auto& merged = out.components[i - 1];
        for (std::size_t q = 0; q < merged.size(); ++q)
            merged[q] = c.compose(x.components[i][q], x.components[i - 1][q]);
        out.components.erase(out.components.begin() + static_cast<std::ptrdiff_t>(i));
    }
    return out;
}

FlatChain chain_degeneracy(const FiniteWaldhausenCategory& c, const FlatChain& x, std::size_t i)
{
    if (i >= x.objects.size())
        throw DomainError("chain_degeneracy out of range");
    FlatChain out = x;
    const FlatDiagram& d = x.objects[i];
    std::vector<std::size_t> ids(d.objects.size());
    for (std::size_t q = 0; q < ids.size(); ++q)
        ids[q] = c.identity(d.objects[q]);
    out.objects.insert(out.objects.begin() + static_cast<std::ptrdiff_t>(i), d);
    out.components.insert(out.components.begin() + static_cast<std::ptrdiff_t>(i), std::move(ids));
    return out;
}

// ---------------------------------------------------------------------------

IteratedS::IteratedS(std::shared_ptr<const FiniteWaldhausenCategory> base, std::vector<std::size_t> ks,
                     std::size_t w_max, std::size_t cap)
    : base_(std::move(base)), ks_(std::move(ks))
{
    layers_.resize(ks_.size());
    std::shared_ptr<const FiniteWaldhausenCategory> current = base_;
    for (std::size_t j = ks_.size(); j-- > 0;) {
        const SMorphisms mode = j > 0 ? SMorphisms::all : w_max == 0 ? SMorphisms::identities : SMorphisms::weak;
        layers_[j] = std::make_unique<SCategory>(current, ks_[j], mode, cap);
        current = layers_[j]->shared_category();
    }
    chains_.resize(w_max + 1);
    chain_index_.resize(w_max + 1);
    for (std::size_t p = 0; p <= w_max; ++p) {
        chains_[p] = weak_chains(top(), p, cap);
        for (std::size_t i = 0; i < chains_[p].size(); ++i)
            chain_index_[p][chains_[p][i]] = i;
    }
}

const FiniteWaldhausenCategory& IteratedS::top() const
{
    return layers_.empty() ? *base_ : layers_[0]->category();
}

std::size_t IteratedS::basepoint(std::size_t p) const
{
    const auto& t = top();
    std::vector<std::size_t> chain{t.zero_object()};
    chain.insert(chain.end(), p, t.identity(t.zero_object()));
    return find_chain(p, chain).value();
}

std::optional<std::size_t> IteratedS::find_chain(std::size_t p, const std::vector<std::size_t>& chain) const
{
    auto it = chain_index_.at(p).find(chain);
    if (it == chain_index_[p].end())
        return std::nullopt;
    return it->second;
}

FlatDiagram IteratedS::flatten_object(std::size_t object) const { return flatten_object(0, object); }
std::vector<std::size_t> IteratedS::flatten_morphism(std::size_t morphism) const { return flatten_morphism(0, morphism); }

FlatDiagram IteratedS::flatten_object(std::size_t level, std::size_t object) const
{
    FlatDiagram out;
    out.ks.assign(ks_.begin() + static_cast<std::ptrdiff_t>(level), ks_.end());
    if (level == ks_.size()) {
        out.objects = {object};
        return out;
    }
    const SCategory& layer = *layers_[level];
    const SGrid& g = layer.grid(object);
    const std::size_t k = ks_[level], side = k + 1;
    const std::size_t inner = position_count(std::vector<std::size_t>(ks_.begin() + static_cast<std::ptrdiff_t>(level) + 1, ks_.end()));
    const std::size_t dirs = out.directions(), idirs = dirs - 2;
    out.objects.resize(side * side * inner);
    out.maps.assign(out.objects.size() * dirs, no_morphism);
    for (std::size_t a = 0; a < side; ++a)
        for (std::size_t b = 0; b < side; ++b) {
            const std::size_t cell = (a * side + b) * inner;
            FlatDiagram sub = flatten_object(level + 1, g.object(a, b));
            std::vector<std::size_t> rcomp, dcomp;
            if (b < k)
                rcomp = flatten_morphism(level + 1, g.right_map(a, b));
            if (a < k)
                dcomp = flatten_morphism(level + 1, g.down_map(a, b));
            for (std::size_t p = 0; p < inner; ++p) {
                out.objects[cell + p] = sub.objects[p];
                for (std::size_t e = 0; e < idirs; ++e)
                    out.maps[(cell + p) * dirs + 2 + e] = sub.maps[p * idirs + e];
                if (b < k)
                    out.maps[(cell + p) * dirs] = rcomp[p];
                if (a < k)
                    out.maps[(cell + p) * dirs + 1] = dcomp[p];
            }
        }
    return out;
}

std::vector<std::size_t> IteratedS::flatten_morphism(std::size_t level, std::size_t morphism) const
{
    if (level == ks_.size())
        return {morphism};
    const auto& comp = layers_[level]->components(morphism);
    std::vector<std::size_t> out;
    for (std::size_t m : comp) {
        auto sub = flatten_morphism(level + 1, m);
        out.insert(out.end(), sub.begin(), sub.end());
    }
    return out;
}

FlatChain IteratedS::flatten(std::size_t p, std::size_t i) const
{
    const auto& ch = chain(p, i);
    const auto& t = top();
    FlatChain out;
    std::size_t x = ch[0];
    out.objects.push_back(flatten_object(0, x));
    for (std::size_t r = 1; r < ch.size(); ++r) {
        out.components.push_back(flatten_morphism(0, ch[r]));
        out.objects.push_back(flatten_object(0, t.target(ch[r])));
    }
    return out;
}

std::optional<std::size_t> IteratedS::find_object(std::size_t level, const FlatDiagram& d) const
{
    if (level == ks_.size())
        return d.objects.at(0);
    const SCategory& layer = *layers_[level];
    const std::size_t k = ks_[level], side = k + 1;
    FlatDiagram sub;
    sub.ks.assign(ks_.begin() + static_cast<std::ptrdiff_t>(level) + 1, ks_.end());
    const std::size_t inner = position_count(sub.ks);
    const std::size_t dirs = d.directions(), idirs = dirs - 2;
    SGrid g;
    g.k = k;
    g.objects.resize(side * side);
    g.right.resize(side * k);
    g.down.resize(k * side);
    for (std::size_t cell = 0; cell < side * side; ++cell) {
        sub.objects.assign(d.objects.begin() + static_cast<std::ptrdiff_t>(cell * inner),
                           d.objects.begin() + static_cast<std::ptrdiff_t>((cell + 1) * inner));
        sub.maps.resize(inner * idirs);
        for (std::size_t p = 0; p < inner; ++p)
            for (std::size_t e = 0; e < idirs; ++e)
                sub.maps[p * idirs + e] = d.maps[(cell * inner + p) * dirs + 2 + e];
        auto id = find_object(level + 1, sub);
        if (!id)
            return std::nullopt;
        g.objects[cell] = *id;
    }
    std::vector<std::size_t> comp(inner);
    for (std::size_t a = 0; a < side; ++a)
        for (std::size_t b = 0; b < side; ++b) {
            const std::size_t cell = a * side + b;
            for (std::size_t e = 0; e < 2; ++e) {
                if ((e == 0 && b == k) || (e == 1 && a == k))
                    continue;
                const std::size_t next = e == 0 ? cell + 1 : cell + side;
                for (std::size_t p = 0; p < inner; ++p)
                    comp[p] = d.maps[(cell * inner + p) * dirs + e];
                auto m = find_morphism(level + 1, g.objects[cell], g.objects[next], comp);
                if (!m)
                    return std::nullopt;
                (e == 0 ? g.right[a * k + b] : g.down[a * side + b]) = *m;
            }
        }
    return layer.find_object(g);
}

std::optional<std::size_t> IteratedS::find_morphism(std::size_t level, std::size_t source, std::size_t target,
                                                    const std::vector<std::size_t>& components) const
{
    if (level == ks_.size()) {
        const std::size_t m = components.at(0);
        if (m >= base_->morphism_count() || base_->source(m) != source || base_->target(m) != target)
            return std::nullopt;
        return m;
    }
    const SCategory& layer = *layers_[level];
    const std::size_t side = ks_[level] + 1;
    const std::size_t inner = components.size() / (side * side);
    const SGrid &gs = layer.grid(source), &gt = layer.grid(target);
    std::vector<std::size_t> comp(side * side), sub(inner);
    for (std::size_t cell = 0; cell < side * side; ++cell) {
        std::copy(components.begin() + static_cast<std::ptrdiff_t>(cell * inner),
                  components.begin() + static_cast<std::ptrdiff_t>((cell + 1) * inner), sub.begin());
        auto m = find_morphism(level + 1, gs.objects[cell], gt.objects[cell], sub);
        if (!m)
            return std::nullopt;
        comp[cell] = *m;
    }
    return layer.find_morphism(source, target, comp);
}

std::optional<std::size_t> IteratedS::find(const FlatChain& x) const
{
    if (x.objects.size() != x.components.size() + 1 || x.objects[0].ks != ks_)
        return std::nullopt;
    const std::size_t p = x.components.size();
    if (p >= chains_.size())
        return std::nullopt;
    std::vector<std::size_t> ids;
    for (const auto& d : x.objects) {
        auto id = find_object(0, d);
        if (!id)
            return std::nullopt;
        ids.push_back(*id);
    }
    std::vector<std::size_t> chain{ids[0]};
    for (std::size_t r = 0; r < p; ++r) {
        auto m = find_morphism(0, ids[r], ids[r + 1], x.components[r]);
        if (!m)
            return std::nullopt;
        chain.push_back(*m);
    }
    return find_chain(p, chain);
}

PointedSimplicialSet IteratedS::simplicial_set() const
{
    const auto& t = top();
    const std::size_t top_level = chains_.size() - 1;
    PointedSimplicialSet x;
    x.faces.resize(top_level + 1);
    x.degeneracies.resize(top_level + 1);
    for (std::size_t p = 0; p <= top_level; ++p) {
        x.sizes.push_back(chains_[p].size());
        x.basepoints.push_back(basepoint(p));
    }
    auto lookup = [&](std::size_t p, const std::vector<std::size_t>& ch) {
        auto id = find_chain(p, ch);
        if (!id)
            throw InvariantBreach("w-direction operator leaves the enumerated chains");
        return *id;
    };
    for (std::size_t p = 1; p <= top_level; ++p)
        for (std::size_t i = 0; i <= p; ++i) {
            std::vector<std::size_t> map(chains_[p].size());
            for (std::size_t e = 0; e < map.size(); ++e) {
                const auto& ch = chains_[p][e];
                std::vector<std::size_t> f;
                if (i == 0) {
                    f.push_back(t.target(ch[1]));
                    f.insert(f.end(), ch.begin() + 2, ch.end());
                } else if (i == p) {
                    f.assign(ch.begin(), ch.end() - 1);
                } else {
                    f.assign(ch.begin(), ch.begin() + static_cast<std::ptrdiff_t>(i));
                    f.push_back(t.compose(ch[i + 1], ch[i]));
                    f.insert(f.end(), ch.begin() + static_cast<std::ptrdiff_t>(i) + 2, ch.end());
                }
                map[e] = lookup(p - 1, f);
            }
            x.faces[p].push_back(std::move(map));
        }
    for (std::size_t p = 0; p < top_level; ++p)
        for (std::size_t i = 0; i <= p; ++i) {
            std::vector<std::size_t> map(chains_[p].size());
            for (std::size_t e = 0; e < map.size(); ++e) {
                auto ch = chains_[p][e];
                const std::size_t xi = i == 0 ? ch[0] : t.target(ch[i]);
                ch.insert(ch.begin() + static_cast<std::ptrdiff_t>(i) + 1, t.identity(xi));
                map[e] = lookup(p + 1, ch);
            }
            x.degeneracies[p].push_back(std::move(map));
        }
    return x;
}

// ---------------------------------------------------------------------------

PointedSimplicialSet ws_diagonal(const FiniteWaldhausenCategory& c, std::size_t n_max, std::size_t cap)
{
    auto base = std::make_shared<const FiniteWaldhausenCategory>(c);
    std::vector<std::unique_ptr<IteratedS>> levels;
    for (std::size_t n = 0; n <= n_max; ++n)
        levels.push_back(std::make_unique<IteratedS>(base, std::vector<std::size_t>{n}, n, cap));
    PointedSimplicialSet x;
    x.faces.resize(n_max + 1);
    x.degeneracies.resize(n_max + 1);
    for (std::size_t n = 0; n <= n_max; ++n) {
        x.sizes.push_back(levels[n]->count(n));
        x.basepoints.push_back(levels[n]->basepoint(n));
    }
    auto lookup = [&](std::size_t n, const FlatChain& fc) {
        auto id = levels[n]->find(fc);
        if (!id)
            throw InvariantBreach("ws_diagonal: simplicial operator leaves the enumerated simplices");
        return *id;
    };
    for (std::size_t n = 0; n <= n_max; ++n)
        for (std::size_t e = 0; e < x.sizes[n]; ++e) {
            const FlatChain fc = levels[n]->flatten(n, e);
            for (std::size_t i = 0; n > 0 && i <= n; ++i) {
                if (e == 0)
                    x.faces[n].emplace_back(x.sizes[n]);
                x.faces[n][i][e] = lookup(n - 1, chain_face(c, restrict_coordinate(c, fc, 0, face_operator(n, i)), i));
            }
            for (std::size_t i = 0; n < n_max && i <= n; ++i) {
                if (e == 0)
                    x.degeneracies[n].emplace_back(x.sizes[n]);
                x.degeneracies[n][i][e] =
                    lookup(n + 1, chain_degeneracy(c, restrict_coordinate(c, fc, 0, degeneracy_operator(n, i)), i));
            }
        }
    return x;
}

FPAbelianGroup k0_via_sdot(const FiniteWaldhausenCategory& c, std::size_t cap)
{
    return reduced_normalized_complex(ws_diagonal(c, 2, cap)).homology(1).group();
}

}  // namespace dtrace
