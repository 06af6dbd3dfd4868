#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "dtrace/sconstruction.hpp"

namespace dtrace {

/// A morphism (m; k) -> (n; l) of the Grothendieck construction of
/// injections acting on multisimplicial indices: an injection f of
/// {0..m-1} into {0..n-1}, and for each target coordinate r an operator
/// theta_r: [l_r] -> [k'_r], where k' puts k_j at f(j) and 1 elsewhere.
struct SigmaDeltaMorphism {
    std::vector<std::size_t> source_ks;
    std::vector<std::size_t> injection;
    std::vector<std::vector<std::size_t>> operators;  // n of them, theta_r[a] = image of a

    std::size_t target_n() const { return operators.size(); }
    std::vector<std::size_t> target_ks() const;
    /// k' above: the source indices moved along f, 1 at new coordinates.
    std::vector<std::size_t> pushed_ks() const;
    bool identity_operators() const;
    std::string to_string() const;
    friend bool operator==(const SigmaDeltaMorphism&, const SigmaDeltaMorphism&) = default;
    friend auto operator<=>(const SigmaDeltaMorphism&, const SigmaDeltaMorphism&) = default;
};

/// b after a; requires target(a) = source(b).
SigmaDeltaMorphism compose(const SigmaDeltaMorphism& b, const SigmaDeltaMorphism& a);

struct SigmaDeltaAction {
    SigmaDeltaMorphism morphism;
    std::vector<std::vector<std::size_t>> levels;  // levels[p][x], p up to the lower of the two tops
};

/// Entries (n; k_1..k_n) for n <= n_max and k_i <= k_cap, each a pointed
/// simplicial set in the w-direction, with the action of a generating set of
/// morphisms and of their pairwise composites.
struct SigmaDeltaDiagram {
    std::string name;
    std::size_t n_max = 0, k_cap = 0;
    std::map<std::vector<std::size_t>, PointedSimplicialSet> entries;
    std::vector<SigmaDeltaAction> actions;
};

/// Source of entries and actions for build_sigma_delta.
class SigmaDeltaModel {
public:
    virtual ~SigmaDeltaModel() = default;
    virtual std::string name() const = 0;
    virtual PointedSimplicialSet entry(const std::vector<std::size_t>& ks) = 0;
    /// Image of simplex x of level p of the source entry.
    virtual std::size_t act(const SigmaDeltaMorphism& f, std::size_t p, std::size_t x) = 0;
};

/// Generators: faces and degeneracies in each coordinate, and every injection
/// with identity operators; plus every composite of two generators.
std::vector<SigmaDeltaMorphism> sigma_delta_generators(std::size_t n_max, std::size_t k_cap);
SigmaDeltaDiagram build_sigma_delta(SigmaDeltaModel& model, std::size_t n_max, std::size_t k_cap);

inline constexpr std::size_t sigma_delta_n_cap = 2, sigma_delta_k_cap = 2;
/// Entries with k_1 + ... + k_n above this keep only w-level 0.
inline constexpr std::size_t sigma_delta_w_budget = 3;

/// Entries ob w_. S_{k_1} ... S_{k_n} C (w-levels <= w_max, see the budget
/// above). Injections insert index-1 coordinates holding the diagram at (0, 1)
/// and permute; operators restrict.
SigmaDeltaDiagram ktheory_sigma_delta(const FiniteWaldhausenCategory& c, std::size_t n_max, std::size_t k_cap,
                                      std::size_t w_max = 1, std::size_t cap = default_object_cap);

/// (S^1)^{smash n} smashed with S^0, constant in w, S^1 = Delta[1]/boundary.
SigmaDeltaDiagram free_sigma_delta(std::size_t n_max, std::size_t k_cap, std::size_t w_max = 1);

/// Entry simplicial identities; basepoint entries whenever some k_i = 0;
/// actions pointed and simplicial; identity-operator actions bijective;
/// functoriality on every stored composable pair whose composite is stored.
ValidationReport sigma_delta_validate(const SigmaDeltaDiagram& x);

}  // namespace dtrace
