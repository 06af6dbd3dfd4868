#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "dtrace/errors.hpp"
#include "dtrace/homology.hpp"

namespace dtrace {

inline constexpr std::size_t no_morphism = static_cast<std::size_t>(-1);

/// A finite (size-bounded) category with zero object, flagged cofibrations
/// and weak equivalences, and a table of chosen pushouts along cofibrations.
/// Morphisms are numbered globally; composition is a lookup table.
class FiniteWaldhausenCategory {
public:
    struct Object {
        std::string name;
        std::size_t size = 0;
    };
    struct Morphism {
        std::size_t source = 0, target = 0;
        std::string name;
        bool cofibration = false;
        bool weak_equivalence = false;
    };
    /// Chosen pushout of c <-f- a >-i-> b: object d with legs b -> d and c >-> d.
    struct Pushout {
        std::size_t object = 0;
        std::size_t from_target = 0;  // b -> d
        std::size_t cofibration = 0;  // c -> d
    };

    FiniteWaldhausenCategory() = default;
    FiniteWaldhausenCategory(std::string name, std::size_t bound) : name_(std::move(name)), bound_(bound) {}

    // -- construction, in this order: objects and morphisms, composition, pushouts
    std::size_t add_object(std::string name, std::size_t size);
    std::size_t add_morphism(Morphism m);
    void set_zero(std::size_t object) { zero_ = object; }
    /// Builds the composition table from compose(g, f) = g o f on every
    /// composable pair; no_morphism marks a missing entry. Identities are
    /// located from the table.
    void set_composition(const std::function<std::size_t(std::size_t g, std::size_t f)>& compose);
    void set_pushout(std::size_t cofibration, std::size_t map, Pushout w);
    void clear_pushout(std::size_t cofibration, std::size_t map);
    /// Chooses a pushout for every span along a flagged cofibration by
    /// searching the table (see find_pushout).
    void compute_pushouts();

    // flags can be edited after construction (corrupted fixtures)
    void set_cofibration(std::size_t m, bool flag) { morphisms_.at(m).cofibration = flag; }
    void set_weak_equivalence(std::size_t m, bool flag) { morphisms_.at(m).weak_equivalence = flag; }

    // -- access
    const std::string& name() const { return name_; }
    std::size_t bound() const { return bound_; }
    std::size_t object_count() const { return objects_.size(); }
    std::size_t morphism_count() const { return morphisms_.size(); }
    const Object& object(std::size_t a) const { return objects_.at(a); }
    const Morphism& morphism(std::size_t m) const { return morphisms_.at(m); }
    std::size_t source(std::size_t m) const { return morphisms_[m].source; }
    std::size_t target(std::size_t m) const { return morphisms_[m].target; }
    bool is_cofibration(std::size_t m) const { return morphisms_[m].cofibration; }
    bool is_weak_equivalence(std::size_t m) const { return morphisms_[m].weak_equivalence; }
    std::optional<std::size_t> zero() const { return zero_; }
    /// Throws DomainError when no zero object was designated.
    std::size_t zero_object() const;

    const std::vector<std::size_t>& hom(std::size_t a, std::size_t b) const { return hom_[a * objects_.size() + b]; }
    const std::vector<std::size_t>& out(std::size_t a) const { return out_[a]; }
    /// Position of m within hom(source m, target m).
    std::size_t hom_position(std::size_t m) const { return hom_position_[m]; }
    /// g o f, or no_morphism when the table has no entry.
    std::size_t compose(std::size_t g, std::size_t f) const;
    /// Throws InvariantBreach on a missing identity.
    std::size_t identity(std::size_t a) const;
    bool has_identity(std::size_t a) const { return identity_[a] != no_morphism; }
    /// The unique map a -> 0 -> b (requires a zero object with unique maps).
    std::size_t zero_map(std::size_t a, std::size_t b) const;
    bool is_isomorphism(std::size_t m) const { return inverse_[m] != no_morphism; }
    std::size_t inverse(std::size_t m) const { return inverse_[m]; }

    std::optional<Pushout> pushout(std::size_t cofibration, std::size_t map) const;
    /// Every recorded pushout: (cofibration, map, witness), in key order.
    std::vector<std::tuple<std::size_t, std::size_t, Pushout>> pushouts() const;

    /// First morphism a -> b (in table order) satisfying pred, if any.
    std::optional<std::size_t> find_in_hom(std::size_t a, std::size_t b,
                                           const std::function<bool(std::size_t)>& pred) const;

private:
    std::string name_;
    std::size_t bound_ = 0;
    std::vector<Object> objects_;
    std::vector<Morphism> morphisms_;
    std::optional<std::size_t> zero_;

    std::vector<std::vector<std::size_t>> hom_, out_;
    std::vector<std::size_t> out_position_;        // position of m in out(source m)
    std::vector<std::size_t> hom_position_;
    std::vector<std::vector<std::uint32_t>> after_;  // after_[f][pos of g] = g o f
    std::vector<std::size_t> identity_, inverse_;
    std::unordered_map<std::uint64_t, Pushout> pushouts_;
};

using WaldhausenCategory = FiniteWaldhausenCategory;

/// Cocone (d, u: b -> d, v: c -> d) on the span c <-f- a -i-> b: commutes and
/// for every object e, hom(d, e) -> {cocones to e} is a bijection.
bool is_pushout(const FiniteWaldhausenCategory& c, std::size_t i, std::size_t f,
                const FiniteWaldhausenCategory::Pushout& cocone);
/// Exhaustive search for a pushout of c <-f- a -i-> b within the table.
std::optional<FiniteWaldhausenCategory::Pushout> find_pushout(const FiniteWaldhausenCategory& c,
                                                              std::size_t i, std::size_t f);
/// The unique h: d -> e with h u = u2 and h v = v2, when it exists.
std::optional<std::size_t> induced_map(const FiniteWaldhausenCategory& c,
                                       const FiniteWaldhausenCategory::Pushout& from, std::size_t e,
                                       std::size_t u2, std::size_t v2);

/// Category laws plus the five axioms, bounded: isomorphisms are flagged;
/// zero object with every 0 -> a a cofibration; chosen pushouts are pushouts
/// and exist whenever one fits in the table; pushout legs are cofibrations;
/// weak equivalences of spans induce weak equivalences of pushouts.
/// Messages start with "category", "axiom 1", ..., "axiom 5".
ValidationReport validate_waldhausen(const FiniteWaldhausenCategory& c);

// -- built-in families. Weak equivalences are the isomorphisms.

/// The category with the single object 0.
FiniteWaldhausenCategory trivial_category();
/// F_p^d for d <= bound, linear maps, cofibrations the injections.
FiniteWaldhausenCategory vect_gf(std::int64_t p, std::size_t bound);
/// Pointed sets {*, 1, ..., n}, n <= bound, pointed maps, cofibrations the injections.
FiniteWaldhausenCategory pointed_sets(std::size_t bound);
/// Abelian groups of exponent dividing m and order <= bound (one per
/// isomorphism class), homomorphisms, cofibrations the injections.
FiniteWaldhausenCategory finite_modules(std::int64_t m, std::size_t bound);

/// vect_gf(2, 2) with one deliberate defect each; axiom is the tag the
/// validator must cite ("axiom 1" .. "axiom 5").
struct CorruptedFixture {
    std::string name;
    std::string axiom;
    FiniteWaldhausenCategory category;
};
std::vector<CorruptedFixture> corrupted_fixtures();

// -- functors

struct ExactFunctor {
    std::string name;
    std::vector<std::size_t> on_objects, on_morphisms;
};

/// Functoriality, and preservation of zero, cofibrations, weak equivalences
/// and chosen pushout squares.
ValidationReport validate_exact(const ExactFunctor& f, const FiniteWaldhausenCategory& source,
                                const FiniteWaldhausenCategory& target);
/// g after f.
ExactFunctor compose(const ExactFunctor& g, const ExactFunctor& f);
bool is_identity_functor(const ExactFunctor& f, const FiniteWaldhausenCategory& c);

/// End(C): objects (a, f: a -> a), morphisms i: a -> b with i f = g i,
/// flags inherited from i. iota0 / iota1 attach the zero / identity
/// endomorphism, forget drops it.
struct EndCategory {
    FiniteWaldhausenCategory category;
    std::vector<std::size_t> base_object;    // (a, f) -> a
    std::vector<std::size_t> endomorphism;   // (a, f) -> f
    std::vector<std::size_t> base_morphism;  // square -> i
    ExactFunctor iota0, iota1, forget;
};

EndCategory end_category(const FiniteWaldhausenCategory& c);

// -- K_0 from the Grothendieck presentation

/// Free abelian group on the nonzero objects modulo [a] = [a'] for each weak
/// equivalence and [b] = [a] + [b/a] for each cofiber sequence a >-> b -> b/a
/// (the chosen pushout of 0 <- a >-> b).
struct GrothendieckPresentation {
    std::vector<std::size_t> generators;       // object ids
    std::vector<std::size_t> generator_index;  // object -> row, no_morphism for the zero object
    Matrix relations;                          // generators x relations, over Z
    FPAbelianGroup group;
};

GrothendieckPresentation grothendieck_presentation(const FiniteWaldhausenCategory& c);
FPAbelianGroup grothendieck_k0(const FiniteWaldhausenCategory& c);
/// Matrix of F on generators: column of [a] is [F a].
Matrix presentation_map(const ExactFunctor& f, const GrothendieckPresentation& source,
                        const GrothendieckPresentation& target);
/// Whether m sends every relation of source into the relation lattice of target.
bool respects_relations(const Matrix& m, const GrothendieckPresentation& source,
                        const GrothendieckPresentation& target);
/// Whether m induces the identity on the presented group.
bool induces_identity(const Matrix& m, const GrothendieckPresentation& p);

}  // namespace dtrace
