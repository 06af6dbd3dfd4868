#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "dtrace/waldhausen.hpp"

namespace dtrace {

inline constexpr std::size_t default_s_cap = 3;          // largest k for s_k_objects
inline constexpr std::size_t default_object_cap = 1u << 20;  // enumerated objects or chains

struct VectorKeyHash {
    std::size_t operator()(const std::vector<std::size_t>& v) const noexcept;
};
using VectorIndex = std::unordered_map<std::vector<std::size_t>, std::size_t, VectorKeyHash>;

/// An object of S_k C on the full grid [k] x [k]: entries A(i, j), zero
/// for i >= j, with the generating maps (i, j) -> (i, j+1) and (i, j) -> (i+1, j).
struct SGrid {
    std::size_t k = 0;
    std::vector<std::size_t> objects;  // (k+1)^2, row-major
    std::vector<std::size_t> right;    // (i, j) -> (i, j+1) at i * k + j
    std::vector<std::size_t> down;     // (i, j) -> (i+1, j) at i * (k+1) + j

    std::size_t object(std::size_t i, std::size_t j) const { return objects[i * (k + 1) + j]; }
    std::size_t right_map(std::size_t i, std::size_t j) const { return right[i * k + j]; }
    std::size_t down_map(std::size_t i, std::size_t j) const { return down[i * (k + 1) + j]; }
    /// Serialized form; grids are ordered lexicographically by it.
    std::vector<std::size_t> key() const;
};

/// The composite (i, j) -> (i2, j2) for i <= i2, j <= j2.
std::size_t grid_map(const FiniteWaldhausenCategory& c, const SGrid& g, std::size_t i, std::size_t j, std::size_t i2,
                     std::size_t j2);
/// Restriction along a monotone theta: [l] -> [k] (theta[a] = image of a).
SGrid restrict_grid(const FiniteWaldhausenCategory& c, const SGrid& g, const std::vector<std::size_t>& theta);
/// theta for the face d_i : [k-1] -> [k] and the degeneracy s_i : [k+1] -> [k].
std::vector<std::size_t> face_operator(std::size_t k, std::size_t i);
std::vector<std::size_t> degeneracy_operator(std::size_t k, std::size_t i);

/// Functor laws, zero entries on i >= j, cofibrations (i, j) -> (i, j+1),
/// and each square (i, j) -> (i, l) over (j, j) -> (j, l) a pushout.
ValidationReport validate_s_grid(const FiniteWaldhausenCategory& c, const SGrid& g);

/// Every object of S_k C: a flag of cofibrations 0 >-> A(0,1) >-> ... >-> A(0,k)
/// with every choice of quotients A(j, l) (all pushouts, not only the chosen ones).
std::vector<SGrid> s_k_objects(const FiniteWaldhausenCategory& c, std::size_t k, std::size_t max_k = default_s_cap,
                               std::size_t cap = default_object_cap);

/// S_k C as a finite Waldhausen category: morphisms are natural
/// transformations, weak equivalences are levelwise, pushouts are levelwise,
/// and f: A -> B is a cofibration when every A(0,j) -> B(0,j) is one and
/// every A(0,j+1) u_{A(0,j)} B(0,j) -> B(0,j+1) is one. The weak and
/// identities modes keep only those morphisms and record no pushouts; they
/// serve as the outermost layer, where only the w-direction is used.
enum class SMorphisms { all, weak, identities };

class SCategory {
public:
    SCategory(std::shared_ptr<const FiniteWaldhausenCategory> base, std::size_t k, SMorphisms mode = SMorphisms::all,
              std::size_t cap = default_object_cap);

    const FiniteWaldhausenCategory& base() const { return *base_; }
    std::shared_ptr<const FiniteWaldhausenCategory> shared_base() const { return base_; }
    const FiniteWaldhausenCategory& category() const { return *category_; }
    std::shared_ptr<const FiniteWaldhausenCategory> shared_category() const { return category_; }
    std::size_t k() const { return k_; }
    SMorphisms mode() const { return mode_; }

    const SGrid& grid(std::size_t object) const { return grids_.at(object); }
    /// Components at every grid position, row-major.
    const std::vector<std::size_t>& components(std::size_t morphism) const { return components_.at(morphism); }
    std::optional<std::size_t> find_object(const SGrid& g) const;
    std::optional<std::size_t> find_morphism(std::size_t source, std::size_t target,
                                             const std::vector<std::size_t>& components) const;

private:
    std::shared_ptr<const FiniteWaldhausenCategory> base_;
    std::shared_ptr<FiniteWaldhausenCategory> category_;
    std::size_t k_;
    SMorphisms mode_;
    std::vector<SGrid> grids_;
    VectorIndex grid_index_;
    std::vector<std::vector<std::size_t>> components_;
    VectorIndex morphism_index_;  // (source, target, components...) -> id
};

/// Objects of w_p D: chains x_0 -> ... -> x_p of weak equivalences, stored
/// as (x_0, m_1, ..., m_p), in lexicographic order.
std::vector<std::vector<std::size_t>> weak_chains(const FiniteWaldhausenCategory& d, std::size_t p,
                                                  std::size_t cap = default_object_cap);

/// Levels 0..top of a pointed simplicial set with all faces and degeneracies.
struct PointedSimplicialSet {
    std::vector<std::size_t> sizes;
    std::vector<std::size_t> basepoints;
    std::vector<std::vector<std::vector<std::size_t>>> faces;         // [n][i] : X_n -> X_{n-1}
    std::vector<std::vector<std::vector<std::size_t>>> degeneracies;  // [n][i] : X_n -> X_{n+1}

    std::size_t top() const { return sizes.empty() ? 0 : sizes.size() - 1; }
    /// Every simplicial identity on every element; basepoints preserved.
    ValidationReport validate() const;
    /// Elements of level n not in the image of a degeneracy.
    std::vector<char> nondegenerate(std::size_t n) const;
};

/// Normalized chains modulo the basepoint, over Z, in degrees 0..top.
ChainComplex reduced_normalized_complex(const PointedSimplicialSet& x);

// -- iterated S-construction, flattened

/// A diagram on [k_1]^2 x ... x [k_n]^2 in C. Positions are mixed radix
/// with (a_1, b_1) most significant; at each position the generating maps
/// for coordinate j sit at direction 2j (b_j + 1) and 2j + 1 (a_j + 1),
/// no_morphism at the edge.
struct FlatDiagram {
    std::vector<std::size_t> ks;
    std::vector<std::size_t> objects;
    std::vector<std::size_t> maps;

    std::size_t positions() const { return objects.size(); }
    std::size_t directions() const { return 2 * ks.size(); }
};

/// A chain of p weak equivalences of flattened diagrams.
struct FlatChain {
    std::vector<FlatDiagram> objects;                // p + 1
    std::vector<std::vector<std::size_t>> components;  // p, per position
};

/// ob w_p S_{k_1} ... S_{k_n} C for p <= w_max. The outermost S is k_1.
/// With w_max = 0 the outer layer keeps only identities.
class IteratedS {
public:
    IteratedS(std::shared_ptr<const FiniteWaldhausenCategory> base, std::vector<std::size_t> ks, std::size_t w_max,
              std::size_t cap = default_object_cap);

    const FiniteWaldhausenCategory& base() const { return *base_; }
    const std::vector<std::size_t>& ks() const { return ks_; }
    std::size_t w_max() const { return chains_.size() - 1; }
    /// The category whose weak equivalences form the w-direction.
    const FiniteWaldhausenCategory& top() const;

    std::size_t count(std::size_t p) const { return chains_.at(p).size(); }
    const std::vector<std::size_t>& chain(std::size_t p, std::size_t i) const { return chains_.at(p).at(i); }
    std::size_t basepoint(std::size_t p) const;
    std::optional<std::size_t> find_chain(std::size_t p, const std::vector<std::size_t>& chain) const;

    FlatDiagram flatten_object(std::size_t object) const;
    std::vector<std::size_t> flatten_morphism(std::size_t morphism) const;
    FlatChain flatten(std::size_t p, std::size_t i) const;
    std::optional<std::size_t> find(const FlatChain& chain) const;

    /// The w-direction: faces compose, degeneracies insert identities.
    PointedSimplicialSet simplicial_set() const;

private:
    FlatDiagram flatten_object(std::size_t level, std::size_t object) const;
    std::vector<std::size_t> flatten_morphism(std::size_t level, std::size_t morphism) const;
    std::optional<std::size_t> find_object(std::size_t level, const FlatDiagram& d) const;
    std::optional<std::size_t> find_morphism(std::size_t level, std::size_t source, std::size_t target,
                                             const std::vector<std::size_t>& components) const;

    std::shared_ptr<const FiniteWaldhausenCategory> base_;
    std::vector<std::size_t> ks_;
    std::vector<std::unique_ptr<SCategory>> layers_;  // layers_[j] = S_{k_{j+1}} of layers_[j+1]
    std::vector<std::vector<std::vector<std::size_t>>> chains_;
    std::vector<VectorIndex> chain_index_;
};

// operations on flattened chains
FlatChain restrict_coordinate(const FiniteWaldhausenCategory& c, const FlatChain& x, std::size_t coordinate,
                              const std::vector<std::size_t>& theta);
/// Adds a coordinate with k = 1 at the given slot, the diagram sitting at (0, 1).
FlatChain insert_coordinate(const FiniteWaldhausenCategory& c, const FlatChain& x, std::size_t slot);
/// New coordinate j is old coordinate perm[j].
FlatChain permute_coordinates(const FlatChain& x, const std::vector<std::size_t>& perm);
FlatChain chain_face(const FiniteWaldhausenCategory& c, const FlatChain& x, std::size_t i);
FlatChain chain_degeneracy(const FiniteWaldhausenCategory& c, const FlatChain& x, std::size_t i);

/// Z_n = ob w_n S_n C for n <= n_max with the diagonal faces d_i = d_i^w d_i^S
/// and degeneracies s_i = s_i^w s_i^S.
PointedSimplicialSet ws_diagonal(const FiniteWaldhausenCategory& c, std::size_t n_max = 2,
                                 std::size_t cap = default_object_cap);
/// H_1 of the reduced normalized chains of the diagonal (levels <= 2).
FPAbelianGroup k0_via_sdot(const FiniteWaldhausenCategory& c, std::size_t cap = default_object_cap);

}  // namespace dtrace
