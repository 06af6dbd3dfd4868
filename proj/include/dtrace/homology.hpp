#pragma once

#include <string>
#include <vector>

#include "dtrace/errors.hpp"
#include "dtrace/matrix.hpp"

namespace dtrace {

/// Finitely presented module over a base ring in canonical form:
/// R^free_rank plus cyclic summands R/(d_i) with d_1 | d_2 | ... and no d_i
/// a unit or zero. Over Z this is a finitely generated abelian group; over a
/// field the torsion list is empty and free_rank is the dimension; over Z/p^k
/// the torsion lists the proper summands Z/p^a, a < k.
class FPAbelianGroup {
public:
    FPAbelianGroup() = default;
    FPAbelianGroup(BaseRing ring, std::size_t free_rank, std::vector<Integer> torsion = {});

    static FPAbelianGroup zero(BaseRing ring) { return FPAbelianGroup(ring, 0); }

    const BaseRing& ring() const { return ring_; }
    std::size_t free_rank() const { return free_rank_; }
    const std::vector<Integer>& torsion() const { return torsion_; }
    bool is_zero() const { return free_rank_ == 0 && torsion_.empty(); }
    /// Number of cyclic generators: torsion first, then free.
    std::size_t generator_count() const { return torsion_.size() + free_rank_; }

    /// "0", "Z", "Z^2 + Z/2", "GF:2^3", "Q".
    std::string to_string() const;
    /// Inverse of to_string for a given ring.
    static FPAbelianGroup parse(const BaseRing& ring, const std::string& text);

    friend bool operator==(const FPAbelianGroup& a, const FPAbelianGroup& b)
    {
        return a.ring_ == b.ring_ && a.free_rank_ == b.free_rank_ && a.torsion_ == b.torsion_;
    }
    friend bool operator!=(const FPAbelianGroup& a, const FPAbelianGroup& b) { return !(a == b); }

private:
    BaseRing ring_;
    std::size_t free_rank_ = 0;
    std::vector<Integer> torsion_;
};

/// A homology module ker d_n / im d_{n+1} together with canonical generators
/// and the data needed to reduce any cycle to canonical coordinates.
class HomologyGroup {
public:
    HomologyGroup() = default;

    const FPAbelianGroup& group() const { return group_; }
    /// Representative cycles in the chain basis, one per generator
    /// (torsion generators first, in factor order, then free ones).
    const std::vector<Vector>& generators() const { return generators_; }
    /// Order of each generator: d_i for torsion, 0 for free.
    const std::vector<Integer>& generator_orders() const { return orders_; }
    std::size_t chain_rank() const { return chain_rank_; }

    bool is_cycle(const Vector& z) const;
    /// Canonical coordinates of the class of z; throws DomainError if z is
    /// not a cycle. Torsion coordinates are reduced modulo their order.
    Vector coordinates(const Vector& z) const;
    bool is_boundary(const Vector& z) const;

private:
    friend class ChainComplex;
    friend HomologyGroup homology_from_differentials(const Matrix&, const Matrix&);

    FPAbelianGroup group_;
    std::vector<Vector> generators_;
    std::vector<Integer> orders_;
    std::size_t chain_rank_ = 0;
    Matrix outgoing_;  // d_n, to test the cycle condition
    // cycle z -> y = (pre_ z) ./ divisors_ (exact) -> coords = change_ y
    Matrix pre_;
    std::vector<Scalar> divisors_;
    Matrix change_;
    std::vector<std::size_t> kept_;  // rows of change_ y reported as coordinates
};

/// Homology of C_{n+1} --d_in--> C_n --d_out--> C_{n-1}.
HomologyGroup homology_from_differentials(const Matrix& d_out, const Matrix& d_in);

/// Bounded chain complex in degrees 0..top with d_n : C_n -> C_{n-1}.
class ChainComplex {
public:
    ChainComplex() = default;
    /// differentials[n-1] is d_n for n = 1..top; d_0 is the zero map.
    ChainComplex(BaseRing ring, std::vector<std::size_t> ranks, std::vector<Matrix> differentials);

    const BaseRing& ring() const { return ring_; }
    std::size_t top_degree() const { return ranks_.empty() ? 0 : ranks_.size() - 1; }
    std::size_t rank(std::size_t n) const { return ranks_.at(n); }
    /// d_n; d_0 is the zero map C_0 -> 0.
    const Matrix& differential(std::size_t n) const { return differentials_.at(n); }

    /// Shapes and d_n d_{n+1} = 0 for every n.
    ValidationReport validate() const;
    /// Requires 0 <= n < top_degree so that d_{n+1} is available.
    HomologyGroup homology(std::size_t n) const;

private:
    BaseRing ring_;
    std::vector<std::size_t> ranks_;
    std::vector<Matrix> differentials_;  // index n, entry 0 is the zero map
};

}  // namespace dtrace
