#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "dtrace/algebra.hpp"
#include "dtrace/homology.hpp"

namespace dtrace {

/// Largest number of basis tensors built at any single level.
inline constexpr std::size_t default_level_cap = std::size_t{1} << 20;

/// Basis tensor e_{a_0} (x) ... (x) e_{a_q}: index sum a_i r^{q-i}.
std::size_t tensor_index(const std::vector<std::size_t>& a, std::size_t rank);
std::vector<std::size_t> tensor_digits(std::size_t index, std::size_t rank, std::size_t q);
/// rank^(q+1), or CapExceeded past cap.
std::size_t tensor_rank(std::size_t rank, std::size_t q, std::size_t cap = default_level_cap);

/// The cyclic bar construction: level q is A^{(x)(q+1)} with faces,
/// degeneracies and the cyclic operator, as sparse matrices in the tensor basis.
class CyclicModule {
public:
    /// Builds levels 0..max_degree+1.
    CyclicModule(Algebra a, std::size_t max_degree, std::size_t cap = default_level_cap);

    const Algebra& algebra() const { return algebra_; }
    std::size_t top_level() const { return faces_.size() - 1; }
    std::size_t rank(std::size_t q) const;

    /// d_i : level q -> q-1, 0 <= i <= q, q >= 1.
    const SparseMatrix& face(std::size_t q, std::size_t i) const { return faces_.at(q).at(i); }
    /// s_i : level q -> q+1, 0 <= i <= q, q + 1 <= top.
    const SparseMatrix& degeneracy(std::size_t q, std::size_t i) const { return degeneracies_.at(q).at(i); }
    /// t : (a_0, ..., a_q) -> (a_q, a_0, ..., a_{q-1}).
    const SparseMatrix& cyclic(std::size_t q) const { return cyclic_.at(q); }

    /// b = sum (-1)^i d_i on level q.
    SparseMatrix hochschild_boundary(std::size_t q) const;
    /// Connes' operator (1 - t') s_{-1} N' on unnormalized chains, t' = (-1)^q t.
    SparseMatrix connes_b(std::size_t q) const;

    /// Every simplicial and cyclic identity, as exact matrix equations.
    ValidationReport validate() const;

private:
    Algebra algebra_;
    std::vector<std::vector<SparseMatrix>> faces_;
    std::vector<std::vector<SparseMatrix>> degeneracies_;
    std::vector<SparseMatrix> cyclic_;
};

/// Hochschild chain complex in degrees 0..top from the cyclic module. The
/// normalized version quotients by degeneracies (see NormalizedComplex).
ChainComplex hochschild_complex(const CyclicModule& c, bool normalized);

/// The normalized Hochschild complex, built in a basis of A whose first
/// element is the unit: level q has basis the tuples (a_0, a_1, ..., a_q)
/// with a_i != unit for i >= 1, so rank r (r-1)^q.
class NormalizedComplex {
public:
    NormalizedComplex(Algebra a, std::size_t cap = default_level_cap);

    const Algebra& algebra() const { return algebra_; }
    /// A rewritten in the unit-adapted basis.
    const Algebra& adapted() const { return adapted_; }
    /// original coordinates = change * adapted coordinates.
    const Matrix& change() const { return change_; }
    const Matrix& change_inverse() const { return change_inv_; }

    std::size_t rank(std::size_t q) const;
    std::size_t index(const std::vector<std::size_t>& adapted_tuple) const;
    std::vector<std::size_t> tuple(std::size_t q, std::size_t index) const;

    /// b : N_q -> N_{q-1}.
    SparseMatrix boundary(std::size_t q) const;
    /// Connes' B : N_q -> N_{q+1}, sum_i (-1)^{qi} 1 (x) a_i ... a_q (x) a_0 ... a_{i-1}.
    SparseMatrix connes_b(std::size_t q) const;
    /// Chain complex of degrees 0..top.
    ChainComplex complex(std::size_t top) const;

    /// Unnormalized chain in the original tensor basis -> its image in N_q.
    SparseVector normalize(std::size_t q, const SparseVector& tensor) const;
    /// N_q basis combination -> chain in the original tensor basis.
    SparseVector lift(std::size_t q, const SparseVector& chain) const;

    /// Matrix N_q(source) -> N_q(this) of a map given on original basis tensors.
    SparseMatrix transfer(const NormalizedComplex& source, std::size_t q,
                          const std::function<SparseVector(std::size_t)>& tensor_map) const;

private:
    Algebra algebra_, adapted_;
    Matrix change_, change_inv_;
    std::size_t cap_;
};

struct HomologyClass {
    std::size_t degree = 0;
    Vector coordinates;
    /// Representative in the original tensor basis.
    SparseVector representative;
};

/// HH_n(A) computed on the normalized complex, with lifted representatives.
class HochschildHomology {
public:
    HochschildHomology(std::shared_ptr<const NormalizedComplex> complex, std::size_t degree);

    std::size_t degree() const { return degree_; }
    const FPAbelianGroup& group() const { return homology_.group(); }
    const HomologyGroup& homology() const { return homology_; }
    const NormalizedComplex& complex() const { return *complex_; }
    std::vector<HomologyClass> basis() const;
    /// Class of a normalized cycle; throws DomainError when it is not a cycle.
    HomologyClass classify(const SparseVector& normalized_cycle) const;
    /// Class of an unnormalized cycle given in the original tensor basis.
    HomologyClass classify_tensor(const SparseVector& tensor_cycle) const;

private:
    std::shared_ptr<const NormalizedComplex> complex_;
    std::size_t degree_;
    HomologyGroup homology_;
};

HochschildHomology hochschild_homology(const Algebra& a, std::size_t n);

/// Total complex of the (b, B) bicomplex in degrees 0..top: Tot_n = sum_p N_{n-2p}.
ChainComplex cyclic_total_complex(const NormalizedComplex& c, std::size_t top);
/// HC_n(A) for an algebra over Q.
FPAbelianGroup cyclic_homology(const Algebra& a, std::size_t n);

/// f^{(x)(q+1)} on the tensor basis.
SparseMatrix induced_chain_map(const AlgebraHom& f, std::size_t q, std::size_t cap = default_level_cap);

inline const char* connes_operator_convention =
    "B = (1 - t')s N' with t' = (-1)^q t, N' = sum_i t'^i, s inserting the unit in position 0; "
    "normalized: B(a_0,...,a_q) = sum_i (-1)^{qi} (1, a_i, ..., a_q, a_0, ..., a_{i-1})";

}  // namespace dtrace
