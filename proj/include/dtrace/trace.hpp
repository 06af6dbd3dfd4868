#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "dtrace/hochschild.hpp"

namespace dtrace {

/// Bar construction of a finite group with coefficients in R:
/// level d has basis the d-tuples (g_1, ..., g_d) and
/// del = sum (-1)^i d_i with d_0 dropping g_1, d_i multiplying g_i g_{i+1}
/// and d_d dropping g_d. The normalized version keeps tuples with no identity entry.
class BarComplex {
public:
    BarComplex(FiniteGroup g, BaseRing base, bool normalized, std::size_t cap = default_level_cap);

    const FiniteGroup& group() const { return group_; }
    const BaseRing& base() const { return base_; }
    bool normalized() const { return normalized_; }
    std::size_t rank(std::size_t d) const;
    std::size_t index(const std::vector<std::size_t>& tuple) const;
    std::vector<std::size_t> tuple(std::size_t d, std::size_t index) const;
    /// del_d : level d -> d - 1, d >= 1.
    SparseMatrix boundary(std::size_t d) const;
    ChainComplex complex(std::size_t top) const;

private:
    FiniteGroup group_;
    BaseRing base_;
    bool normalized_;
    std::size_t cap_;
    std::vector<std::size_t> slot_;   // element -> digit (normalized: identity has none)
    std::vector<std::size_t> element_;  // digit -> element
};

/// H_d(BG; R) from the normalized bar complex.
HomologyGroup group_homology(const FiniteGroup& g, BaseRing base, std::size_t d);

/// (g_1, ..., g_q) -> (g_q^{-1} ... g_1^{-1}) (x) g_1 (x) ... (x) g_q, from bar
/// level q (unnormalized) to cyclic-bar level q of R[G] in the tensor basis.
SparseMatrix group_to_hh(const FiniteGroup& g, BaseRing base, std::size_t q, std::size_t cap = default_level_cap);

/// Level q of M_n(A)'s cyclic bar -> level q of A's:
/// g_0 (x) ... (x) g_q -> sum over i_0..i_q of (g_0)_{i_0 i_1} (x) ... (x) (g_q)_{i_q i_0}.
SparseMatrix multitrace(const Algebra& a, std::size_t n, std::size_t q, std::size_t cap = default_level_cap);

/// A map of homology groups in their canonical bases.
struct InducedMap {
    FPAbelianGroup source, target;
    /// Column j = target coordinates of the image of source generator j.
    Matrix matrix;
    bool chain_map_verified = false;
    /// Same invariants and surjective (hence an isomorphism of f.g. modules).
    bool isomorphism = false;
};

/// Whether a homology map hits every class of the target.
bool surjective_on_homology(const Matrix& images, const HomologyGroup& target);

/// HH_d(M_n(A)) -> HH_d(A) induced by the multitrace.
InducedMap morita_map(const Algebra& a, std::size_t n, std::size_t d);

/// Class of sum_{i,j} (g^{-1})_{ij} (x) g_{ji} in HH_1(A), for g invertible in M_n(A).
/// Throws DomainError when g is not invertible.
HomologyClass dennis_trace_k1(const HochschildHomology& hh1, std::size_t n, const Vector& g);
HomologyClass dennis_trace_k1(const Algebra& a, std::size_t n, const Vector& g);
/// The degree-1 cycle itself, in A's tensor basis.
SparseVector dennis_cycle(const Algebra& a, std::size_t n, const Vector& g);

inline constexpr std::size_t default_group_order_cap = 24;

struct TraceOptions {
    std::size_t group_order_cap = default_group_order_cap;
    std::size_t enumeration_cap = default_enumeration_cap;
    std::size_t level_cap = default_level_cap;
};

/// H_d(BGL_n(A); R) -> HH_d(A) at chain level: group_to_hh, then the
/// embedding R[GL_n(A)] -> M_n(A), then the multitrace. R is the finite base of A.
struct DennisTraceResult {
    InducedMap map;
    GeneralLinearGroup gl;
    HomologyGroup source;         // H_d(BGL_n(A); R) on the normalized bar complex
    std::vector<Vector> images;   // HH_d(A) coordinates of each source generator
};

DennisTraceResult dennis_trace_homology(const Algebra& a, std::size_t n, std::size_t d,
                                        const TraceOptions& options = {});

/// Chain-level composite on normalized bar level q, landing in N_q(A).
SparseMatrix dennis_chain_map(const GeneralLinearGroup& gl, const Algebra& a, std::size_t n,
                              const NormalizedComplex& target, const BarComplex& bar, std::size_t q);

}  // namespace dtrace
