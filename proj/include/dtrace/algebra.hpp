#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dtrace/errors.hpp"
#include "dtrace/matrix.hpp"

namespace dtrace {

/// Unital associative algebra, free of finite rank over its base ring,
/// given by structure constants e_i e_j = sum_k c_ijk e_k.
class Algebra {
public:
    Algebra() = default;
    /// products[i * rank + j] holds e_i e_j. Entries are normalized into the base.
    Algebra(BaseRing base, std::vector<std::string> names, Vector unit, std::vector<SparseVector> products);

    const BaseRing& base() const { return base_; }
    std::size_t rank() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }
    const Vector& unit() const { return unit_; }
    const SparseVector& product(std::size_t i, std::size_t j) const { return products_[i * rank() + j]; }

    Vector multiply(const Vector& a, const Vector& b) const;
    SparseVector multiply(const SparseVector& a, const SparseVector& b) const;
    /// Matrix of x -> a x (left) or x -> x a (right) on the basis.
    Matrix left_multiplication(const Vector& a) const;
    Matrix right_multiplication(const Vector& a) const;

    Vector zero() const { return Vector(rank()); }
    Vector basis_vector(std::size_t i) const;
    /// Index of the basis element with the given name, if any.
    std::optional<std::size_t> find(const std::string& name) const;

    /// "0", "1+x", "2*x - E12", using basis names.
    std::string format(const Vector& a) const;
    /// Inverse of format; a bare coefficient means a multiple of the unit.
    Vector parse_element(const std::string& text) const;

    /// Cardinality of the underlying set, when the base is finite and it fits.
    std::optional<std::size_t> cardinality(std::size_t cap) const;

private:
    BaseRing base_;
    std::vector<std::string> names_;
    Vector unit_;
    std::vector<SparseVector> products_;
};

/// Associativity on every basis triple and the two-sided unit law.
ValidationReport validate_algebra(const Algebra& a);

/// The base ring as a rank-1 algebra.
Algebra ground_algebra(BaseRing base);
/// R[x]/(x^n), basis 1, x, ..., x^{n-1}.
Algebra truncated_polynomial(BaseRing base, std::size_t n);
/// n x n matrices over A; basis index (i * n + j) * rank(A) + k for E_ij * e_k.
Algebra matrix_algebra(const Algebra& a, std::size_t n);

/// Base-linear map between algebras of the same base.
class AlgebraHom {
public:
    AlgebraHom() = default;
    AlgebraHom(Algebra source, Algebra target, SparseMatrix matrix);

    const Algebra& source() const { return source_; }
    const Algebra& target() const { return target_; }
    const SparseMatrix& matrix() const { return matrix_; }
    Vector apply(const Vector& a) const;

    /// Unit preservation and multiplicativity on all basis pairs.
    ValidationReport validate() const;

    static AlgebraHom identity(const Algebra& a);
    /// this after other: other.target must equal this.source (by rank and base).
    AlgebraHom after(const AlgebraHom& other) const;

private:
    Algebra source_, target_;
    SparseMatrix matrix_;
};

/// Finite group given by its multiplication table.
class FiniteGroup {
public:
    FiniteGroup() = default;
    /// Validates the table; throws ValidationError listing failures.
    FiniteGroup(std::vector<std::string> names, std::vector<std::size_t> table);

    static FiniteGroup trivial();
    /// C_n = {1, x, x^2, ...}.
    static FiniteGroup cyclic(std::size_t n);

    std::size_t order() const { return names_.size(); }
    std::size_t identity() const { return identity_; }
    std::size_t multiply(std::size_t g, std::size_t h) const { return table_[g * order() + h]; }
    std::size_t inverse(std::size_t g) const { return inverses_[g]; }
    const std::vector<std::string>& names() const { return names_; }
    const std::vector<std::size_t>& table() const { return table_; }

private:
    std::vector<std::string> names_;
    std::vector<std::size_t> table_;
    std::size_t identity_ = 0;
    std::vector<std::size_t> inverses_;
};

/// Closure, identity, inverses and associativity of a table (every failing
/// triple is listed).
ValidationReport validate_group_table(std::size_t order, const std::vector<std::size_t>& table);

/// R[G] with e_g e_h = e_{gh}.
Algebra group_algebra(const FiniteGroup& g, BaseRing base);
/// R[G] -> R[H] induced by a map of underlying sets phi (validated as a hom).
AlgebraHom group_algebra_map(const FiniteGroup& g, const FiniteGroup& h, const std::vector<std::size_t>& phi,
                             BaseRing base);

inline constexpr std::size_t default_enumeration_cap = 65536;

struct GeneralLinearGroup {
    FiniteGroup group;
    /// Each element as a vector in matrix_algebra(A, n).
    std::vector<Vector> elements;
    Algebra matrices;                 // M_n(A)
    Algebra group_ring;               // R[GL_n(A)]
    AlgebraHom embedding;             // R[GL_n(A)] -> M_n(A)
};

/// Matrices invertible as maps of A^n, enumerated over a finite base.
/// Throws CapExceeded when |A|^{n^2} exceeds cap, DomainError for an infinite base.
GeneralLinearGroup general_linear_group(const Algebra& a, std::size_t n,
                                        std::size_t cap = default_enumeration_cap);

/// Two-sided inverse, or nullopt when u is not a unit.
std::optional<Vector> unit_inverse(const Algebra& a, const Vector& u);

}  // namespace dtrace
