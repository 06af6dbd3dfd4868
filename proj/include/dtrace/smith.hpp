#pragma once

#include <optional>
#include <variant>

#include "dtrace/matrix.hpp"

namespace dtrace {

/// S = U * M * V with U, V invertible over the ring and S diagonal,
/// each diagonal entry dividing the next.
struct SmithForm {
    Matrix u, s, v;
    Matrix u_inv, v_inv;
    std::size_t rank = 0;

    /// The nonzero diagonal entries d_1 | d_2 | ... | d_rank.
    std::vector<Scalar> diagonal() const;
};

/// Supported over Z, Q, prime fields and Z/p^k. Pivot rule: smallest
/// norm (|x| over Z, p-adic valuation over Z/p^k) in the active block,
/// ties broken in row-major order; outputs are deterministic.
SmithForm smith_normal_form(const Matrix& m);

inline const char* smith_pivot_rule =
    "smallest norm in the active block (|x| over Z, valuation over Z/p^k), ties by row-major order";

struct NotInImage {
    /// Row of the transformed target U v that witnesses non-membership.
    std::size_t row = 0;
    Scalar residue;
    Scalar divisor;
};

using MembershipResult = std::variant<Vector, NotInImage>;

/// Finds x with M x = v, or certifies that v is not in the image.
/// Over Z/m (any m >= 2) the computation is lifted to the integers.
MembershipResult solve_membership(const Matrix& m, const Vector& v);

/// Rank of a matrix over a field.
std::size_t rank_over_field(const Matrix& m);

}  // namespace dtrace
