#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include <gmpxx.h>

namespace dtrace {

/// Exact scalar. Integers and residues are stored as rationals with
/// denominator 1; the owning BaseRing keeps them reduced.
using Scalar = mpq_class;
using Integer = mpz_class;

enum class RingKind { Integers, Rationals, IntegersMod, PrimeField };

class BaseRing {
public:
    /// Largest supported modulus; residue products must fit in 64 bits.
    static constexpr std::int64_t max_modulus = std::int64_t{1} << 31;

    BaseRing() = default;  // the integers

    static BaseRing integers() { return BaseRing(RingKind::Integers, 0); }
    static BaseRing rationals() { return BaseRing(RingKind::Rationals, 0); }
    /// Z/m; a prime m yields the prime field tag.
    static BaseRing integers_mod(std::int64_t m);
    static BaseRing prime_field(std::int64_t p);
    /// Accepts "Z", "Q", "Zmod:m", "GF:p".
    static BaseRing parse(const std::string& text);

    RingKind kind() const { return kind_; }
    std::int64_t modulus() const { return modulus_; }
    bool is_field() const { return kind_ == RingKind::Rationals || kind_ == RingKind::PrimeField; }
    bool is_finite() const { return modulus_ != 0; }
    /// (p, k) when the ring is Z/p^k (k = 1 for prime fields).
    std::optional<std::pair<std::int64_t, int>> prime_power() const;
    /// Z, Q, fields and Z/p^k: the rings over which homology is supported.
    bool supports_homology() const;

    std::string name() const;

    Scalar normalize(const Scalar& x) const;
    Scalar add(const Scalar& a, const Scalar& b) const { return normalize(a + b); }
    Scalar sub(const Scalar& a, const Scalar& b) const { return normalize(a - b); }
    Scalar mul(const Scalar& a, const Scalar& b) const { return normalize(a * b); }
    Scalar neg(const Scalar& a) const { return normalize(-a); }
    bool is_unit(const Scalar& a) const;
    std::optional<Scalar> inverse(const Scalar& a) const;
    /// Enumerates the elements of a finite ring as 0, 1, ..., m-1.
    Scalar element(std::int64_t index) const { return Scalar(index); }

    friend bool operator==(const BaseRing& a, const BaseRing& b)
    {
        return a.kind_ == b.kind_ && a.modulus_ == b.modulus_;
    }
    friend bool operator!=(const BaseRing& a, const BaseRing& b) { return !(a == b); }

private:
    BaseRing(RingKind kind, std::int64_t modulus) : kind_(kind), modulus_(modulus) {}

    RingKind kind_ = RingKind::Integers;
    std::int64_t modulus_ = 0;
};

bool is_prime(std::int64_t n);
std::string to_string(const Scalar& x);
/// Parses "3", "-2", "1/2".
Scalar parse_scalar(const std::string& text);
/// Modular inverse of a (mod m), when gcd(a, m) = 1.
std::optional<std::int64_t> inverse_mod(std::int64_t a, std::int64_t m);

}  // namespace dtrace
