#include "dtrace/ring.hpp"

#include "dtrace/errors.hpp"

#include <sstream>

namespace dtrace {

bool is_prime(std::int64_t n)
{
    if (n < 2)
        return false;
    for (std::int64_t d = 2; d * d <= n; ++d)
        if (n % d == 0)
            return false;
    return true;
}

std::optional<std::int64_t> inverse_mod(std::int64_t a, std::int64_t m)
{
    std::int64_t r0 = ((a % m) + m) % m, r1 = m;
    std::int64_t s0 = 1, s1 = 0;
    while (r1 != 0) {
        std::int64_t q = r0 / r1;
        std::int64_t t = r0 - q * r1;
        r0 = r1;
        r1 = t;
        t = s0 - q * s1;
        s0 = s1;
        s1 = t;
    }
    if (r0 != 1)
        return std::nullopt;
    return ((s0 % m) + m) % m;
}

BaseRing BaseRing::integers_mod(std::int64_t m)
{
    if (m < 2 || m > max_modulus)
        throw DomainError("modulus out of range: " + std::to_string(m));
    if (is_prime(m))
        return BaseRing(RingKind::PrimeField, m);
    return BaseRing(RingKind::IntegersMod, m);
}

BaseRing BaseRing::prime_field(std::int64_t p)
{
    if (!is_prime(p) || p > max_modulus)
        throw DomainError("not a supported prime: " + std::to_string(p));
    return BaseRing(RingKind::PrimeField, p);
}

BaseRing BaseRing::parse(const std::string& text)
{
    if (text == "Z")
        return integers();
    if (text == "Q")
        return rationals();
    auto number_after = [&](std::size_t prefix) {
        std::string digits = text.substr(prefix);
        if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
            throw ParseError("bad ring modulus in '" + text + "'");
        if (digits.size() > 12)
            throw ParseError("ring modulus too large in '" + text + "'");
        return std::stoll(digits);
    };
    try {
        if (text.rfind("Zmod:", 0) == 0)
            return integers_mod(number_after(5));
        if (text.rfind("GF:", 0) == 0)
            return prime_field(number_after(3));
    } catch (const DomainError& e) {
        throw ParseError(e.what());
    }
    throw ParseError("unknown ring '" + text + "' (expected Z, Q, Zmod:m or GF:p)");
}

std::optional<std::pair<std::int64_t, int>> BaseRing::prime_power() const
{
    if (!is_finite())
        return std::nullopt;
    std::int64_t m = modulus_;
    std::int64_t p = 0;
    for (std::int64_t d = 2; d * d <= m; ++d)
        if (m % d == 0) {
            p = d;
            break;
        }
    if (p == 0)
        return std::make_pair(m, 1);
    int k = 0;
    while (m % p == 0) {
        m /= p;
        ++k;
    }
    if (m != 1)
        return std::nullopt;
    return std::make_pair(p, k);
}

bool BaseRing::supports_homology() const
{
    return !is_finite() || prime_power().has_value();
}

std::string BaseRing::name() const
{
    switch (kind_) {
    case RingKind::Integers:
        return "Z";
    case RingKind::Rationals:
        return "Q";
    case RingKind::IntegersMod:
        return "Zmod:" + std::to_string(modulus_);
    case RingKind::PrimeField:
        return "GF:" + std::to_string(modulus_);
    }
    return "?";
}

Scalar BaseRing::normalize(const Scalar& x) const
{
    if (kind_ == RingKind::Rationals) {
        Scalar y = x;
        y.canonicalize();
        return y;
    }
    if (kind_ == RingKind::Integers) {
        if (x.get_den() != 1)
            throw DomainError("non-integral value " + to_string(x) + " in Z");
        return x;
    }
    const mpz_class m(static_cast<long>(modulus_));
    mpz_class num = x.get_num() % m;
    if (num < 0)
        num += m;
    if (x.get_den() == 1)
        return Scalar(num);
    mpz_class den = x.get_den() % m;
    mpz_class inv;
    if (mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), m.get_mpz_t()) == 0)
        throw DomainError("denominator of " + to_string(x) + " is not invertible in " + name());
    mpz_class r = (num * inv) % m;
    return Scalar(r);
}

bool BaseRing::is_unit(const Scalar& a) const
{
    return inverse(a).has_value();
}

std::optional<Scalar> BaseRing::inverse(const Scalar& a) const
{
    Scalar x = normalize(a);
    switch (kind_) {
    case RingKind::Rationals:
        if (x == 0)
            return std::nullopt;
        return Scalar(1 / x);
    case RingKind::Integers:
        if (x == 1 || x == -1)
            return x;
        return std::nullopt;
    default: {
        auto inv = inverse_mod(x.get_num().get_si(), modulus_);
        if (!inv)
            return std::nullopt;
        return Scalar(static_cast<long>(*inv));
    }
    }
}

std::string to_string(const Scalar& x)
{
    return x.get_str();
}

Scalar parse_scalar(const std::string& text)
{
    if (text.empty())
        throw ParseError("empty number");
    std::size_t start = (text[0] == '-' || text[0] == '+') ? 1 : 0;
    std::size_t slash = text.find('/');
    auto all_digits = [](const std::string& s) {
        return !s.empty() && s.find_first_not_of("0123456789") == std::string::npos;
    };
    if (slash == std::string::npos) {
        if (!all_digits(text.substr(start)))
            throw ParseError("bad number '" + text + "'");
    } else if (!all_digits(text.substr(start, slash - start)) || !all_digits(text.substr(slash + 1))) {
        throw ParseError("bad number '" + text + "'");
    }
    Scalar value;
    std::string body = text[0] == '+' ? text.substr(1) : text;
    if (value.set_str(body, 10) != 0)
        throw ParseError("bad number '" + text + "'");
    if (value.get_den() == 0)
        throw ParseError("zero denominator in '" + text + "'");
    value.canonicalize();
    return value;
}

std::string ValidationReport::summary(std::size_t max_lines) const
{
    if (failures.empty())
        return "ok";
    std::ostringstream out;
    out << failures.size() << " failure(s)";
    for (std::size_t i = 0; i < failures.size() && i < max_lines; ++i)
        out << "\n  " << failures[i];
    if (failures.size() > max_lines)
        out << "\n  ...";
    return out.str();
}

}  // namespace dtrace
