#include "dtrace/algebra.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "dtrace/smith.hpp"

namespace dtrace {

Algebra::Algebra(BaseRing base, std::vector<std::string> names, Vector unit, std::vector<SparseVector> products)
    : base_(base), names_(std::move(names)), unit_(std::move(unit)), products_(std::move(products))
{
    const std::size_t r = names_.size();
    if (r == 0)
        throw DomainError("algebra must have positive rank");
    if (unit_.size() != r)
        throw DomainError("unit vector has wrong length");
    if (products_.size() != r * r)
        throw DomainError("structure constants must cover every basis pair");
    for (auto& u : unit_)
        u = base_.normalize(u);
    for (auto& p : products_) {
        SparseVector clean;
        for (const auto& [k, c] : p.terms()) {
            if (k >= r)
                throw DomainError("structure constant index out of range");
            clean.add(k, c, base_);
        }
        p = std::move(clean);
    }
    std::map<std::string, int> seen;
    for (const auto& n : names_)
        if (seen[n]++)
            throw DomainError("duplicate basis name '" + n + "'");
}

Vector Algebra::multiply(const Vector& a, const Vector& b) const
{
    const std::size_t r = rank();
    if (a.size() != r || b.size() != r)
        throw DomainError("algebra element has wrong length");
    Vector out(r);
    for (std::size_t i = 0; i < r; ++i) {
        if (sgn(a[i]) == 0)
            continue;
        for (std::size_t j = 0; j < r; ++j) {
            if (sgn(b[j]) == 0)
                continue;
            Scalar c = a[i] * b[j];
            for (const auto& [k, v] : product(i, j).terms())
                out[k] += c * v;
        }
    }
    for (auto& x : out)
        x = base_.normalize(x);
    return out;
}

SparseVector Algebra::multiply(const SparseVector& a, const SparseVector& b) const
{
    SparseVector out;
    for (const auto& [i, x] : a.terms())
        for (const auto& [j, y] : b.terms())
            out.add(product(i, j), x * y, base_);
    return out;
}

Matrix Algebra::left_multiplication(const Vector& a) const
{
    Matrix m(base_, rank(), rank());
    for (std::size_t j = 0; j < rank(); ++j) {
        Vector col = multiply(a, basis_vector(j));
        for (std::size_t i = 0; i < rank(); ++i)
            m.set(i, j, col[i]);
    }
    return m;
}

Matrix Algebra::right_multiplication(const Vector& a) const
{
    Matrix m(base_, rank(), rank());
    for (std::size_t j = 0; j < rank(); ++j) {
        Vector col = multiply(basis_vector(j), a);
        for (std::size_t i = 0; i < rank(); ++i)
            m.set(i, j, col[i]);
    }
    return m;
}

Vector Algebra::basis_vector(std::size_t i) const
{
    Vector v(rank());
    v.at(i) = 1;
    return v;
}

std::optional<std::size_t> Algebra::find(const std::string& name) const
{
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end())
        return std::nullopt;
    return static_cast<std::size_t>(it - names_.begin());
}

std::string Algebra::format(const Vector& a) const
{
    std::string out;
    for (std::size_t i = 0; i < a.size(); ++i) {
        Scalar c = base_.normalize(a[i]);
        if (sgn(c) == 0)
            continue;
        bool neg = sgn(c) < 0;
        Scalar mag = neg ? Scalar(-c) : c;
        if (!out.empty() || neg)
            out += neg ? "-" : "+";
        if (mag == 1)
            out += names_[i];
        else
            out += to_string(mag) + "*" + names_[i];
    }
    return out.empty() ? "0" : out;
}

Vector Algebra::parse_element(const std::string& raw) const
{
    std::string text;
    for (char ch : raw)
        if (ch != ' ' && ch != '\t')
            text += ch;
    if (text.empty())
        throw ParseError("empty algebra element");
    Vector out(rank());
    std::size_t pos = 0;
    while (pos < text.size()) {
        int sign = 1;
        if (text[pos] == '+' || text[pos] == '-') {
            sign = text[pos] == '-' ? -1 : 1;
            ++pos;
        }
        std::size_t end = pos;
        while (end < text.size() && text[end] != '+' && text[end] != '-')
            ++end;
        std::string term = text.substr(pos, end - pos);
        if (term.empty())
            throw ParseError("malformed algebra element '" + raw + "'");
        Scalar coeff = 1;
        std::optional<std::size_t> idx = find(term);
        if (!idx) {
            auto star = term.find('*');
            if (star != std::string::npos) {
                coeff = parse_scalar(term.substr(0, star));
                idx = find(term.substr(star + 1));
                if (!idx)
                    throw ParseError("unknown basis element '" + term.substr(star + 1) + "'");
            } else {
                coeff = parse_scalar(term);
            }
        }
        coeff *= sign;
        if (idx) {
            out[*idx] = base_.normalize(out[*idx] + coeff);
        } else {
            for (std::size_t i = 0; i < rank(); ++i)
                out[i] = base_.normalize(out[i] + coeff * unit_[i]);
        }
        pos = end;
    }
    return out;
}

std::optional<std::size_t> Algebra::cardinality(std::size_t cap) const
{
    if (!base_.is_finite())
        return std::nullopt;
    std::size_t total = 1;
    for (std::size_t i = 0; i < rank(); ++i) {
        if (total > cap / static_cast<std::size_t>(base_.modulus()))
            return std::nullopt;
        total *= static_cast<std::size_t>(base_.modulus());
    }
    return total;
}

ValidationReport validate_algebra(const Algebra& a)
{
    ValidationReport report;
    const std::size_t r = a.rank();
    const auto& names = a.names();
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) {
            SparseVector ij = a.product(i, j);
            for (std::size_t k = 0; k < r; ++k) {
                SparseVector left;
                for (const auto& [m, c] : ij.terms())
                    left.add(a.product(m, k), c, a.base());
                SparseVector right;
                for (const auto& [m, c] : a.product(j, k).terms())
                    right.add(a.product(i, m), c, a.base());
                if (left != right)
                    report.fail("associativity fails on (" + names[i] + ", " + names[j] + ", " + names[k] + ")");
            }
        }
    for (std::size_t i = 0; i < r; ++i) {
        Vector e = a.basis_vector(i);
        if (a.multiply(a.unit(), e) != e)
            report.fail("unit is not a left identity on " + names[i]);
        if (a.multiply(e, a.unit()) != e)
            report.fail("unit is not a right identity on " + names[i]);
    }
    return report;
}

Algebra ground_algebra(BaseRing base)
{
    return Algebra(base, {"1"}, {Scalar(1)}, {SparseVector::basis(0)});
}

Algebra truncated_polynomial(BaseRing base, std::size_t n)
{
    if (n < 1)
        throw DomainError("truncated polynomial ring needs n >= 1");
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i)
        names.push_back(i == 0 ? "1" : i == 1 ? "x" : "x^" + std::to_string(i));
    std::vector<SparseVector> products(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i + j < n)
                products[i * n + j] = SparseVector::basis(i + j);
    Vector unit(n);
    unit[0] = 1;
    return Algebra(base, std::move(names), std::move(unit), std::move(products));
}

Algebra matrix_algebra(const Algebra& a, std::size_t n)
{
    if (n == 0)
        throw DomainError("matrix size must be positive");
    const std::size_t r = a.rank();
    const std::size_t rank = n * n * r;
    auto index = [&](std::size_t i, std::size_t j, std::size_t k) { return (i * n + j) * r + k; };
    std::vector<std::string> names(rank);
    const bool wide = n > 9;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            std::string e = "E" + std::to_string(i + 1) + (wide ? "_" : "") + std::to_string(j + 1);
            for (std::size_t k = 0; k < r; ++k)
                names[index(i, j, k)] = a.names()[k] == "1" ? e : e + "*" + a.names()[k];
        }
    std::vector<SparseVector> products(rank * rank);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < r; ++k)
                for (std::size_t l = 0; l < n; ++l)
                    for (std::size_t k2 = 0; k2 < r; ++k2) {
                        SparseVector& out = products[index(i, j, k) * rank + index(j, l, k2)];
                        for (const auto& [m, c] : a.product(k, k2).terms())
                            out.add(index(i, l, m), c, a.base());
                    }
    Vector unit(rank);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < r; ++k)
            unit[index(i, i, k)] = a.unit()[k];
    return Algebra(a.base(), std::move(names), std::move(unit), std::move(products));
}

// ---------------------------------------------------------------------------

AlgebraHom::AlgebraHom(Algebra source, Algebra target, SparseMatrix matrix)
    : source_(std::move(source)), target_(std::move(target)), matrix_(std::move(matrix))
{
    if (source_.base() != target_.base())
        throw DomainError("algebra hom between different base rings");
    if (matrix_.rows() != target_.rank() || matrix_.cols() != source_.rank())
        throw DomainError("algebra hom matrix has wrong shape");
}

Vector AlgebraHom::apply(const Vector& a) const
{
    return matrix_.apply(SparseVector::from_dense(a)).to_dense(target_.rank());
}

ValidationReport AlgebraHom::validate() const
{
    ValidationReport report;
    if (apply(source_.unit()) != target_.unit())
        report.fail("unit is not preserved");
    const auto& names = source_.names();
    for (std::size_t i = 0; i < source_.rank(); ++i)
        for (std::size_t j = 0; j < source_.rank(); ++j) {
            SparseVector lhs = matrix_.apply(source_.product(i, j));
            SparseVector rhs = target_.multiply(matrix_.column(i), matrix_.column(j));
            if (lhs != rhs)
                report.fail("multiplicativity fails on (" + names[i] + ", " + names[j] + ")");
        }
    return report;
}

AlgebraHom AlgebraHom::identity(const Algebra& a)
{
    return AlgebraHom(a, a, SparseMatrix::identity(a.base(), a.rank()));
}

AlgebraHom AlgebraHom::after(const AlgebraHom& other) const
{
    if (other.target_.rank() != source_.rank() || other.target_.base() != source_.base())
        throw DomainError("algebra homs are not composable");
    return AlgebraHom(other.source_, target_, matrix_ * other.matrix_);
}

// ---------------------------------------------------------------------------

ValidationReport validate_group_table(std::size_t order, const std::vector<std::size_t>& table)
{
    ValidationReport report;
    if (order == 0) {
        report.fail("group must be nonempty");
        return report;
    }
    if (table.size() != order * order) {
        report.fail("table must have order^2 entries");
        return report;
    }
    for (std::size_t x : table)
        if (x >= order) {
            report.fail("table entry " + std::to_string(x) + " out of range");
            return report;
        }
    auto mul = [&](std::size_t g, std::size_t h) { return table[g * order + h]; };
    std::optional<std::size_t> e;
    for (std::size_t c = 0; c < order && !e; ++c) {
        bool ok = true;
        for (std::size_t g = 0; g < order && ok; ++g)
            ok = mul(c, g) == g && mul(g, c) == g;
        if (ok)
            e = c;
    }
    if (!e)
        report.fail("no identity element");
    for (std::size_t g = 0; g < order; ++g)
        for (std::size_t h = 0; h < order; ++h)
            for (std::size_t k = 0; k < order; ++k)
                if (mul(mul(g, h), k) != mul(g, mul(h, k)))
                    report.fail("associativity fails on (" + std::to_string(g) + ", " + std::to_string(h) + ", " +
                                std::to_string(k) + ")");
    if (e)
        for (std::size_t g = 0; g < order; ++g) {
            bool found = false;
            for (std::size_t h = 0; h < order && !found; ++h)
                found = mul(g, h) == *e && mul(h, g) == *e;
            if (!found)
                report.fail("element " + std::to_string(g) + " has no inverse");
        }
    return report;
}

FiniteGroup::FiniteGroup(std::vector<std::string> names, std::vector<std::size_t> table)
    : names_(std::move(names)), table_(std::move(table))
{
    ValidationReport report = validate_group_table(names_.size(), table_);
    if (!report.ok())
        throw ValidationError("invalid group table: " + report.summary(10));
    const std::size_t n = order();
    for (std::size_t c = 0; c < n; ++c)
        if (multiply(c, 0) == 0 && multiply(0, c) == 0 && multiply(c, c) == c) {
            identity_ = c;
            break;
        }
    inverses_.assign(n, 0);
    for (std::size_t g = 0; g < n; ++g)
        for (std::size_t h = 0; h < n; ++h)
            if (multiply(g, h) == identity_) {
                inverses_[g] = h;
                break;
            }
}

FiniteGroup FiniteGroup::trivial()
{
    return FiniteGroup({"1"}, {0});
}

FiniteGroup FiniteGroup::cyclic(std::size_t n)
{
    if (n == 0)
        throw DomainError("cyclic group order must be positive");
    std::vector<std::string> names;
    std::vector<std::size_t> table(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        names.push_back(i == 0 ? "1" : i == 1 ? "x" : "x^" + std::to_string(i));
        for (std::size_t j = 0; j < n; ++j)
            table[i * n + j] = (i + j) % n;
    }
    return FiniteGroup(std::move(names), std::move(table));
}

Algebra group_algebra(const FiniteGroup& g, BaseRing base)
{
    const std::size_t n = g.order();
    std::vector<SparseVector> products(n * n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            products[a * n + b] = SparseVector::basis(g.multiply(a, b));
    Vector unit(n);
    unit[g.identity()] = 1;
    return Algebra(base, g.names(), std::move(unit), std::move(products));
}

AlgebraHom group_algebra_map(const FiniteGroup& g, const FiniteGroup& h, const std::vector<std::size_t>& phi,
                             BaseRing base)
{
    if (phi.size() != g.order())
        throw DomainError("group map must assign every element");
    for (std::size_t a = 0; a < g.order(); ++a) {
        if (phi[a] >= h.order())
            throw DomainError("group map image out of range");
        for (std::size_t b = 0; b < g.order(); ++b)
            if (phi[g.multiply(a, b)] != h.multiply(phi[a], phi[b]))
                throw ValidationError("not a group homomorphism at (" + g.names()[a] + ", " + g.names()[b] + ")");
    }
    SparseMatrix m(base, h.order(), g.order());
    for (std::size_t a = 0; a < g.order(); ++a)
        m.add(phi[a], a, 1);
    return AlgebraHom(group_algebra(g, base), group_algebra(h, base), std::move(m));
}

// ---------------------------------------------------------------------------

namespace {

// Determinant over Q of an integer matrix; for invertibility tests mod m.
Scalar determinant(Matrix m)
{
    const std::size_t n = m.rows();
    std::vector<Scalar> a(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            a[i * n + j] = m(i, j);
    Scalar det = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && sgn(a[p * n + c]) == 0)
            ++p;
        if (p == n)
            return 0;
        if (p != c) {
            for (std::size_t j = 0; j < n; ++j)
                std::swap(a[p * n + j], a[c * n + j]);
            det = -det;
        }
        det *= a[c * n + c];
        for (std::size_t i = c + 1; i < n; ++i) {
            if (sgn(a[i * n + c]) == 0)
                continue;
            Scalar f = a[i * n + c] / a[c * n + c];
            for (std::size_t j = c; j < n; ++j)
                a[i * n + j] -= f * a[c * n + j];
        }
    }
    return det;
}

}  // namespace

GeneralLinearGroup general_linear_group(const Algebra& a, std::size_t n, std::size_t cap)
{
    const BaseRing& base = a.base();
    if (!base.is_finite())
        throw DomainError("general_linear_group needs a finite base ring, got " + base.name());
    Algebra mn = matrix_algebra(a, n);
    auto total = mn.cardinality(cap);
    if (!total)
        throw CapExceeded("|A|^(n^2) exceeds the enumeration cap " + std::to_string(cap));
    const std::size_t r = a.rank();
    const std::size_t dim = mn.rank();
    const auto m = static_cast<std::size_t>(base.modulus());
    const Integer modulus = static_cast<long>(m);

    std::vector<Vector> elements;
    std::unordered_map<std::string, std::size_t> lookup;
    auto key = [](const Vector& v) {
        std::string k;
        for (const auto& x : v)
            k += x.get_num().get_str() + ",";
        return k;
    };
    Vector g(dim);
    for (std::size_t code = 0; code < *total; ++code) {
        std::size_t c = code;
        // most significant digit first: lexicographic order on the coefficient vector
        for (std::size_t i = dim; i-- > 0;) {
            g[i] = static_cast<long>(c % m);
            c /= m;
        }
        // left multiplication by g on A^n, as a base-linear map of rank n r
        Matrix lm(base, n * r, n * r);
        for (std::size_t col = 0; col < n; ++col)
            for (std::size_t kk = 0; kk < r; ++kk) {
                Vector out(n * r);
                for (std::size_t i = 0; i < n; ++i) {
                    Vector entry(r);
                    for (std::size_t k = 0; k < r; ++k)
                        entry[k] = g[(i * n + col) * r + k];
                    Vector prod = a.multiply(entry, a.basis_vector(kk));
                    for (std::size_t k = 0; k < r; ++k)
                        lm.set(i * r + k, col * r + kk, prod[k]);
                }
            }
        Integer det = determinant(lm).get_num();
        Integer gcd;
        mpz_gcd(gcd.get_mpz_t(), det.get_mpz_t(), modulus.get_mpz_t());
        if (gcd != 1)
            continue;
        lookup.emplace(key(g), elements.size());
        elements.push_back(g);
    }
    const std::size_t order = elements.size();
    std::vector<std::size_t> table(order * order);
    for (std::size_t i = 0; i < order; ++i)
        for (std::size_t j = 0; j < order; ++j) {
            auto it = lookup.find(key(mn.multiply(elements[i], elements[j])));
            if (it == lookup.end())
                throw InvariantBreach("product of invertible matrices not found");
            table[i * order + j] = it->second;
        }
    std::vector<std::string> names;
    for (const auto& e : elements) {
        std::string name = "[";
        for (std::size_t i = 0; i < n; ++i) {
            name += i ? ",[" : "[";
            for (std::size_t j = 0; j < n; ++j) {
                Vector entry(e.begin() + static_cast<std::ptrdiff_t>((i * n + j) * r),
                             e.begin() + static_cast<std::ptrdiff_t>((i * n + j + 1) * r));
                name += (j ? "," : "") + a.format(entry);
            }
            name += "]";
        }
        names.push_back(name + "]");
    }
    FiniteGroup group(std::move(names), std::move(table));
    Algebra ring = group_algebra(group, base);
    SparseMatrix emb(base, dim, order);
    for (std::size_t i = 0; i < order; ++i)
        emb.set_column(i, SparseVector::from_dense(elements[i]));
    AlgebraHom embedding(ring, mn, std::move(emb));
    return GeneralLinearGroup{std::move(group), std::move(elements), std::move(mn), std::move(ring),
                              std::move(embedding)};
}

std::optional<Vector> unit_inverse(const Algebra& a, const Vector& u)
{
    Matrix lm = a.left_multiplication(u);
    auto res = solve_membership(lm, a.unit());
    if (std::holds_alternative<NotInImage>(res))
        return std::nullopt;
    Vector v = std::get<Vector>(res);
    if (a.multiply(u, v) != a.unit() || a.multiply(v, u) != a.unit())
        return std::nullopt;
    return v;
}

}  // namespace dtrace
