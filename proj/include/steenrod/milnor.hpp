#ifndef STEENROD_MILNOR_HPP
#define STEENROD_MILNOR_HPP

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

/// Arithmetic for the mod 2 Steenrod algebra in the Milnor basis.
///
/// A basis monomial Sq^(r_1,...,r_k) has degree sum r_i*(2^i - 1).  All
/// arithmetic here is limited to degrees <= 254, which keeps every exponent
/// below 256 and every exponent sequence within eight entries, so a monomial
/// packs into a single 64-bit word with r_i in byte i-1.  Unsigned comparison
/// of the packed words is then exactly the reverse lexicographic order used
/// by the resolution algorithm.
namespace steenrod {

inline constexpr int kMaxDegree = 254;

class Milnor {
public:
    constexpr Milnor() = default;  // the unit Sq^0

    static Milnor from_exponents(const std::vector<int>& r)
    {
        uint64_t bits = 0;
        if (r.size() > 8)
            throw std::domain_error("Milnor: more than 8 exponents");
        for (size_t i = 0; i < r.size(); ++i) {
            if (r[i] < 0 || r[i] > 255)
                throw std::domain_error("Milnor: exponent out of range");
            bits |= uint64_t(r[i]) << (8 * i);
        }
        return Milnor(bits);
    }

    /// Sq^r, the length-one sequence (r).  Sq^0 is the unit.
    static Milnor sq(int r)
    {
        if (r < 0 || r > 255)
            throw std::domain_error("Milnor: exponent out of range");
        return Milnor(uint64_t(r));
    }

    static Milnor from_packed(uint64_t bits) { return Milnor(bits); }

    uint64_t packed() const { return bits_; }
    bool is_unit() const { return bits_ == 0; }

    /// 1-based exponent r_i; zero beyond the stored length.
    int exponent(int i) const
    {
        if (i < 1 || i > 8)
            return 0;
        return int((bits_ >> (8 * (i - 1))) & 0xff);
    }

    /// Number of entries up to the last nonzero one.
    int length() const
    {
        int len = 0;
        for (int i = 1; i <= 8; ++i)
            if (exponent(i) != 0)
                len = i;
        return len;
    }

    std::vector<int> exponents() const
    {
        std::vector<int> r(length());
        for (size_t i = 0; i < r.size(); ++i)
            r[i] = exponent(int(i) + 1);
        return r;
    }

    int degree() const
    {
        int d = 0;
        for (int i = 1; i <= 8; ++i)
            d += exponent(i) * ((1 << i) - 1);
        return d;
    }

    /// The homomorphism that halves even sequences: Sq^(2r_1,...,2r_k) ->
    /// Sq^(r_1,...,r_k), other basis elements to zero.
    std::optional<Milnor> halved() const
    {
        if (bits_ & 0x0101010101010101ull)
            return std::nullopt;  // some exponent odd
        return Milnor(bits_ >> 1);
    }

    Milnor doubled() const
    {
        if (bits_ & 0x8080808080808080ull)
            throw std::domain_error("Milnor: doubled exponent overflows");
        return Milnor(bits_ << 1);
    }

    friend bool operator==(Milnor a, Milnor b) { return a.bits_ == b.bits_; }
    friend bool operator!=(Milnor a, Milnor b) { return a.bits_ != b.bits_; }
    /// Reverse lexicographic order (valid comparison within one degree).
    friend bool operator<(Milnor a, Milnor b) { return a.bits_ < b.bits_; }

private:
    explicit constexpr Milnor(uint64_t bits) : bits_(bits) {}
    uint64_t bits_ = 0;
};

/// R < R' iff r_k < r'_k at the highest index k where they differ.
inline std::strong_ordering compare_rlex(Milnor a, Milnor b)
{
    return a.packed() <=> b.packed();
}

/// Total order across degrees: by degree first, then reverse lexicographic.
inline std::strong_ordering compare_global(Milnor a, Milnor b)
{
    if (auto c = a.degree() <=> b.degree(); c != 0)
        return c;
    return compare_rlex(a, b);
}

/// A homogeneous F2 sum of Milnor basis monomials.
struct AlgebraElt {
    int degree = 0;
    std::vector<Milnor> support;  // sorted by compare_rlex, no duplicates

    bool is_zero() const { return support.empty(); }

    /// F2 addition: symmetric difference of supports.
    AlgebraElt& operator+=(const AlgebraElt& rhs)
    {
        if (rhs.is_zero())
            return *this;
        if (is_zero())
            degree = rhs.degree;
        else if (degree != rhs.degree)
            throw std::invalid_argument("AlgebraElt: degree mismatch");
        std::vector<Milnor> out;
        out.reserve(support.size() + rhs.support.size());
        std::set_symmetric_difference(support.begin(), support.end(), rhs.support.begin(),
                                      rhs.support.end(), std::back_inserter(out));
        support = std::move(out);
        return *this;
    }

    friend bool operator==(const AlgebraElt& a, const AlgebraElt& b)
    {
        if (a.is_zero() && b.is_zero())
            return true;
        return a.degree == b.degree && a.support == b.support;
    }
};

inline AlgebraElt algebra_unit()
{
    return AlgebraElt{0, {Milnor{}}};
}

inline AlgebraElt algebra_zero(int degree)
{
    return AlgebraElt{degree, {}};
}

inline AlgebraElt to_elt(Milnor m)
{
    return AlgebraElt{m.degree(), {m}};
}

namespace detail {

    /// Enumerates the Milnor matrices for Sq^R * Sq^S by backtracking over the
    /// interior entries x_{ij} (i,j >= 1) within row budgets r_i - sum 2^j x_{ij}
    /// and column budgets s_j - sum x_{ij}.  A matrix contributes iff all the
    /// antidiagonal multinomials are odd, i.e. the entries on each antidiagonal
    /// have pairwise disjoint binary representations.
    class MilnorMatrixMult {
    public:
        MilnorMatrixMult(Milnor r, Milnor s) : k_(r.length()), l_(s.length())
        {
            for (int i = 1; i <= k_; ++i)
                row_[i] = r.exponent(i);
            for (int j = 1; j <= l_; ++j)
                col_[j] = s.exponent(j);
        }

        std::vector<Milnor> run()
        {
            recurse(1, 1);
            std::sort(out_.begin(), out_.end(), [](Milnor a, Milnor b) { return a.packed() < b.packed(); });
            return out_;
        }

    private:
        void recurse(int i, int j)
        {
            if (i > k_) {
                emit();
                return;
            }
            int ni = i, nj = j + 1;
            if (nj > l_) {
                ni = i + 1;
                nj = 1;
            }
            int max_x = std::min(row_[i] >> j, col_[j]);
            for (int v = max_x; v >= 0; --v) {
                x_[i][j] = v;
                row_[i] -= v << j;
                col_[j] -= v;
                recurse(ni, nj);
                row_[i] += v << j;
                col_[j] += v;
            }
            x_[i][j] = 0;
        }

        void emit()
        {
            // Border entries are the leftover budgets.
            int t[18] = {};
            for (int n = 1; n <= k_ + l_; ++n) {
                int acc = 0;
                for (int i = std::max(0, n - l_); i <= std::min(n, k_); ++i) {
                    int v = cell(i, n - i);
                    if (acc & v)
                        return;  // even multinomial
                    acc |= v;
                    t[n] += v;
                }
            }
            std::vector<int> exps;
            for (int n = 1; n <= k_ + l_; ++n)
                exps.push_back(t[n]);
            while (!exps.empty() && exps.back() == 0)
                exps.pop_back();
            out_.push_back(Milnor::from_exponents(exps));
        }

        int cell(int i, int j) const
        {
            if (i == 0)
                return col_[j];  // x_{0j}: what's left of s_j
            if (j == 0)
                return row_[i];  // x_{i0}: what's left of r_i
            return x_[i][j];
        }

        int k_, l_;
        int row_[9] = {};
        int col_[9] = {};
        int x_[9][9] = {};
        std::vector<Milnor> out_;
    };

}  // namespace detail

/// Milnor product of two basis monomials.
inline AlgebraElt multiply(Milnor r, Milnor s)
{
    int deg = r.degree() + s.degree();
    if (deg > kMaxDegree)
        throw std::domain_error("multiply: degree out of supported range");
    if (r.is_unit())
        return to_elt(s);
    if (s.is_unit())
        return to_elt(r);
    detail::MilnorMatrixMult mm(r, s);
    std::vector<Milnor> terms = mm.run();
    // Odd multiplicities survive over F2.
    std::vector<Milnor> support;
    for (size_t i = 0; i < terms.size();) {
        size_t j = i;
        while (j < terms.size() && terms[j] == terms[i])
            ++j;
        if ((j - i) & 1)
            support.push_back(terms[i]);
        i = j;
    }
    return AlgebraElt{deg, std::move(support)};
}

/// Memoized monomial product; the same small products recur constantly while
/// building a resolution.  Node-based map keeps returned references stable.
inline const std::vector<Milnor>& multiply_cached(Milnor r, Milnor s)
{
    struct Key {
        uint64_t a, b;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        size_t operator()(const Key& k) const
        {
            uint64_t h = k.a * 0x9e3779b97f4a7c15ull;
            h ^= k.b + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
            return size_t(h);
        }
    };
    static std::shared_mutex mutex;
    static std::unordered_map<Key, std::vector<Milnor>, KeyHash> table;

    Key key{r.packed(), s.packed()};
    {
        std::shared_lock lock(mutex);
        auto it = table.find(key);
        if (it != table.end())
            return it->second;
    }
    std::vector<Milnor> value = multiply(r, s).support;
    std::unique_lock lock(mutex);
    return table.try_emplace(key, std::move(value)).first->second;
}

/// Bilinear extension of the monomial product with F2 cancellation.
inline AlgebraElt multiply_elt(const AlgebraElt& a, const AlgebraElt& b)
{
    AlgebraElt result = algebra_zero(a.degree + b.degree);
    std::vector<Milnor> acc;
    for (Milnor r : a.support)
        for (Milnor s : b.support) {
            const auto& prod = multiply_cached(r, s);
            acc.insert(acc.end(), prod.begin(), prod.end());
        }
    std::sort(acc.begin(), acc.end(), [](Milnor x, Milnor y) { return x.packed() < y.packed(); });
    for (size_t i = 0; i < acc.size();) {
        size_t j = i;
        while (j < acc.size() && acc[j] == acc[i])
            ++j;
        if ((j - i) & 1)
            result.support.push_back(acc[i]);
        i = j;
    }
    return result;
}

/// v_restrict: ZERO is represented by an empty optional.
inline std::optional<Milnor> v_restrict(Milnor r)
{
    return r.halved();
}

/// All Milnor basis monomials of one degree, in reverse lexicographic order.
struct DegreeBasis {
    int degree = 0;
    std::vector<Milnor> elements;
    std::unordered_map<uint64_t, int> index;

    int dim() const { return int(elements.size()); }

    int index_of(Milnor m) const
    {
        auto it = index.find(m.packed());
        if (it == index.end())
            throw std::invalid_argument("DegreeBasis: monomial not of this degree");
        return it->second;
    }
};

namespace detail {

    inline void enumerate_rec(int i, int remaining, std::vector<int>& exps,
                              std::vector<Milnor>& out)
    {
        if (remaining == 0) {
            out.push_back(Milnor::from_exponents(exps));
            return;
        }
        int w = (1 << i) - 1;
        if (i > 8 || w > remaining)
            return;
        // exponent r_i from 0 to remaining / w
        for (int v = 0; v * w <= remaining; ++v) {
            exps.push_back(v);
            enumerate_rec(i + 1, remaining - v * w, exps, out);
            exps.pop_back();
        }
    }

    inline DegreeBasis build_degree_basis(int t)
    {
        DegreeBasis basis;
        basis.degree = t;
        std::vector<int> exps;
        enumerate_rec(1, t, exps, basis.elements);
        std::sort(basis.elements.begin(), basis.elements.end(),
                  [](Milnor a, Milnor b) { return a.packed() < b.packed(); });
        for (int i = 0; i < int(basis.elements.size()); ++i)
            basis.index.emplace(basis.elements[i].packed(), i);
        return basis;
    }

}  // namespace detail

/// Cached basis tables, built once per degree; idempotent and shareable.
inline const DegreeBasis& degree_basis(int t)
{
    if (t < 0 || t > kMaxDegree)
        throw std::domain_error("degree_basis: degree out of supported range");
    static std::shared_mutex mutex;
    static std::array<std::unique_ptr<DegreeBasis>, kMaxDegree + 1> cache;
    {
        std::shared_lock lock(mutex);
        if (cache[t])
            return *cache[t];
    }
    auto built = std::make_unique<DegreeBasis>(detail::build_degree_basis(t));
    std::unique_lock lock(mutex);
    if (!cache[t])
        cache[t] = std::move(built);
    return *cache[t];
}

inline const DegreeBasis& enumerate_basis(int t)
{
    return degree_basis(t);
}

inline int algebra_dim(int t)
{
    return degree_basis(t).dim();
}

/* Textual coefficient notations.  "i(...)" lists Milnor monomials, "x.."
 * is a hex bitstring over the degree basis order (first coordinate = high
 * bit of the first hex byte), "s.." lists the indices of the set bits.
 * The "i" and "s" forms are terminated by a period, the hex form has a
 * fixed length of two digits per byte. */

inline std::string print_coeff_milnor(const AlgebraElt& a)
{
    std::string out = "i";
    for (Milnor m : a.support) {
        out += '(';
        if (m.is_unit()) {
            out += '0';
        }
        else {
            auto exps = m.exponents();
            for (size_t i = 0; i < exps.size(); ++i) {
                if (i)
                    out += ',';
                out += std::to_string(exps[i]);
            }
        }
        out += ')';
    }
    out += '.';
    return out;
}

inline std::string print_coeff_hex(const AlgebraElt& a)
{
    const DegreeBasis& basis = degree_basis(a.degree);
    int nbytes = (basis.dim() + 7) / 8;
    if (nbytes == 0)
        nbytes = 1;
    std::vector<uint8_t> bytes(nbytes, 0);
    for (Milnor m : a.support) {
        int idx = basis.index_of(m);
        bytes[idx >> 3] |= uint8_t(0x80u >> (idx & 7));
    }
    static const char* digits = "0123456789ABCDEF";
    std::string out = "x";
    for (uint8_t b : bytes) {
        out += digits[b >> 4];
        out += digits[b & 0xf];
    }
    return out;
}

inline std::string print_coeff_indices(const AlgebraElt& a)
{
    const DegreeBasis& basis = degree_basis(a.degree);
    std::string out = "s";
    bool first = true;
    for (Milnor m : a.support) {
        if (!first)
            out += ' ';
        out += std::to_string(basis.index_of(m));
        first = false;
    }
    out += '.';
    return out;
}

namespace detail {

    inline AlgebraElt parse_coeff_milnor(std::string_view text, int degree)
    {
        AlgebraElt result = algebra_zero(degree);
        size_t pos = 1;  // past 'i'
        while (pos < text.size() && text[pos] == '(') {
            size_t close = text.find(')', pos);
            if (close == std::string_view::npos)
                throw std::invalid_argument("parse_coeff: unterminated monomial");
            std::vector<int> exps;
            size_t p = pos + 1;
            while (p < close) {
                size_t comma = text.find(',', p);
                if (comma == std::string_view::npos || comma > close)
                    comma = close;
                exps.push_back(std::stoi(std::string(text.substr(p, comma - p))));
                p = comma + 1;
            }
            while (!exps.empty() && exps.back() == 0)
                exps.pop_back();
            Milnor m = Milnor::from_exponents(exps);
            if (m.degree() != degree)
                throw std::invalid_argument("parse_coeff: monomial degree mismatch");
            result += to_elt(m);
            pos = close + 1;
        }
        if (pos >= text.size() || text[pos] != '.')
            throw std::invalid_argument("parse_coeff: missing terminator");
        return result;
    }

    inline int hex_digit(char c)
    {
        if (c >= '0' && c <= '9')
            return c - '0';
        if (c >= 'a' && c <= 'f')
            return c - 'a' + 10;
        if (c >= 'A' && c <= 'F')
            return c - 'A' + 10;
        throw std::invalid_argument("parse_coeff: bad hex digit");
    }

    inline AlgebraElt parse_coeff_hex(std::string_view text, int degree)
    {
        const DegreeBasis& basis = degree_basis(degree);
        AlgebraElt result = algebra_zero(degree);
        size_t ndigits = text.size() - 1;
        if (ndigits % 2 != 0)
            throw std::invalid_argument("parse_coeff: odd hex length");
        for (int idx = 0; idx < basis.dim(); ++idx) {
            size_t digit = size_t(idx >> 2) + 1;
            if (digit >= text.size())
                break;
            int v = hex_digit(text[digit]);
            if (v & (8 >> (idx & 3)))
                result += to_elt(basis.elements[idx]);
        }
        return result;
    }

    inline AlgebraElt parse_coeff_indices(std::string_view text, int degree)
    {
        const DegreeBasis& basis = degree_basis(degree);
        AlgebraElt result = algebra_zero(degree);
        size_t pos = 1;
        while (pos < text.size() && text[pos] != '.') {
            while (pos < text.size() && text[pos] == ' ')
                ++pos;
            if (pos >= text.size() || text[pos] == '.')
                break;
            size_t end = pos;
            while (end < text.size() && text[end] != ' ' && text[end] != '.')
                ++end;
            int idx = std::stoi(std::string(text.substr(pos, end - pos)));
            if (idx < 0 || idx >= basis.dim())
                throw std::invalid_argument("parse_coeff: index out of range");
            result += to_elt(basis.elements[idx]);
            pos = end;
        }
        return result;
    }

}  // namespace detail

/// Parses any of the three coefficient notations into an element of the
/// stated degree.
inline AlgebraElt parse_coeff(std::string_view text, int degree)
{
    if (text.empty())
        throw std::invalid_argument("parse_coeff: empty");
    switch (text[0]) {
        case 'i':
            return detail::parse_coeff_milnor(text, degree);
        case 'x':
            return detail::parse_coeff_hex(text, degree);
        case 's':
            return detail::parse_coeff_indices(text, degree);
        default:
            throw std::invalid_argument("parse_coeff: unknown notation");
    }
}

}  // namespace steenrod

#endif
