#ifndef STEENROD_F2LINALG_HPP
#define STEENROD_F2LINALG_HPP

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

/// Bit-packed F2 vectors and echelon systems with solution witnesses.
///
/// The pivot convention is the LOWEST set bit: coordinate 0 is the smallest
/// term of the module term order, and the leading term of a vector is its
/// lowest term.  Reduction eliminates leading terms only, so stored images
/// are not fully reduced; that is all that rank and preimage queries need.
namespace steenrod {

class BitVector {
public:
    BitVector() = default;
    explicit BitVector(size_t n) : size_(n), words_((n + 63) / 64, 0) {}

    size_t size() const { return size_; }

    void resize(size_t n)
    {
        size_ = std::max(size_, n);
        words_.resize((size_ + 63) / 64, 0);
    }

    bool test(size_t i) const
    {
        if (i >= size_)
            return false;
        return (words_[i >> 6] >> (i & 63)) & 1;
    }

    void set(size_t i)
    {
        resize(i + 1);
        words_[i >> 6] |= uint64_t(1) << (i & 63);
    }

    void flip(size_t i)
    {
        resize(i + 1);
        words_[i >> 6] ^= uint64_t(1) << (i & 63);
    }

    bool is_zero() const
    {
        for (uint64_t w : words_)
            if (w)
                return false;
        return true;
    }

    /// Index of the lowest set bit, -1 when zero.
    int lowest_bit() const
    {
        for (size_t k = 0; k < words_.size(); ++k)
            if (words_[k])
                return int(64 * k + std::countr_zero(words_[k]));
        return -1;
    }

    int popcount() const
    {
        int n = 0;
        for (uint64_t w : words_)
            n += std::popcount(w);
        return n;
    }

    std::vector<size_t> set_bits() const
    {
        std::vector<size_t> out;
        for (size_t k = 0; k < words_.size(); ++k) {
            uint64_t w = words_[k];
            while (w) {
                out.push_back(64 * k + std::countr_zero(w));
                w &= w - 1;
            }
        }
        return out;
    }

    /// XOR; the shorter operand is zero-extended.
    BitVector& operator^=(const BitVector& rhs)
    {
        resize(rhs.size_);
        for (size_t k = 0; k < rhs.words_.size(); ++k)
            words_[k] ^= rhs.words_[k];
        return *this;
    }

    friend bool operator==(const BitVector& a, const BitVector& b)
    {
        size_t n = std::max(a.words_.size(), b.words_.size());
        for (size_t k = 0; k < n; ++k) {
            uint64_t wa = k < a.words_.size() ? a.words_[k] : 0;
            uint64_t wb = k < b.words_.size() ? b.words_[k] : 0;
            if (wa != wb)
                return false;
        }
        return true;
    }

private:
    size_t size_ = 0;
    std::vector<uint64_t> words_;
};

inline BitVector unit_vector(size_t n, size_t i)
{
    BitVector v(n);
    v.set(i);
    return v;
}

/// An ordered list of pairs (witness, image) with the images' leading
/// positions strictly increasing.  Each image is the linear map of record
/// applied to its witness; solve() recovers preimages from the witnesses.
class WitnessedEchelon {
public:
    struct Pair {
        BitVector witness;
        BitVector image;
        int lead = -1;
    };

    struct Reduction {
        BitVector residue;
        std::vector<size_t> used;  // indices of the pairs subtracted
    };

    const std::vector<Pair>& pairs() const { return pairs_; }
    int rank() const { return int(pairs_.size()); }

    /// Eliminates the leading term of v against stored images until it is
    /// fresh or the residue vanishes.  residue = v + sum of used images.
    Reduction reduce(BitVector v) const
    {
        Reduction red{std::move(v), {}};
        while (true) {
            int lead = red.residue.lowest_bit();
            if (lead < 0)
                break;
            size_t pos = find(lead);
            if (pos == pairs_.size() || pairs_[pos].lead != lead)
                break;
            red.residue ^= pairs_[pos].image;
            red.used.push_back(pos);
        }
        return red;
    }

    /// Inserts a fully reduced pair; the image's leading position must be
    /// fresh and nonzero.
    void insert(BitVector witness, BitVector image)
    {
        int lead = image.lowest_bit();
        if (lead < 0)
            throw std::invalid_argument("WitnessedEchelon: zero image");
        size_t pos = find(lead);
        if (pos < pairs_.size() && pairs_[pos].lead == lead)
            throw std::invalid_argument("WitnessedEchelon: duplicate leading position");
        pairs_.insert(pairs_.begin() + pos, Pair{std::move(witness), std::move(image), lead});
    }

    /// Solves map(u) = target.  Returns the witness combination u when the
    /// target lies in the span, otherwise nothing.
    std::optional<BitVector> solve(const BitVector& target) const
    {
        Reduction red = reduce(target);
        if (!red.residue.is_zero())
            return std::nullopt;
        BitVector u;
        for (size_t i : red.used)
            u ^= pairs_[i].witness;
        return u;
    }

private:
    // first index with lead >= wanted
    size_t find(int lead) const
    {
        size_t lo = 0, hi = pairs_.size();
        while (lo < hi) {
            size_t mid = (lo + hi) / 2;
            if (pairs_[mid].lead < lead)
                lo = mid + 1;
            else
                hi = mid;
        }
        return lo;
    }

    std::vector<Pair> pairs_;
};

using KernelList = std::vector<BitVector>;

}  // namespace steenrod

#endif
