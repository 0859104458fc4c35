#ifndef STEENROD_RESOLUTION_HPP
#define STEENROD_RESOLUTION_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "f2linalg.hpp"
#include "milnor.hpp"

/// The minimal-resolution engine: free modules C_s over the Steenrod algebra,
/// their differentials, and the canonical-basis algorithm that produces them
/// bidegree by bidegree.
namespace steenrod {

struct GeneratorId {
    int s = 0;
    int g = 0;
    int t = 0;
    friend bool operator==(const GeneratorId&, const GeneratorId&) = default;
};

/// One term Sq^R · s_g* of a free module element.
struct Term {
    int g = 0;
    Milnor op;

    friend bool operator==(const Term& a, const Term& b) { return a.g == b.g && a.op == b.op; }
    /// g-major, then reverse lexicographic on the coefficient.
    friend bool operator<(const Term& a, const Term& b)
    {
        if (a.g != b.g)
            return a.g < b.g;
        return a.op.packed() < b.op.packed();
    }
};

/// An F2 sum of terms Sq^R · s_g*, kept sorted in the term order.
struct ModuleElt {
    std::vector<Term> terms;

    bool is_zero() const { return terms.empty(); }

    const Term& leading_term() const
    {
        if (terms.empty())
            throw std::invalid_argument("leading_term: zero element");
        return terms.front();
    }

    ModuleElt& operator^=(const ModuleElt& rhs)
    {
        std::vector<Term> out;
        out.reserve(terms.size() + rhs.terms.size());
        std::set_symmetric_difference(terms.begin(), terms.end(), rhs.terms.begin(),
                                      rhs.terms.end(), std::back_inserter(out));
        terms = std::move(out);
        return *this;
    }

    friend bool operator==(const ModuleElt&, const ModuleElt&) = default;
};

inline ModuleElt make_elt(std::vector<Term> terms)
{
    std::sort(terms.begin(), terms.end());
    ModuleElt e;
    for (const Term& t : terms) {
        if (!e.terms.empty() && e.terms.back() == t)
            e.terms.pop_back();  // F2 cancellation
        else
            e.terms.push_back(t);
    }
    return e;
}

inline ModuleElt leading_term_elt(const ModuleElt& x)
{
    return ModuleElt{{x.leading_term()}};
}

/// Left action of a Milnor monomial: Sq^R · (sum Sq^{R_i} s_{g_i}*).
inline ModuleElt act(Milnor r, const ModuleElt& x)
{
    std::vector<Term> acc;
    for (const Term& term : x.terms) {
        const auto& prod = multiply_cached(r, term.op);
        for (Milnor m : prod)
            acc.push_back(Term{term.g, m});
    }
    return make_elt(std::move(acc));
}

inline ModuleElt act(const AlgebraElt& a, const ModuleElt& x)
{
    ModuleElt out;
    for (Milnor m : a.support)
        out ^= act(m, x);
    return out;
}

/// Coordinates for one bidegree C_{s,t}: for each generator g with t(g) <= t,
/// a block indexed by the degree basis of A in degree t - t(g), blocks in
/// generator order.  Decomposable terms form the initial segment; the unit
/// coordinates of generators of degree exactly t come last.
class BidegreeBasis {
public:
    BidegreeBasis() = default;
    BidegreeBasis(int s, int t, const std::vector<int>& degrees) : s_(s), t_(t)
    {
        for (int g = 0; g < int(degrees.size()); ++g) {
            if (degrees[g] > t)
                break;  // degrees ascend
            gen_degree_.push_back(degrees[g]);
            offsets_.push_back(total_);
            total_ += algebra_dim(t - degrees[g]);
            if (degrees[g] < t)
                decomp_count_ = total_;
        }
    }

    int s() const { return s_; }
    int t() const { return t_; }
    int total() const { return total_; }
    int decomposable_count() const { return decomp_count_; }
    int gen_count() const { return int(gen_degree_.size()); }

    /// Extends the basis by the unit coordinate of a new degree-t generator.
    int append_generator()
    {
        gen_degree_.push_back(t_);
        offsets_.push_back(total_);
        return total_++;
    }

    int index_of(int g, Milnor r) const
    {
        return offsets_[g] + degree_basis(t_ - gen_degree_[g]).index_of(r);
    }

    Term term_at(int idx) const
    {
        size_t g = size_t(std::upper_bound(offsets_.begin(), offsets_.end(), idx) -
                          offsets_.begin()) -
                   1;
        return Term{int(g), degree_basis(t_ - gen_degree_[g]).elements[idx - offsets_[g]]};
    }

    BitVector to_bits(const ModuleElt& x) const
    {
        BitVector v(size_t(total_));
        for (const Term& term : x.terms)
            v.flip(size_t(index_of(term.g, term.op)));
        return v;
    }

    ModuleElt from_bits(const BitVector& v) const
    {
        std::vector<Term> terms;
        for (size_t i : v.set_bits())
            terms.push_back(term_at(int(i)));
        return make_elt(std::move(terms));
    }

private:
    int s_ = 0, t_ = 0;
    int total_ = 0;
    int decomp_count_ = 0;
    std::vector<int> gen_degree_;
    std::vector<int> offsets_;
};

/// One line of the himults report: h_i · (s0)_{g0} contains s_g.
struct HimultEntry {
    int s = 0, g = 0, s0 = 0, g0 = 0, i = 0;
    friend bool operator==(const HimultEntry&, const HimultEntry&) = default;
    friend bool operator<(const HimultEntry& a, const HimultEntry& b)
    {
        return std::tie(a.s, a.g, a.s0, a.g0, a.i) < std::tie(b.s, b.g, b.s0, b.g0, b.i);
    }
};

class Resolution {
public:
    Resolution() : gens_(1), maxt_(1, 0) { gens_[0].push_back(Gen{0, ModuleElt{}}); }

    /// Rebuilds a state from parsed data (degrees/differentials per s, plus
    /// the completion degree of each row).
    static Resolution from_raw(std::vector<std::vector<std::pair<int, ModuleElt>>> rows,
                               std::vector<int> maxt)
    {
        if (rows.empty() || maxt.size() != rows.size())
            throw std::invalid_argument("Resolution: inconsistent raw data");
        Resolution res;
        res.gens_.assign(rows.size(), {});
        res.maxt_ = std::move(maxt);
        for (size_t s = 0; s < rows.size(); ++s) {
            int prev = 0;
            for (auto& [t, diff] : rows[s]) {
                if (t < prev)
                    throw std::invalid_argument("Resolution: generator degrees not ascending");
                prev = t;
                res.gens_[s].push_back(Gen{t, std::move(diff)});
            }
        }
        if (res.gens_[0].size() != 1 || res.gens_[0][0].t != 0)
            throw std::invalid_argument("Resolution: C_0 must have one generator in degree 0");
        return res;
    }

    int max_s() const { return int(gens_.size()) - 1; }
    int maxt(int s) const { return s < int(maxt_.size()) ? maxt_[s] : -1; }
    int gen_count(int s) const { return s <= max_s() ? int(gens_[s].size()) : 0; }
    int gen_degree(int s, int g) const { return gens_[s][g].t; }
    const ModuleElt& diff(int s, int g) const { return gens_[s][g].diff; }

    std::vector<int> degrees(int s) const
    {
        std::vector<int> out;
        for (const Gen& gen : gens_[s])
            out.push_back(gen.t);
        return out;
    }

    std::vector<GeneratorId> generators_at(int s, int t) const
    {
        std::vector<GeneratorId> out;
        if (s <= max_s())
            for (int g = 0; g < gen_count(s); ++g)
                if (gens_[s][g].t == t)
                    out.push_back(GeneratorId{s, g, t});
        return out;
    }

    int ext_dim(int s, int t) const { return int(generators_at(s, t).size()); }

    BidegreeBasis basis(int s, int t) const
    {
        return BidegreeBasis(s, t, degrees(s));
    }

    /// Step 1 at (s,t): runs the decomposable terms of C_{s,t} in order
    /// through leading-term reduction, returning the image pairs and the
    /// kernel elements in encounter order.
    std::pair<WitnessedEchelon, KernelList> step1_image_kernel(int s, int t) const
    {
        BidegreeBasis src = basis(s, t);
        WitnessedEchelon im;
        KernelList ker;
        if (s == 0) {
            // d_0 is the augmentation; every decomposable maps to zero.
            for (int idx = 0; idx < src.decomposable_count(); ++idx)
                ker.push_back(unit_vector(size_t(src.total()), size_t(idx)));
            return {std::move(im), std::move(ker)};
        }
        BidegreeBasis tgt = basis(s - 1, t);
        for (int idx = 0; idx < src.decomposable_count(); ++idx) {
            Term term = src.term_at(idx);
            BitVector dx = tgt.to_bits(act(term.op, gens_[s][term.g].diff));
            auto red = im.reduce(std::move(dx));
            BitVector x = unit_vector(size_t(src.total()), size_t(idx));
            for (size_t u : red.used)
                x ^= im.pairs()[u].witness;
            if (red.residue.is_zero())
                ker.push_back(std::move(x));
            else
                im.insert(std::move(x), std::move(red.residue));
        }
        return {std::move(im), std::move(ker)};
    }

    /// Extends the resolution so that every bidegree with s <= s_max and
    /// t <= t_max is complete.  Deterministic; re-running over a computed
    /// range is a no-op.
    void extend(int s_max, int t_max)
    {
        if (s_max < 0 || t_max < 0 || t_max > kMaxDegree)
            throw std::domain_error("extend: range out of bounds");
        if (s_max >= int(gens_.size())) {
            gens_.resize(s_max + 1);
            maxt_.resize(s_max + 1, -1);
        }
        for (int t = 1; t <= t_max; ++t) {
            KernelList prev_ker;
            for (int s = 0; s <= s_max; ++s) {
                bool want_step2 = maxt_[s] < t;
                bool want_ker = s < s_max && maxt_[s + 1] < t;
                if (!want_step2 && !want_ker)
                    continue;
                auto [im, ker] = step1_image_kernel(s, t);
                if (want_step2 && s >= 1)
                    run_step2(s, t, im, prev_ker);
                if (want_step2)
                    maxt_[s] = t;
                prev_ker = std::move(ker);
            }
        }
        for (int s = 0; s <= s_max; ++s)
            maxt_[s] = std::max(maxt_[s], t_max);
    }

    /// Kernel elements surviving reduction become new generators; each new
    /// differential is the original kernel element.
    std::vector<GeneratorId> step2_new_generators(int s, int t, WitnessedEchelon& im,
                                                  const KernelList& ker)
    {
        std::vector<GeneratorId> added;
        BidegreeBasis src = basis(s, t);
        BidegreeBasis tgt = basis(s - 1, t);
        for (const BitVector& c : ker) {
            auto red = im.reduce(c);
            if (red.residue.is_zero())
                continue;
            if (!generators_at(s, t).empty() && maxt_[s] >= t)
                throw std::runtime_error("step2: bidegree already complete");
            gens_[s].push_back(Gen{t, tgt.from_bits(c)});
            int coord = src.append_generator();
            BitVector z = unit_vector(size_t(src.total()), size_t(coord));
            for (size_t u : red.used)
                z ^= im.pairs()[u].witness;
            im.insert(std::move(z), std::move(red.residue));
            added.push_back(GeneratorId{s, int(gens_[s].size()) - 1, t});
        }
        return added;
    }

    /// Rank of d_s on all of C_{s,t}, together with the coordinate tables and
    /// the echelon itself (used for preimage solving by the chain-map lift).
    struct SolveTable {
        BidegreeBasis src;
        BidegreeBasis tgt;
        WitnessedEchelon ech;
    };

    SolveTable full_echelon(int s, int t) const
    {
        if (s < 1)
            throw std::invalid_argument("full_echelon: s must be >= 1");
        SolveTable table{basis(s, t), basis(s - 1, t), {}};
        for (int idx = 0; idx < table.src.total(); ++idx) {
            Term term = table.src.term_at(idx);
            BitVector dx = table.tgt.to_bits(act(term.op, gens_[s][term.g].diff));
            auto red = table.ech.reduce(std::move(dx));
            if (red.residue.is_zero())
                continue;
            BitVector x = unit_vector(size_t(table.src.total()), size_t(idx));
            for (size_t u : red.used)
                x ^= table.ech.pairs()[u].witness;
            table.ech.insert(std::move(x), std::move(red.residue));
        }
        return table;
    }

    /// Every occurrence of a Sq^{2^i} coefficient in a differential, sorted.
    std::vector<HimultEntry> himults() const
    {
        std::vector<HimultEntry> out;
        for (int s = 1; s <= max_s(); ++s)
            for (int g = 0; g < gen_count(s); ++g)
                for (const Term& term : gens_[s][g].diff.terms) {
                    int v = term.op.exponent(1);
                    if (term.op.length() == 1 && v > 0 && (v & (v - 1)) == 0) {
                        int i = std::countr_zero(unsigned(v));
                        out.push_back(HimultEntry{s, g, s - 1, term.g, i});
                    }
                }
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Expands d(d(s_g*)) for every generator; returns violations.
    std::vector<std::string> check_d2() const
    {
        std::vector<std::string> bad;
        for (int s = 2; s <= max_s(); ++s)
            for (int g = 0; g < gen_count(s); ++g) {
                ModuleElt total;
                for (const Term& term : gens_[s][g].diff.terms)
                    total ^= act(term.op, gens_[s - 1][term.g].diff);
                if (!total.is_zero())
                    bad.push_back("d^2 != 0 at generator " + std::to_string(s) + "_" +
                                  std::to_string(g));
            }
        return bad;
    }

    /// Independent exactness check: rank d_s + rank d_{s-1} = dim C_{s-1,t}
    /// for every bidegree in the given range.
    std::vector<std::string> check_exactness(int s_max, int t_max) const
    {
        std::vector<std::string> bad;
        s_max = std::min(s_max, max_s());
        for (int t = 0; t <= t_max; ++t) {
            int prev_rank = t == 0 ? 1 : 0;  // rank of the augmentation
            for (int s = 1; s <= s_max; ++s) {
                if (maxt(s) < t || maxt(s - 1) < t)
                    break;
                SolveTable table = full_echelon(s, t);
                int dim_prev = table.tgt.total();
                if (table.ech.rank() + prev_rank != dim_prev)
                    bad.push_back("exactness fails at (s,t)=(" + std::to_string(s) + "," +
                                  std::to_string(t) + "): rank " +
                                  std::to_string(table.ech.rank()) + " + " +
                                  std::to_string(prev_rank) +
                                  " != " + std::to_string(dim_prev));
                prev_rank = table.ech.rank();
            }
        }
        return bad;
    }

    /// Minimality: no differential value may contain a unit coefficient.
    std::vector<std::string> check_minimality() const
    {
        std::vector<std::string> bad;
        for (int s = 1; s <= max_s(); ++s)
            for (int g = 0; g < gen_count(s); ++g)
                for (const Term& term : gens_[s][g].diff.terms)
                    if (term.op.is_unit())
                        bad.push_back("unit coefficient in d(" + std::to_string(s) + "_" +
                                      std::to_string(g) + "*)");
        return bad;
    }

private:
    struct Gen {
        int t;
        ModuleElt diff;  // value in C_{s-1}; empty for the augmentation row
    };

    void run_step2(int s, int t, WitnessedEchelon& im, const KernelList& ker)
    {
        if (!generators_at(s, t).empty())
            throw std::runtime_error(
                "extend: generators already present in an incomplete bidegree "
                "(corrupted dataset)");
        step2_new_generators(s, t, im, ker);
    }

    std::vector<std::vector<Gen>> gens_;
    std::vector<int> maxt_;
};

}  // namespace steenrod

#endif
