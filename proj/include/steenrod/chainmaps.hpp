#ifndef STEENROD_CHAINMAPS_HPP
#define STEENROD_CHAINMAPS_HPP

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "resolution.hpp"

/// Cocycles, chain maps lifting them, and the squaring chain map.
namespace steenrod {

/// An F2-valued cochain on C_s: the set of generators sent to 1.  By
/// minimality every such cochain is a cocycle.
struct Cocycle {
    int s = 0;
    int t = 0;
    std::vector<int> gens;
    std::string name;
};

inline std::string generator_name(int s, int g)
{
    return std::to_string(s) + "_" + std::to_string(g);
}

inline Cocycle basis_cocycle(const Resolution& res, int s, int g)
{
    return Cocycle{s, res.gen_degree(s, g), {g}, generator_name(s, g)};
}

/// A family of module maps C_{s1+l} -> C_l.  For a cocycle lift the image of
/// a degree-t source generator lives in internal degree t - t1; for the
/// squaring map it lives in degree t/2 (zero when t is odd).  Entries are
/// optional so that a missing value is distinct from a stored zero.
struct ChainMap {
    enum class Kind { Lift, Sq0 };

    Kind kind = Kind::Lift;
    int s1 = 0;
    int t1 = 0;
    std::string name;
    std::vector<int> cocycle_gens;
    std::vector<std::vector<std::optional<ModuleElt>>> levels;  // levels[l][g]

    int source_s(int level) const { return s1 + level; }

    int target_degree(int src_t) const
    {
        if (kind == Kind::Sq0)
            return src_t % 2 ? -1 : src_t / 2;
        return src_t - t1;
    }

    const std::optional<ModuleElt>* entry(int src_s, int g) const
    {
        int level = src_s - s1;
        if (level < 0 || level >= int(levels.size()) || g >= int(levels[level].size()))
            return nullptr;
        return &levels[level][g];
    }
};

/// Build-once cache of the solve tables (full echelons of d_s per bidegree)
/// shared by all lifts against one resolution.
class EchelonCache {
public:
    explicit EchelonCache(const Resolution& res) : res_(res) {}

    std::shared_ptr<const Resolution::SolveTable> get(int s, int t)
    {
        std::shared_ptr<Entry> entry;
        {
            std::lock_guard lock(mutex_);
            auto& slot = table_[{s, t}];
            if (!slot)
                slot = std::make_shared<Entry>();
            entry = slot;
        }
        std::call_once(entry->once, [&] {
            entry->table = std::make_shared<Resolution::SolveTable>(res_.full_echelon(s, t));
        });
        return entry->table;
    }

    const Resolution& resolution() const { return res_; }

private:
    struct Entry {
        std::once_flag once;
        std::shared_ptr<const Resolution::SolveTable> table;
    };

    const Resolution& res_;
    std::mutex mutex_;
    std::map<std::pair<int, int>, std::shared_ptr<Entry>> table_;
};

namespace detail {

    inline ModuleElt solve_level(EchelonCache& cache, int level, int tau, const ModuleElt& rhs,
                                 const std::string& name)
    {
        auto table = cache.get(level, tau);
        auto u = table->ech.solve(table->tgt.to_bits(rhs));
        if (!u)
            throw std::runtime_error("lift of " + name +
                                     ": no preimage (corrupted resolution) at level " +
                                     std::to_string(level) + ", degree " + std::to_string(tau));
        return table->src.from_bits(*u);
    }

}  // namespace detail

/// Lifts a cocycle to a chain map through source degree s_top.  Level 0 sends
/// s_g* to the cocycle value times 0_0*; higher levels solve d(m(x)) =
/// m(d(x)) against the canonical echelons, so the output is deterministic.
inline ChainMap lift_cocycle(EchelonCache& cache, const Cocycle& c, int s_top)
{
    const Resolution& res = cache.resolution();
    ChainMap m;
    m.kind = ChainMap::Kind::Lift;
    m.s1 = c.s;
    m.t1 = c.t;
    m.name = c.name;
    m.cocycle_gens = c.gens;
    for (int src_s = c.s; src_s <= std::min(s_top, res.max_s()); ++src_s) {
        int level = src_s - c.s;
        m.levels.emplace_back(res.gen_count(src_s));
        for (int g = 0; g < res.gen_count(src_s); ++g) {
            int tau = res.gen_degree(src_s, g) - c.t;
            if (level == 0) {
                ModuleElt image;
                if (std::find(c.gens.begin(), c.gens.end(), g) != c.gens.end())
                    image.terms.push_back(Term{0, Milnor{}});
                m.levels[level][g] = std::move(image);
                continue;
            }
            if (tau < 0) {
                m.levels[level][g] = ModuleElt{};  // explicit zero
                continue;
            }
            ModuleElt rhs;
            for (const Term& term : res.diff(src_s, g).terms)
                rhs ^= act(term.op, *m.levels[level - 1][term.g]);
            m.levels[level][g] = detail::solve_level(cache, level, tau, rhs, m.name);
        }
    }
    return m;
}

/// The squaring chain map V with V_0(0_0*) = 0_0* and d(V(x)) equal to the
/// exponent-halved image of d(x).
inline ChainMap lift_sq0(EchelonCache& cache, int s_top)
{
    const Resolution& res = cache.resolution();
    ChainMap m;
    m.kind = ChainMap::Kind::Sq0;
    m.name = "Sq0";
    for (int s = 0; s <= std::min(s_top, res.max_s()); ++s) {
        m.levels.emplace_back(res.gen_count(s));
        for (int g = 0; g < res.gen_count(s); ++g) {
            if (s == 0) {
                m.levels[0][g] = ModuleElt{{Term{0, Milnor{}}}};
                continue;
            }
            int t = res.gen_degree(s, g);
            if (t % 2) {
                m.levels[s][g] = ModuleElt{};
                continue;
            }
            ModuleElt rhs;
            for (const Term& term : res.diff(s, g).terms) {
                auto half = v_restrict(term.op);
                if (half)
                    rhs ^= act(*half, *m.levels[s - 1][term.g]);
            }
            m.levels[s][g] = detail::solve_level(cache, s, t / 2, rhs, m.name);
        }
    }
    return m;
}

/// One line of a Map.aug file: the image of s_g* contains 1 * (g0)*.
struct AugEntry {
    int s = 0, g = 0, g0 = 0;
    friend bool operator==(const AugEntry&, const AugEntry&) = default;
    friend bool operator<(const AugEntry& a, const AugEntry& b)
    {
        return std::tie(a.s, a.g, a.g0) < std::tie(b.s, b.g, b.g0);
    }
};

/// Discards every term with a positive-degree coefficient.
inline std::vector<AugEntry> augment(const ChainMap& m)
{
    std::vector<AugEntry> out;
    for (int level = 0; level < int(m.levels.size()); ++level)
        for (int g = 0; g < int(m.levels[level].size()); ++g) {
            const auto& image = m.levels[level][g];
            if (!image)
                continue;
            for (const Term& term : image->terms)
                if (term.op.is_unit())
                    out.push_back(AugEntry{m.source_s(level), g, term.g});
        }
    std::sort(out.begin(), out.end());
    return out;
}

/// Generators mapping to filtration <= s_filter whose entries are absent
/// (a stored zero counts as present).
inline std::vector<GeneratorId> checkmap(const Resolution& res, const ChainMap& m, int s_filter)
{
    std::vector<GeneratorId> missing;
    for (int src_s = m.s1; src_s <= res.max_s(); ++src_s) {
        if (src_s - m.s1 > s_filter)
            break;
        for (int g = 0; g < res.gen_count(src_s); ++g) {
            const auto* e = m.entry(src_s, g);
            if (!e || !e->has_value())
                missing.push_back(GeneratorId{src_s, g, res.gen_degree(src_s, g)});
        }
    }
    return missing;
}

/// Expands both sides of dm = md on every stored generator; level 0 is
/// checked against the cocycle (or the squaring base case).
inline std::vector<std::string> verify_chainmap(const Resolution& res, const ChainMap& m)
{
    std::vector<std::string> bad;
    for (int level = 0; level < int(m.levels.size()); ++level) {
        int src_s = m.source_s(level);
        for (int g = 0; g < int(m.levels[level].size()); ++g) {
            const auto& image = m.levels[level][g];
            if (!image)
                continue;
            std::string where = m.name + " at " + generator_name(src_s, g);
            if (level == 0) {
                if (m.kind == ChainMap::Kind::Sq0) {
                    if (*image != ModuleElt{{Term{0, Milnor{}}}})
                        bad.push_back(where + ": squaring base case violated");
                    continue;
                }
                // augmentation of the image must reproduce the cocycle value
                bool want = std::find(m.cocycle_gens.begin(), m.cocycle_gens.end(), g) !=
                            m.cocycle_gens.end();
                bool got = false;
                for (const Term& term : image->terms)
                    if (term.op.is_unit() && term.g == 0)
                        got = !got;
                if (want != got)
                    bad.push_back(where + ": level 0 does not reproduce the cocycle");
                continue;
            }
            ModuleElt lhs;
            for (const Term& term : image->terms)
                lhs ^= act(term.op, res.diff(level, term.g));
            ModuleElt rhs;
            for (const Term& term : res.diff(src_s, g).terms) {
                const auto* prev = m.entry(src_s - 1, term.g);
                if (!prev || !prev->has_value()) {
                    bad.push_back(where + ": missing lower-level entry");
                    continue;
                }
                if (m.kind == ChainMap::Kind::Sq0) {
                    auto half = v_restrict(term.op);
                    if (half)
                        rhs ^= act(*half, **prev);
                }
                else {
                    rhs ^= act(term.op, **prev);
                }
            }
            if (lhs != rhs)
                bad.push_back(where + ": dm != md");
        }
    }
    return bad;
}

}  // namespace steenrod

#endif
