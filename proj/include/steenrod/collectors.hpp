#ifndef STEENROD_COLLECTORS_HPP
#define STEENROD_COLLECTORS_HPP

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "chainmaps.hpp"
#include "resolution.hpp"

/// Products, Toda brackets, indecomposables and operator reports, derived
/// from augmented maps and chain-map coefficient scans.
namespace steenrod {

/// One all.products line: the lift of (s1)_{g1} applied to s_g* contains
/// 1 * (s0)_{g0}*, i.e. (s0)_{g0} * (s1)_{g1} contains s_g.
struct ProductEntry {
    int s = 0, g = 0, s0 = 0, g0 = 0;
    int s1 = 0, g1 = 0;
    std::string map;

    friend bool operator==(const ProductEntry&, const ProductEntry&) = default;
    friend bool operator<(const ProductEntry& a, const ProductEntry& b)
    {
        return std::tie(a.s, a.g, a.s0, a.g0, a.g1) < std::tie(b.s, b.g, b.s0, b.g0, b.g1);
    }
};

/// One brackets line: s_g lies in < h_i, (s-s1)_{g0}, (s1)_{g1} >.
struct BracketEntry {
    int s = 0, g = 0, i = 0, g0 = 0;
    int s1 = 0, g1 = 0;
    std::string map;

    friend bool operator==(const BracketEntry&, const BracketEntry&) = default;
    friend bool operator<(const BracketEntry& a, const BracketEntry& b)
    {
        return std::tie(a.s, a.g, a.i, a.g0, a.g1) < std::tie(b.s, b.g, b.i, b.g0, b.g1);
    }
};

struct MapAug {
    std::string name;
    int s1 = 0;
    int g1 = 0;
    std::vector<AugEntry> entries;
};

/// Merges augmented maps into the all.products table: paragraphs by (s,g),
/// entries within a paragraph by (s0,g0) ascending.
inline std::vector<ProductEntry> collect_products(const std::vector<MapAug>& maps)
{
    std::vector<ProductEntry> out;
    for (const MapAug& m : maps)
        for (const AugEntry& e : m.entries)
            out.push_back(ProductEntry{e.s, e.g, e.s - m.s1, e.g0, m.s1, m.g1, m.name});
    std::sort(out.begin(), out.end());
    return out;
}

using ExtClass = std::pair<int, int>;        // (s, g)
using ExtSum = std::set<ExtClass>;           // an F2 sum of basis classes

inline void toggle(ExtSum& sum, ExtClass c)
{
    auto it = sum.find(c);
    if (it == sum.end())
        sum.insert(c);
    else
        sum.erase(it);
}

/// Product lookups over a collected entry table.  A factor can sit on either
/// side of an entry; the table knows which maps were lifted.
class ProductTable {
public:
    ProductTable() = default;
    explicit ProductTable(std::vector<ProductEntry> entries) : entries_(std::move(entries))
    {
        for (const ProductEntry& e : entries_) {
            maps_.insert({e.s1, e.g1});
            index_[{{e.s0, e.g0}, {e.s1, e.g1}}].push_back({e.s, e.g});
        }
    }

    const std::vector<ProductEntry>& entries() const { return entries_; }
    bool has_map(ExtClass c) const { return maps_.count(c) != 0; }

    /// (s0)_{g0} * (s1)_{g1} as an F2 sum of basis classes.
    ExtSum product(ExtClass p0, ExtClass p1) const
    {
        if (has_map(p1))
            return lookup(p0, p1);
        if (has_map(p0))
            return lookup(p1, p0);
        throw std::invalid_argument("compute_product: no chain map for either factor");
    }

private:
    ExtSum lookup(ExtClass left, ExtClass map) const
    {
        ExtSum sum;
        auto it = index_.find({left, map});
        if (it != index_.end())
            for (ExtClass c : it->second)
                toggle(sum, c);
        return sum;
    }

    std::vector<ProductEntry> entries_;
    std::set<ExtClass> maps_;
    std::map<std::pair<ExtClass, ExtClass>, std::vector<ExtClass>> index_;
};

inline ExtSum compute_product(ExtClass p0, ExtClass p1, const ProductTable& table)
{
    return table.product(p0, p1);
}

/// Scans a chain map for coefficients containing a Sq^{2^i} monomial.  No
/// definedness judgment is made here.
inline std::vector<BracketEntry> extract_brackets(const ChainMap& m, int g1)
{
    std::vector<BracketEntry> out;
    for (int level = 0; level < int(m.levels.size()); ++level)
        for (int g = 0; g < int(m.levels[level].size()); ++g) {
            const auto& image = m.levels[level][g];
            if (!image)
                continue;
            for (const Term& term : image->terms) {
                int v = term.op.exponent(1);
                if (term.op.length() == 1 && v > 0 && (v & (v - 1)) == 0) {
                    int i = std::countr_zero(unsigned(v));
                    out.push_back(
                        BracketEntry{m.source_s(level), g, i, term.g, m.s1, g1, m.name});
                }
            }
        }
    std::sort(out.begin(), out.end());
    return out;
}

/// Result of evaluating < h_i, p0, p1 >.
struct BracketValue {
    bool defined = false;
    std::string obstruction;              // which product is nonzero, when undefined
    ExtSum witness;                       // that product's value
    ExtSum value;                         // sum of matching bracket entries
    std::vector<ExtSum> indeterminacy;    // nonzero h_i*Ext and Ext*p1 products
};

/// Evaluates a Toda bracket from collected products and bracket entries.
/// The bracket is undefined when h_i * p0 or p0 * p1 is nonzero; otherwise
/// the value is the sum of the matching entries, and the indeterminacy lists
/// every nonzero product landing in the bracket bidegree.
inline BracketValue bracket_value(int i, ExtClass p0, ExtClass p1, const ProductTable& table,
                                  const std::vector<BracketEntry>& brackets,
                                  const Resolution& res)
{
    BracketValue result;
    ExtSum hi_p0 = table.product({1, i}, p0);
    if (!hi_p0.empty()) {
        result.obstruction = "h" + std::to_string(i) + " * " +
                             generator_name(p0.first, p0.second) + " != 0";
        result.witness = hi_p0;
        return result;
    }
    ExtSum p0_p1 = table.product(p0, p1);
    if (!p0_p1.empty()) {
        result.obstruction = generator_name(p0.first, p0.second) + " * " +
                             generator_name(p1.first, p1.second) + " != 0";
        result.witness = p0_p1;
        return result;
    }
    result.defined = true;
    for (const BracketEntry& e : brackets)
        if (e.i == i && e.g0 == p0.second && e.s1 == p1.first && e.g1 == p1.second &&
            e.s - e.s1 == p0.first)
            toggle(result.value, {e.s, e.g});

    int bs = p0.first + p1.first;
    int bt = (1 << i) + res.gen_degree(p0.first, p0.second) +
             res.gen_degree(p1.first, p1.second);
    // h_i * Ext in the bracket bidegree
    for (const GeneratorId& y : res.generators_at(bs - 1, bt - (1 << i))) {
        ExtSum prod = table.product({1, i}, {y.s, y.g});
        if (!prod.empty())
            result.indeterminacy.push_back(std::move(prod));
    }
    // Ext * p1 in the bracket bidegree
    int zt = bt - res.gen_degree(p1.first, p1.second);
    for (const GeneratorId& z : res.generators_at(bs - p1.first, zt)) {
        ExtSum prod = table.product({z.s, z.g}, p1);
        if (!prod.empty())
            result.indeterminacy.push_back(std::move(prod));
    }
    return result;
}

enum class OperatorKind { P, P2, P4, MM };

struct OperatorSpec {
    OperatorKind kind;
    const char* id;       // file stem
    const char* title;
    int i;                // Hopf index of the first bracket entry
    int mid_s, mid_g;     // the fixed middle element
    int outer_g;          // the outer element h_{outer_g}
};

inline OperatorSpec operator_spec(OperatorKind kind)
{
    switch (kind) {
        case OperatorKind::P:
            return {kind, "P", "P(x) = < h3, h0^4, x >", 3, 4, 0, 3};
        case OperatorKind::P2:
            return {kind, "P2", "P2(x) = < h4, h0^8, x >", 4, 8, 0, 4};
        case OperatorKind::P4:
            return {kind, "P4", "P4(x) = < h5, h0^16, x >", 5, 16, 0, 5};
        case OperatorKind::MM:
        default:
            return {kind, "MM", "M'(x) = < h0, h0^2 g2, x >", 0, 6, 21, 0};
    }
}

struct OperatorReport {
    OperatorSpec spec;
    std::vector<BracketEntry> values;          // (a)
    std::vector<ProductEntry> obstructions;    // (b) products by the middle
    std::vector<ProductEntry> indeterminacy;   // (c) products by the outer
};

inline OperatorReport operator_report(OperatorKind kind, const ProductTable& products,
                                      const std::vector<BracketEntry>& brackets)
{
    OperatorReport report{operator_spec(kind), {}, {}, {}};
    const OperatorSpec& spec = report.spec;
    for (const BracketEntry& e : brackets)
        if (e.i == spec.i && e.g0 == spec.mid_g && e.s - e.s1 == spec.mid_s)
            report.values.push_back(e);
    for (const ProductEntry& e : products.entries()) {
        if (e.s0 == spec.mid_s && e.g0 == spec.mid_g)
            report.obstructions.push_back(e);
        if (e.s0 == 1 && e.g0 == spec.outer_g)
            report.indeterminacy.push_back(e);
    }
    return report;
}

/// Indecomposables: the textual certainty test plus the m/m^2 dimension per
/// bidegree (generator count minus the rank of the span of all products of
/// positive-filtration classes).
struct IndecomposableReport {
    struct Bidegree {
        int s = 0, t = 0;
        int dim = 0;
        int span_rank = 0;
        int indecomposables() const { return dim - span_rank; }
    };

    std::vector<GeneratorId> certain;
    std::vector<Bidegree> bidegrees;
};

inline IndecomposableReport indecomposables(const ProductTable& table, const Resolution& res,
                                            int s_max, int t_max)
{
    IndecomposableReport report;
    // Certainly indecomposable: paragraphs whose only entry is the unit product.
    std::map<ExtClass, int> nontrivial;
    std::set<ExtClass> seen;
    for (const ProductEntry& e : table.entries()) {
        seen.insert({e.s, e.g});
        if (!(e.s0 == 0 && e.g0 == 0))
            nontrivial[{e.s, e.g}]++;
    }
    for (ExtClass c : seen)
        if (c.first >= 1 && c.first <= s_max && nontrivial.find(c) == nontrivial.end())
            report.certain.push_back(
                GeneratorId{c.first, c.second, res.gen_degree(c.first, c.second)});

    for (int s = 2; s <= std::min(s_max, res.max_s()); ++s)
        for (int t = 0; t <= t_max; ++t) {
            auto gens = res.generators_at(s, t);
            if (gens.empty())
                continue;
            std::map<int, int> coord;  // generator index -> coordinate
            for (size_t k = 0; k < gens.size(); ++k)
                coord[gens[k].g] = int(k);
            WitnessedEchelon span;
            for (int s0 = 1; s0 < s; ++s0) {
                int sz = s - s0;
                for (int y = 0; y < res.gen_count(s0); ++y) {
                    int tz = t - res.gen_degree(s0, y);
                    if (tz < 0)
                        continue;
                    for (const GeneratorId& z : res.generators_at(sz, tz)) {
                        ExtSum prod;
                        ExtClass py{s0, y}, pz{z.s, z.g};
                        if (table.has_map(pz))
                            prod = table.product(py, pz);
                        else if (table.has_map(py))
                            prod = table.product(pz, py);
                        else
                            continue;
                        if (prod.empty())
                            continue;
                        BitVector v(gens.size());
                        for (ExtClass c : prod)
                            v.flip(size_t(coord.at(c.second)));
                        auto red = span.reduce(std::move(v));
                        if (!red.residue.is_zero())
                            span.insert(BitVector(1), std::move(red.residue));
                    }
                }
            }
            report.bidegrees.push_back(
                IndecomposableReport::Bidegree{s, t, int(gens.size()), span.rank()});
        }
    return report;
}

}  // namespace steenrod

#endif
