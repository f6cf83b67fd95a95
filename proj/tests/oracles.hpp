#pragma once

// Slow, independent reference computations for the tests. Nothing here calls
// into z2_linalg or persistence; the complex is rebuilt from the chord data
// with its own word enumeration and Leibniz rule.

#include "lchpm/ce_dga.hpp"
#include "lchpm/persistence.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <vector>

namespace oracle {

using lchpm::Action;
using Bits = std::vector<std::uint8_t>;

// Dense Gaussian elimination; vectors may have any common length.
inline std::size_t dense_rank(std::vector<Bits> rows) {
    std::size_t rank = 0;
    const std::size_t width = rows.empty() ? 0 : rows.front().size();
    for (std::size_t col = 0; col < width && rank < rows.size(); ++col) {
        std::size_t pivot = rank;
        while (pivot < rows.size() && !rows[pivot][col]) ++pivot;
        if (pivot == rows.size()) continue;
        std::swap(rows[rank], rows[pivot]);
        for (std::size_t r = 0; r < rows.size(); ++r)
            if (r != rank && rows[r][col])
                for (std::size_t c = col; c < width; ++c) rows[r][c] ^= rows[rank][c];
        ++rank;
    }
    return rank;
}

struct DenseComplex {
    std::vector<Action> actions;   // per basis element
    std::vector<Bits> boundary;    // boundary[j] = column j as a dense vector
};

inline std::size_t dim_span(const std::vector<Bits>& vs) { return dense_rank(vs); }

// Kernel basis of d restricted to span{ e_j : action_j < s }.
inline std::vector<Bits> cycles_below(const DenseComplex& c, const Action& s) {
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < c.actions.size(); ++j)
        if (c.actions[j] < s) idx.push_back(j);
    const std::size_t n = c.actions.size();
    // rows: [ d(e_j) | e_j ], eliminate the left block, keep the right block of zero rows
    std::vector<Bits> rows;
    for (std::size_t j : idx) {
        Bits r(2 * n, 0);
        for (std::size_t i = 0; i < n; ++i) r[i] = c.boundary[j][i];
        r[n + j] = 1;
        rows.push_back(r);
    }
    std::size_t rank = 0;
    for (std::size_t col = 0; col < n && rank < rows.size(); ++col) {
        std::size_t p = rank;
        while (p < rows.size() && !rows[p][col]) ++p;
        if (p == rows.size()) continue;
        std::swap(rows[rank], rows[p]);
        for (std::size_t r = 0; r < rows.size(); ++r)
            if (r != rank && rows[r][col])
                for (std::size_t k = 0; k < 2 * n; ++k) rows[r][k] ^= rows[rank][k];
        ++rank;
    }
    std::vector<Bits> out;
    for (std::size_t r = rank; r < rows.size(); ++r) out.emplace_back(rows[r].begin() + n, rows[r].end());
    return out;
}

inline std::vector<Bits> boundaries_below(const DenseComplex& c, const Action& t) {
    std::vector<Bits> out;
    for (std::size_t j = 0; j < c.actions.size(); ++j)
        if (c.actions[j] < t) out.push_back(c.boundary[j]);
    return out;
}

// rank(H(A_s) -> H(A_t)) = dim(Z_s + B_t) - dim B_t
inline std::size_t homology_rank(const DenseComplex& c, const Action& s, const Action& t) {
    std::vector<Bits> z = cycles_below(c, s);
    std::vector<Bits> b = boundaries_below(c, t);
    const std::size_t db = dim_span(b);
    z.insert(z.end(), b.begin(), b.end());
    return dim_span(z) - db;
}

// Barcode by inclusion-exclusion of the rank function at one point per
// spectral interval. Bars alive at r_max come out censored there.
inline lchpm::Barcode brute_barcode(const DenseComplex& c, const Action& r_max) {
    std::set<Action> spec_set(c.actions.begin(), c.actions.end());
    std::vector<Action> a(spec_set.begin(), spec_set.end());
    const std::size_t m = a.size();
    // probe k in 1..m lies in (a_k, a_{k+1}], with a_{m+1} = r_max
    std::vector<Action> probe(m + 1);
    for (std::size_t k = 1; k <= m; ++k) probe[k] = k < m ? a[k] : r_max;
    auto rk = [&](std::size_t i, std::size_t j) -> long {
        if (i == 0) return 0;
        return static_cast<long>(homology_rank(c, probe[i], probe[j]));
    };
    std::vector<lchpm::Bar> bars;
    for (std::size_t i = 1; i <= m; ++i) {
        for (std::size_t j = i + 1; j <= m; ++j) {
            long mult = rk(i, j - 1) - rk(i - 1, j - 1) - rk(i, j) + rk(i - 1, j);
            if (mult > 0) bars.push_back({a[i - 1], lchpm::Death::finite(a[j - 1]), std::size_t(mult)});
        }
        long alive = rk(i, m) - rk(i - 1, m);
        if (alive > 0) bars.push_back({a[i - 1], lchpm::Death::censored(r_max), std::size_t(alive)});
    }
    return lchpm::Barcode(std::move(bars), r_max);
}

// ---- the 01-complex of a spec, built without enumerate_words -------------

inline bool composable01(const lchpm::DGASpec& s, const lchpm::Word& w) {
    if (w.empty()) return false;
    if (s.chord(w.front()).source.part != 0 || s.chord(w.back()).target.part != 1) return false;
    for (std::size_t k = 0; k + 1 < w.size(); ++k)
        if (!(s.chord(w[k]).target == s.chord(w[k + 1]).source)) return false;
    return true;
}

inline Action action_of(const lchpm::DGASpec& s, const lchpm::Word& w) {
    Action a = 0;
    for (auto i : w) a += s.chord(i).action;
    return a;
}

// All words (composable or not) with action < bound, then filtered.
inline std::vector<lchpm::Word> words01(const lchpm::DGASpec& s, const Action& bound) {
    std::vector<lchpm::Word> out, frontier{{}};
    while (!frontier.empty()) {
        std::vector<lchpm::Word> next;
        for (const auto& w : frontier) {
            const Action base = action_of(s, w);
            for (lchpm::ChordIndex i = 0; i < s.size(); ++i) {
                if (base + s.chord(i).action >= bound) continue;
                lchpm::Word v = w;
                v.push_back(i);
                if (!v.empty() && v.size() > 1 &&
                    !(s.chord(v[v.size() - 2]).target == s.chord(i).source))
                    continue;
                next.push_back(v);
            }
        }
        for (const auto& w : next)
            if (composable01(s, w)) out.push_back(w);
        frontier = std::move(next);
    }
    return out;
}

inline std::map<lchpm::Word, int> leibniz(const lchpm::DGASpec& s, const lchpm::Word& w) {
    std::map<lchpm::Word, int> acc;
    for (std::size_t k = 0; k < w.size(); ++k)
        for (const lchpm::Word& t : s.differential(w[k])) {
            lchpm::Word v(w.begin(), w.begin() + k);
            v.insert(v.end(), t.begin(), t.end());
            v.insert(v.end(), w.begin() + k + 1, w.end());
            acc[v] ^= 1;
        }
    std::erase_if(acc, [](const auto& kv) { return kv.second == 0; });
    return acc;
}

inline DenseComplex complex01(const lchpm::DGASpec& s, const Action& bound) {
    const std::vector<lchpm::Word> basis = words01(s, bound);
    std::map<lchpm::Word, std::size_t> pos;
    for (std::size_t k = 0; k < basis.size(); ++k) pos[basis[k]] = k;
    DenseComplex c;
    for (const auto& w : basis) {
        c.actions.push_back(action_of(s, w));
        Bits col(basis.size(), 0);
        for (const auto& [v, _] : leibniz(s, w)) col.at(pos.at(v)) = 1;
        c.boundary.push_back(col);
    }
    return c;
}

// Midpoints between consecutive spectral values, plus one point past the top.
inline std::vector<Action> midpoints(const DenseComplex& c, const Action& r_max) {
    std::set<Action> sp(c.actions.begin(), c.actions.end());
    sp.insert(r_max);
    std::vector<Action> a(sp.begin(), sp.end()), out;
    for (std::size_t k = 0; k + 1 < a.size(); ++k) out.push_back((a[k] + a[k + 1]) / 2);
    return out;
}

}  // namespace oracle
