#include "lchpm/filtered_lch.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>

namespace lchpm {

namespace {

// Chords that occur as a letter of at least one 01-composable word.
std::vector<bool> chords_on_01_paths(const DGASpec& spec) {
    std::map<Endpoint, std::vector<ChordIndex>> out_edges, in_edges;
    std::set<Endpoint> forward, backward;
    for (ChordIndex c = 0; c < spec.size(); ++c) {
        const Chord& ch = spec.chord(c);
        out_edges[ch.source].push_back(c);
        in_edges[ch.target].push_back(c);
        for (const Endpoint* e : {&ch.source, &ch.target}) {
            if (e->part == 0) forward.insert(*e);
            if (e->part == 1) backward.insert(*e);
        }
    }
    auto close = [&](std::set<Endpoint>& seen, auto& edges, bool along) {
        std::vector<Endpoint> stack(seen.begin(), seen.end());
        while (!stack.empty()) {
            Endpoint e = stack.back();
            stack.pop_back();
            for (ChordIndex c : edges[e]) {
                const Endpoint& next = along ? spec.chord(c).target : spec.chord(c).source;
                if (seen.insert(next).second) stack.push_back(next);
            }
        }
    };
    close(forward, out_edges, true);
    close(backward, in_edges, false);

    std::vector<bool> relevant(spec.size(), false);
    for (ChordIndex c = 0; c < spec.size(); ++c)
        relevant[c] = forward.contains(spec.chord(c).source) &&
                      backward.contains(spec.chord(c).target);
    return relevant;
}

}  // namespace

bool certify_infinite(const DGASpec& spec) {
    const std::vector<bool> relevant = chords_on_01_paths(spec);
    for (ChordIndex c = 0; c < spec.size(); ++c)
        if (relevant[c] && !spec.differential(c).empty()) return false;
    return true;
}

bool complete_below(const DGASpec& spec, const Action& r_max) {
    const std::vector<bool> relevant = chords_on_01_paths(spec);
    std::map<Endpoint, std::vector<ChordIndex>> out_edges;
    for (ChordIndex c = 0; c < spec.size(); ++c)
        if (relevant[c]) out_edges[spec.chord(c).source].push_back(c);

    // Longest 01-word continuation from each endpoint; a cycle means the
    // 01-subspace is infinite-dimensional.
    enum class Mark { unseen, active, done };
    std::map<Endpoint, Mark> mark;
    std::map<Endpoint, std::optional<Action>> best;
    bool cyclic = false;
    std::function<std::optional<Action>(const Endpoint&)> longest =
        [&](const Endpoint& e) -> std::optional<Action> {
        Mark& m = mark[e];
        if (m == Mark::done) return best[e];
        if (m == Mark::active) {
            cyclic = true;
            return std::nullopt;
        }
        m = Mark::active;
        std::optional<Action> result;
        for (ChordIndex c : out_edges[e]) {
            const Chord& ch = spec.chord(c);
            std::optional<Action> tail = longest(ch.target);
            if (ch.target.part == 1 && (!tail || *tail < 0)) tail = Action(0);
            if (!tail) continue;
            Action total = ch.action + *tail;
            if (!result || total > *result) result = total;
        }
        mark[e] = Mark::done;
        best[e] = result;
        return result;
    };

    std::optional<Action> longest_word;
    for (ChordIndex c = 0; c < spec.size(); ++c) {
        const Endpoint& s = spec.chord(c).source;
        if (!relevant[c] || s.part != 0) continue;
        auto v = longest(s);
        if (cyclic) return false;
        if (v && (!longest_word || *v > *longest_word)) longest_word = v;
    }
    return !longest_word || *longest_word < r_max;
}

LCHResult lch_barcode(const DGASpec& spec, const Action& r_max, const LCHOptions& options) {
    if (r_max <= 0) throw std::invalid_argument("r_max must be positive");
    ValidationReport report = validate(spec);
    if (!report.valid()) {
        const Violation& first = report.violations.front();
        std::string what = "spec '" + spec.name() + "' is invalid: " + to_string(first.kind) +
                           " at " + first.generator + " (" + first.detail + ")";
        throw ValidationFailed(std::move(report), what);
    }

    const std::vector<WeightedWord> words = enumerate_words(spec, 0, 1, r_max, options.basis_cap);
    std::map<Word, std::size_t> position;
    std::vector<FilteredGenerator> basis;
    basis.reserve(words.size());
    for (std::size_t k = 0; k < words.size(); ++k) {
        position.emplace(words[k].word, k);
        basis.push_back({spec.format_word(words[k].word), words[k].action});
    }

    std::vector<z2::Z2Column> boundaries;
    boundaries.reserve(words.size());
    for (const WeightedWord& w : words) {
        std::vector<std::size_t> rows;
        for (const Word& term : apply_differential(spec, w.word)) {
            auto it = position.find(term);
            if (it == position.end())
                throw std::logic_error("boundary term " + spec.format_word(term) +
                                       " lies outside the enumerated 01-basis");
            rows.push_back(it->second);
        }
        std::sort(rows.begin(), rows.end());
        boundaries.emplace_back(std::move(rows));
    }

    LCHResult result;
    result.basis_size = words.size();
    result.truncation = r_max;
    Barcode barcode = barcode_from_filtered_complex(basis, boundaries, r_max);
    result.certified_infinite = certify_infinite(spec) || complete_below(spec, r_max);
    if (result.certified_infinite) {
        std::vector<Bar> bars = barcode.bars();
        for (Bar& b : bars)
            if (b.death.is_censored()) b.death = Death::infinite();
        barcode = Barcode(std::move(bars), r_max);
    }
    result.barcode = std::move(barcode);
    return result;
}

LCHResult rescale_form(const LCHResult& res, const Rational& c) {
    if (c <= 0) throw std::invalid_argument("rescale_form requires c > 0");
    LCHResult out = res;
    out.barcode = multiplicative_shift(res.barcode, Rational(1) / c);
    out.truncation = res.truncation * c;
    return out;
}

}  // namespace lchpm
