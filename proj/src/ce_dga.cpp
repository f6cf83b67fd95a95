#include "lchpm/ce_dga.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace lchpm {

Polynomial::Polynomial(std::initializer_list<Word> words) {
    for (const Word& w : words) toggle(w);
}

void Polynomial::toggle(const Word& w) {
    auto [it, inserted] = words_.insert(w);
    if (!inserted) words_.erase(it);
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
    for (const Word& w : other.words_) toggle(w);
    return *this;
}

DGASpec::DGASpec(std::string name, std::vector<Chord> chords, const IdDifferential& differential,
                 std::string note)
    : name_(std::move(name)), note_(std::move(note)), chords_(std::move(chords)) {
    index_chords();
    differential_.assign(chords_.size(), Polynomial{});
    for (const auto& [gen, words] : differential) {
        auto g = find(gen);
        if (!g) throw UnknownChord("differential given for unknown chord '" + gen + "'");
        for (const auto& ids : words) differential_[*g].toggle(word_from_ids(ids));
    }
}

DGASpec::DGASpec(std::string name, std::vector<Chord> chords, std::vector<Polynomial> differential,
                 std::string note)
    : name_(std::move(name)),
      note_(std::move(note)),
      chords_(std::move(chords)),
      differential_(std::move(differential)) {
    index_chords();
    differential_.resize(chords_.size());
    for (const Polynomial& p : differential_)
        for (const Word& w : p)
            for (ChordIndex c : w)
                if (c >= chords_.size()) throw UnknownChord("differential refers to chord index " +
                                                            std::to_string(c));
}

void DGASpec::index_chords() {
    for (ChordIndex i = 0; i < chords_.size(); ++i) {
        if (!by_id_.emplace(chords_[i].id, i).second)
            throw DuplicateChord("duplicate chord id '" + chords_[i].id + "'");
    }
    std::vector<std::size_t> order(chords_.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return chords_[a].id < chords_[b].id; });
    id_rank_.assign(chords_.size(), 0);
    for (std::size_t r = 0; r < order.size(); ++r) id_rank_[order[r]] = r;
}

const Chord& DGASpec::chord(ChordIndex i) const {
    if (i >= chords_.size()) throw UnknownChord("chord index " + std::to_string(i) + " out of range");
    return chords_[i];
}

const Polynomial& DGASpec::differential(ChordIndex i) const {
    if (i >= chords_.size()) throw UnknownChord("chord index " + std::to_string(i) + " out of range");
    return differential_[i];
}

std::optional<ChordIndex> DGASpec::find(const std::string& id) const {
    auto it = by_id_.find(id);
    if (it == by_id_.end()) return std::nullopt;
    return it->second;
}

Word DGASpec::word_from_ids(const std::vector<std::string>& ids) const {
    Word w;
    w.reserve(ids.size());
    for (const std::string& id : ids) {
        auto c = find(id);
        if (!c) throw UnknownChord("unknown chord '" + id + "'");
        w.push_back(*c);
    }
    return w;
}

std::vector<std::string> DGASpec::ids_of(const Word& w) const {
    std::vector<std::string> out;
    out.reserve(w.size());
    for (ChordIndex c : w) out.push_back(chord(c).id);
    return out;
}

std::string DGASpec::format_word(const Word& w) const {
    if (w.empty()) return "1";
    std::string s;
    for (ChordIndex c : w) {
        if (!s.empty()) s += '.';
        s += chord(c).id;
    }
    return s;
}

std::string DGASpec::format_polynomial(const Polynomial& p) const {
    if (p.empty()) return "0";
    std::string s;
    for (const Word& w : p) {
        if (!s.empty()) s += " + ";
        s += format_word(w);
    }
    return s;
}

bool DGASpec::same_algebra(const DGASpec& other) const {
    return chords_ == other.chords_ && differential_ == other.differential_;
}

Action word_action(const DGASpec& spec, const Word& w) {
    Action total = 0;
    for (ChordIndex c : w) total += spec.chord(c).action;
    return total;
}

bool is_composable(const DGASpec& spec, const Word& w) {
    for (std::size_t m = 1; m < w.size(); ++m)
        if (spec.chord(w[m - 1]).target != spec.chord(w[m]).source) return false;
    return true;
}

bool is_ij_composable(const DGASpec& spec, const Word& w, int i, int j) {
    if (w.empty()) return false;
    return spec.chord(w.front()).source.part == i && spec.chord(w.back()).target.part == j;
}

Polynomial apply_differential(const DGASpec& spec, const Word& w) {
    Polynomial out;
    for (std::size_t m = 0; m < w.size(); ++m) {
        for (const Word& u : spec.differential(w[m])) {
            Word term;
            term.reserve(w.size() + u.size());
            term.insert(term.end(), w.begin(), w.begin() + static_cast<std::ptrdiff_t>(m));
            term.insert(term.end(), u.begin(), u.end());
            term.insert(term.end(), w.begin() + static_cast<std::ptrdiff_t>(m) + 1, w.end());
            out.toggle(term);
        }
    }
    return out;
}

Polynomial apply_differential(const DGASpec& spec, const Polynomial& p) {
    Polynomial out;
    for (const Word& w : p) out += apply_differential(spec, w);
    return out;
}

std::string to_string(Violation::Kind k) {
    switch (k) {
        case Violation::Kind::non_positive_action: return "NonPositiveAction";
        case Violation::Kind::endpoint_mismatch: return "EndpointMismatch";
        case Violation::Kind::action_not_lowered: return "ActionNotLowered";
        case Violation::Kind::d_squared_nonzero: return "DSquaredNonzero";
        case Violation::Kind::non_composable_word: return "NonComposableWord";
    }
    return "Unknown";
}

bool ValidationReport::has(Violation::Kind k) const {
    return std::any_of(violations.begin(), violations.end(),
                       [k](const Violation& v) { return v.kind == k; });
}

ValidationReport validate(const DGASpec& spec) {
    using K = Violation::Kind;
    ValidationReport report;
    for (ChordIndex g = 0; g < spec.size(); ++g) {
        const Chord& gen = spec.chord(g);
        if (gen.action <= 0)
            report.violations.push_back(
                {K::non_positive_action, gen.id, "action " + to_string(gen.action), {}});
        for (const Word& w : spec.differential(g)) {
            const std::string ws = spec.format_word(w);
            if (!is_composable(spec, w)) {
                report.violations.push_back({K::non_composable_word, gen.id, ws, {}});
            } else if (w.empty() ? gen.source != gen.target
                                 : spec.chord(w.front()).source != gen.source ||
                                       spec.chord(w.back()).target != gen.target) {
                report.violations.push_back({K::endpoint_mismatch, gen.id, ws, {}});
            }
            const Action a = word_action(spec, w);
            if (a >= gen.action)
                report.violations.push_back({K::action_not_lowered, gen.id,
                                             ws + " has action " + to_string(a) + " >= " +
                                                 to_string(gen.action),
                                             {}});
        }
        Polynomial dd = apply_differential(spec, spec.differential(g));
        if (!dd.empty())
            report.violations.push_back(
                {K::d_squared_nonzero, gen.id, spec.format_polynomial(dd), std::move(dd)});
    }
    return report;
}

bool canonical_less(const DGASpec& spec, const WeightedWord& a, const WeightedWord& b) {
    if (a.action != b.action) return a.action < b.action;
    if (a.word.size() != b.word.size()) return a.word.size() < b.word.size();
    const auto& rank = spec.id_rank();
    return std::lexicographical_compare(
        a.word.begin(), a.word.end(), b.word.begin(), b.word.end(),
        [&](ChordIndex x, ChordIndex y) { return rank[x] < rank[y]; });
}

namespace {

std::vector<WeightedWord> enumerate_impl(const DGASpec& spec,
                                         const std::function<bool(const Chord&)>& starts,
                                         const std::function<bool(const Endpoint&)>& ends,
                                         const Action& bound, std::optional<std::size_t> cap) {
    std::map<Endpoint, std::vector<ChordIndex>> outgoing;
    for (ChordIndex c = 0; c < spec.size(); ++c) {
        if (spec.chord(c).action <= 0)
            throw std::invalid_argument("word enumeration requires positive chord actions");
        outgoing[spec.chord(c).source].push_back(c);
    }

    std::vector<WeightedWord> out;
    Word prefix;
    std::function<void(const Endpoint&, const Action&)> extend = [&](const Endpoint& at,
                                                                      const Action& spent) {
        auto it = outgoing.find(at);
        if (it == outgoing.end()) return;
        for (ChordIndex c : it->second) {
            const Chord& ch = spec.chord(c);
            Action total = spent + ch.action;
            if (total >= bound) continue;
            prefix.push_back(c);
            if (ends(ch.target)) {
                out.push_back({prefix, total});
                if (cap && out.size() > *cap)
                    throw BudgetExceeded(*cap, "word enumeration exceeded the basis cap of " +
                                                   std::to_string(*cap));
            }
            extend(ch.target, total);
            prefix.pop_back();
        }
    };

    for (ChordIndex c = 0; c < spec.size(); ++c) {
        const Chord& ch = spec.chord(c);
        if (!starts(ch) || ch.action >= bound) continue;
        prefix.assign(1, c);
        if (ends(ch.target)) {
            out.push_back({prefix, ch.action});
            if (cap && out.size() > *cap)
                throw BudgetExceeded(*cap, "word enumeration exceeded the basis cap of " +
                                               std::to_string(*cap));
        }
        extend(ch.target, ch.action);
    }

    std::sort(out.begin(), out.end(), [&](const WeightedWord& a, const WeightedWord& b) {
        return canonical_less(spec, a, b);
    });
    return out;
}

}  // namespace

std::vector<WeightedWord> enumerate_words(const DGASpec& spec, int i, int j, const Action& bound,
                                          std::optional<std::size_t> cap) {
    return enumerate_impl(
        spec, [i](const Chord& c) { return c.source.part == i; },
        [j](const Endpoint& e) { return e.part == j; }, bound, cap);
}

std::vector<WeightedWord> enumerate_words_between(const DGASpec& spec, const Endpoint& from,
                                                  const Endpoint& to, const Action& bound,
                                                  std::optional<std::size_t> cap) {
    return enumerate_impl(
        spec, [&from](const Chord& c) { return c.source == from; },
        [&to](const Endpoint& e) { return e == to; }, bound, cap);
}

}  // namespace lchpm
