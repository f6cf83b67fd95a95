#pragma once

// Combinatorial Chekanov-Eliashberg algebra: Reeb chords as generators of a
// free non-commutative Z/2-algebra with a supplied, action-lowering
// differential extended by the Leibniz rule.

#include "lchpm/rational.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace lchpm {

/// A component of part 0 (Lambda_0) or part 1 (Lambda_1).
struct Endpoint {
    int part = 0;
    std::string component;

    friend auto operator<=>(const Endpoint&, const Endpoint&) = default;
};

struct Chord {
    std::string id;
    Endpoint source;
    Endpoint target;
    Action action;
    /// Reserved; ignored by every computation.
    std::optional<long> degree;

    friend bool operator==(const Chord&, const Chord&) = default;
};

using ChordIndex = std::uint32_t;

/// Sequence of chord indices into a DGASpec. The empty word is the unit.
using Word = std::vector<ChordIndex>;

/// Z/2-linear combination of words, stored as the set of words with
/// coefficient 1.
class Polynomial {
public:
    Polynomial() = default;
    Polynomial(std::initializer_list<Word> words);

    /// Adds w with coefficient 1 (so adding twice cancels).
    void toggle(const Word& w);
    Polynomial& operator+=(const Polynomial& other);

    bool empty() const { return words_.empty(); }
    std::size_t size() const { return words_.size(); }
    bool contains(const Word& w) const { return words_.contains(w); }
    auto begin() const { return words_.begin(); }
    auto end() const { return words_.end(); }

    friend bool operator==(const Polynomial&, const Polynomial&) = default;

private:
    std::set<Word> words_;
};

class UnknownChord : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DuplicateChord : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Differential given by chord ids: generator id -> list of words.
using IdDifferential = std::map<std::string, std::vector<std::vector<std::string>>>;

/// Finite chord set plus a differential on generators. Immutable.
class DGASpec {
public:
    DGASpec() = default;
    /// Throws DuplicateChord / UnknownChord. Repeated words in one entry cancel.
    DGASpec(std::string name, std::vector<Chord> chords, const IdDifferential& differential,
            std::string note = {});
    DGASpec(std::string name, std::vector<Chord> chords, std::vector<Polynomial> differential,
            std::string note = {});

    const std::string& name() const { return name_; }
    const std::string& note() const { return note_; }
    const std::vector<Chord>& chords() const { return chords_; }
    std::size_t size() const { return chords_.size(); }
    const Chord& chord(ChordIndex i) const;
    const Polynomial& differential(ChordIndex i) const;
    std::optional<ChordIndex> find(const std::string& id) const;

    /// Throws UnknownChord.
    Word word_from_ids(const std::vector<std::string>& ids) const;
    std::vector<std::string> ids_of(const Word& w) const;
    std::string format_word(const Word& w) const;
    std::string format_polynomial(const Polynomial& p) const;

    /// Position of each chord when chords are sorted by id.
    const std::vector<std::size_t>& id_rank() const { return id_rank_; }

    /// Same chords and differential; name and note are ignored.
    bool same_algebra(const DGASpec& other) const;

private:
    void index_chords();

    std::string name_;
    std::string note_;
    std::vector<Chord> chords_;
    std::vector<Polynomial> differential_;
    std::unordered_map<std::string, ChordIndex> by_id_;
    std::vector<std::size_t> id_rank_;
};

/// Sum of the actions of the factors; 0 for the unit.
Action word_action(const DGASpec& spec, const Word& w);

/// Target endpoint of each letter matches the source of the next.
bool is_composable(const DGASpec& spec, const Word& w);

/// First letter starts on part i, last letter ends on part j.
bool is_ij_composable(const DGASpec& spec, const Word& w, int i, int j);

/// Leibniz extension: d(w1...wk) = sum_m w1...d(wm)...wk, d(1) = 0.
Polynomial apply_differential(const DGASpec& spec, const Polynomial& p);
Polynomial apply_differential(const DGASpec& spec, const Word& w);

struct Violation {
    enum class Kind {
        non_positive_action,
        endpoint_mismatch,
        action_not_lowered,
        d_squared_nonzero,
        non_composable_word,
    };
    Kind kind;
    std::string generator;
    std::string detail;
    /// d(d(generator)) for d_squared_nonzero.
    Polynomial residual;
};

std::string to_string(Violation::Kind k);

struct ValidationReport {
    std::vector<Violation> violations;
    bool valid() const { return violations.empty(); }
    bool has(Violation::Kind k) const;
};

ValidationReport validate(const DGASpec& spec);

struct WeightedWord {
    Word word;
    Action action;
};

class BudgetExceeded : public std::runtime_error {
public:
    BudgetExceeded(std::size_t cap, const std::string& what)
        : std::runtime_error(what), cap_(cap) {}
    std::size_t cap() const { return cap_; }

private:
    std::size_t cap_;
};

/// Orders by (action, length, lexicographic chord ids).
bool canonical_less(const DGASpec& spec, const WeightedWord& a, const WeightedWord& b);

/// All ij-composable non-empty words with action < bound, in canonical order.
/// Throws BudgetExceeded once more than `cap` words are found.
std::vector<WeightedWord> enumerate_words(const DGASpec& spec, int i, int j, const Action& bound,
                                          std::optional<std::size_t> cap = std::nullopt);

/// Composable non-empty words from endpoint `from` to endpoint `to`.
std::vector<WeightedWord> enumerate_words_between(const DGASpec& spec, const Endpoint& from,
                                                  const Endpoint& to, const Action& bound,
                                                  std::optional<std::size_t> cap = std::nullopt);

}  // namespace lchpm
