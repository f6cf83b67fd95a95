#pragma once

// Barcodes of persistence modules over (0, +inf), with bars (birth, death].

#include "lchpm/rational.hpp"
#include "lchpm/z2_linalg.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lchpm {

class Death {
public:
    enum class Kind { finite, infinite, censored };

    static Death finite(Action at) { return Death(Kind::finite, std::move(at)); }
    static Death infinite() { return Death(Kind::infinite, Action(0)); }
    /// Alive at the truncation bound `at`; true death unknown.
    static Death censored(Action at) { return Death(Kind::censored, std::move(at)); }

    Kind kind() const { return kind_; }
    bool is_finite() const { return kind_ == Kind::finite; }
    bool is_infinite() const { return kind_ == Kind::infinite; }
    bool is_censored() const { return kind_ == Kind::censored; }
    /// Death value (finite) or censoring bound (censored). Throws for infinite.
    const Action& at() const;

    friend bool operator==(const Death&, const Death&) = default;
    /// finite(x) < censored(x) < infinite, finite/censored ordered by value first.
    friend bool operator<(const Death& a, const Death& b);

private:
    Death(Kind k, Action at) : kind_(k), at_(std::move(at)) {}
    Kind kind_;
    Action at_;
};

struct Bar {
    Action birth;
    Death death;
    std::size_t multiplicity = 1;

    friend bool operator==(const Bar&, const Bar&) = default;
};

class InvalidBar : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Canonical multiset of bars: equal (birth, death) merged, sorted by
/// (birth, death). Empty bars (a, a] are dropped on construction.
class Barcode {
public:
    Barcode() = default;
    /// Throws InvalidBar for birth <= 0, death < birth, censoring at or
    /// below birth, or zero multiplicity.
    explicit Barcode(std::vector<Bar> bars, std::optional<Action> truncation = std::nullopt);

    const std::vector<Bar>& bars() const { return bars_; }
    const std::optional<Action>& truncation() const { return truncation_; }
    bool empty() const { return bars_.empty(); }
    /// Sum of multiplicities.
    std::size_t total_multiplicity() const;

    friend bool operator==(const Barcode&, const Barcode&) = default;

private:
    std::vector<Bar> bars_;
    std::optional<Action> truncation_;
};

class ActionNotLowered : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class BeyondTruncation : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

struct FilteredGenerator {
    std::string id;
    Action action;
};

/// Barcode of a filtered complex with filtration A_r = span{ action < r }.
/// `basis` must be non-decreasing in action, every action < r_max, and every
/// boundary row must have strictly smaller action than its column.
Barcode barcode_from_filtered_complex(std::span<const FilteredGenerator> basis,
                                      std::span<const z2::Z2Column> boundaries,
                                      const Action& r_max);

/// Rank of the structure map V_s -> V_t, 0 < s <= t.
std::size_t rank_between(const Barcode& b, const Action& s, const Action& t);

/// Barcode of V^{[x c]}: every endpoint divided by c.
Barcode multiplicative_shift(const Barcode& b, const Rational& c);

/// Barcode of V^{[+c]}: every endpoint decreased by c. Bars that would get
/// birth <= 0 are dropped and, if `dropped` is given, reported there.
Barcode additive_shift(const Barcode& b, const Rational& c, std::vector<Bar>* dropped = nullptr);

struct LMinResult {
    ExtendedRational value;
    /// A censored bar born below `value` might qualify.
    bool uncertain = false;
};

/// Smallest birth among bars with death/birth > s; s = +inf selects the
/// infinite bars. Requires s > 1.
LMinResult l_min_s(const Barcode& b, const ExtendedRational& s);

enum class Bondedness { yes, no, unknown };

Bondedness is_homologically_bonded(const Barcode& b);

std::string to_string(Bondedness b);

}  // namespace lchpm
