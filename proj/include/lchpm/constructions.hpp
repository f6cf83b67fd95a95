#pragma once

// Generators for the worked examples: the two-fiber pair and its
// stabilization, the two-chord pair, the Morse-perturbed jet-space pair on
// the circle, plus an independent sublevel-set oracle and a random spec
// generator for property tests.

#include "lchpm/ce_dga.hpp"
#include "lchpm/errors.hpp"
#include "lchpm/filtered_lch.hpp"
#include "lchpm/persistence.hpp"

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace lchpm {

class InvalidAlternation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NonAdmissibleValues : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NonzeroDifferential : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Chords a: Lambda_0 -> Lambda_1 and b: Lambda_1 -> Lambda_0, both of
/// action L (the distance between the two fibers), zero differential.
DGASpec two_fiber_spec(const Action& L);

/// Chords a_1, a_2 (01) and b_1, b_2 (10), all of action L, zero differential.
DGASpec stabilized_two_fiber_spec(const Action& L);

enum class TwoChordCase { dA_zero, dA_equals_a };

/// Chords a, A from the zero section to its Reeb shift, |a| < |A|.
DGASpec two_chord_spec(const Action& a_len, const Action& A_len, TwoChordCase which);

enum class CriticalKind { min, max };

struct CriticalPoint {
    CriticalKind kind;
    Action value;
};

/// Critical points of a Morse function on the circle, in cyclic order.
struct CircleMorseData {
    std::vector<CriticalPoint> points;
};

/// Throws InvalidAlternation / NonAdmissibleValues.
void check_circle_data(const CircleMorseData& data);

/// One 01-chord per critical point; d(max) is the sum of its two cyclic
/// neighbours. `action_offset` is added to every critical value.
DGASpec morse_circle_spec(const CircleMorseData& data, const Rational& action_offset = 0);

/// Sublevel-set persistence of the circle function (degrees 0 and 1 summed),
/// by a union-find sweep.
Barcode morse_sublevel_oracle(const CircleMorseData& data);

/// Doubles every chord with action offsets {0, delta}; ids get suffixes _1, _2.
/// Throws NonzeroDifferential unless certify_infinite(spec).
DGASpec stabilize_zero_diff(const DGASpec& spec, const Action& delta);

/// Bondedness of the stabilized pair (delta = 0). Kept apart from
/// is_homologically_bonded: neither is assumed to imply the other.
/// Throws NonzeroDifferential unless certify_infinite(spec).
Bondedness is_stably_homologically_bonded(const DGASpec& spec, const Action& r_max,
                                          const LCHOptions& options = {});

struct RandomSpecOptions {
    std::size_t min_chords = 1;
    std::size_t max_chords = 12;
    std::size_t max_components_per_part = 2;
    /// Draw actions from {1, 2, 3} so that ties are frequent.
    bool duplicate_actions = false;
    /// Probability of a chord getting a nonzero differential (when possible).
    double differential_density = 0.7;
};

/// A valid spec with d^2 = 0 by construction: each generator's differential
/// is a sum of cycles built from lower-action generators.
DGASpec random_valid_spec(std::uint64_t seed, const RandomSpecOptions& options = {});

/// Alternating admissible circle data with 2..max_points critical points.
CircleMorseData random_circle_data(std::mt19937_64& rng, std::size_t max_points = 10);

}  // namespace lchpm
