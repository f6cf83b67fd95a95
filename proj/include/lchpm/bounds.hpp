#pragma once

// Closed-form chord time-length bounds and the pb+ lower bound. Exact
// rational arithmetic throughout.

#include "lchpm/errors.hpp"
#include "lchpm/rational.hpp"

#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace lchpm::bounds {

struct BoundReport {
    /// +inf when the formula is not applicable.
    ExtendedRational value;
    bool applicable = false;
    std::vector<std::string> violated_conditions;
    std::string formula_id;
    /// Named intermediate quantities (E, T, threshold, winning branch, ...).
    std::map<std::string, ExtendedRational> details;
    std::string note;
};

/// l_min,s together with the ratio s it was computed at.
struct TaggedLMin {
    ExtendedRational value;
    ExtendedRational ratio;
};

class DegenerateCobordism : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};
class RatioMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};
class NotSeparating : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};
class ParameterOutOfRange : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};
class EmptyGrid : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};
using lchpm::OrderingViolation;
class NonPositive : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// inf_{Y1} H - sup_{Y0} H.
Rational delta_separation_value(const Rational& inf_on_Y1, const Rational& sup_on_Y0);

/// pb+ >= 1 / ((s+ - s-) l_min), with l_min taken at ratio s+/s-.
BoundReport pb_plus_lower_bound(const TaggedLMin& l_min, const Rational& s_minus,
                                const Rational& s_plus);

/// Chord of an autonomous H from X0 to X1 of time-length <= (s+ - s-) l_min / delta.
BoundReport chord_bound_autonomous(const TaggedLMin& l_min, const Rational& s_minus,
                                   const Rational& s_plus, const Rational& delta);

/// Time-dependent version: E = e delta, T = (s+ - s-) l_hat / ((1 - 2e) delta),
/// applicable iff sup |dH/dt| on the energy window is < E/T. `l_hat` must be
/// the stabilized invariant.
BoundReport chord_bound_timedep(const TaggedLMin& l_hat, const Rational& s_minus,
                                const Rational& s_plus, const Rational& delta, const Rational& e,
                                const Rational& sup_dHdt_on_window);

/// Cooperative contact Hamiltonian with inf h > 0 and constant C:
/// min over grid s with s inf_h > C of (s - 1) l_min,s / (s inf_h - C), and
/// additionally l_min,inf / inf_h when that is finite.
BoundReport cooperative_bound(const std::function<ExtendedRational(const Rational&)>& l_min_fn,
                              const Rational& inf_h, const Rational& C,
                              const ExtendedRational& l_min_inf, const std::vector<Rational>& grid);

/// Two-chord pair with c <= h <= C: |a| (|A| - |a|) / (|A| c - |a| C),
/// applicable iff C/c < |A|/|a|.
BoundReport two_chords_bound(const Rational& a_len, const Rational& A_len, const Rational& c,
                             const Rational& C);

/// 1 / (p delta).
Rational chord_time_vs_pb(const Rational& p, const Rational& delta);

}  // namespace lchpm::bounds
