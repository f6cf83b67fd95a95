#include "lchpm/bounds.hpp"

namespace lchpm::bounds {

namespace {

void check_window(const Rational& s_minus, const Rational& s_plus) {
    if (s_minus <= 0) throw ParameterOutOfRange("s_- must be positive");
    if (s_minus >= s_plus)
        throw DegenerateCobordism("s_- = " + to_string(s_minus) + " is not below s_+ = " +
                                  to_string(s_plus));
}

void check_ratio(const TaggedLMin& l, const Rational& s_minus, const Rational& s_plus) {
    const Rational ratio = s_plus / s_minus;
    if (l.ratio != ExtendedRational(ratio))
        throw RatioMismatch("l_min was computed at s = " + to_string(l.ratio) +
                            " but the window needs s = " + to_string(ratio));
}

}  // namespace

Rational delta_separation_value(const Rational& inf_on_Y1, const Rational& sup_on_Y0) {
    return inf_on_Y1 - sup_on_Y0;
}

BoundReport pb_plus_lower_bound(const TaggedLMin& l_min, const Rational& s_minus,
                                const Rational& s_plus) {
    check_window(s_minus, s_plus);
    check_ratio(l_min, s_minus, s_plus);
    BoundReport r;
    r.formula_id = "pb_plus_lower_bound";
    if (l_min.value.is_infinite()) {
        r.violated_conditions.push_back("l_min finite");
        return r;
    }
    r.applicable = true;
    r.value = Rational(1) / ((s_plus - s_minus) * l_min.value.value());
    return r;
}

BoundReport chord_bound_autonomous(const TaggedLMin& l_min, const Rational& s_minus,
                                   const Rational& s_plus, const Rational& delta) {
    check_window(s_minus, s_plus);
    check_ratio(l_min, s_minus, s_plus);
    if (delta <= 0) throw NotSeparating("delta = " + to_string(delta) + " does not separate");
    BoundReport r;
    r.formula_id = "chord_bound_autonomous";
    r.details["delta"] = delta;
    if (l_min.value.is_infinite()) {
        r.violated_conditions.push_back("l_min finite");
        return r;
    }
    r.applicable = true;
    r.value = (s_plus - s_minus) * l_min.value.value() / delta;
    return r;
}

BoundReport chord_bound_timedep(const TaggedLMin& l_hat, const Rational& s_minus,
                                const Rational& s_plus, const Rational& delta, const Rational& e,
                                const Rational& sup_dHdt_on_window) {
    if (e <= 0 || e >= Rational(1, 2))
        throw ParameterOutOfRange("e = " + to_string(e) + " is outside (0, 1/2)");
    check_window(s_minus, s_plus);
    check_ratio(l_hat, s_minus, s_plus);
    BoundReport r;
    r.formula_id = "chord_bound_timedep";
    r.details["delta"] = delta;
    r.details["sup_dHdt"] = sup_dHdt_on_window;
    if (delta <= 0) r.violated_conditions.push_back("delta > 0");
    if (l_hat.value.is_infinite()) r.violated_conditions.push_back("l_hat finite");
    if (!r.violated_conditions.empty()) return r;

    const Rational E = e * delta;
    const Rational T = (s_plus - s_minus) * l_hat.value.value() / ((1 - 2 * e) * delta);
    const Rational threshold = E / T;
    r.details["E"] = E;
    r.details["T"] = T;
    r.details["threshold"] = threshold;
    if (!(sup_dHdt_on_window < threshold)) {
        r.violated_conditions.push_back("sup |dH/dt| < E/T");
        return r;
    }
    r.applicable = true;
    r.value = T;
    return r;
}

BoundReport cooperative_bound(const std::function<ExtendedRational(const Rational&)>& l_min_fn,
                              const Rational& inf_h, const Rational& C,
                              const ExtendedRational& l_min_inf, const std::vector<Rational>& grid) {
    if (inf_h <= 0) throw ParameterOutOfRange("inf h must be positive");
    if (C <= inf_h) throw ParameterOutOfRange("C must exceed inf h");
    BoundReport r;
    r.formula_id = "cooperative_bound";

    bool any_point = false;
    ExtendedRational grid_best = ExtendedRational::infinity();
    for (const Rational& s : grid) {
        if (s <= 1 || s * inf_h <= C) continue;
        any_point = true;
        ExtendedRational l = l_min_fn(s);
        if (l.is_infinite()) continue;
        Rational candidate = (s - 1) * l.value() / (s * inf_h - C);
        if (candidate < grid_best) {
            grid_best = candidate;
            r.details["grid_argmin_s"] = s;
        }
    }
    if (!any_point) throw EmptyGrid("no grid point s satisfies s * inf h > C");
    r.details["grid_branch"] = grid_best;

    ExtendedRational mu = ExtendedRational::infinity();
    if (l_min_inf.is_finite()) mu = l_min_inf.value() / inf_h;
    r.details["mu_branch"] = mu;

    if (grid_best.is_infinite() && mu.is_infinite()) {
        r.violated_conditions.push_back("some l_min,s finite");
        return r;
    }
    r.applicable = true;
    if (mu <= grid_best) {
        r.value = mu;
        r.note = "mu branch";
    } else {
        r.value = grid_best;
        r.note = "grid branch";
    }
    return r;
}

BoundReport two_chords_bound(const Rational& a_len, const Rational& A_len, const Rational& c,
                             const Rational& C) {
    if (a_len <= 0 || a_len >= A_len)
        throw OrderingViolation("two-chord bound requires 0 < |a| < |A|");
    if (c <= 0) throw ParameterOutOfRange("c must be positive");
    if (C < c) throw ParameterOutOfRange("C must be at least c");
    BoundReport r;
    r.formula_id = "two_chords_bound";
    if (!(C / c < A_len / a_len)) {
        r.violated_conditions.push_back("C/c < |A|/|a|");
        return r;
    }
    r.applicable = true;
    r.value = a_len * (A_len - a_len) / (A_len * c - a_len * C);
    return r;
}

Rational chord_time_vs_pb(const Rational& p, const Rational& delta) {
    if (p <= 0 || delta <= 0) throw NonPositive("p and delta must be positive");
    return Rational(1) / (p * delta);
}

}  // namespace lchpm::bounds
