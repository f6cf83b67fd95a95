#include "lchpm/scenario.hpp"

#include "lchpm/io.hpp"

#include <cmath>
#include <cstdio>

namespace lchpm::scenario {

namespace {

using io::LocatedJson;

const nlohmann::json& at(const LocatedJson& doc, const std::string& ptr) {
    return doc.value.at(nlohmann::json::json_pointer(ptr));
}

bool has(const LocatedJson& doc, const std::string& ptr) {
    return doc.value.contains(nlohmann::json::json_pointer(ptr));
}

double number(const LocatedJson& doc, const std::string& ptr) {
    const auto& v = at(doc, ptr);
    if (!v.is_number()) doc.fail(ptr, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) doc.fail(ptr, "expected a finite number");
    return d;
}

double positive(const LocatedJson& doc, const std::string& ptr) {
    const double d = number(doc, ptr);
    if (!(d > 0)) doc.fail(ptr, "expected a positive number");
    return d;
}

std::size_t count(const LocatedJson& doc, const std::string& ptr) {
    const auto& v = at(doc, ptr);
    if (!v.is_number_unsigned() || v.get<std::size_t>() == 0)
        doc.fail(ptr, "expected a positive integer");
    return v.get<std::size_t>();
}

std::string text(const LocatedJson& doc, const std::string& ptr) {
    const auto& v = at(doc, ptr);
    if (!v.is_string()) doc.fail(ptr, "expected a string");
    return v.get<std::string>();
}

Rational rational(const LocatedJson& doc, const std::string& ptr) {
    try {
        return parse_rational(text(doc, ptr));
    } catch (const RationalParseError& e) {
        doc.fail(ptr, e.what());
    }
}

std::vector<double> vec(const LocatedJson& doc, const std::string& ptr, std::size_t n) {
    const auto& v = at(doc, ptr);
    if (!v.is_array() || (n && v.size() != n))
        doc.fail(ptr, "expected a list of " + (n ? std::to_string(n) : std::string("some")) + " numbers");
    std::vector<double> out;
    for (std::size_t k = 0; k < v.size(); ++k) out.push_back(number(doc, ptr + "/" + std::to_string(k)));
    return out;
}

dyn::Potential parse_potential(const LocatedJson& doc, const std::string& ptr, std::size_t n) {
    const std::string kind = has(doc, ptr + "/kind") ? text(doc, ptr + "/kind") : "";
    if (kind == "constant") {
        io::check_members(doc, ptr, {"kind", "value"});
        return dyn::constant_potential(number(doc, ptr + "/value"));
    }
    if (kind == "cos_product") {
        io::check_members(doc, ptr, {"kind", "amplitude"});
        return dyn::cos_product_potential(number(doc, ptr + "/amplitude"));
    }
    if (kind == "bump") {
        io::check_members(doc, ptr, {"kind", "center", "radius"});
        return dyn::bump_potential(vec(doc, ptr + "/center", n), positive(doc, ptr + "/radius"));
    }
    doc.fail(ptr + "/kind", "potential kind must be constant, cos_product or bump");
}

dyn::ContactHamiltonian parse_contact(const LocatedJson& doc, const std::string& ptr, std::size_t n) {
    const std::string kind = has(doc, ptr + "/kind") ? text(doc, ptr + "/kind") : "";
    if (kind == "constant") {
        io::check_members(doc, ptr, {"kind", "value"});
        return dyn::constant_contact(number(doc, ptr + "/value"));
    }
    if (kind == "position") {
        io::check_members(doc, ptr, {"kind", "potential"});
        return dyn::position_contact(parse_potential(doc, ptr + "/potential", n));
    }
    if (kind == "bump_pair") {
        io::check_members(doc, ptr, {"kind", "x0", "x1", "radius"});
        return dyn::bump_pair_contact(vec(doc, ptr + "/x0", n), vec(doc, ptr + "/x1", n),
                                      positive(doc, ptr + "/radius"));
    }
    doc.fail(ptr + "/kind", "contact Hamiltonian kind must be constant, position or bump_pair");
}

std::size_t dimension(const LocatedJson& doc, const std::string& ptr) {
    if (has(doc, ptr + "/n")) return count(doc, ptr + "/n");
    if (has(doc, ptr + "/base")) return dimension(doc, ptr + "/base");
    doc.fail(ptr, "missing dimension n");
}

dyn::Hamiltonian parse_hamiltonian(const LocatedJson& doc, const std::string& ptr, ChordScenario* s) {
    const std::string family = has(doc, ptr + "/family") ? text(doc, ptr + "/family") : "";
    if (family == "free") {
        io::check_members(doc, ptr, {"family", "n"});
        return dyn::Hamiltonian::free(count(doc, ptr + "/n"));
    }
    if (family == "mechanical") {
        io::check_members(doc, ptr, {"family", "n", "potential"});
        const std::size_t n = count(doc, ptr + "/n");
        dyn::Potential U = parse_potential(doc, ptr + "/potential", n);
        if (s) s->potential = U;
        return dyn::Hamiltonian::mechanical(n, U);
    }
    if (family == "homogeneous_lift") {
        io::check_members(doc, ptr, {"family", "n", "contact"});
        const std::size_t n = count(doc, ptr + "/n");
        return dyn::Hamiltonian::homogeneous_lift(n, parse_contact(doc, ptr + "/contact", n));
    }
    if (family == "time_periodic") {
        io::check_members(doc, ptr, {"family", "base", "epsilon", "perturbation"});
        dyn::Hamiltonian base = parse_hamiltonian(doc, ptr + "/base", nullptr);
        const double eps = number(doc, ptr + "/epsilon");
        dyn::Potential g = parse_potential(doc, ptr + "/perturbation", base.dim());
        if (s) {
            s->base = base;
            s->perturbation = g;
            s->epsilon = eps;
        }
        return dyn::Hamiltonian::time_periodic(base, eps, g);
    }
    doc.fail(ptr + "/family", "family must be free, mechanical, homogeneous_lift or time_periodic");
}

double inner_lo(const Rational& r) { return to_double_up(r); }
double inner_hi(const Rational& r) { return to_double_down(r); }

ChordScenario parse_chord(const LocatedJson& doc) {
    io::check_members(doc, "",
                      {"name", "kind", "hamiltonian", "x0", "x1", "s_minus", "s_plus", "sampling", "search"},
                      {"note", "source", "bound", "slack", "oracle", "p_max"});
    ChordScenario s;
    s.H = parse_hamiltonian(doc, "/hamiltonian", &s);
    const std::size_t n = s.H.dim();
    s.x0 = vec(doc, "/x0", n);
    s.x1 = vec(doc, "/x1", n);
    if (s.x0 == s.x1) doc.fail("/x1", "x0 and x1 must differ");
    s.s_minus = rational(doc, "/s_minus");
    s.s_plus = rational(doc, "/s_plus");
    if (s.s_minus <= 0 || s.s_minus >= s.s_plus) doc.fail("/s_plus", "need 0 < s_minus < s_plus");

    io::check_members(doc, "/sampling", {"window_lo", "window_hi"},
                      {"directions", "radii", "window_points", "times"});
    s.sampling.window_lo = vec(doc, "/sampling/window_lo", n);
    s.sampling.window_hi = vec(doc, "/sampling/window_hi", n);
    if (has(doc, "/sampling/directions")) s.sampling.directions = count(doc, "/sampling/directions");
    if (has(doc, "/sampling/radii")) s.sampling.radii = count(doc, "/sampling/radii");
    if (has(doc, "/sampling/window_points")) s.sampling.window_points = count(doc, "/sampling/window_points");
    if (has(doc, "/sampling/times")) s.sampling.times = count(doc, "/sampling/times");

    io::check_members(doc, "/search", {"horizon", "step", "tol"},
                      {"directions", "radii", "t0_samples", "refine_candidates", "refine_iterations"});
    s.horizon = positive(doc, "/search/horizon");
    s.grid.step = positive(doc, "/search/step");
    s.tol = positive(doc, "/search/tol");
    s.grid.source_sampling = s.sampling;
    if (has(doc, "/search/directions")) s.grid.source_sampling.directions = count(doc, "/search/directions");
    if (has(doc, "/search/radii")) s.grid.source_sampling.radii = count(doc, "/search/radii");
    if (has(doc, "/search/t0_samples")) s.grid.t0_samples = count(doc, "/search/t0_samples");
    if (has(doc, "/search/refine_candidates"))
        s.grid.refine_candidates = at(doc, "/search/refine_candidates").get<std::size_t>();
    if (has(doc, "/search/refine_iterations"))
        s.grid.refine_iterations = count(doc, "/search/refine_iterations");

    const double lo = inner_lo(s.s_minus), hi = inner_hi(s.s_plus);
    s.source = dyn::FiberSegment{s.x0, lo, hi};
    s.target = dyn::FiberSegment{s.x1, lo, hi};
    s.Y0 = dyn::MomentumShell{to_double_up(s.s_minus)};
    s.Y1 = dyn::MomentumShell{to_double_down(s.s_plus)};
    s.p_max = has(doc, "/p_max") ? positive(doc, "/p_max") : 2 * hi;

    if (has(doc, "/source")) {
        const std::string kind = text(doc, "/source/kind");
        if (kind == "energy_fiber") {
            io::check_members(doc, "/source", {"kind", "energy"});
            const double C = number(doc, "/source/energy");
            if (!s.H.autonomous()) doc.fail("/source", "energy_fiber needs an autonomous Hamiltonian");
            const double U0 = s.potential ? s.potential->value(s.x0) : 0.0;
            if (!(C > U0)) doc.fail("/source/energy", "energy must exceed U(x0)");
            const double r = std::sqrt(2 * (C - U0));
            if (r < lo || r > hi) doc.fail("/source/energy", "energy fiber lies outside X0");
            s.source = dyn::FiberSegment{s.x0, r, r};
        } else if (kind == "fiber") {
            io::check_members(doc, "/source", {"kind"});
        } else {
            doc.fail("/source/kind", "source kind must be fiber or energy_fiber");
        }
    }

    if (has(doc, "/bound")) {
        io::check_members(doc, "/bound", {"recipe", "invariant"}, {"e"});
        io::check_members(doc, "/bound/invariant", {"generator", "rmax"}, {"params"});
        BoundRecipe b;
        const std::string recipe = text(doc, "/bound/recipe");
        if (recipe == "autonomous") b.kind = BoundRecipe::Kind::autonomous;
        else if (recipe == "timedep") b.kind = BoundRecipe::Kind::timedep;
        else doc.fail("/bound/recipe", "recipe must be autonomous or timedep");
        b.generator = text(doc, "/bound/invariant/generator");
        b.rmax = rational(doc, "/bound/invariant/rmax");
        if (has(doc, "/bound/invariant/params")) {
            const auto& p = at(doc, "/bound/invariant/params");
            if (!p.is_object()) doc.fail("/bound/invariant/params", "params must be a map");
            for (const auto& [k, v] : p.items()) {
                if (!v.is_string()) doc.fail("/bound/invariant/params/" + k, "parameter values are strings");
                b.params[k] = v.get<std::string>();
            }
        }
        if (b.kind == BoundRecipe::Kind::timedep) {
            if (!has(doc, "/bound/e")) doc.fail("/bound", "timedep recipe needs e");
            b.e = rational(doc, "/bound/e");
        } else if (has(doc, "/bound/e")) {
            doc.fail("/bound/e", "e only applies to the timedep recipe");
        }
        if (auto L = b.params.find("L"); L != b.params.end()) {
            double dist = 0;
            for (std::size_t i = 0; i < n; ++i) dist += (s.x1[i] - s.x0[i]) * (s.x1[i] - s.x0[i]);
            const double Ld = to_double_up(parse_rational(L->second));
            if (std::abs(std::sqrt(dist) - Ld) > 1e-12 * Ld)
                doc.fail("/bound/invariant/params/L", "L must equal |x0 - x1|");
        }
        s.bound = std::move(b);
    }
    if (has(doc, "/slack")) {
        s.slack = number(doc, "/slack");
        if (s.slack < 0) doc.fail("/slack", "slack must be non-negative");
    }
    if (has(doc, "/oracle")) {
        io::check_members(doc, "/oracle", {"kind", "energy", "nodes"}, {"agreement", "max_iterations"});
        if (text(doc, "/oracle/kind") != "maupertuis") doc.fail("/oracle/kind", "oracle kind must be maupertuis");
        if (!s.potential && s.H.family() != "free")
            doc.fail("/oracle", "the Maupertuis oracle needs a free or mechanical Hamiltonian");
        MaupertuisOracle o;
        o.energy = number(doc, "/oracle/energy");
        o.nodes = count(doc, "/oracle/nodes");
        if (has(doc, "/oracle/agreement")) o.agreement = positive(doc, "/oracle/agreement");
        if (has(doc, "/oracle/max_iterations")) o.options.max_iterations = count(doc, "/oracle/max_iterations");
        s.oracle = o;
    }
    return s;
}

ConformalScenario parse_conformal(const LocatedJson& doc) {
    io::check_members(doc, "", {"name", "kind", "n", "contact", "starts", "horizon", "step"},
                      {"note", "reference_step", "threshold", "stays_within"});
    ConformalScenario c;
    c.n = count(doc, "/n");
    c.h = parse_contact(doc, "/contact", c.n);
    io::check_members(doc, "/starts", {"center", "offset", "count"});
    c.starts = inward_starts(vec(doc, "/starts/center", c.n), positive(doc, "/starts/offset"),
                             count(doc, "/starts/count"));
    c.horizon = positive(doc, "/horizon");
    c.step = positive(doc, "/step");
    c.reference_step = has(doc, "/reference_step") ? positive(doc, "/reference_step") : c.step / 10;
    if (has(doc, "/threshold")) c.threshold = positive(doc, "/threshold");
    if (has(doc, "/stays_within")) c.stays_within = positive(doc, "/stays_within");
    if (!c.threshold && !c.stays_within) doc.fail("", "conformal scenario needs threshold or stays_within");
    return c;
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string vec_str(const std::vector<double>& v) {
    std::string out = "(";
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + num(v[i]);
    return out + ")";
}

LMinResult compute_l_min(const BoundRecipe& b, const Rational& ratio, const LCHOptions& lch) {
    const DGASpec spec = generate_spec(b.generator, b.params);
    const LCHResult res = lch_barcode(spec, b.rmax, lch);
    return l_min_s(res.barcode, ratio);
}

BoundEvaluation evaluate_with(const ChordScenario& s, const dyn::Hamiltonian& H, const LMinResult& lm) {
    BoundEvaluation ev;
    ev.l_min = lm;
    ev.ratio = s.s_plus / s.s_minus;
    ev.delta_measured = dyn::delta_separation(H, s.Y0, s.Y1, s.sampling);
    ev.delta = from_double(ev.delta_measured.value);
    if (ev.delta <= 0)
        throw bounds::NotSeparating("measured delta = " + num(ev.delta_measured.value) +
                                    " does not separate Y0 and Y1");
    const bounds::TaggedLMin tagged{lm.value, ev.ratio};
    if (s.bound->kind == BoundRecipe::Kind::autonomous) {
        ev.report = bounds::chord_bound_autonomous(tagged, s.s_minus, s.s_plus, ev.delta);
    } else {
        const Rational E = s.bound->e * ev.delta;
        double cmin = std::numeric_limits<double>::infinity(), cmax = -cmin;
        const auto samples = dyn::sample_region(s.source, H.dim(), s.sampling);
        const std::size_t slices = H.autonomous() ? 1 : std::max<std::size_t>(s.sampling.times, 1);
        for (std::size_t k = 0; k < slices; ++k) {
            const double t = static_cast<double>(k) / static_cast<double>(slices);
            for (const auto& x : samples) {
                cmin = std::min(cmin, H.value(x, t));
                cmax = std::max(cmax, H.value(x, t));
            }
        }
        ev.c_min = cmin;
        ev.c_max = cmax;
        ev.sup_dHdt = dyn::sup_abs_time_derivative(H, cmin - to_double_up(E), cmax + to_double_up(E),
                                                   s.p_max, s.sampling);
        ev.report = bounds::chord_bound_timedep(tagged, s.s_minus, s.s_plus, ev.delta, s.bound->e,
                                                from_double(*ev.sup_dHdt));
    }
    if (lm.uncertain) {
        ev.report.applicable = false;
        ev.report.violated_conditions.push_back("l_min not affected by censoring");
        ev.report.value = ExtendedRational::infinity();
    }
    return ev;
}

}  // namespace

dyn::Hamiltonian ChordScenario::hamiltonian_with(double eps) const {
    if (!base || !perturbation) throw std::logic_error("scenario Hamiltonian is not time-periodic");
    return dyn::Hamiltonian::time_periodic(*base, eps, *perturbation);
}

std::vector<dyn::PhasePoint> inward_starts(const std::vector<double>& center, double offset,
                                           std::size_t n_starts) {
    std::vector<dyn::PhasePoint> out;
    for (const auto& d : dyn::sphere_directions(center.size(), n_starts)) {
        dyn::PhasePoint x;
        for (std::size_t i = 0; i < center.size(); ++i) {
            x.q.push_back(center[i] + offset * d[i]);
            x.p.push_back(-d[i]);
        }
        out.push_back(std::move(x));
    }
    return out;
}

Scenario parse_scenario(std::string_view source) {
    const LocatedJson doc = io::parse_json(source);
    if (!doc.value.is_object()) doc.fail("", "scenario must be an object");
    Scenario s;
    s.name = text(doc, "/name");
    if (has(doc, "/note")) s.note = text(doc, "/note");
    const std::string kind = has(doc, "/kind") ? text(doc, "/kind") : "";
    if (kind == "chord") s.chord = parse_chord(doc);
    else if (kind == "conformal") s.conformal = parse_conformal(doc);
    else doc.fail("/kind", "kind must be chord or conformal");
    return s;
}

BoundEvaluation evaluate_bound(const ChordScenario& s, const dyn::Hamiltonian& H, const LCHOptions& lch) {
    if (!s.bound) throw std::invalid_argument("scenario has no bound recipe");
    return evaluate_with(s, H, compute_l_min(*s.bound, s.s_plus / s.s_minus, lch));
}

std::optional<double> epsilon_threshold(const ChordScenario& s, double eps_cap, const LCHOptions& lch) {
    if (!s.bound || s.bound->kind != BoundRecipe::Kind::timedep)
        throw std::invalid_argument("epsilon threshold needs a timedep bound recipe");
    const LMinResult lm = compute_l_min(*s.bound, s.s_plus / s.s_minus, lch);
    auto gate = [&](double eps) {
        try {
            return evaluate_with(s, s.hamiltonian_with(eps), lm).report.applicable;
        } catch (const bounds::NotSeparating&) {
            return false;
        }
    };
    if (!gate(0.0)) return std::nullopt;
    double lo = 0, hi = 1.0 / 64;
    while (gate(hi)) {
        lo = hi;
        hi *= 2;
        if (hi > eps_cap) return std::nullopt;
    }
    for (int it = 0; it < 60 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (gate(mid) ? lo : hi) = mid;
    }
    return hi;
}

namespace {

void add(Outcome& o, std::string key, std::string value) { o.rows.push_back({std::move(key), std::move(value)}); }

Outcome verify_chord(const Scenario& sc, const RunOptions& opt) {
    const ChordScenario& s = *sc.chord;
    Outcome o;
    add(o, "scenario", sc.name);
    add(o, "hamiltonian", s.H.family());
    std::optional<Rational> bound;
    std::vector<std::string> summary;

    if (!opt.search_only && s.bound) {
        const BoundEvaluation ev = evaluate_bound(s, s.H, opt.lch);
        const auto& r = ev.report;
        add(o, "formula_id", r.formula_id);
        add(o, "invariant", s.bound->generator);
        add(o, "l_min", to_string(ev.l_min.value) + (ev.l_min.uncertain ? " (uncertain)" : ""));
        add(o, "l_min_ratio", to_string(ev.ratio));
        add(o, "delta_measured", num(ev.delta_measured.value));
        add(o, "delta_samples", std::to_string(ev.delta_measured.samples));
        if (ev.c_min) add(o, "c_min", num(*ev.c_min));
        if (ev.c_max) add(o, "c_max", num(*ev.c_max));
        if (ev.sup_dHdt) add(o, "sup_dHdt", num(*ev.sup_dHdt));
        for (const auto& [k, v] : r.details)
            if (k != "delta" && k != "sup_dHdt") add(o, "bound_" + k, v.is_finite() ? num(to_double_up(v.value())) : "inf");
        if (s.base && s.bound->kind == BoundRecipe::Kind::timedep) {
            const auto eps_star = epsilon_threshold(s, 16.0, opt.lch);
            add(o, "epsilon", num(s.epsilon));
            add(o, "epsilon_threshold", eps_star ? num(*eps_star) : "none");
        }
        add(o, "applicable", r.applicable ? "yes" : "no");
        std::string violated;
        for (const auto& v : r.violated_conditions) violated += (violated.empty() ? "" : "; ") + v;
        add(o, "violated", violated.empty() ? "-" : violated);
        if (!r.applicable) {
            add(o, "bound", "inf");
            o.pass = false;
            o.summary = "bound not applicable (" + violated + "); no chord search run";
            return o;
        }
        bound = r.value.value();
        add(o, "bound", num(to_double_up(*bound)));
        summary.push_back("bound " + num(to_double_up(*bound)) + " from " + r.formula_id);
    }

    dyn::ShootingGrid grid = s.grid;
    grid.threads = opt.threads;
    const dyn::ChordResult res = dyn::find_chord(s.H, s.source, s.target, s.horizon, grid, s.tol);
    add(o, "found", res.found ? "yes" : "no");
    add(o, "shots", std::to_string(res.shots));
    add(o, "provenance", res.provenance);
    if (!res.found) {
        add(o, "closest_approach", num(res.end_residual));
        o.pass = false;
        o.summary = "search exhausted without a chord; this does not contradict the bound";
        return o;
    }
    add(o, "T", num(res.T));
    add(o, "t0", num(res.t0));
    add(o, "start_p", vec_str(res.start.p));
    add(o, "start_q", vec_str(res.start.q));
    add(o, "end_residual", num(res.end_residual));
    o.pass = true;
    summary.push_back("chord found with T = " + num(res.T));

    if (bound) {
        const dyn::VerifyReport vr = dyn::verify_bound(res, *bound, s.slack);
        add(o, "slack", num(s.slack));
        add(o, "T_within_bound", vr.pass ? "yes" : "no");
        o.pass = o.pass && vr.pass;
        summary.push_back(vr.pass ? "T is within the bound" : "T exceeds the bound");
    }

    if (!opt.search_only && s.oracle) {
        const dyn::Potential U = s.potential ? *s.potential : dyn::constant_potential(0.0);
        const dyn::ChordResult m =
            dyn::maupertuis_chord(U, s.oracle->energy, s.x0, s.x1, s.oracle->nodes, s.oracle->options);
        add(o, "oracle_found", m.found ? "yes" : "no");
        add(o, "oracle_T", num(m.T));
        add(o, "oracle_end_residual", num(m.end_residual));
        const double rel = std::abs(res.T - m.T) / m.T;
        add(o, "oracle_relative_gap", num(rel));
        bool ok = m.found && rel <= s.oracle->agreement;
        if (bound) {
            const bool within = dyn::verify_bound(m, *bound, s.slack).pass;
            add(o, "oracle_T_within_bound", within ? "yes" : "no");
            ok = ok && within;
        }
        o.pass = o.pass && ok;
        summary.push_back(ok ? "Maupertuis oracle agrees" : "Maupertuis oracle disagrees");
    }
    for (std::size_t k = 0; k < summary.size(); ++k) o.summary += (k ? "; " : "") + summary[k];
    return o;
}

Outcome verify_conformal(const Scenario& sc) {
    const ConformalScenario& c = *sc.conformal;
    Outcome o;
    add(o, "scenario", sc.name);
    add(o, "contact_hamiltonian", c.h.name);
    add(o, "starts", std::to_string(c.starts.size()));
    add(o, "horizon", num(c.horizon));
    add(o, "step", num(c.step));
    const dyn::ConformalReport r = dyn::conformal_factor_track(c.h, c.starts, c.horizon, c.step);
    add(o, "max_ratio", num(r.max_ratio));
    add(o, "min_ratio", num(r.min_ratio));
    add(o, "argmax_start", std::to_string(r.argmax_start));
    add(o, "argmax_time", num(r.argmax_time));
    o.pass = true;
    if (c.threshold) {
        const dyn::ConformalReport ref = dyn::conformal_factor_track(c.h, c.starts, c.horizon, c.reference_step);
        add(o, "reference_step", num(c.reference_step));
        add(o, "reference_max_ratio", num(ref.max_ratio));
        add(o, "threshold", num(*c.threshold));
        const bool exceeds = r.max_ratio > *c.threshold;
        const bool frozen_ok = *c.threshold <= ref.max_ratio;
        add(o, "exceeds_threshold", exceeds ? "yes" : "no");
        add(o, "threshold_below_reference", frozen_ok ? "yes" : "no");
        o.pass = exceeds && frozen_ok;
        o.summary = "conformal factor reached " + num(r.max_ratio) + " against threshold " + num(*c.threshold);
    }
    if (c.stays_within) {
        const bool ok = std::abs(r.max_ratio - 1) <= *c.stays_within && std::abs(r.min_ratio - 1) <= *c.stays_within;
        add(o, "stays_within", num(*c.stays_within));
        add(o, "ratio_within_tolerance", ok ? "yes" : "no");
        o.pass = o.pass && ok;
        o.summary += (o.summary.empty() ? "" : "; ") + std::string("ratio stays in [") +
                     num(r.min_ratio) + ", " + num(r.max_ratio) + "]";
    }
    return o;
}

}  // namespace

Outcome run_verify(const Scenario& s, const RunOptions& options) {
    if (s.chord) return verify_chord(s, options);
    return verify_conformal(s);
}

std::string format_outcome(const Outcome& o) {
    std::string out;
    for (const Row& r : o.rows) out += r.key + "\t" + r.value + "\n";
    out += "result\t" + std::string(o.pass ? "PASS" : "FAIL") + "\n";
    out += "summary\t" + o.summary + "\n";
    return out;
}

}  // namespace lchpm::scenario
