#include "lchpm/constructions.hpp"

#include "lchpm/filtered_lch.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace lchpm {

namespace {

const Endpoint kLambda0{0, "L0"};
const Endpoint kLambda1{1, "L1"};

void require_positive(const Action& a, const char* what) {
    if (a <= 0) throw std::invalid_argument(std::string(what) + " must be positive");
}

}  // namespace

DGASpec two_fiber_spec(const Action& L) {
    require_positive(L, "fiber distance L");
    std::vector<Chord> chords{{"a", kLambda0, kLambda1, L, {}}, {"b", kLambda1, kLambda0, L, {}}};
    return DGASpec("two_fiber", std::move(chords), IdDifferential{},
                   "unit cotangent fibers over two points at distance " + to_string(L));
}

DGASpec stabilized_two_fiber_spec(const Action& L) {
    require_positive(L, "fiber distance L");
    std::vector<Chord> chords{{"a_1", kLambda0, kLambda1, L, {}},
                              {"a_2", kLambda0, kLambda1, L, {}},
                              {"b_1", kLambda1, kLambda0, L, {}},
                              {"b_2", kLambda1, kLambda0, L, {}}};
    return DGASpec("stabilized_two_fiber", std::move(chords), IdDifferential{},
                   "stabilized two-fiber pair, chords doubled by the two critical points on the circle factor");
}

DGASpec two_chord_spec(const Action& a_len, const Action& A_len, TwoChordCase which) {
    require_positive(a_len, "|a|");
    if (a_len >= A_len)
        throw OrderingViolation("two-chord pair requires |a| < |A|, got " + to_string(a_len) +
                                " >= " + to_string(A_len));
    std::vector<Chord> chords{{"a", kLambda0, kLambda1, a_len, {}},
                              {"A", kLambda0, kLambda1, A_len, {}}};
    IdDifferential d;
    if (which == TwoChordCase::dA_equals_a) d["A"] = {{"a"}};
    return DGASpec(which == TwoChordCase::dA_zero ? "two_chord_dA_zero" : "two_chord_dA_equals_a",
                   std::move(chords), d, "zero section and a Reeb-shifted Legendrian, exactly two chords");
}

void check_circle_data(const CircleMorseData& data) {
    const auto& pts = data.points;
    if (pts.size() < 2 || pts.size() % 2 != 0)
        throw InvalidAlternation("circle data needs an even, non-zero number of critical points");
    for (std::size_t k = 0; k < pts.size(); ++k)
        if (pts[k].kind == pts[(k + 1) % pts.size()].kind)
            throw InvalidAlternation("critical points " + std::to_string(k) + " and " +
                                     std::to_string((k + 1) % pts.size()) + " have the same kind");
    std::set<Action> seen;
    for (const CriticalPoint& p : pts) {
        if (p.value <= 0) throw NonAdmissibleValues("critical value " + to_string(p.value) + " is not positive");
        if (!seen.insert(p.value).second)
            throw NonAdmissibleValues("critical value " + to_string(p.value) + " repeats");
    }
    const std::size_t n = pts.size();
    for (std::size_t k = 0; k < n; ++k) {
        if (pts[k].kind != CriticalKind::max) continue;
        const Action& left = pts[(k + n - 1) % n].value;
        const Action& right = pts[(k + 1) % n].value;
        if (pts[k].value <= left || pts[k].value <= right)
            throw NonAdmissibleValues("maximum " + std::to_string(k) + " does not exceed its neighbours");
    }
}

namespace {

std::string circle_id(const CircleMorseData& data, std::size_t k) {
    return (data.points[k].kind == CriticalKind::min ? "min" : "max") + std::to_string(k);
}

}  // namespace

DGASpec morse_circle_spec(const CircleMorseData& data, const Rational& action_offset) {
    check_circle_data(data);
    const std::size_t n = data.points.size();
    std::vector<Chord> chords;
    for (std::size_t k = 0; k < n; ++k) {
        Action a = data.points[k].value + action_offset;
        if (a <= 0) throw NonAdmissibleValues("action offset makes a chord action non-positive");
        chords.push_back({circle_id(data, k), kLambda0, kLambda1, a, {}});
    }
    IdDifferential d;
    for (std::size_t k = 0; k < n; ++k) {
        if (data.points[k].kind != CriticalKind::max) continue;
        // Equal neighbours cancel when the DGASpec toggles them in.
        d[circle_id(data, k)] = {{circle_id(data, (k + n - 1) % n)}, {circle_id(data, (k + 1) % n)}};
    }
    return DGASpec("morse_circle", std::move(chords), d,
                   "Morse-perturbed jet-space pair over the circle");
}

Barcode morse_sublevel_oracle(const CircleMorseData& data) {
    check_circle_data(data);
    const std::size_t n = data.points.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return data.points[a].value < data.points[b].value; });

    // Roots are minima; a root's birth is its own value (elder rule keeps
    // the older root).
    std::vector<Bar> bars;
    std::optional<std::size_t> global_min;
    for (std::size_t k : order) {
        const CriticalPoint& p = data.points[k];
        if (p.kind == CriticalKind::min) {
            if (!global_min) global_min = k;
            continue;
        }
        std::size_t left = find((k + n - 1) % n);
        std::size_t right = find((k + 1) % n);
        if (left == right) {
            bars.push_back({p.value, Death::infinite(), 1});  // loop closes
            continue;
        }
        std::size_t elder = data.points[left].value < data.points[right].value ? left : right;
        std::size_t younger = elder == left ? right : left;
        bars.push_back({data.points[younger].value, Death::finite(p.value), 1});
        parent[younger] = elder;
    }
    bars.push_back({data.points[*global_min].value, Death::infinite(), 1});
    return Barcode(std::move(bars));
}

DGASpec stabilize_zero_diff(const DGASpec& spec, const Action& delta) {
    if (delta < 0) throw std::invalid_argument("stabilization offset must be non-negative");
    if (!certify_infinite(spec))
        throw NonzeroDifferential("spec '" + spec.name() +
                                  "' has a nonzero differential on the 01-subspace; no stabilized "
                                  "differential is available");
    std::vector<Chord> chords;
    for (const Chord& c : spec.chords()) {
        chords.push_back({c.id + "_1", c.source, c.target, c.action, c.degree});
        chords.push_back({c.id + "_2", c.source, c.target, c.action + delta, c.degree});
    }
    return DGASpec("stabilized_" + spec.name(), std::move(chords), IdDifferential{},
                   "stabilization of '" + spec.name() + "' with offset " + to_string(delta));
}

Bondedness is_stably_homologically_bonded(const DGASpec& spec, const Action& r_max,
                                          const LCHOptions& options) {
    return is_homologically_bonded(lch_barcode(stabilize_zero_diff(spec, 0), r_max, options).barcode);
}

DGASpec random_valid_spec(std::uint64_t seed, const RandomSpecOptions& options) {
    std::mt19937_64 rng(seed);
    auto uniform = [&](std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
    };

    std::vector<Endpoint> endpoints;
    const std::size_t k0 = uniform(1, options.max_components_per_part);
    const std::size_t k1 = uniform(1, options.max_components_per_part);
    for (std::size_t k = 0; k < k0; ++k) endpoints.push_back({0, "L0" + std::string(1, char('a' + k))});
    for (std::size_t k = 0; k < k1; ++k) endpoints.push_back({1, "L1" + std::string(1, char('a' + k))});

    const std::size_t n = uniform(options.min_chords, options.max_chords);
    std::vector<Chord> chords;
    for (std::size_t c = 0; c < n; ++c) {
        Endpoint from = endpoints[uniform(0, endpoints.size() - 1)];
        Endpoint to = endpoints[uniform(0, endpoints.size() - 1)];
        if (c == 0) {
            from = endpoints.front();
            to = endpoints.back();
        }
        Action a = options.duplicate_actions ? Action(static_cast<long>(uniform(1, 3)))
                                             : Action(static_cast<long>(uniform(2, 12)), 4);
        chords.push_back({"c" + std::to_string(c), from, to, a, {}});
    }

    std::vector<ChordIndex> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](ChordIndex x, ChordIndex y) { return chords[x].action < chords[y].action; });

    std::vector<Polynomial> differential(n);
    std::bernoulli_distribution nonzero(options.differential_density);
    for (ChordIndex g : order) {
        if (!nonzero(rng)) continue;
        const DGASpec partial("partial", chords, differential);
        std::vector<WeightedWord> candidates;
        try {
            candidates = enumerate_words_between(partial, chords[g].source, chords[g].target,
                                                 chords[g].action, 200);
        } catch (const BudgetExceeded&) {
            continue;
        }
        if (candidates.empty()) continue;
        // Every letter has action below chords[g], so d^2 = 0 already holds on
        // each candidate: both cycles and boundaries d(w) are cycles.
        std::vector<Polynomial> cycles;
        for (const WeightedWord& w : candidates) {
            Polynomial dw = apply_differential(partial, w.word);
            cycles.push_back(dw.empty() ? Polynomial{w.word} : dw);
        }
        const std::size_t terms = uniform(1, 2);
        for (std::size_t t = 0; t < terms; ++t) differential[g] += cycles[uniform(0, cycles.size() - 1)];
    }
    return DGASpec("random_" + std::to_string(seed), std::move(chords), std::move(differential),
                   "randomly generated valid spec");
}

CircleMorseData random_circle_data(std::mt19937_64& rng, std::size_t max_points) {
    const std::size_t pairs =
        std::uniform_int_distribution<std::size_t>(1, std::max<std::size_t>(1, max_points / 2))(rng);
    const std::size_t n = 2 * pairs;
    const bool starts_with_min = std::bernoulli_distribution(0.5)(rng);
    std::vector<CriticalPoint> pts(n);
    std::set<long> used;
    auto draw = [&](long lo, long hi) {
        std::uniform_int_distribution<long> dist(lo, hi);
        long v;
        do v = dist(rng);
        while (used.contains(v));
        used.insert(v);
        return v;
    };
    for (std::size_t k = 0; k < n; ++k) {
        bool is_min = (k % 2 == 0) == starts_with_min;
        pts[k].kind = is_min ? CriticalKind::min : CriticalKind::max;
        if (is_min) pts[k].value = Action(draw(1, 800), 100);
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (pts[k].kind != CriticalKind::max) continue;
        Action floor = std::max(pts[(k + n - 1) % n].value, pts[(k + 1) % n].value);
        long lo = static_cast<long>((floor * 100).convert_to<double>()) + 1;
        pts[k].value = Action(draw(lo, 1000), 100);
    }
    return CircleMorseData{std::move(pts)};
}

}  // namespace lchpm
