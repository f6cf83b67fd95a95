#include "doctest.h"
#include "oracles.hpp"

#include "lchpm/ce_dga.hpp"
#include "lchpm/constructions.hpp"
#include "lchpm/filtered_lch.hpp"

#include <algorithm>
#include <random>

using namespace lchpm;

namespace {

Rational R(long p, long q = 1) { return Rational(p, q); }

Chord chord(std::string id, int from, int to, Rational a) {
    return {std::move(id), {from, from ? "L1" : "L0"}, {to, to ? "L1" : "L0"}, std::move(a), {}};
}

std::vector<Action> actions(const std::vector<WeightedWord>& ws) {
    std::vector<Action> out;
    for (const auto& w : ws) out.push_back(w.action);
    return out;
}

}  // namespace

TEST_CASE("word action and composability") {
    const DGASpec s = two_fiber_spec(R(2));
    const Word a = s.word_from_ids({"a"});
    const Word ab = s.word_from_ids({"a", "b"});
    const Word aba = s.word_from_ids({"a", "b", "a"});
    CHECK(word_action(s, a) == 2);
    CHECK(word_action(s, aba) == 6);
    CHECK(word_action(s, {}) == 0);
    CHECK(is_ij_composable(s, a, 0, 1));
    CHECK_FALSE(is_ij_composable(s, ab, 0, 1));
    CHECK(is_ij_composable(s, ab, 0, 0));
    CHECK(is_ij_composable(s, aba, 0, 1));
    CHECK_FALSE(is_composable(s, s.word_from_ids({"a", "a"})));
    CHECK_THROWS_AS(s.word_from_ids({"zz"}), UnknownChord);
}

TEST_CASE("Leibniz differential") {
    const DGASpec c2 = two_chord_spec(R(1), R(3, 2), TwoChordCase::dA_equals_a);
    const Word A = c2.word_from_ids({"A"});
    const Word a = c2.word_from_ids({"a"});
    CHECK(apply_differential(c2, A) == Polynomial{a});
    CHECK(apply_differential(c2, apply_differential(c2, A)).empty());

    const DGASpec tf = two_fiber_spec(R(2));
    CHECK(apply_differential(tf, tf.word_from_ids({"a", "b", "a"})).empty());
    CHECK(apply_differential(tf, Word{}).empty());

    // d(xy) = d(x) y + x d(y)
    std::vector<Chord> ch{chord("x", 0, 0, R(1)), chord("y", 0, 0, R(2)), chord("z", 0, 0, R(3))};
    IdDifferential d{{"z", {{"x", "x", "x"}}}, {"y", {{"x"}}}};
    const DGASpec s("leibniz", ch, d);
    const Word yz = s.word_from_ids({"y", "z"});
    Polynomial expect{s.word_from_ids({"x", "z"}), s.word_from_ids({"y", "x", "x", "x"})};
    CHECK(apply_differential(s, yz) == expect);
}

TEST_CASE("polynomial toggling cancels") {
    Polynomial p;
    p.toggle({1, 2});
    p.toggle({1, 2});
    CHECK(p.empty());
    IdDifferential d{{"b", {{"a"}, {"a"}}}};
    const DGASpec s("cancel", {chord("a", 0, 1, R(1)), chord("b", 0, 1, R(2))}, d);
    CHECK(s.differential(1).empty());
}

TEST_CASE("validation") {
    CHECK(validate(two_fiber_spec(R(2))).valid());

    const DGASpec equal("eq", {chord("a", 0, 1, R(1)), chord("A", 0, 1, R(1))},
                        IdDifferential{{"A", {{"a"}}}});
    CHECK(validate(equal).has(Violation::Kind::action_not_lowered));

    const DGASpec mismatch("mm", {chord("g", 0, 1, R(3)), chord("h", 0, 0, R(1))},
                           IdDifferential{{"g", {{"h"}}}});
    CHECK(validate(mismatch).has(Violation::Kind::endpoint_mismatch));

    const DGASpec zero("zero", {chord("a", 0, 1, R(0))}, IdDifferential{});
    CHECK(validate(zero).has(Violation::Kind::non_positive_action));

    // d(c) = b with d(b) = a gives d^2 c = a != 0
    const DGASpec sq("sq", {chord("a", 0, 1, R(1)), chord("b", 0, 1, R(2)), chord("c", 0, 1, R(3))},
                     IdDifferential{{"b", {{"a"}}}, {"c", {{"b"}}}});
    CHECK(validate(sq).has(Violation::Kind::d_squared_nonzero));

    CHECK_THROWS_AS(DGASpec("dup", {chord("a", 0, 1, R(1)), chord("a", 0, 1, R(2))}, IdDifferential{}),
                    DuplicateChord);
    CHECK_THROWS_AS(DGASpec("unk", {chord("a", 0, 1, R(1))}, IdDifferential{{"q", {}}}), UnknownChord);
}

TEST_CASE("word enumeration") {
    const DGASpec tf = two_fiber_spec(R(2));
    auto ws = enumerate_words(tf, 0, 1, R(11));
    REQUIRE(ws.size() == 3);
    CHECK(tf.ids_of(ws[0].word) == std::vector<std::string>{"a"});
    CHECK(tf.ids_of(ws[1].word) == std::vector<std::string>{"a", "b", "a"});
    CHECK(tf.ids_of(ws[2].word) == std::vector<std::string>{"a", "b", "a", "b", "a"});
    CHECK(actions(ws) == std::vector<Action>{R(2), R(6), R(10)});

    auto st = enumerate_words(stabilized_two_fiber_spec(R(2)), 0, 1, R(7));
    CHECK(st.size() == 10);
    CHECK(std::count_if(st.begin(), st.end(), [](auto& w) { return w.action == 2; }) == 2);
    CHECK(std::count_if(st.begin(), st.end(), [](auto& w) { return w.action == 6; }) == 8);

    CHECK(enumerate_words(tf, 0, 1, R(2)).empty());
    CHECK(enumerate_words(stabilized_two_fiber_spec(R(3)), 0, 1, R(4)).size() == 2);
    CHECK_THROWS_AS(enumerate_words(stabilized_two_fiber_spec(R(1)), 0, 1, R(30), 100), BudgetExceeded);
}

TEST_CASE("canonical order is (action, length, ids)") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const DGASpec s = random_valid_spec(seed, {.max_chords = 5});
        auto ws = enumerate_words(s, 0, 1, R(3));
        for (std::size_t k = 1; k < ws.size(); ++k) CHECK(canonical_less(s, ws[k - 1], ws[k]));
        CHECK(ws.size() == oracle::words01(s, R(3)).size());
    }
}

TEST_CASE("lch barcodes of the worked examples") {
    auto tf = lch_barcode(two_fiber_spec(R(2)), R(11));
    CHECK(tf.certified_infinite);
    CHECK(tf.barcode.bars() == std::vector<Bar>{{R(2), Death::infinite(), 1},
                                                 {R(6), Death::infinite(), 1},
                                                 {R(10), Death::infinite(), 1}});
    auto st = lch_barcode(stabilized_two_fiber_spec(R(2)), R(7));
    CHECK(st.certified_infinite);
    CHECK(st.barcode.bars() ==
          std::vector<Bar>{{R(2), Death::infinite(), 2}, {R(6), Death::infinite(), 8}});

    auto c2 = lch_barcode(two_chord_spec(R(1), R(3, 2), TwoChordCase::dA_equals_a), R(4));
    CHECK(c2.barcode.bars() == std::vector<Bar>{{R(1), Death::finite(R(3, 2)), 1}});
    auto c1 = lch_barcode(two_chord_spec(R(1), R(3, 2), TwoChordCase::dA_zero), R(4));
    CHECK(c1.certified_infinite);
    CHECK(c1.barcode.bars() ==
          std::vector<Bar>{{R(1), Death::infinite(), 1}, {R(3, 2), Death::infinite(), 1}});
    CHECK(l_min_s(c2.barcode, R(7, 5)).value == R(1));

    auto one = lch_barcode(two_fiber_spec(R(1)), R(8));
    std::vector<Action> births;
    for (const Bar& b : one.barcode.bars()) births.push_back(b.birth);
    CHECK(births == std::vector<Action>{R(1), R(3), R(5), R(7)});

    CHECK(certify_infinite(two_fiber_spec(R(2))));
    CHECK_FALSE(certify_infinite(two_chord_spec(R(1), R(3, 2), TwoChordCase::dA_equals_a)));
    CHECK(certify_infinite(two_chord_spec(R(1), R(3, 2), TwoChordCase::dA_zero)));

    const DGASpec bad("bad", {chord("a", 0, 1, R(1)), chord("A", 0, 1, R(1))}, IdDifferential{{"A", {{"a"}}}});
    CHECK_THROWS_AS(lch_barcode(bad, R(3)), ValidationFailed);
    CHECK_THROWS_AS(lch_barcode(stabilized_two_fiber_spec(R(1)), R(30), {.basis_cap = 50}), BudgetExceeded);
}

TEST_CASE("rescaling the contact form") {
    auto tf = lch_barcode(two_fiber_spec(R(2)), R(11));
    auto half = rescale_form(tf, R(1, 2));
    std::vector<Action> births;
    for (const Bar& b : half.barcode.bars()) births.push_back(b.birth);
    CHECK(births == std::vector<Action>{R(1), R(3), R(5)});
    CHECK(rescale_form(tf, R(1)).barcode == tf.barcode);
    auto c2 = lch_barcode(two_chord_spec(R(1), R(3, 2), TwoChordCase::dA_equals_a), R(4));
    CHECK(rescale_form(c2, R(2)).barcode.bars() == std::vector<Bar>{{R(2), Death::finite(R(3)), 1}});
}

TEST_CASE("truncation coherence") {
    // bars of A_r computed directly agree with the A_R result cut at r
    for (std::uint64_t seed = 100; seed < 130; ++seed) {
        const DGASpec s = random_valid_spec(seed, {.max_chords = 6});
        const Action big = R(4), small = R(5, 2);
        Barcode hi, lo;
        try {
            hi = lch_barcode(s, big, {.basis_cap = 4000}).barcode;
            lo = lch_barcode(s, small, {.basis_cap = 4000}).barcode;
        } catch (const BudgetExceeded&) {
            continue;
        }
        for (Action t = R(1, 4); t < small; t += R(1, 8))
            for (Action u = t; u < small; u += R(1, 8)) CHECK(rank_between(hi, t, u) == rank_between(lo, t, u));
    }
}

TEST_CASE("Morse circle construction") {
    using K = CriticalKind;
    CircleMorseData two{{{K::min, R(1, 5)}, {K::max, R(4, 5)}}};
    const DGASpec s2 = morse_circle_spec(two);
    CHECK(validate(s2).valid());
    const Barcode expect2({{R(1, 5), Death::infinite(), 1}, {R(4, 5), Death::infinite(), 1}});
    CHECK(morse_sublevel_oracle(two) == expect2);
    CHECK(lch_barcode(s2, R(2)).barcode.bars() == expect2.bars());

    CircleMorseData four{{{K::min, R(1, 10)}, {K::max, R(9, 10)}, {K::min, R(3, 10)}, {K::max, R(3, 5)}}};
    const Barcode expect4({{R(1, 10), Death::infinite(), 1},
                           {R(3, 10), Death::finite(R(3, 5)), 1},
                           {R(9, 10), Death::infinite(), 1}});
    CHECK(morse_sublevel_oracle(four) == expect4);
    CHECK(lch_barcode(morse_circle_spec(four), R(2)).barcode.bars() == expect4.bars());

    auto shifted = lch_barcode(morse_circle_spec(two, R(3)), R(5)).barcode;
    CHECK(shifted.bars() ==
          std::vector<Bar>{{R(16, 5), Death::infinite(), 1}, {R(19, 5), Death::infinite(), 1}});

    CHECK_THROWS_AS(check_circle_data({{{K::min, R(1)}, {K::min, R(2)}}}), InvalidAlternation);
    CHECK_THROWS_AS(check_circle_data({{{K::min, R(3)}, {K::max, R(2)}}}), NonAdmissibleValues);

    std::mt19937_64 rng(3);
    for (int k = 0; k < 30; ++k) {
        const CircleMorseData d = random_circle_data(rng);
        const Barcode b = morse_sublevel_oracle(d);
        // one loop bar, born at the global max, infinite
        Action top = 0;
        for (const auto& p : d.points) top = std::max(top, p.value);
        CHECK(std::count_if(b.bars().begin(), b.bars().end(), [&](const Bar& x) {
                  return x.birth == top && x.death.is_infinite();
              }) == 1);
    }
}

TEST_CASE("stabilization") {
    CHECK(stabilize_zero_diff(two_fiber_spec(R(2)), R(0)).same_algebra(stabilized_two_fiber_spec(R(2))));
    const DGASpec st = stabilize_zero_diff(two_fiber_spec(R(2)), R(1, 100));
    CHECK(validate(st).valid());
    std::set<Action> acts;
    for (const auto& c : st.chords()) acts.insert(c.action);
    CHECK(acts == std::set<Action>{R(2), R(201, 100)});
    CHECK(is_stably_homologically_bonded(two_fiber_spec(R(2)), R(7)) == Bondedness::yes);
    CHECK(is_stably_homologically_bonded(two_chord_spec(R(1), R(3, 2), TwoChordCase::dA_zero), R(4)) ==
          Bondedness::yes);
    CHECK_THROWS_AS(is_stably_homologically_bonded(two_chord_spec(R(1), R(3, 2), TwoChordCase::dA_equals_a), R(4)),
                    NonzeroDifferential);
    CHECK_THROWS_AS(stabilize_zero_diff(two_chord_spec(R(1), R(3, 2), TwoChordCase::dA_equals_a), R(0)),
                    NonzeroDifferential);
}

TEST_CASE("random specs against the dense oracle") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        const DGASpec s = random_valid_spec(seed, {.max_chords = 6});
        REQUIRE(validate(s).valid());
        const Action rmax = R(3);
        const auto dense = oracle::complex01(s, rmax);
        if (dense.actions.size() > 200) continue;
        const Barcode b = lch_barcode(s, rmax).barcode;
        Barcode brute = oracle::brute_barcode(dense, rmax);
        // promote censoring to infinity exactly where the engine certified it
        if (certify_infinite(s) || complete_below(s, rmax)) {
            std::vector<Bar> v = brute.bars();
            for (Bar& x : v)
                if (x.death.is_censored()) x.death = Death::infinite();
            brute = Barcode(v, rmax);
        }
        CHECK(b == brute);
    }
}
