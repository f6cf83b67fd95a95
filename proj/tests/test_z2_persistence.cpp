#include "doctest.h"
#include "oracles.hpp"

#include "lchpm/persistence.hpp"
#include "lchpm/z2_linalg.hpp"

#include <random>

using namespace lchpm;
using z2::Z2Column;

namespace {

Rational R(long p, long q = 1) { return Rational(p, q); }

Barcode bars(std::vector<Bar> b, std::optional<Action> trunc = std::nullopt) {
    return Barcode(std::move(b), std::move(trunc));
}

Bar fin(Rational b, Rational d, std::size_t m = 1) { return {b, Death::finite(d), m}; }
Bar inf(Rational b, std::size_t m = 1) { return {b, Death::infinite(), m}; }
Bar cens(Rational b, Rational at, std::size_t m = 1) { return {b, Death::censored(at), m}; }

std::vector<Z2Column> random_matrix(std::mt19937_64& rng, std::size_t n, double density) {
    std::bernoulli_distribution coin(density);
    std::vector<Z2Column> cols;
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<std::size_t> e;
        for (std::size_t i = 0; i < j; ++i)
            if (coin(rng)) e.push_back(i);
        cols.emplace_back(e);
    }
    return cols;
}

}  // namespace

TEST_CASE("column addition") {
    CHECK(Z2Column{1, 3} + Z2Column{3, 5} == Z2Column{1, 5});
    CHECK(Z2Column{} + Z2Column{2} == Z2Column{2});
    CHECK((Z2Column{4} + Z2Column{4}).empty());
    CHECK_THROWS_AS(Z2Column({3, 1}), std::invalid_argument);
    CHECK(Z2Column{0, 7}.low() == 7u);
    CHECK_FALSE(Z2Column{}.low().has_value());
}

TEST_CASE("reduce small instances") {
    SUBCASE("empty") {
        auto r = z2::reduce({});
        CHECK(r.pairings.empty());
        CHECK(r.essentials.empty());
    }
    SUBCASE("single pair") {
        std::vector<Z2Column> c{Z2Column{}, Z2Column{0}};
        auto r = z2::reduce(c);
        CHECK(r.pairings == std::map<std::size_t, std::size_t>{{1, 0}});
    }
    SUBCASE("hand reduction 4x4") {
        std::vector<Z2Column> c{Z2Column{}, Z2Column{}, Z2Column{0, 1}, Z2Column{0, 1}};
        auto r = z2::reduce(c);
        CHECK(r.pairings == std::map<std::size_t, std::size_t>{{2, 1}});
        CHECK(r.columns[3].empty());
        CHECK(r.essentials == std::vector<std::size_t>{0, 3});
    }
    SUBCASE("filtration violation") {
        std::vector<Z2Column> c{Z2Column{0}};
        CHECK_THROWS_AS(z2::reduce(c), z2::FiltrationViolation);
    }
}

TEST_CASE("rank examples") {
    CHECK(z2::rank(std::vector<Z2Column>{Z2Column{}, Z2Column{}}) == 0);
    CHECK(z2::rank(std::vector<Z2Column>{Z2Column{0}, Z2Column{1}, Z2Column{2}}) == 3);
    CHECK(z2::rank(std::vector<Z2Column>{Z2Column{0, 1}, Z2Column{0, 1}}) == 1);
}

TEST_CASE("reduction properties on random matrices") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 1 + rng() % 14;
        auto cols = random_matrix(rng, n, 0.3);
        auto r = z2::reduce(cols);
        // pivots are distinct
        std::set<std::size_t> lows;
        for (auto [j, i] : r.pairings) {
            CHECK(i < j);
            CHECK(lows.insert(i).second);
        }
        // rank equals the number of pairings and the dense rank
        std::vector<oracle::Bits> dense;
        for (const auto& c : cols) {
            oracle::Bits b(n, 0);
            for (auto i : c.entries()) b[i] = 1;
            dense.push_back(b);
        }
        CHECK(z2::rank(cols) == r.pairings.size());
        CHECK(oracle::dense_rank(dense) == r.pairings.size());
        // reducing the reduced matrix changes nothing
        auto again = z2::reduce(r.columns);
        CHECK(again.pairings == r.pairings);
        CHECK(again.essentials == r.essentials);
        // essentials are exactly the zero columns that are never a pivot row
        for (std::size_t j = 0; j < n; ++j) {
            const bool ess = r.columns[j].empty() && !lows.contains(j);
            CHECK(ess == std::binary_search(r.essentials.begin(), r.essentials.end(), j));
        }
    }
}

TEST_CASE("barcode canonical form") {
    Barcode b = bars({inf(R(2)), fin(R(1), R(3, 2)), fin(R(1), R(3, 2)), fin(R(4), R(4))});
    REQUIRE(b.bars().size() == 2);
    CHECK(b.bars()[0] == fin(R(1), R(3, 2), 2));
    CHECK(b.bars()[1] == inf(R(2)));
    CHECK(b.total_multiplicity() == 3);
    CHECK_THROWS_AS(bars({fin(R(0), R(1))}), InvalidBar);
    CHECK_THROWS_AS(bars({fin(R(2), R(1))}), InvalidBar);
    CHECK_THROWS_AS(bars({cens(R(2), R(2))}), InvalidBar);
}

TEST_CASE("barcode from filtered complex") {
    SUBCASE("two-chord case 2") {
        std::vector<FilteredGenerator> basis{{"a", R(1)}, {"A", R(3, 2)}};
        std::vector<Z2Column> d{Z2Column{}, Z2Column{0}};
        CHECK(barcode_from_filtered_complex(basis, d, R(4)) == bars({fin(R(1), R(3, 2))}, R(4)));
    }
    SUBCASE("two-fiber words, censored") {
        std::vector<FilteredGenerator> basis{{"a", R(2)}, {"aba", R(6)}, {"ababa", R(10)}};
        std::vector<Z2Column> d(3);
        CHECK(barcode_from_filtered_complex(basis, d, R(11)) ==
              bars({cens(R(2), R(11)), cens(R(6), R(11)), cens(R(10), R(11))}, R(11)));
    }
    SUBCASE("empty") {
        CHECK(barcode_from_filtered_complex({}, {}, R(3)).empty());
    }
    SUBCASE("action not lowered") {
        std::vector<FilteredGenerator> basis{{"a", R(1)}, {"b", R(1)}};
        std::vector<Z2Column> d{Z2Column{}, Z2Column{0}};
        CHECK_THROWS_AS(barcode_from_filtered_complex(basis, d, R(4)), ActionNotLowered);
    }
    SUBCASE("basis past the truncation") {
        std::vector<FilteredGenerator> basis{{"a", R(5)}};
        std::vector<Z2Column> d(1);
        CHECK_THROWS_AS(barcode_from_filtered_complex(basis, d, R(4)), std::invalid_argument);
    }
}

TEST_CASE("rank_between") {
    Barcode b = bars({fin(R(1), R(3, 2))});
    CHECK(rank_between(b, R(5, 4), R(5, 4)) == 1);
    CHECK(rank_between(b, R(5, 4), R(2)) == 0);
    Barcode fiber = bars({inf(R(2)), inf(R(6)), inf(R(10))});
    CHECK(rank_between(fiber, R(7), R(9)) == 2);
    Barcode cut = bars({cens(R(2), R(11))}, R(11));
    CHECK(rank_between(cut, R(3), R(11)) == 1);
    CHECK_THROWS_AS(rank_between(cut, R(3), R(12)), BeyondTruncation);
}

TEST_CASE("shifts") {
    CHECK(multiplicative_shift(bars({inf(R(2))}), R(2)) == bars({inf(R(1))}));
    Barcode b = bars({fin(R(1), R(3, 2)), inf(R(5))});
    CHECK(multiplicative_shift(b, R(1)) == b);
    CHECK(multiplicative_shift(bars({fin(R(1), R(3, 2))}), R(1, 2)) == bars({fin(R(2), R(3))}));

    CHECK(additive_shift(bars({fin(R(3), R(5))}), R(1)) == bars({fin(R(2), R(4))}));
    CHECK(additive_shift(bars({fin(R(3), R(5))}), R(0)) == bars({fin(R(3), R(5))}));
    std::vector<Bar> dropped;
    CHECK(additive_shift(bars({fin(R(1), R(3, 2))}), R(3, 2), &dropped).empty());
    CHECK(dropped.size() == 1);
}

TEST_CASE("l_min and bondedness") {
    Barcode b = bars({fin(R(1), R(3, 2))});
    CHECK(l_min_s(b, R(6, 5)).value == R(1));
    CHECK(l_min_s(b, R(3, 2)).value.is_infinite());
    CHECK(l_min_s(Barcode{}, R(2)).value.is_infinite());
    CHECK(l_min_s(bars({inf(R(2)), inf(R(6))}), ExtendedRational::infinity()).value == R(2));
    CHECK_THROWS(l_min_s(b, R(1)));

    // a censored bar below the answer makes it uncertain
    auto u = l_min_s(bars({cens(R(1), R(3, 2)), fin(R(2), R(10))}), R(2));
    CHECK(u.uncertain);

    CHECK(is_homologically_bonded(bars({inf(R(1))})) == Bondedness::yes);
    CHECK(is_homologically_bonded(b) == Bondedness::no);
    CHECK(is_homologically_bonded(bars({cens(R(1), R(10))})) == Bondedness::unknown);
}

TEST_CASE("shift laws on random barcodes") {
    std::mt19937_64 rng(5);
    auto rnd = [&](long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); };
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Bar> v;
        const int n = static_cast<int>(rnd(0, 6));
        for (int k = 0; k < n; ++k) {
            Rational birth(rnd(1, 40), 4);
            if (rnd(0, 2) == 0)
                v.push_back(inf(birth));
            else
                v.push_back(fin(birth, birth + Rational(rnd(1, 40), 4)));
        }
        Barcode b(v);
        Rational c(rnd(1, 9), rnd(1, 9));
        Rational d(rnd(1, 9), rnd(1, 9));
        CHECK(multiplicative_shift(multiplicative_shift(b, c), d) == multiplicative_shift(b, c * d));
        CHECK(multiplicative_shift(multiplicative_shift(b, c), 1 / c) == b);
        CHECK(additive_shift(additive_shift(b, c), d) == additive_shift(b, c + d));

        // l_min,s is monotone non-decreasing in s, and scales with c
        ExtendedRational prev = l_min_s(b, Rational(101, 100)).value;
        for (long s = 2; s < 12; ++s) {
            ExtendedRational cur = l_min_s(b, Rational(s)).value;
            CHECK(prev <= cur);
            prev = cur;
        }
        ExtendedRational l = l_min_s(b, Rational(2)).value;
        ExtendedRational ls = l_min_s(multiplicative_shift(b, c), Rational(2)).value;
        if (l.is_finite())
            CHECK(ls == ExtendedRational(l.value() / c));
        else
            CHECK(ls.is_infinite());
    }
}
