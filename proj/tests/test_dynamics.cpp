#include "doctest.h"

#include "lchpm/dynamics.hpp"

#include <cmath>

using namespace lchpm;
using namespace lchpm::dyn;

namespace {

SampleSpec window2() {
    SampleSpec s;
    s.window_lo = {-1, -2};
    s.window_hi = {3, 2};
    s.window_points = 5;
    return s;
}

ShootingGrid fiber_grid(std::size_t directions, std::size_t radii, double step) {
    ShootingGrid g;
    g.source_sampling = window2();
    g.source_sampling.directions = directions;
    g.source_sampling.radii = radii;
    g.step = step;
    return g;
}

}  // namespace

TEST_CASE("free flow integration") {
    PhasePoint x{{1, 0}, {0, 0}};
    auto tr = integrate(Hamiltonian::free(2), x, 0, 2, 1e-3);
    const auto end = PhasePoint::from_state(tr.states.back());
    CHECK(std::abs(end.q[0] - 2) < 1e-9);
    CHECK(std::abs(end.q[1]) < 1e-9);
    CHECK(end.p == std::vector<double>{1, 0});
    CHECK(tr.times.back() == doctest::Approx(2).epsilon(1e-15));
}

TEST_CASE("constant potential matches free flow") {
    PhasePoint x{{0.3, -0.7}, {0.1, 0.2}};
    auto a = integrate(Hamiltonian::free(2), x, 0, 1.5, 1e-2).states.back();
    auto b = integrate(Hamiltonian::mechanical(2, constant_potential(4)), x, 0, 1.5, 1e-2).states.back();
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-12);
}

TEST_CASE("time reversal") {
    const Hamiltonian H = Hamiltonian::mechanical(2, cos_product_potential(0.3));
    PhasePoint x{{1.2, 0.4}, {0.1, -0.3}};
    auto fwd = integrate(H, x, 0, 3, 1e-3).states.back();
    auto back = integrate(H, PhasePoint::from_state(fwd), 3, 0, 1e-3).states.back();
    const auto x0 = x.state();
    for (std::size_t i = 0; i < x0.size(); ++i) CHECK(std::abs(back[i] - x0[i]) < 1e-6);
}

TEST_CASE("energy conservation") {
    SUBCASE("mechanical") {
        const Hamiltonian H = Hamiltonian::mechanical(2, cos_product_potential(0.3));
        PhasePoint x{{1.5, 0.5}, {0.2, 0.1}};
        const double e0 = H.value(x.state(), 0);
        for (const auto& s : integrate(H, x, 0, 10, 1e-3).states) CHECK(std::abs(H.value(s, 0) - e0) < 1e-8);
    }
    SUBCASE("lift of a constant contact Hamiltonian") {
        const Hamiltonian H = Hamiltonian::homogeneous_lift(2, constant_contact(1));
        PhasePoint x{{0.6, 0.8}, {0, 0}};
        for (const auto& s : integrate(H, x, 0, 5, 1e-2).states) {
            CHECK(std::hypot(s[0], s[1]) == doctest::Approx(1).epsilon(1e-12));
        }
    }
}

TEST_CASE("delta separation on shells") {
    auto d = delta_separation(Hamiltonian::free(2), MomentumShell{1}, MomentumShell{3}, window2());
    CHECK(std::abs(d.value - 4) < 1e-6);
    auto z = delta_separation(Hamiltonian::mechanical(2, constant_potential(0)), MomentumShell{1},
                              MomentumShell{1}, window2());
    CHECK(z.value == doctest::Approx(0));
    auto sw = delta_separation(Hamiltonian::free(2), MomentumShell{3}, MomentumShell{1}, window2());
    CHECK(std::abs(sw.value + 4) < 1e-6);
}

TEST_CASE("find_chord on the free fiber pair") {
    const Hamiltonian H = Hamiltonian::free(2);
    const RegionDef X0 = FiberSegment{{0, 0}, 1, 3};
    const RegionDef X1 = FiberSegment{{2, 0}, 1, 3};
    auto r = find_chord(H, X0, X1, 3, fiber_grid(64, 9, 1e-3), 1e-6);
    REQUIRE(r.found);
    CHECK(r.T <= 2.0 / 3 + 1e-6);
    CHECK(r.T == doctest::Approx(2.0 / 3).epsilon(1e-3));

    // re-check at half the step: the chord time does not drift
    auto fine = find_chord(H, X0, X1, 3, fiber_grid(64, 9, 5e-4), 1e-6);
    REQUIRE(fine.found);
    CHECK(std::abs(fine.T - r.T) < 1e-4);

    CHECK_THROWS_AS(find_chord(H, X0, X0, 3, fiber_grid(8, 3, 1e-2), 1e-6), std::invalid_argument);

    auto none = find_chord(H, MomentumShell{1}, MomentumShell{3}, 2, fiber_grid(8, 3, 1e-2), 1e-6);
    CHECK_FALSE(none.found);
}

TEST_CASE("free chord converges as the grid refines") {
    const Hamiltonian H = Hamiltonian::free(2);
    const RegionDef X0 = FiberSegment{{0, 0}, 1, 3};
    const RegionDef X1 = FiberSegment{{2, 0}, 1, 3};
    double prev = 1e9;
    for (std::size_t dirs : {6, 16, 64}) {
        auto r = find_chord(H, X0, X1, 3, fiber_grid(dirs, 5, 1e-3), 1e-6);
        REQUIRE(r.found);
        const double err = std::abs(r.T - 2.0 / 3);
        CHECK(err <= prev + 1e-9);
        prev = err;
    }
    CHECK(prev < 1e-3);
}

TEST_CASE("verify_bound") {
    ChordResult r;
    r.found = true;
    r.T = 2.0 / 3;
    CHECK(verify_bound(r, 1.0, 0).pass);
    r.T = 1.01;
    CHECK_FALSE(verify_bound(r, 1.0, 0).pass);
    r.T = 1.0005;
    CHECK(verify_bound(r, 1.0, 1e-3).pass);
    CHECK(verify_bound(r, Rational(1), 1e-3).pass);
    ChordResult missing;
    CHECK_THROWS_AS(verify_bound(missing, 1.0, 0), ChordMissing);
}

TEST_CASE("Maupertuis chord in flat and constant metrics") {
    auto flat = maupertuis_chord(constant_potential(0), 0.5, {0, 0}, {2, 0}, 32);
    REQUIRE(flat.found);
    CHECK(flat.T == doctest::Approx(2).epsilon(1e-6));
    auto k = maupertuis_chord(constant_potential(1), 3, {0, 0}, {2, 0}, 32);
    REQUIRE(k.found);
    CHECK(k.T == doctest::Approx(2 / std::sqrt(4.0)).epsilon(1e-6));
}

TEST_CASE("Maupertuis chord agrees with a 4x denser path") {
    auto U = cos_product_potential(0.3);
    auto coarse = maupertuis_chord(U, 2, {0, 0}, {2, 0}, 32);
    auto dense = maupertuis_chord(U, 2, {0, 0}, {2, 0}, 128);
    REQUIRE(coarse.found);
    REQUIRE(dense.found);
    CHECK(std::abs(coarse.T - dense.T) / dense.T < 0.05);
}

TEST_CASE("conformal factor") {
    std::vector<PhasePoint> starts{{{1, 0}, {0, 0}}, {{0, 1}, {0.5, 0}}};
    auto reeb = conformal_factor_track(constant_contact(1), starts, 5, 1e-2);
    CHECK(std::abs(reeb.max_ratio - 1) < 1e-12);
    CHECK(std::abs(reeb.min_ratio - 1) < 1e-12);
    // H = |P| u(q) is conserved, so |P(t)| / |P(0)| = u(q(0)) / u(q(t)); the ratio grows
    // monotonically here, so its maximum is the value at the horizon
    const ContactHamiltonian h = bump_pair_contact({0, 0}, {2, 0}, 0.8);
    const PhasePoint s0{{-1, 0}, {2.16, 0}};
    auto bump = conformal_factor_track(h, {s0}, 20, 1e-3);
    auto tr = integrate(Hamiltonian::homogeneous_lift(2, h), s0, 0, 20, 1e-3);
    const auto end = PhasePoint::from_state(tr.states.back());
    const std::vector<double> th{-1, 0};
    const double closed = h.value(th, s0.q) / h.value(th, end.q);
    CHECK(bump.max_ratio > 10);
    CHECK(bump.max_ratio == doctest::Approx(closed).epsilon(1e-6));
}
