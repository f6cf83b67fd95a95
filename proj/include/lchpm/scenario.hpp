#pragma once

// Scenario files: a Hamiltonian, the regions X0, X1, Y0, Y1 around two base
// points, a shooting grid and a bound recipe. `run_verify` computes the bound
// from the algebra, searches for a chord and compares.

#include "lchpm/bounds.hpp"
#include "lchpm/catalog.hpp"
#include "lchpm/dynamics.hpp"
#include "lchpm/filtered_lch.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lchpm::scenario {

struct BoundRecipe {
    enum class Kind { autonomous, timedep };
    Kind kind = Kind::autonomous;
    /// Generator producing the pair whose l_min (or stabilized l_hat) is used.
    std::string generator;
    GeneratorParams params;
    Action rmax;
    /// Only for timedep.
    Rational e;
};

struct MaupertuisOracle {
    double energy = 0;
    std::size_t nodes = 64;
    /// Relative agreement required between the two chord times.
    double agreement = 0.05;
    dyn::MaupertuisOptions options;
};

struct ChordScenario {
    dyn::Hamiltonian H;
    /// Set when H = base + epsilon sin(2 pi t) g; lets callers vary epsilon.
    std::optional<dyn::Hamiltonian> base;
    std::optional<dyn::Potential> perturbation;
    double epsilon = 0;
    /// Position potential for mechanical H (used by the energy source and the oracle).
    std::optional<dyn::Potential> potential;

    std::vector<double> x0, x1;
    Rational s_minus, s_plus;
    dyn::RegionDef source, target, Y0, Y1;
    dyn::SampleSpec sampling;
    /// Upper limit of |p| when sampling the energy window for |dH/dt|.
    double p_max = 0;
    dyn::ShootingGrid grid;
    double horizon = 1;
    double tol = 1e-6;
    std::optional<BoundRecipe> bound;
    double slack = 0;
    std::optional<MaupertuisOracle> oracle;

    /// Same scenario with H rebuilt for another epsilon (time-periodic only).
    dyn::Hamiltonian hamiltonian_with(double eps) const;
};

struct ConformalScenario {
    dyn::ContactHamiltonian h;
    std::size_t n = 2;
    std::vector<dyn::PhasePoint> starts;
    double horizon = 1;
    double step = 1e-2;
    double reference_step = 1e-3;
    /// Pass iff the max ratio exceeds this (frozen from the reference run).
    std::optional<double> threshold;
    /// Pass iff every ratio stays within 1 +- this.
    std::optional<double> stays_within;
};

struct Scenario {
    std::string name;
    std::string note;
    std::optional<ChordScenario> chord;
    std::optional<ConformalScenario> conformal;
};

/// Strict schema; throws io::ParseError with line/column.
Scenario parse_scenario(std::string_view text);

struct BoundEvaluation {
    bounds::BoundReport report;
    dyn::DeltaMeasurement delta_measured;
    /// Measured delta rounded down to a rational.
    Rational delta;
    LMinResult l_min;
    Rational ratio;
    std::optional<double> c_min, c_max, sup_dHdt;
};

/// Throws bounds::NotSeparating when the measured delta is <= 0.
BoundEvaluation evaluate_bound(const ChordScenario& s, const dyn::Hamiltonian& H,
                               const LCHOptions& lch = {});

/// Bisection for the epsilon at which the time-dependent gate flips from
/// applicable to not applicable. Empty if the gate never closes below `eps_cap`.
std::optional<double> epsilon_threshold(const ChordScenario& s, double eps_cap = 16.0,
                                        const LCHOptions& lch = {});

struct Row {
    std::string key;
    std::string value;
};

struct Outcome {
    bool pass = false;
    std::vector<Row> rows;
    std::string summary;
};

struct RunOptions {
    unsigned threads = 1;
    LCHOptions lch;
    /// Skip the bound and only report the chord search.
    bool search_only = false;
};

Outcome run_verify(const Scenario& s, const RunOptions& options = {});

/// Start points around `center` at distance `offset`, momentum pointing at the center.
std::vector<dyn::PhasePoint> inward_starts(const std::vector<double>& center, double offset,
                                           std::size_t count);

std::string format_outcome(const Outcome& o);

}  // namespace lchpm::scenario
