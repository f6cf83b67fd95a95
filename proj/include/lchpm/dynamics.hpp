#pragma once

// Numerical verification harness for Hamiltonian chords in R^{2n}(p, q).
// Everything here is double precision; rational bounds enter only through
// verify_bound, rounded up.

#include "lchpm/rational.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace lchpm::dyn {

/// Flat phase-space state (p_1..p_n, q_1..q_n).
using State = std::vector<double>;

struct PhasePoint {
    std::vector<double> p;
    std::vector<double> q;

    std::size_t dim() const { return q.size(); }
    State state() const;
    static PhasePoint from_state(std::span<const double> x);
};

class NonFinite : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class EmptySample : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};
class ChordMissing : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};
class NoConvergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class HitZeroSection : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Scalar function of position with an optional analytic gradient; without
/// one, central differences with `fd_step` are used.
struct Potential {
    std::string name;
    std::function<double(std::span<const double> q)> value;
    std::function<void(std::span<const double> q, std::span<double> grad)> gradient;
    double fd_step = 1e-6;

    void eval_gradient(std::span<const double> q, std::span<double> grad) const;
};

Potential constant_potential(double k);
/// amplitude * prod_i cos(q_i)
Potential cos_product_potential(double amplitude);
/// Smooth bump exp(1 - 1/(1 - (r/radius)^2)) in r = |q - center|; peak 1.
Potential bump_potential(std::vector<double> center, double radius);

/// Contact Hamiltonian h(theta, q) on the unit cotangent bundle of R^n.
struct ContactHamiltonian {
    std::string name;
    std::function<double(std::span<const double> theta, std::span<const double> q)> value;
    /// Gradients of the extension of h to R^n x R^n; finite differences if empty.
    std::function<void(std::span<const double> theta, std::span<const double> q,
                       std::span<double> dtheta, std::span<double> dq)>
        gradient;
    double fd_step = 1e-6;
};

ContactHamiltonian constant_contact(double c);
/// h(theta, q) = u(q).
ContactHamiltonian position_contact(Potential u);
/// u(q) = bump(|q - x0|) - 2 bump(|q - x1|): nonnegative near x0, negative near x1.
ContactHamiltonian bump_pair_contact(std::vector<double> x0, std::vector<double> x1, double radius);

/// Hamiltonian on R^{2n} x S^1 with i_{sgrad H} omega = -dH, i.e.
/// dq/dt = dH/dp, dp/dt = -dH/dq.
class Hamiltonian {
public:
    /// |p|^2 / 2
    static Hamiltonian free(std::size_t n);
    /// |p|^2 / 2 + U(q)
    static Hamiltonian mechanical(std::size_t n, Potential U);
    /// |P| h(P/|P|, q), defined away from P = 0.
    static Hamiltonian homogeneous_lift(std::size_t n, ContactHamiltonian h);
    /// base + epsilon sin(2 pi t) g(q), period 1.
    static Hamiltonian time_periodic(Hamiltonian base, double epsilon, Potential g);

    std::size_t dim() const { return n_; }
    bool autonomous() const { return autonomous_; }
    const std::string& family() const { return family_; }

    double value(std::span<const double> x, double t) const;
    /// Writes (dp/dt, dq/dt).
    void vector_field(std::span<const double> x, double t, std::span<double> out) const;
    double time_derivative(std::span<const double> x, double t) const;

private:
    std::size_t n_ = 0;
    bool autonomous_ = true;
    std::string family_;
    std::function<double(std::span<const double>, double)> value_;
    // Writes (dH/dp, dH/dq).
    std::function<void(std::span<const double>, double, std::span<double>)> gradient_;
    std::function<double(std::span<const double>, double)> dt_;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
};

/// One classical RK4 step of size h (h may be negative).
void rk4_step(const Hamiltonian& H, std::span<const double> x, double t, double h,
              std::span<double> out);

/// Fixed-step RK4 from t0 to t1 (either direction); the last step is shortened
/// to land on t1. Throws NonFinite.
Trajectory integrate(const Hamiltonian& H, const PhasePoint& x0, double t0, double t1, double step);

struct FiberSegment {
    std::vector<double> x;
    double s_lo;
    double s_hi;
};

struct MomentumShell {
    double s;
};

struct CustomRegion {
    std::string name;
    std::function<bool(std::span<const double> x, double tol)> contains;
    std::function<double(std::span<const double> x)> distance;
    std::function<std::vector<State>()> sample;
};

using RegionDef = std::variant<FiberSegment, MomentumShell, CustomRegion>;

/// Throws std::invalid_argument on a malformed region.
void check_region(const RegionDef& r);

/// Euclidean-type distance from x to the region (0 inside).
double region_distance(const RegionDef& r, std::span<const double> x);
/// Signed distance for hypersurface regions (|p| - s for shells), otherwise empty.
std::optional<double> region_signed_distance(const RegionDef& r, std::span<const double> x);
bool region_contains(const RegionDef& r, std::span<const double> x, double tol);

struct SampleSpec {
    std::size_t directions = 32;
    std::size_t radii = 9;
    /// Position window for regions unbounded in q (shells).
    std::vector<double> window_lo;
    std::vector<double> window_hi;
    std::size_t window_points = 5;
    /// Time slices over one period for non-autonomous H.
    std::size_t times = 8;
};

/// Unit vectors on S^{n-1}: 2k/N angles for n = 2, +-1 for n = 1, and a
/// deterministic quasi-uniform set (including +-e_i) otherwise.
std::vector<std::vector<double>> sphere_directions(std::size_t n, std::size_t count);

std::vector<State> sample_region(const RegionDef& r, std::size_t n, const SampleSpec& spec);

struct DeltaMeasurement {
    double value;
    double inf_on_Y1;
    double sup_on_Y0;
    std::size_t samples;
};

/// inf over Y1 of H minus sup over Y0 of H on samples (and time slices).
DeltaMeasurement delta_separation(const Hamiltonian& H, const RegionDef& Y0, const RegionDef& Y1,
                                  const SampleSpec& sampling);

/// max |dH/dt| over sampled points with lo <= H <= hi; momenta sampled with
/// |p| <= p_max, positions on the sampling window.
double sup_abs_time_derivative(const Hamiltonian& H, double lo, double hi, double p_max,
                               const SampleSpec& sampling);

struct ShootingGrid {
    SampleSpec source_sampling;
    std::size_t t0_samples = 1;
    double step = 1e-3;
    /// Near misses passed to the local pattern search.
    std::size_t refine_candidates = 4;
    std::size_t refine_iterations = 400;
    unsigned threads = 1;
};

struct ChordResult {
    bool found = false;
    PhasePoint start;
    double t0 = 0;
    double T = 0;
    double end_residual = 0;
    Trajectory trajectory;
    std::size_t shots = 0;
    std::string provenance;
};

/// Shoots from samples of `source` and returns the hit with minimal time.
/// Hypersurface targets are detected by a sign change of the signed distance
/// and time bisection; other targets by local minima of the distance refined
/// by golden-section search. Throws std::invalid_argument if the regions
/// intersect.
ChordResult find_chord(const Hamiltonian& H, const RegionDef& source, const RegionDef& target,
                       double horizon, const ShootingGrid& grid, double tol);

struct VerifyReport {
    bool pass = false;
    double T = 0;
    double bound = 0;
    double slack = 0;
};

/// pass iff T <= bound (1 + slack). Throws ChordMissing when !result.found.
VerifyReport verify_bound(const ChordResult& result, double bound, double slack);
/// Bound rounded up to the next double first.
VerifyReport verify_bound(const ChordResult& result, const Rational& bound, double slack);

struct MaupertuisOptions {
    std::size_t max_iterations = 20000;
    double gradient_tol = 1e-10;
    /// RK4 step for re-integrating the lifted start point.
    double check_step = 1e-3;
    /// Residual accepted for the re-integrated endpoint.
    double endpoint_tol = 1e-2;
};

/// Minimizes the discrete Jacobi length sum sqrt(C - U) |dq| over paths from
/// x0 to x1 with `nodes` points (starting from the straight segment), lifts it
/// to {H = C} with |p| = sqrt(2 (C - U)), and re-integrates the flow from the
/// lifted start to measure the endpoint residual. Throws NoConvergence.
ChordResult maupertuis_chord(const Potential& U, double C, const std::vector<double>& x0,
                             const std::vector<double>& x1, std::size_t nodes,
                             const MaupertuisOptions& options = {});

struct ConformalReport {
    double max_ratio = 1;
    double min_ratio = 1;
    std::size_t argmax_start = 0;
    double argmax_time = 0;
};

/// Integrates the homogeneous lift of h from each start (|p| = 1) and tracks
/// |P(t)| / |P(0)|. Throws HitZeroSection when |P| drops below `floor`.
ConformalReport conformal_factor_track(const ContactHamiltonian& h,
                                       const std::vector<PhasePoint>& starts, double horizon,
                                       double step, double floor = 1e-8);

}  // namespace lchpm::dyn
