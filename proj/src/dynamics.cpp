#include "lchpm/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

namespace lchpm::dyn {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double norm(std::span<const double> v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double distance(std::span<const double> a, std::span<const double> b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

std::span<const double> momenta(std::span<const double> x) { return x.first(x.size() / 2); }
std::span<const double> positions(std::span<const double> x) { return x.last(x.size() / 2); }

// exp(1 - 1/(1 - s^2)) for s = r/radius < 1, and its r-derivative.
double bump_profile(double r, double radius, double* derivative) {
    const double s = r / radius;
    if (s >= 1.0) {
        if (derivative) *derivative = 0;
        return 0;
    }
    const double w = 1.0 - s * s;
    const double b = std::exp(1.0 - 1.0 / w);
    if (derivative) *derivative = -b * 2.0 * s / (radius * w * w);
    return b;
}

}  // namespace

State PhasePoint::state() const {
    State x(p.begin(), p.end());
    x.insert(x.end(), q.begin(), q.end());
    return x;
}

PhasePoint PhasePoint::from_state(std::span<const double> x) {
    const std::size_t n = x.size() / 2;
    return {std::vector<double>(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n)),
            std::vector<double>(x.begin() + static_cast<std::ptrdiff_t>(n), x.end())};
}

void Potential::eval_gradient(std::span<const double> q, std::span<double> grad) const {
    if (gradient) {
        gradient(q, grad);
        return;
    }
    std::vector<double> probe(q.begin(), q.end());
    for (std::size_t i = 0; i < q.size(); ++i) {
        probe[i] = q[i] + fd_step;
        const double up = value(probe);
        probe[i] = q[i] - fd_step;
        const double down = value(probe);
        probe[i] = q[i];
        grad[i] = (up - down) / (2 * fd_step);
    }
}

Potential constant_potential(double k) {
    return {"constant",
            [k](std::span<const double>) { return k; },
            [](std::span<const double>, std::span<double> g) { std::fill(g.begin(), g.end(), 0.0); },
            1e-6};
}

Potential cos_product_potential(double amplitude) {
    Potential U;
    U.name = "cos_product";
    U.value = [amplitude](std::span<const double> q) {
        double v = amplitude;
        for (double qi : q) v *= std::cos(qi);
        return v;
    };
    U.gradient = [amplitude](std::span<const double> q, std::span<double> g) {
        for (std::size_t i = 0; i < q.size(); ++i) {
            double v = -amplitude * std::sin(q[i]);
            for (std::size_t j = 0; j < q.size(); ++j)
                if (j != i) v *= std::cos(q[j]);
            g[i] = v;
        }
    };
    return U;
}

Potential bump_potential(std::vector<double> center, double radius) {
    if (radius <= 0) throw std::invalid_argument("bump radius must be positive");
    Potential g;
    g.name = "bump";
    g.value = [center, radius](std::span<const double> q) {
        return bump_profile(distance(q, center), radius, nullptr);
    };
    g.gradient = [center, radius](std::span<const double> q, std::span<double> grad) {
        const double r = distance(q, center);
        double dr = 0;
        bump_profile(r, radius, &dr);
        for (std::size_t i = 0; i < q.size(); ++i)
            grad[i] = r > 0 ? dr * (q[i] - center[i]) / r : 0.0;
    };
    return g;
}

ContactHamiltonian constant_contact(double c) {
    ContactHamiltonian h;
    h.name = "constant";
    h.value = [c](std::span<const double>, std::span<const double>) { return c; };
    h.gradient = [](std::span<const double>, std::span<const double>, std::span<double> dt,
                    std::span<double> dq) {
        std::fill(dt.begin(), dt.end(), 0.0);
        std::fill(dq.begin(), dq.end(), 0.0);
    };
    return h;
}

ContactHamiltonian position_contact(Potential u) {
    ContactHamiltonian h;
    h.name = "position:" + u.name;
    h.value = [u](std::span<const double>, std::span<const double> q) { return u.value(q); };
    h.gradient = [u](std::span<const double>, std::span<const double> q, std::span<double> dt,
                     std::span<double> dq) {
        std::fill(dt.begin(), dt.end(), 0.0);
        u.eval_gradient(q, dq);
    };
    return h;
}

ContactHamiltonian bump_pair_contact(std::vector<double> x0, std::vector<double> x1, double radius) {
    Potential near0 = bump_potential(x0, radius);
    Potential near1 = bump_potential(x1, radius);
    Potential u;
    u.name = "bump_pair";
    u.value = [near0, near1](std::span<const double> q) {
        return near0.value(q) - 2.0 * near1.value(q);
    };
    u.gradient = [near0, near1](std::span<const double> q, std::span<double> g) {
        std::vector<double> g1(q.size());
        near0.eval_gradient(q, g);
        near1.eval_gradient(q, g1);
        for (std::size_t i = 0; i < q.size(); ++i) g[i] -= 2.0 * g1[i];
    };
    ContactHamiltonian h = position_contact(std::move(u));
    h.name = "bump_pair";
    return h;
}

Hamiltonian Hamiltonian::free(std::size_t n) {
    if (n == 0) throw std::invalid_argument("dimension must be at least 1");
    Hamiltonian H;
    H.n_ = n;
    H.family_ = "free";
    H.value_ = [n](std::span<const double> x, double) {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
        return 0.5 * s;
    };
    H.gradient_ = [n](std::span<const double> x, double, std::span<double> g) {
        for (std::size_t i = 0; i < n; ++i) {
            g[i] = x[i];
            g[n + i] = 0;
        }
    };
    H.dt_ = [](std::span<const double>, double) { return 0.0; };
    return H;
}

Hamiltonian Hamiltonian::mechanical(std::size_t n, Potential U) {
    Hamiltonian H = free(n);
    H.family_ = "mechanical:" + U.name;
    H.value_ = [n, U](std::span<const double> x, double) {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
        return 0.5 * s + U.value(x.subspan(n, n));
    };
    H.gradient_ = [n, U](std::span<const double> x, double, std::span<double> g) {
        for (std::size_t i = 0; i < n; ++i) g[i] = x[i];
        U.eval_gradient(x.subspan(n, n), g.subspan(n, n));
    };
    return H;
}

Hamiltonian Hamiltonian::homogeneous_lift(std::size_t n, ContactHamiltonian h) {
    if (n == 0) throw std::invalid_argument("dimension must be at least 1");
    Hamiltonian H;
    H.n_ = n;
    H.family_ = "homogeneous_lift:" + h.name;
    H.value_ = [n, h](std::span<const double> x, double) {
        const double r = norm(x.first(n));
        std::vector<double> theta(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n));
        for (double& c : theta) c /= r;
        return r * h.value(theta, x.subspan(n, n));
    };
    H.gradient_ = [n, h](std::span<const double> x, double, std::span<double> g) {
        const double r = norm(x.first(n));
        std::vector<double> theta(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n));
        for (double& c : theta) c /= r;
        std::span<const double> q = x.subspan(n, n);
        std::vector<double> gt(n), gq(n);
        if (h.gradient) {
            h.gradient(theta, q, gt, gq);
        } else {
            std::vector<double> tp = theta, qp(q.begin(), q.end());
            for (std::size_t i = 0; i < n; ++i) {
                tp[i] = theta[i] + h.fd_step;
                double up = h.value(tp, q);
                tp[i] = theta[i] - h.fd_step;
                double down = h.value(tp, q);
                tp[i] = theta[i];
                gt[i] = (up - down) / (2 * h.fd_step);
                qp[i] = q[i] + h.fd_step;
                up = h.value(theta, qp);
                qp[i] = q[i] - h.fd_step;
                down = h.value(theta, qp);
                qp[i] = q[i];
                gq[i] = (up - down) / (2 * h.fd_step);
            }
        }
        const double hv = h.value(theta, q);
        const double radial = dot(theta, gt);
        for (std::size_t i = 0; i < n; ++i) {
            g[i] = hv * theta[i] + gt[i] - radial * theta[i];
            g[n + i] = r * gq[i];
        }
    };
    H.dt_ = [](std::span<const double>, double) { return 0.0; };
    return H;
}

Hamiltonian Hamiltonian::time_periodic(Hamiltonian base, double epsilon, Potential g) {
    Hamiltonian H = base;
    const std::size_t n = base.n_;
    H.autonomous_ = false;
    H.family_ = "time_periodic:" + base.family_ + "+" + g.name;
    H.value_ = [base, epsilon, g, n](std::span<const double> x, double t) {
        return base.value(x, t) + epsilon * std::sin(kTwoPi * t) * g.value(x.subspan(n, n));
    };
    H.gradient_ = [base, epsilon, g, n](std::span<const double> x, double t, std::span<double> out) {
        base.gradient_(x, t, out);
        std::vector<double> gg(n);
        g.eval_gradient(x.subspan(n, n), gg);
        const double amp = epsilon * std::sin(kTwoPi * t);
        for (std::size_t i = 0; i < n; ++i) out[n + i] += amp * gg[i];
    };
    H.dt_ = [base, epsilon, g, n](std::span<const double> x, double t) {
        return base.time_derivative(x, t) +
               kTwoPi * epsilon * std::cos(kTwoPi * t) * g.value(x.subspan(n, n));
    };
    return H;
}

double Hamiltonian::value(std::span<const double> x, double t) const { return value_(x, t); }

void Hamiltonian::vector_field(std::span<const double> x, double t, std::span<double> out) const {
    gradient_(x, t, out);
    for (std::size_t i = 0; i < n_; ++i) {
        const double dHdp = out[i];
        out[i] = -out[n_ + i];
        out[n_ + i] = dHdp;
    }
}

double Hamiltonian::time_derivative(std::span<const double> x, double t) const { return dt_(x, t); }

void rk4_step(const Hamiltonian& H, std::span<const double> x, double t, double h,
              std::span<double> out) {
    const std::size_t m = x.size();
    std::vector<double> k1(m), k2(m), k3(m), k4(m), y(m);
    H.vector_field(x, t, k1);
    for (std::size_t i = 0; i < m; ++i) y[i] = x[i] + 0.5 * h * k1[i];
    H.vector_field(y, t + 0.5 * h, k2);
    for (std::size_t i = 0; i < m; ++i) y[i] = x[i] + 0.5 * h * k2[i];
    H.vector_field(y, t + 0.5 * h, k3);
    for (std::size_t i = 0; i < m; ++i) y[i] = x[i] + h * k3[i];
    H.vector_field(y, t + h, k4);
    for (std::size_t i = 0; i < m; ++i)
        out[i] = x[i] + h * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]) / 6.0;
}

Trajectory integrate(const Hamiltonian& H, const PhasePoint& x0, double t0, double t1, double step) {
    if (!(step > 0)) throw std::invalid_argument("step must be positive");
    if (x0.p.size() != H.dim() || x0.q.size() != H.dim())
        throw std::invalid_argument("phase point dimension does not match the Hamiltonian");
    Trajectory traj;
    State x = x0.state();
    traj.times.push_back(t0);
    traj.states.push_back(x);
    const double span = t1 - t0;
    const auto steps = static_cast<std::size_t>(std::ceil(std::abs(span) / step - 1e-12));
    State next(x.size());
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = t0 + span * static_cast<double>(k) / static_cast<double>(steps);
        const double te = t0 + span * static_cast<double>(k + 1) / static_cast<double>(steps);
        rk4_step(H, x, t, te - t, next);
        if (!all_finite(next))
            throw NonFinite("state became non-finite at t = " + std::to_string(te));
        x.swap(next);
        traj.times.push_back(te);
        traj.states.push_back(x);
    }
    return traj;
}

void check_region(const RegionDef& r) {
    if (const auto* f = std::get_if<FiberSegment>(&r)) {
        if (!(f->s_lo > 0) || f->s_hi < f->s_lo)
            throw std::invalid_argument("fiber segment needs 0 < s_lo <= s_hi");
        if (f->x.empty()) throw std::invalid_argument("fiber segment needs a base point");
    } else if (const auto* s = std::get_if<MomentumShell>(&r)) {
        if (!(s->s > 0)) throw std::invalid_argument("momentum shell radius must be positive");
    } else {
        const auto& c = std::get<CustomRegion>(r);
        if (!c.contains || !c.distance)
            throw std::invalid_argument("custom region needs a predicate and a distance");
    }
}

double region_distance(const RegionDef& r, std::span<const double> x) {
    if (const auto* f = std::get_if<FiberSegment>(&r)) {
        const double dq = distance(positions(x), f->x);
        const double pn = norm(momenta(x));
        const double dp = pn < f->s_lo ? f->s_lo - pn : (pn > f->s_hi ? pn - f->s_hi : 0.0);
        return std::sqrt(dq * dq + dp * dp);
    }
    if (const auto* s = std::get_if<MomentumShell>(&r)) return std::abs(norm(momenta(x)) - s->s);
    return std::get<CustomRegion>(r).distance(x);
}

std::optional<double> region_signed_distance(const RegionDef& r, std::span<const double> x) {
    if (const auto* s = std::get_if<MomentumShell>(&r)) return norm(momenta(x)) - s->s;
    return std::nullopt;
}

bool region_contains(const RegionDef& r, std::span<const double> x, double tol) {
    if (const auto* c = std::get_if<CustomRegion>(&r)) return c->contains(x, tol);
    return region_distance(r, x) <= tol;
}

std::vector<std::vector<double>> sphere_directions(std::size_t n, std::size_t count) {
    std::vector<std::vector<double>> dirs;
    if (n == 1) return {{1.0}, {-1.0}};
    if (n == 2) {
        for (std::size_t k = 0; k < count; ++k) {
            const double a = kTwoPi * static_cast<double>(k) / static_cast<double>(count);
            dirs.push_back({std::cos(a), std::sin(a)});
        }
        return dirs;
    }
    for (std::size_t i = 0; i < n && dirs.size() < count; ++i)
        for (double sgn : {1.0, -1.0}) {
            std::vector<double> e(n, 0.0);
            e[i] = sgn;
            dirs.push_back(e);
        }
    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> gauss;
    while (dirs.size() < count) {
        std::vector<double> v(n);
        for (double& c : v) c = gauss(rng);
        const double r = norm(v);
        for (double& c : v) c /= r;
        dirs.push_back(v);
    }
    return dirs;
}

namespace {

std::vector<std::vector<double>> window_grid(std::size_t n, const SampleSpec& spec) {
    if (spec.window_lo.size() != n || spec.window_hi.size() != n)
        throw EmptySample("sampling window missing or of wrong dimension");
    const std::size_t m = std::max<std::size_t>(spec.window_points, 1);
    std::vector<std::vector<double>> out{{}};
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::vector<double>> next;
        for (const auto& prefix : out)
            for (std::size_t k = 0; k < m; ++k) {
                auto v = prefix;
                const double f = m == 1 ? 0.5 : static_cast<double>(k) / static_cast<double>(m - 1);
                v.push_back(spec.window_lo[i] + f * (spec.window_hi[i] - spec.window_lo[i]));
                next.push_back(std::move(v));
            }
        out = std::move(next);
    }
    return out;
}

std::vector<double> radii(double lo, double hi, std::size_t count) {
    if (lo == hi || count <= 1) return {hi};
    std::vector<double> r;
    for (std::size_t k = 0; k < count; ++k)
        r.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1));
    return r;
}

State make_state(const std::vector<double>& p, std::span<const double> q) {
    State x(p.begin(), p.end());
    x.insert(x.end(), q.begin(), q.end());
    return x;
}

}  // namespace

std::vector<State> sample_region(const RegionDef& r, std::size_t n, const SampleSpec& spec) {
    check_region(r);
    std::vector<State> out;
    const auto dirs = sphere_directions(n, spec.directions);
    if (const auto* f = std::get_if<FiberSegment>(&r)) {
        if (f->x.size() != n) throw std::invalid_argument("fiber base point has wrong dimension");
        for (double s : radii(f->s_lo, f->s_hi, spec.radii))
            for (const auto& d : dirs) {
                std::vector<double> p(d);
                for (double& c : p) c *= s;
                out.push_back(make_state(p, f->x));
            }
    } else if (const auto* sh = std::get_if<MomentumShell>(&r)) {
        for (const auto& q : window_grid(n, spec))
            for (const auto& d : dirs) {
                std::vector<double> p(d);
                for (double& c : p) c *= sh->s;
                out.push_back(make_state(p, q));
            }
    } else {
        const auto& c = std::get<CustomRegion>(r);
        if (c.sample) out = c.sample();
    }
    if (out.empty()) throw EmptySample("region produced no samples");
    return out;
}

namespace {

std::vector<double> time_slices(const Hamiltonian& H, std::size_t count) {
    if (H.autonomous() || count <= 1) return {0.0};
    std::vector<double> ts;
    for (std::size_t k = 0; k < count; ++k) ts.push_back(static_cast<double>(k) / static_cast<double>(count));
    return ts;
}

}  // namespace

DeltaMeasurement delta_separation(const Hamiltonian& H, const RegionDef& Y0, const RegionDef& Y1,
                                  const SampleSpec& sampling) {
    const auto s0 = sample_region(Y0, H.dim(), sampling);
    const auto s1 = sample_region(Y1, H.dim(), sampling);
    const auto ts = time_slices(H, sampling.times);
    DeltaMeasurement m{0, std::numeric_limits<double>::infinity(),
                       -std::numeric_limits<double>::infinity(), 0};
    for (double t : ts) {
        for (const State& x : s1) m.inf_on_Y1 = std::min(m.inf_on_Y1, H.value(x, t));
        for (const State& x : s0) m.sup_on_Y0 = std::max(m.sup_on_Y0, H.value(x, t));
    }
    m.samples = (s0.size() + s1.size()) * ts.size();
    m.value = m.inf_on_Y1 - m.sup_on_Y0;
    return m;
}

double sup_abs_time_derivative(const Hamiltonian& H, double lo, double hi, double p_max,
                               const SampleSpec& sampling) {
    const std::size_t n = H.dim();
    const auto qs = window_grid(n, sampling);
    const auto dirs = sphere_directions(n, sampling.directions);
    const auto rs = radii(0.0, p_max, std::max<std::size_t>(sampling.radii, 2));
    const auto ts = time_slices(H, std::max<std::size_t>(sampling.times, 2));
    double sup = 0;
    std::size_t used = 0;
    for (const auto& q : qs)
        for (double r : rs)
            for (const auto& d : dirs) {
                std::vector<double> p(d);
                for (double& c : p) c *= r;
                const State x = make_state(p, q);
                for (double t : ts) {
                    const double v = H.value(x, t);
                    if (v < lo || v > hi) continue;
                    ++used;
                    sup = std::max(sup, std::abs(H.time_derivative(x, t)));
                }
            }
    if (used == 0) throw EmptySample("no sample falls inside the energy window");
    return sup;
}

namespace {

struct Shot {
    bool hit = false;
    double T = std::numeric_limits<double>::infinity();
    double residual = std::numeric_limits<double>::infinity();  // closest approach
    State end;
};

// State at time t_base + tau, obtained by one RK4 step of length tau.
State advance(const Hamiltonian& H, const State& base, double t_base, double tau) {
    State out(base.size());
    if (tau == 0) return base;
    rk4_step(H, base, t_base, tau, out);
    return out;
}

Shot shoot(const Hamiltonian& H, const State& start, double t0, double horizon, double step,
           const RegionDef& target, double tol) {
    Shot shot;
    const auto steps = static_cast<std::size_t>(std::ceil(horizon / step - 1e-12));
    const double h = horizon / static_cast<double>(steps);
    const bool hypersurface = region_signed_distance(target, start).has_value();

    State prev2, prev = start, cur(start.size());
    double d_prev2 = std::numeric_limits<double>::infinity();
    double d_prev = region_distance(target, start);
    double sd_prev = hypersurface ? *region_signed_distance(target, start) : 0.0;
    shot.residual = d_prev;

    for (std::size_t k = 1; k <= steps; ++k) {
        const double t_prev = t0 + h * static_cast<double>(k - 1);
        rk4_step(H, prev, t_prev, h, cur);
        if (!all_finite(cur)) return shot;
        const double d_cur = region_distance(target, cur);
        shot.residual = std::min(shot.residual, d_cur);

        if (hypersurface) {
            const double sd_cur = *region_signed_distance(target, cur);
            if ((sd_prev < 0) != (sd_cur < 0) || sd_cur == 0) {
                double a = 0, b = h;
                while (b - a > 1e-9) {
                    const double mid = 0.5 * (a + b);
                    const double sd_mid = *region_signed_distance(target, advance(H, prev, t_prev, mid));
                    if ((sd_mid < 0) == (sd_prev < 0) && sd_mid != 0) a = mid;
                    else b = mid;
                }
                State at = advance(H, prev, t_prev, b);
                const double d = region_distance(target, at);
                shot.residual = std::min(shot.residual, d);
                if (d <= tol) {
                    shot.hit = true;
                    shot.T = t_prev + b - t0;
                    shot.end = std::move(at);
                    return shot;
                }
            }
            sd_prev = sd_cur;
        } else if (k >= 2 && d_prev <= d_prev2 && d_prev <= d_cur) {
            // Local minimum near t_prev: golden-section search on [t_prev - h, t_prev + h].
            const double t_base = t_prev - h;
            auto state_at = [&](double tau) {
                return tau <= h ? advance(H, prev2, t_base, tau) : advance(H, prev, t_prev, tau - h);
            };
            auto f = [&](double tau) { return region_distance(target, state_at(tau)); };
            const double g = (std::sqrt(5.0) - 1.0) / 2.0;
            double a = 0, b = 2 * h;
            double c = b - g * (b - a), e = a + g * (b - a);
            double fc = f(c), fe = f(e);
            while (b - a > 1e-9) {
                if (fc < fe) {
                    b = e;
                    e = c;
                    fe = fc;
                    c = b - g * (b - a);
                    fc = f(c);
                } else {
                    a = c;
                    c = e;
                    fc = fe;
                    e = a + g * (b - a);
                    fe = f(e);
                }
            }
            const double tau = 0.5 * (a + b);
            State at = state_at(tau);
            const double d = region_distance(target, at);
            shot.residual = std::min(shot.residual, d);
            if (d <= tol) {
                shot.hit = true;
                shot.T = t_base + tau - t0;
                shot.end = std::move(at);
                return shot;
            }
        }
        prev2 = prev;
        d_prev2 = d_prev;
        prev = cur;
        d_prev = d_cur;
    }
    return shot;
}

bool regions_intersect(const RegionDef& a, const RegionDef& b, std::size_t n, const SampleSpec& spec,
                       double tol) {
    const auto* fa = std::get_if<FiberSegment>(&a);
    const auto* fb = std::get_if<FiberSegment>(&b);
    const auto* sa = std::get_if<MomentumShell>(&a);
    const auto* sb = std::get_if<MomentumShell>(&b);
    if (fa && fb) return distance(fa->x, fb->x) <= tol && fa->s_lo <= fb->s_hi + tol && fb->s_lo <= fa->s_hi + tol;
    if (sa && sb) return std::abs(sa->s - sb->s) <= tol;
    if (fa && sb) return sb->s >= fa->s_lo - tol && sb->s <= fa->s_hi + tol;
    if (sa && fb) return sa->s >= fb->s_lo - tol && sa->s <= fb->s_hi + tol;
    for (const State& x : sample_region(a, n, spec))
        if (region_contains(b, x, tol)) return true;
    return false;
}

struct StartParams {
    std::vector<double> direction;
    double radius = 0;
    double t0 = 0;
};

State fiber_state(const FiberSegment& f, const StartParams& s) {
    std::vector<double> p(s.direction);
    for (double& c : p) c *= s.radius;
    return make_state(p, f.x);
}

// Orthonormal basis of the tangent space of the sphere at `dir`.
std::vector<std::vector<double>> tangent_basis(const std::vector<double>& dir) {
    const std::size_t n = dir.size();
    std::vector<std::vector<double>> basis;
    for (std::size_t i = 0; i < n && basis.size() + 1 < n; ++i) {
        std::vector<double> v(n, 0.0);
        v[i] = 1.0;
        double c = dot(v, dir);
        for (std::size_t j = 0; j < n; ++j) v[j] -= c * dir[j];
        for (const auto& b : basis) {
            c = dot(v, b);
            for (std::size_t j = 0; j < n; ++j) v[j] -= c * b[j];
        }
        const double r = norm(v);
        if (r < 1e-8) continue;
        for (double& x : v) x /= r;
        basis.push_back(v);
    }
    return basis;
}

}  // namespace

ChordResult find_chord(const Hamiltonian& H, const RegionDef& source, const RegionDef& target,
                       double horizon, const ShootingGrid& grid, double tol) {
    if (!(horizon > 0)) throw std::invalid_argument("horizon must be positive");
    if (!(grid.step > 0)) throw std::invalid_argument("step must be positive");
    check_region(source);
    check_region(target);
    const std::size_t n = H.dim();
    if (regions_intersect(source, target, n, grid.source_sampling, tol))
        throw std::invalid_argument("source and target regions are not disjoint");

    const std::vector<State> starts = sample_region(source, n, grid.source_sampling);
    std::vector<double> t0s{0.0};
    if (!H.autonomous() && grid.t0_samples > 1) {
        t0s.clear();
        for (std::size_t k = 0; k < grid.t0_samples; ++k)
            t0s.push_back(static_cast<double>(k) / static_cast<double>(grid.t0_samples));
    }

    struct Job {
        State start;
        double t0;
    };
    std::vector<Job> jobs;
    for (double t0 : t0s)
        for (const State& s : starts) jobs.push_back({s, t0});

    std::vector<Shot> shots(jobs.size());
    auto run_range = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t k = begin; k < jobs.size(); k += stride)
            shots[k] = shoot(H, jobs[k].start, jobs[k].t0, horizon, grid.step, target, tol);
    };
    const unsigned threads = std::max(1u, grid.threads);
    if (threads == 1) {
        run_range(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < threads; ++w) pool.emplace_back(run_range, w, threads);
        for (auto& th : pool) th.join();
    }
    std::size_t shot_count = jobs.size();

    // Minimal T over grid hits; ties resolved by grid index.
    std::optional<std::size_t> best;
    for (std::size_t k = 0; k < shots.size(); ++k)
        if (shots[k].hit && (!best || shots[k].T < shots[*best].T)) best = k;

    State best_start;
    double best_t0 = 0;
    Shot best_shot;
    if (best) {
        best_start = jobs[*best].start;
        best_t0 = jobs[*best].t0;
        best_shot = shots[*best];
    }

    // Local pattern search from the closest near misses (fiber sources only).
    if (const auto* fiber = std::get_if<FiberSegment>(&source); fiber && grid.refine_candidates > 0) {
        std::vector<std::size_t> order;
        for (std::size_t k = 0; k < shots.size(); ++k)
            if (!shots[k].hit && std::isfinite(shots[k].residual)) order.push_back(k);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return shots[a].residual < shots[b].residual || (shots[a].residual == shots[b].residual && a < b);
        });
        if (order.size() > grid.refine_candidates) order.resize(grid.refine_candidates);

        const double angle_step = kTwoPi / static_cast<double>(std::max<std::size_t>(grid.source_sampling.directions, 4));
        const double radius_step =
            grid.source_sampling.radii > 1 ? (fiber->s_hi - fiber->s_lo) / static_cast<double>(grid.source_sampling.radii - 1) : 0.0;
        const double t0_step = t0s.size() > 1 ? 1.0 / static_cast<double>(t0s.size()) : 0.0;

        for (std::size_t k : order) {
            const State& s = jobs[k].start;
            StartParams cur;
            cur.radius = norm(momenta(s));
            cur.direction.assign(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(n));
            for (double& c : cur.direction) c /= cur.radius;
            cur.t0 = jobs[k].t0;
            Shot cur_shot = shots[k];
            double da = angle_step, dr = radius_step, dt = t0_step;
            for (std::size_t it = 0; it < grid.refine_iterations && !cur_shot.hit; ++it) {
                bool improved = false;
                std::vector<StartParams> trials;
                for (const auto& e : tangent_basis(cur.direction))
                    for (double sgn : {1.0, -1.0}) {
                        StartParams t = cur;
                        for (std::size_t j = 0; j < n; ++j) t.direction[j] += sgn * da * e[j];
                        const double r = norm(t.direction);
                        for (double& c : t.direction) c /= r;
                        trials.push_back(t);
                    }
                if (dr > 0)
                    for (double sgn : {1.0, -1.0}) {
                        StartParams t = cur;
                        t.radius = std::clamp(cur.radius + sgn * dr, fiber->s_lo, fiber->s_hi);
                        trials.push_back(t);
                    }
                if (dt > 0)
                    for (double sgn : {1.0, -1.0}) {
                        StartParams t = cur;
                        t.t0 = cur.t0 + sgn * dt;
                        trials.push_back(t);
                    }
                for (const StartParams& t : trials) {
                    Shot sh = shoot(H, fiber_state(*fiber, t), t.t0, horizon, grid.step, target, tol);
                    ++shot_count;
                    if (sh.hit || sh.residual < cur_shot.residual) {
                        cur = t;
                        cur_shot = sh;
                        improved = true;
                        if (sh.hit) break;
                    }
                }
                if (!improved) {
                    da *= 0.5;
                    dr *= 0.5;
                    dt *= 0.5;
                    if (da < 1e-13 && dr < 1e-13) break;
                }
            }
            if (cur_shot.hit && (!best_shot.hit || cur_shot.T < best_shot.T)) {
                best_shot = cur_shot;
                best_start = fiber_state(*fiber, cur);
                best_t0 = cur.t0;
            }
        }
    }

    ChordResult result;
    result.shots = shot_count;
    result.provenance = "starts=" + std::to_string(starts.size()) + " t0_samples=" +
                        std::to_string(t0s.size()) + " horizon=" + std::to_string(horizon) +
                        " step=" + std::to_string(grid.step) + " tol=" + std::to_string(tol);
    if (!best_shot.hit) {
        double closest = std::numeric_limits<double>::infinity();
        for (const Shot& s : shots) closest = std::min(closest, s.residual);
        result.end_residual = closest;
        result.provenance += " (search exhausted)";
        return result;
    }
    result.found = true;
    result.start = PhasePoint::from_state(best_start);
    result.t0 = best_t0;
    result.T = best_shot.T;
    result.end_residual = region_distance(target, best_shot.end);
    result.trajectory = integrate(H, result.start, best_t0, best_t0 + best_shot.T, grid.step);
    return result;
}

VerifyReport verify_bound(const ChordResult& result, double bound, double slack) {
    if (!result.found) throw ChordMissing("no chord to verify");
    VerifyReport r;
    r.T = result.T;
    r.bound = bound;
    r.slack = slack;
    r.pass = result.T <= bound * (1.0 + slack);
    return r;
}

VerifyReport verify_bound(const ChordResult& result, const Rational& bound, double slack) {
    return verify_bound(result, to_double_up(bound), slack);
}

namespace {

// Sum over segments of sqrt(C - U(midpoint)) |dq|.
double jacobi_length(const Potential& U, double C, const std::vector<std::vector<double>>& path) {
    double total = 0;
    const std::size_t n = path.front().size();
    std::vector<double> mid(n);
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        for (std::size_t i = 0; i < n; ++i) mid[i] = 0.5 * (path[k][i] + path[k + 1][i]);
        const double w = C - U.value(mid);
        if (!(w > 0)) return std::numeric_limits<double>::infinity();
        total += std::sqrt(w) * distance(path[k], path[k + 1]);
    }
    return total;
}

void equalize_arclength(std::vector<std::vector<double>>& path) {
    const std::size_t m = path.size();
    std::vector<double> s(m, 0.0);
    for (std::size_t k = 1; k < m; ++k) s[k] = s[k - 1] + distance(path[k - 1], path[k]);
    const auto old = path;
    std::size_t seg = 0;
    for (std::size_t k = 1; k + 1 < m; ++k) {
        const double target = s.back() * static_cast<double>(k) / static_cast<double>(m - 1);
        while (seg + 2 < m && s[seg + 1] < target) ++seg;
        const double len = s[seg + 1] - s[seg];
        const double f = len > 0 ? (target - s[seg]) / len : 0.0;
        for (std::size_t i = 0; i < path[k].size(); ++i)
            path[k][i] = old[seg][i] + f * (old[seg + 1][i] - old[seg][i]);
    }
}

}  // namespace

ChordResult maupertuis_chord(const Potential& U, double C, const std::vector<double>& x0,
                             const std::vector<double>& x1, std::size_t nodes,
                             const MaupertuisOptions& options) {
    const std::size_t n = x0.size();
    if (n == 0 || x1.size() != n) throw std::invalid_argument("endpoints must share a positive dimension");
    if (nodes < 2) throw std::invalid_argument("need at least two path nodes");
    if (!(C - U.value(x0) > 0) || !(C - U.value(x1) > 0))
        throw std::invalid_argument("energy must exceed the potential at the endpoints");

    std::vector<std::vector<double>> path(nodes, std::vector<double>(n));
    for (std::size_t k = 0; k < nodes; ++k)
        for (std::size_t i = 0; i < n; ++i)
            path[k][i] = x0[i] + (x1[i] - x0[i]) * static_cast<double>(k) / static_cast<double>(nodes - 1);

    // Normal-projected, Laplacian-preconditioned gradient descent on interior
    // nodes, followed by equal-arclength reparametrization (string method).
    double J = jacobi_length(U, C, path);
    double alpha = 1.0;
    bool converged = nodes == 2;
    std::vector<double> mid(n), gU(n);
    for (std::size_t it = 0; it < options.max_iterations && !converged; ++it) {
        std::vector<std::vector<double>> grad(nodes, std::vector<double>(n, 0.0));
        for (std::size_t k = 0; k + 1 < nodes; ++k) {
            for (std::size_t i = 0; i < n; ++i) mid[i] = 0.5 * (path[k][i] + path[k + 1][i]);
            const double w2 = C - U.value(mid);
            const double w = std::sqrt(w2);
            U.eval_gradient(mid, gU);
            const double len = distance(path[k], path[k + 1]);
            for (std::size_t i = 0; i < n; ++i) {
                const double dw = -gU[i] / (2.0 * w);
                const double unit = len > 0 ? (path[k + 1][i] - path[k][i]) / len : 0.0;
                grad[k][i] += 0.5 * dw * len - w * unit;
                grad[k + 1][i] += 0.5 * dw * len + w * unit;
            }
        }
        double gnorm2 = 0;
        for (std::size_t k = 1; k + 1 < nodes; ++k) {
            std::vector<double> tangent(n);
            for (std::size_t i = 0; i < n; ++i) tangent[i] = path[k + 1][i] - path[k - 1][i];
            const double tn = norm(tangent);
            if (tn > 0) {
                const double c = dot(grad[k], tangent) / (tn * tn);
                for (std::size_t i = 0; i < n; ++i) grad[k][i] -= c * tangent[i];
            }
            gnorm2 += dot(grad[k], grad[k]);
        }
        if (std::sqrt(gnorm2) < options.gradient_tol) {
            converged = true;
            break;
        }
        // Solve tridiag(-1, 2, -1) z = grad per coordinate (Thomas algorithm).
        const std::size_t m = nodes - 2;
        std::vector<std::vector<double>> z(nodes, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> cp(m), dp(m);
            for (std::size_t k = 0; k < m; ++k) {
                const double denom = 2.0 - (k > 0 ? -cp[k - 1] * -1.0 : 0.0);
                cp[k] = -1.0 / denom;
                dp[k] = (grad[k + 1][i] + (k > 0 ? dp[k - 1] : 0.0)) / denom;
            }
            for (std::size_t k = m; k-- > 0;)
                z[k + 1][i] = dp[k] - cp[k] * (k + 1 < m ? z[k + 2][i] : 0.0);
        }
        double slope = 0;
        for (std::size_t k = 1; k + 1 < nodes; ++k) slope += dot(grad[k], z[k]);
        alpha = std::min(alpha * 2.0, 1e6);
        bool accepted = false;
        std::vector<std::vector<double>> trial;
        double J_trial = J;
        while (alpha > 1e-16) {
            trial = path;
            for (std::size_t k = 1; k + 1 < nodes; ++k)
                for (std::size_t i = 0; i < n; ++i) trial[k][i] -= alpha * z[k][i];
            J_trial = jacobi_length(U, C, trial);
            if (J_trial <= J - 1e-4 * alpha * slope) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            converged = true;  // no descent possible at machine precision
            break;
        }
        equalize_arclength(trial);
        const double J_new = jacobi_length(U, C, trial);
        path = std::move(trial);
        if (std::abs(J - J_new) <= 1e-15 * std::abs(J)) converged = true;
        J = J_new;
    }
    if (!converged)
        throw NoConvergence("Jacobi-length descent did not converge in " +
                            std::to_string(options.max_iterations) + " iterations");

    auto speed = [&](std::span<const double> q) { return std::sqrt(2.0 * (C - U.value(q))); };
    ChordResult result;
    double T = 0;
    result.trajectory.times.push_back(0.0);
    for (std::size_t k = 0; k < nodes; ++k) {
        std::vector<double> tangent(n);
        const std::size_t a = k == 0 ? 0 : k - 1, b = k + 1 < nodes ? k + 1 : k;
        for (std::size_t i = 0; i < n; ++i) tangent[i] = path[b][i] - path[a][i];
        const double tn = norm(tangent);
        std::vector<double> p(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = speed(path[k]) * tangent[i] / tn;
        result.trajectory.states.push_back(make_state(p, path[k]));
        if (k + 1 < nodes) {
            for (std::size_t i = 0; i < n; ++i) mid[i] = 0.5 * (path[k][i] + path[k + 1][i]);
            T += distance(path[k], path[k + 1]) / speed(mid);
            result.trajectory.times.push_back(T);
        }
    }
    // Second-order one-sided tangent at x0.
    std::vector<double> dir(n);
    for (std::size_t i = 0; i < n; ++i)
        dir[i] = nodes >= 3 ? -3.0 * path[0][i] + 4.0 * path[1][i] - path[2][i] : path[1][i] - path[0][i];
    const double dn = norm(dir);
    result.start.q = x0;
    result.start.p.resize(n);
    for (std::size_t i = 0; i < n; ++i) result.start.p[i] = speed(x0) * dir[i] / dn;
    result.T = T;
    result.t0 = 0;

    const Hamiltonian H = Hamiltonian::mechanical(n, U);
    const Trajectory check = integrate(H, result.start, 0.0, T, options.check_step);
    result.end_residual = distance(positions(check.states.back()), x1);
    result.found = result.end_residual <= options.endpoint_tol;
    result.shots = 1;
    result.provenance = "maupertuis nodes=" + std::to_string(nodes) + " C=" + std::to_string(C);
    return result;
}

ConformalReport conformal_factor_track(const ContactHamiltonian& h,
                                       const std::vector<PhasePoint>& starts, double horizon,
                                       double step, double floor) {
    if (starts.empty()) throw EmptySample("no start points");
    if (!(step > 0) || !(horizon > 0)) throw std::invalid_argument("step and horizon must be positive");
    const std::size_t n = starts.front().dim();
    const Hamiltonian H = Hamiltonian::homogeneous_lift(n, h);
    ConformalReport report;
    const auto steps = static_cast<std::size_t>(std::ceil(horizon / step - 1e-12));
    const double dt = horizon / static_cast<double>(steps);
    for (std::size_t s = 0; s < starts.size(); ++s) {
        State x = starts[s].state();
        const double r0 = norm(momenta(x));
        if (r0 < floor) throw HitZeroSection("start point lies on the zero section");
        State next(x.size());
        for (std::size_t k = 1; k <= steps; ++k) {
            rk4_step(H, x, dt * static_cast<double>(k - 1), dt, next);
            if (!all_finite(next)) throw NonFinite("lifted flow became non-finite");
            x.swap(next);
            const double r = norm(momenta(x));
            if (r < floor) throw HitZeroSection("|P| fell below the floor at t = " + std::to_string(dt * static_cast<double>(k)));
            const double ratio = r / r0;
            if (ratio > report.max_ratio) {
                report.max_ratio = ratio;
                report.argmax_start = s;
                report.argmax_time = dt * static_cast<double>(k);
            }
            report.min_ratio = std::min(report.min_ratio, ratio);
        }
    }
    return report;
}

}  // namespace lchpm::dyn
