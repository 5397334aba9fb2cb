#include "quasiflow/evolve.hpp"

#include <algorithm>
#include <cmath>

namespace qf {

namespace {

int sign_of(int k) { return (k > 0) - (k < 0); }

std::vector<double> dispersive_phases(const TorusGrid& g, double alpha,
                                      DispersiveKind kind) {
    const int n = g.n_points;
    std::vector<double> phi(n);
    for (int i = 0; i < n; ++i) {
        const int k = mode_of_index(i, n);
        const double kk = static_cast<double>(k);
        const double mag = kind == DispersiveKind::homogeneous
                               ? std::pow(std::abs(kk), alpha)
                               : std::pow(1.0 + kk * kk, alpha / 2.0);
        phi[i] = sign_of(k) * mag;
    }
    return phi;
}

// dt = t_end / ceil(t_end / dt_base) so checkpoints land exactly on t_end.
int step_count(double t_end, double dt_base) {
    return std::max(1, static_cast<int>(std::ceil(t_end / dt_base - 1e-9)));
}

void check_finite(const std::vector<cx>& v, const char* what) {
    for (const cx& c : v)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw StepUnstable(std::string("non-finite state in ") + what);
}

// -(1/2) d/dx u^2 in Fourier space, dealiased; the Nyquist mode of the odd
// derivative is dropped to keep the update real.
struct BurgersRhs {
    TorusGrid grid;
    bool do_dealias = true;

    std::vector<cx> operator()(const std::vector<cx>& v) const {
        const int n = grid.n_points;
        std::vector<cx> phys(n);
        fft_backward(v, phys);
        for (cx& c : phys) c = cx(c.real() * c.real(), 0.0);
        std::vector<cx> sq(n);
        fft_forward_scaled(phys, sq);
        for (int i = 0; i < n; ++i) {
            const int k = mode_of_index(i, n);
            if ((do_dealias && std::abs(k) > grid.dealias_cutoff) ||
                std::abs(k) == n / 2) {
                sq[i] = cx(0.0, 0.0);
            } else {
                sq[i] *= cx(0.0, -0.5 * k);
            }
        }
        return sq;
    }
};

RealField field_of(const TorusGrid& g, const std::vector<cx>& v) {
    std::vector<cx> phys;
    fft_backward(v, phys);
    RealField u = RealField::zeros(g);
    for (int j = 0; j < g.n_points; ++j) u.samples[j] = phys[j].real();
    return u;
}

double sup_abs_derivative(const TorusGrid& g, const std::vector<cx>& v) {
    const int n = g.n_points;
    std::vector<cx> dv(n);
    for (int i = 0; i < n; ++i) {
        const int k = mode_of_index(i, n);
        dv[i] = std::abs(k) == n / 2 ? cx(0.0, 0.0)
                                     : v[i] * cx(0.0, static_cast<double>(k));
    }
    std::vector<cx> phys;
    fft_backward(dv, phys);
    double m = 0.0;
    for (const cx& c : phys) m = std::max(m, std::abs(c.real()));
    return m;
}

Trajectory ifrk4_solve(const RealField& u0, const std::vector<double>& phases,
                       double t_end, const SolverConfig& cfg) {
    if (t_end < 0.0) throw TimeOutOfRange("t_end must be >= 0");
    const TorusGrid& g = u0.grid;
    const int n = g.n_points;
    const BurgersRhs rhs{g, cfg.dealias};

    auto full_rhs_field = [&](const std::vector<cx>& v) {
        std::vector<cx> r = rhs(v);
        for (int i = 0; i < n; ++i) r[i] += cx(0.0, phases[i]) * v[i];
        return field_of(g, r);
    };

    Trajectory traj;
    traj.config = cfg;
    std::vector<cx> v(n);
    {
        Spectrum s = forward_transform(u0);
        v = s.coeffs;
    }
    traj.times.push_back(0.0);
    traj.states.push_back(u0);
    traj.derivs.push_back(full_rhs_field(v));
    if (t_end == 0.0) return traj;

    const double speed = std::max(1e-12, sup_norm(u0));
    const double dt_base = std::min(cfg.dt_max, cfg.cfl * g.dx() / speed);
    const int steps = step_count(t_end, dt_base);
    const double h = t_end / steps;
    traj.dt = h;

    std::vector<cx> Ea(n), Eb(n);
    for (int i = 0; i < n; ++i) {
        Ea[i] = std::polar(1.0, phases[i] * h / 2.0);
        Eb[i] = std::polar(1.0, phases[i] * h);
    }

    const double shock_threshold = 50.0 * sup_abs_derivative(g, v);

    std::vector<cx> k1, k2, k3, k4, tmp(n);
    for (int step = 1; step <= steps; ++step) {
        k1 = rhs(v);
        for (int i = 0; i < n; ++i) tmp[i] = Ea[i] * (v[i] + 0.5 * h * k1[i]);
        k2 = rhs(tmp);
        for (int i = 0; i < n; ++i) tmp[i] = Ea[i] * v[i] + 0.5 * h * k2[i];
        k3 = rhs(tmp);
        for (int i = 0; i < n; ++i) tmp[i] = Eb[i] * v[i] + Ea[i] * (h * k3[i]);
        k4 = rhs(tmp);
        for (int i = 0; i < n; ++i)
            v[i] = Eb[i] * v[i] +
                   (h / 6.0) * (Eb[i] * k1[i] + 2.0 * Ea[i] * (k2[i] + k3[i]) +
                                k4[i]);
        check_finite(v, "dispersive Burgers step");
        const double slope = sup_abs_derivative(g, v);
        if (slope > shock_threshold && shock_threshold > 0.0)
            throw ShockSuspected("sup|u_x| = " + std::to_string(slope) +
                                 " exceeds 50x initial at t = " +
                                 std::to_string(step * h));
        if (step % cfg.store_every == 0 || step == steps) {
            traj.times.push_back(step * h);
            traj.states.push_back(field_of(g, v));
            traj.derivs.push_back(full_rhs_field(v));
        }
    }
    return traj;
}

}  // namespace

RealField linear_propagate(const RealField& u0, double alpha, double t,
                           DispersiveKind kind) {
    return apply_multiplier(u0, multiplier_linear_phase(alpha, t, kind));
}

Trajectory solve_dispersive_burgers(const RealField& u0, double alpha,
                                    double t_end, const SolverConfig& cfg) {
    if (alpha < 0.0 || alpha > 2.0)
        throw InvalidOrder("dispersive order must lie in [0,2]");
    return ifrk4_solve(u0, dispersive_phases(u0.grid, alpha, cfg.dispersive_kind),
                       t_end, cfg);
}

Trajectory solve_burgers(const RealField& u0, double t_end,
                         const SolverConfig& cfg) {
    return ifrk4_solve(u0, std::vector<double>(u0.n(), 0.0), t_end, cfg);
}

VRule v_rule_first_component() {
    return [](double, const RealField& phi1, const RealField&) { return phi1; };
}

VRule v_rule_fixed(RealField w) {
    return [w = std::move(w)](double, const RealField& phi1,
                              const RealField&) {
        if (!(w.grid == phi1.grid)) throw GridMismatch("fixed V grid differs");
        return w;
    };
}

VRule v_rule_zero() {
    return [](double, const RealField& phi1, const RealField&) {
        return RealField::zeros(phi1.grid);
    };
}

namespace {

struct SystemRhs {
    const GridSymbol* gamma;
    const VRule* v;
    CutoffConfig cutoffs;
    bool do_dealias;

    // G = (T_gamma + T_gamma^T)/2 on spectra
    Spectrum coupling(const Spectrum& s) const {
        Spectrum a = paradiff_apply(*gamma, s, cutoffs);
        Spectrum b = paradiff_apply_transpose(*gamma, s, cutoffs);
        for (size_t i = 0; i < a.coeffs.size(); ++i)
            a.coeffs[i] = 0.5 * (a.coeffs[i] + b.coeffs[i]);
        return a;
    }

    std::pair<Spectrum, Spectrum> operator()(double t, const Spectrum& s1,
                                             const Spectrum& s2) const {
        const TorusGrid& g = s1.grid;
        const RealField phi1 = inverse_transform_real(s1);
        const RealField phi2 = inverse_transform_real(s2);
        const RealField V = (*v)(t, phi1, phi2);
        Spectrum tr1 = forward_transform(
            paraproduct(V, inverse_transform_real(derivative_spectrum(s1))));
        Spectrum tr2 = forward_transform(
            paraproduct(V, inverse_transform_real(derivative_spectrum(s2))));
        Spectrum c1 = coupling(s2);
        Spectrum c2 = coupling(s1);
        Spectrum r1 = Spectrum::zeros(g), r2 = Spectrum::zeros(g);
        for (int i = 0; i < g.n_points; ++i) {
            r1.coeffs[i] = -tr1.coeffs[i] + c1.coeffs[i];
            r2.coeffs[i] = -tr2.coeffs[i] - c2.coeffs[i];
        }
        if (do_dealias) {
            r1 = dealias(r1);
            r2 = dealias(r2);
        }
        return {r1, r2};
    }

    static Spectrum derivative_spectrum(const Spectrum& s) {
        Spectrum d = s;
        const int n = s.n();
        for (int i = 0; i < n; ++i) {
            const int k = mode_of_index(i, n);
            d.coeffs[i] = std::abs(k) == n / 2
                              ? cx(0.0, 0.0)
                              : d.coeffs[i] * cx(0.0, static_cast<double>(k));
        }
        return d;
    }
};

double symbol_max_on_retained(const GridSymbol& gamma) {
    const TorusGrid& g = gamma.grid;
    const int n = g.n_points;
    double m = 0.0;
    for (int i = 0; i < n; ++i) {
        const int k = mode_of_index(i, n);
        if (std::abs(k) > g.dealias_cutoff) continue;
        if (gamma.x_independent) {
            m = std::max(m, std::abs(gamma.values[i]));
        } else {
            for (int j = 0; j < n; ++j)
                m = std::max(m, std::abs(gamma.values[static_cast<size_t>(j) * n + i]));
        }
    }
    return m;
}

void check_ellipticity(const GridSymbol& gamma, double floor_value) {
    const TorusGrid& g = gamma.grid;
    const int n = g.n_points;
    double worst = 1e300;
    for (int i = 0; i < n; ++i) {
        const int k = mode_of_index(i, n);
        if (std::abs(k) < 2) continue;
        const double denom = std::pow(std::abs(static_cast<double>(k)), gamma.order);
        if (gamma.x_independent) {
            worst = std::min(worst, std::abs(gamma.values[i]) / denom);
        } else {
            for (int j = 0; j < n; ++j)
                worst = std::min(
                    worst,
                    std::abs(gamma.values[static_cast<size_t>(j) * n + i]) / denom);
        }
    }
    if (worst < floor_value)
        throw EllipticityViolated("min |gamma|/|k|^m = " + std::to_string(worst) +
                                  " below floor " + std::to_string(floor_value));
}

}  // namespace

PairTrajectory solve_symmetrized_system(const RealField& phi1_0,
                                        const RealField& phi2_0,
                                        const GridSymbol& gamma, const VRule& v,
                                        double t_end, const SolverConfig& cfg) {
    if (!(phi1_0.grid == phi2_0.grid) || !(phi1_0.grid == gamma.grid))
        throw GridMismatch("system grids differ");
    if (t_end < 0.0) throw TimeOutOfRange("t_end must be >= 0");
    check_ellipticity(gamma, cfg.ellipticity_floor);
    const TorusGrid& g = phi1_0.grid;
    const SystemRhs rhs{&gamma, &v, CutoffConfig{}, cfg.dealias};

    PairTrajectory traj;
    traj.config = cfg;
    Spectrum s1 = forward_transform(phi1_0), s2 = forward_transform(phi2_0);

    auto store = [&](double t, const Spectrum& a, const Spectrum& b) {
        auto [r1, r2] = rhs(t, a, b);
        traj.times.push_back(t);
        traj.states1.push_back(inverse_transform_real(a));
        traj.states2.push_back(inverse_transform_real(b));
        traj.derivs1.push_back(inverse_transform_real(r1));
        traj.derivs2.push_back(inverse_transform_real(r2));
    };

    store(0.0, s1, s2);
    if (t_end == 0.0) return traj;

    const RealField v0 = v(0.0, phi1_0, phi2_0);
    const double speed = std::max(1e-12, sup_norm(v0));
    const double gmax = std::max(1e-12, symbol_max_on_retained(gamma));
    const double dt_base =
        std::min({cfg.dt_max, cfg.cfl * g.dx() / speed, 2.5 / gmax});
    const int steps = step_count(t_end, dt_base);
    const double h = t_end / steps;
    traj.dt = h;

    auto axpy = [&](const Spectrum& base1, const Spectrum& base2, double c,
                    const std::pair<Spectrum, Spectrum>& k) {
        Spectrum a = base1, b = base2;
        for (int i = 0; i < g.n_points; ++i) {
            a.coeffs[i] += c * k.first.coeffs[i];
            b.coeffs[i] += c * k.second.coeffs[i];
        }
        return std::make_pair(a, b);
    };

    for (int step = 1; step <= steps; ++step) {
        const double t = (step - 1) * h;
        auto k1 = rhs(t, s1, s2);
        auto [a2, b2] = axpy(s1, s2, 0.5 * h, k1);
        auto k2 = rhs(t + 0.5 * h, a2, b2);
        auto [a3, b3] = axpy(s1, s2, 0.5 * h, k2);
        auto k3 = rhs(t + 0.5 * h, a3, b3);
        auto [a4, b4] = axpy(s1, s2, h, k3);
        auto k4 = rhs(t + h, a4, b4);
        for (int i = 0; i < g.n_points; ++i) {
            s1.coeffs[i] += (h / 6.0) * (k1.first.coeffs[i] + 2.0 * k2.first.coeffs[i] +
                                         2.0 * k3.first.coeffs[i] + k4.first.coeffs[i]);
            s2.coeffs[i] += (h / 6.0) * (k1.second.coeffs[i] + 2.0 * k2.second.coeffs[i] +
                                         2.0 * k3.second.coeffs[i] + k4.second.coeffs[i]);
        }
        check_finite(s1.coeffs, "symmetrized system step");
        check_finite(s2.coeffs, "symmetrized system step");
        if (step % cfg.store_every == 0 || step == steps)
            store(step * h, s1, s2);
    }
    return traj;
}

std::pair<RealField, RealField> system_linear_propagate(
    const RealField& phi1, const RealField& phi2, const GridSymbol& gamma,
    double t, const CutoffConfig& cutoffs) {
    if (!(phi1.grid == phi2.grid) || !(phi1.grid == gamma.grid))
        throw GridMismatch("system grids differ");
    if (!gamma.x_independent)
        throw InvalidOrder("exact system propagation needs x-independent gamma");
    const int n = phi1.n();
    Spectrum s1 = forward_transform(phi1), s2 = forward_transform(phi2);
    for (int i = 0; i < n; ++i) {
        const int k = mode_of_index(i, n);
        if (!cutoffs.passes_psi(k)) continue;
        const double theta = gamma.values[i].real() * t;
        const cx a = s1.coeffs[i], b = s2.coeffs[i];
        s1.coeffs[i] = std::cos(theta) * a + std::sin(theta) * b;
        s2.coeffs[i] = -std::sin(theta) * a + std::cos(theta) * b;
    }
    return {inverse_transform_real(s1), inverse_transform_real(s2)};
}

Trajectory solve_pulled_back(const RealField& u0, const GridSymbol& a,
                             const std::function<Diffeo(double)>& chi_at,
                             double t_end, const SolverConfig& cfg) {
    if (!(u0.grid == a.grid)) throw GridMismatch("symbol and field grids differ");
    if (t_end < 0.0) throw TimeOutOfRange("t_end must be >= 0");
    const TorusGrid& g = u0.grid;
    const int n = g.n_points;
    const CutoffConfig cutoffs{};

    auto rhs_spectrum = [&](const GridSymbol& astar, const Spectrum& s) {
        Spectrum r = paradiff_apply(astar, s, cutoffs);
        for (cx& c : r.coeffs) c = -c;
        if (cfg.dealias) r = dealias(r);
        return r;
    };

    Trajectory traj;
    traj.config = cfg;
    Spectrum s = forward_transform(u0);
    GridSymbol astar0 = pullback_symbol(a, chi_at(0.0));

    traj.times.push_back(0.0);
    traj.states.push_back(u0);
    traj.derivs.push_back(inverse_transform_real(rhs_spectrum(astar0, s)));
    if (t_end == 0.0) return traj;

    const double amax = std::max(1e-12, symbol_max_on_retained(astar0));
    const double dt_base = std::min(cfg.dt_max, 2.5 / amax);
    const int steps = step_count(t_end, dt_base);
    const double h = t_end / steps;
    traj.dt = h;

    const double l2_0 = l2_norm(u0);
    GridSymbol a_lo = astar0;  // pullback at the current step start
    for (int step = 1; step <= steps; ++step) {
        const double t = (step - 1) * h;
        const GridSymbol a_mid = pullback_symbol(a, chi_at(t + 0.5 * h));
        const GridSymbol a_hi = pullback_symbol(a, chi_at(t + h));
        Spectrum k1 = rhs_spectrum(a_lo, s);
        Spectrum tmp = s;
        for (int i = 0; i < n; ++i) tmp.coeffs[i] = s.coeffs[i] + 0.5 * h * k1.coeffs[i];
        Spectrum k2 = rhs_spectrum(a_mid, tmp);
        for (int i = 0; i < n; ++i) tmp.coeffs[i] = s.coeffs[i] + 0.5 * h * k2.coeffs[i];
        Spectrum k3 = rhs_spectrum(a_mid, tmp);
        for (int i = 0; i < n; ++i) tmp.coeffs[i] = s.coeffs[i] + h * k3.coeffs[i];
        Spectrum k4 = rhs_spectrum(a_hi, tmp);
        for (int i = 0; i < n; ++i)
            s.coeffs[i] += (h / 6.0) * (k1.coeffs[i] + 2.0 * k2.coeffs[i] +
                                        2.0 * k3.coeffs[i] + k4.coeffs[i]);
        check_finite(s.coeffs, "pulled-back step");
        a_lo = a_hi;
        const double t_now = step * h;
        if (std::isfinite(cfg.growth_envelope_c)) {
            const double bound =
                std::exp(cfg.growth_envelope_c * t_now) * l2_0 * (1.0 + 1e-12);
            const double now = sobolev_norm(s, 0.0);
            if (now > bound)
                throw StepUnstable("L2 growth " + std::to_string(now) +
                                   " exceeds envelope " + std::to_string(bound) +
                                   " at t = " + std::to_string(t_now));
        }
        if (step % cfg.store_every == 0 || step == steps) {
            traj.times.push_back(t_now);
            traj.states.push_back(inverse_transform_real(s));
            traj.derivs.push_back(
                inverse_transform_real(rhs_spectrum(a_lo, s)));
        }
    }
    return traj;
}

}  // namespace qf
