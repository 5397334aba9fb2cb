#include "quasiflow/ansatz.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace qf {

namespace {

double glue(double t) {  // e^{-1/t} for t > 0
    return t > 0.0 ? std::exp(-1.0 / t) : 0.0;
}

double sigma(double t) {  // smooth step: 0 for t<=0, 1 for t>=1
    const double a = glue(t);
    const double b = glue(1.0 - t);
    return a / (a + b);
}

double wrap_pi(double x) {  // into [-pi, pi)
    const double p = kTwoPi;
    x = std::fmod(x + p / 2.0, p);
    if (x < 0.0) x += p;
    return x - p / 2.0;
}

}  // namespace

double bump(double x) {
    const double a = std::abs(x);
    if (a <= 0.5) return 1.0;
    if (a >= 1.0) return 0.0;
    return sigma(2.0 * (1.0 - a));
}

RealField bump_field(const TorusGrid& g, double lambda, double center) {
    return RealField::from_function(g, [lambda, center](double x) {
        return bump(lambda * wrap_pi(x - center));
    });
}

AnsatzPair make_ansatz_pair(const TorusGrid& g, double lambda, double epsilon,
                            double s, double x_w) {
    if (lambda < 1.0) throw InvalidOrder("ansatz needs lambda >= 1");
    if (g.n_points < 32.0 * lambda)
        throw UnderResolved("grid " + std::to_string(g.n_points) +
                            " under-resolves lambda = " + std::to_string(lambda));
    AnsatzPair p;
    p.lambda = lambda;
    p.epsilon = epsilon;
    p.x_w = x_w;
    const double amp = std::pow(lambda, 0.5 - s);
    p.u0 = amp * bump_field(g, lambda, x_w);
    p.v0 = p.u0 + epsilon * bump_field(g, 1.0, x_w);
    return p;
}

namespace {

// constraint rows g_i(d) = a_i . d + b_i > 0
struct Constraint {
    double a1, a2, b;
    double eval(double d1, double d2) const { return a1 * d1 + a2 * d2 + b; }
};

std::vector<Constraint> regime_constraints(double alpha, double eps_prime,
                                           bool want_c1) {
    const double am1p = std::max(alpha - 1.0, 0.0);
    std::vector<Constraint> cs = {
        {0.0, 1.0, -am1p},         // delta2 > (alpha-1)+
        {-1.0, -1.0, 1.0},         // delta1 + delta2 < 1
        {1.0, 2.0, -alpha},        // delta1 + 2 delta2 > alpha
        {1.0, 0.0, 0.0},           // delta1 > 0
    };
    if (want_c1) cs.push_back({1.0, 0.0, -(1.0 - am1p - eps_prime)});
    return cs;
}

}  // namespace

std::optional<RegimeExponents> feasible_exponents(double alpha, double eps_prime,
                                                  bool want_c1) {
    if (alpha < 0.0 || alpha > 2.5)
        throw InvalidOrder("exponent search supports alpha in [0, 2.5]");
    if (eps_prime < 0.0) throw InvalidOrder("eps_prime must be >= 0");
    const auto cs = regime_constraints(alpha, eps_prime, want_c1);

    // deterministic fine scan for a strictly feasible start
    double best1 = 0.0, best2 = 0.0, best_slack = -1.0;
    const int m = 400;
    for (int i = 1; i < m; ++i) {
        for (int j = 1; j < m; ++j) {
            const double d1 = static_cast<double>(i) / m;
            const double d2 = static_cast<double>(j) / m;
            double slack = 1e300;
            for (const auto& c : cs) slack = std::min(slack, c.eval(d1, d2));
            if (slack > best_slack) {
                best_slack = slack;
                best1 = d1;
                best2 = d2;
            }
        }
    }
    if (best_slack <= 0.0) return std::nullopt;

    // Newton on the log-barrier F(d) = -sum log g_i(d)
    double d1 = best1, d2 = best2;
    for (int it = 0; it < 60; ++it) {
        double g1 = 0.0, g2 = 0.0;        // gradient of F
        double h11 = 0.0, h12 = 0.0, h22 = 0.0;  // Hessian
        for (const auto& c : cs) {
            const double g = c.eval(d1, d2);
            g1 += -c.a1 / g;
            g2 += -c.a2 / g;
            h11 += c.a1 * c.a1 / (g * g);
            h12 += c.a1 * c.a2 / (g * g);
            h22 += c.a2 * c.a2 / (g * g);
        }
        const double det = h11 * h22 - h12 * h12;
        if (det <= 0.0) break;
        double s1 = -(h22 * g1 - h12 * g2) / det;
        double s2 = -(h11 * g2 - h12 * g1) / det;
        // damp so every constraint stays strictly positive
        double step = 1.0;
        for (const auto& c : cs) {
            const double dg = c.a1 * s1 + c.a2 * s2;
            if (dg < 0.0) {
                const double g = c.eval(d1, d2);
                step = std::min(step, -0.9 * g / dg);
            }
        }
        d1 += step * s1;
        d2 += step * s2;
        if (std::abs(step * s1) + std::abs(step * s2) < 1e-14) break;
    }
    return RegimeExponents{d1, d2};
}

std::vector<ScheduleEntry> schedule(const RegimeExponents& r, double alpha,
                                    int n_lo, int n_hi) {
    if (n_lo < 0 || n_hi < n_lo) throw InvalidOrder("bad schedule range");
    const double am1p = std::max(alpha - 1.0, 0.0);
    std::vector<ScheduleEntry> out;
    for (int n = n_lo; n <= n_hi; ++n) {
        ScheduleEntry e;
        e.n = n;
        e.lambda = std::pow(2.0, n);
        e.epsilon = std::pow(e.lambda, -r.delta1);
        e.tau = std::pow(e.lambda, -r.delta2);
        e.lambda_eps_tau = e.lambda * e.epsilon * e.tau;
        e.quad_error = std::pow(e.lambda, alpha) * e.epsilon * e.tau * e.tau;
        e.weak_decay = e.tau * std::pow(e.lambda, am1p);
        out.push_back(e);
    }
    for (size_t i = 1; i < out.size(); ++i) {
        if (!(out[i].lambda_eps_tau > out[i - 1].lambda_eps_tau))
            throw InvalidOrder("schedule: lambda*eps*tau fails to grow");
        if (!(out[i].quad_error < out[i - 1].quad_error))
            throw InvalidOrder("schedule: quadratic error fails to shrink");
        if (!(out[i].weak_decay < out[i - 1].weak_decay))
            throw InvalidOrder("schedule: weak-norm decay fails to shrink");
    }
    return out;
}

std::pair<double, double> check_h1(const VRule& v, const TorusGrid& g,
                                   double t_end, double x_w) {
    if (t_end <= 0.0) throw TimeOutOfRange("check_h1 needs t_end > 0");
    const double h = 1e-6;
    const RealField direction = bump_field(g, 1.0, x_w);
    const RealField zero = RealField::zeros(g);
    const RealField hdir = h * direction;

    const int segments = 20;  // composite Simpson on 2*segments panels
    const int nodes = 2 * segments + 1;
    const double dt = t_end / (nodes - 1);
    std::vector<double> integral(g.n_points, 0.0);
    for (int i = 0; i < nodes; ++i) {
        const double t = i * dt;
        const double w =
            (i == 0 || i == nodes - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        const RealField vp = v(t, hdir, zero);
        const RealField v0 = v(t, zero, zero);
        for (int j = 0; j < g.n_points; ++j)
            integral[j] += w * (vp.samples[j] - v0.samples[j]) / h;
    }
    for (double& q : integral) q *= dt / 3.0;

    double lo = 1e300, hi = 0.0;
    for (int j = 0; j < g.n_points; ++j) {
        const double dist = std::abs(wrap_pi(g.x(j) - x_w));
        if (dist > 0.5) continue;
        const double val = std::abs(integral[j]) / t_end;
        lo = std::min(lo, val);
        hi = std::max(hi, val);
    }
    return {lo, hi};
}

}  // namespace qf
