#include "quasiflow/characteristics.hpp"

#include <algorithm>
#include <cmath>

namespace qf {

namespace {

// Symmetric mode range beyond which the spectrum is negligible relative to
// its peak; evaluating only over it keeps off-grid sums cheap for smooth
// velocity fields without measurable accuracy loss.
int trimmed_range(const Spectrum& s, double rel = 1e-14) {
    const int n = s.n();
    double peak = 0.0;
    for (const cx& c : s.coeffs) peak = std::max(peak, std::abs(c));
    const double cut = rel * peak;
    int K = 0;
    for (int i = 0; i < n; ++i) {
        const int k = mode_of_index(i, n);
        if (std::abs(s.coeffs[i]) > cut) K = std::max(K, std::abs(k));
    }
    return K;
}

// One pass over modes |k| <= K accumulating both u(x) and u_x(x).
void eval_value_slope(const Spectrum& s, int K, double x, double& u,
                      double& ux) {
    const int n = s.n();
    const int kmin = std::max(-K, -n / 2 + 1);
    const int kmax = std::min(K, n / 2);
    const cx step = std::polar(1.0, x);
    cx w = std::polar(1.0, kmin * x);
    cx acc(0.0, 0.0), dacc(0.0, 0.0);
    for (int k = kmin; k <= kmax; ++k) {
        const cx term = s.coeffs[k >= 0 ? k : k + n] * w;
        acc += term;
        if (k != n / 2) dacc += cx(0.0, static_cast<double>(k)) * term;
        w *= step;
    }
    u = acc.real();
    ux = dacc.real();
}

// Hermite-in-time velocity model: spectra of states and stored derivatives
// at the two checkpoints bracketing t combine into one spectrum for u(t, .),
// which then evaluates anywhere in x.
class VelocityModel {
  public:
    explicit VelocityModel(const Trajectory& traj) : traj_(traj) {
        spectra_.reserve(traj.states.size());
        dspectra_.reserve(traj.states.size());
        trims_.reserve(traj.states.size());
        for (size_t i = 0; i < traj.states.size(); ++i) {
            spectra_.push_back(forward_transform(traj.states[i]));
            dspectra_.push_back(forward_transform(traj.derivs[i]));
            trims_.push_back(std::max(trimmed_range(spectra_.back()),
                                      trimmed_range(dspectra_.back())));
        }
    }

    double t_min() const { return traj_.times.front(); }
    double t_max() const { return traj_.times.back(); }

    // spectrum for u(t, .); trim_out gets the matching evaluation range
    Spectrum at_time(double t, int* trim_out = nullptr) const {
        const auto& times = traj_.times;
        if (t < times.front() - 1e-9 || t > times.back() + 1e-9)
            throw TimeOutOfRange("flow query t = " + std::to_string(t) +
                                 " outside stored span");
        t = std::clamp(t, times.front(), times.back());
        size_t i = std::upper_bound(times.begin(), times.end(), t) - times.begin();
        if (i > 0) --i;
        if (i + 1 >= times.size()) i = times.size() - 2;
        if (times.size() == 1) {
            if (trim_out) *trim_out = trims_[0];
            return spectra_[0];
        }
        if (trim_out) *trim_out = std::max(trims_[i], trims_[i + 1]);
        const double dt = times[i + 1] - times[i];
        const double s = (t - times[i]) / dt;
        const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        const double h10 = s * (1.0 - s) * (1.0 - s);
        const double h01 = s * s * (3.0 - 2.0 * s);
        const double h11 = s * s * (s - 1.0);
        Spectrum out = Spectrum::zeros(spectra_[i].grid);
        const int n = out.n();
        for (int m = 0; m < n; ++m)
            out.coeffs[m] = h00 * spectra_[i].coeffs[m] +
                            dt * h10 * dspectra_[i].coeffs[m] +
                            h01 * spectra_[i + 1].coeffs[m] +
                            dt * h11 * dspectra_[i + 1].coeffs[m];
        return out;
    }

  private:
    const Trajectory& traj_;
    std::vector<Spectrum> spectra_;
    std::vector<Spectrum> dspectra_;
    std::vector<int> trims_;
};

bool seeds_are_grid(const std::vector<double>& seeds, const TorusGrid& g) {
    if (static_cast<int>(seeds.size()) != g.n_points) return false;
    for (int j = 0; j < g.n_points; ++j)
        if (std::abs(seeds[j] - g.x(j)) > 1e-14) return false;
    return true;
}

}  // namespace

FlowMap integrate_flow(const Trajectory& traj, double t_from, double t_to,
                       const std::vector<double>& seeds, const FlowConfig& cfg) {
    if (traj.times.size() < 2 && t_from != t_to)
        throw TimeOutOfRange("trajectory holds a single checkpoint");
    const VelocityModel model(traj);
    if (t_from < model.t_min() - 1e-9 || t_from > model.t_max() + 1e-9 ||
        t_to < model.t_min() - 1e-9 || t_to > model.t_max() + 1e-9)
        throw TimeOutOfRange("flow span outside stored trajectory");

    FlowMap fm;
    fm.t_from = t_from;
    fm.t_to = t_to;
    fm.seeds = seeds;
    fm.positions = seeds;
    fm.jacobian.assign(seeds.size(), 1.0);
    if (t_from == t_to) return fm;

    double checkpoint_dt = model.t_max() - model.t_min();
    for (size_t i = 1; i < traj.times.size(); ++i)
        checkpoint_dt = std::min(checkpoint_dt, traj.times[i] - traj.times[i - 1]);
    const double dt_base = std::min(cfg.flow_dt_max, checkpoint_dt);
    const double span = t_to - t_from;
    const int steps =
        std::max(1, static_cast<int>(std::ceil(std::abs(span) / dt_base - 1e-9)));
    const double h = span / steps;

    const size_t m = seeds.size();
    std::vector<double>& x = fm.positions;
    std::vector<double>& jac = fm.jacobian;

    for (int step = 0; step < steps; ++step) {
        const double t = t_from + step * h;
        int K0 = 0, K1 = 0, K2 = 0;
        const Spectrum s0 = model.at_time(t, &K0);
        const Spectrum s1 = model.at_time(t + 0.5 * h, &K1);
        const Spectrum s2 = model.at_time(t + h, &K2);
        for (size_t p = 0; p < m; ++p) {
            const double xp = x[p], Jp = jac[p];
            double u, ux;
            eval_value_slope(s0, K0, xp, u, ux);
            const double k1x = u, k1j = ux * Jp;
            eval_value_slope(s1, K1, xp + 0.5 * h * k1x, u, ux);
            const double k2x = u, k2j = ux * (Jp + 0.5 * h * k1j);
            eval_value_slope(s1, K1, xp + 0.5 * h * k2x, u, ux);
            const double k3x = u, k3j = ux * (Jp + 0.5 * h * k2j);
            eval_value_slope(s2, K2, xp + h * k3x, u, ux);
            const double k4x = u, k4j = ux * (Jp + h * k3j);
            x[p] = xp + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
            jac[p] = Jp + (h / 6.0) * (k1j + 2.0 * k2j + 2.0 * k3j + k4j);
            if (!std::isfinite(x[p]) || !std::isfinite(jac[p]))
                throw StepUnstable("non-finite characteristic state");
        }
    }

    const TorusGrid& g = traj.states.front().grid;
    if (seeds_are_grid(seeds, g)) {
        // displacement chi - x is periodic; its spectral derivative + 1 gives
        // a sharper Jacobian than the variational integration
        std::vector<double> disp(g.n_points);
        for (int j = 0; j < g.n_points; ++j) disp[j] = x[j] - g.x(j);
        RealField d(g, std::move(disp));
        RealField dd = spectral_derivative(d, 1);
        for (int j = 0; j < g.n_points; ++j) jac[j] = 1.0 + dd.samples[j];
    }
    for (double J : jac)
        if (J <= 0.0)
            throw FlowDegenerate("flow Jacobian " + std::to_string(J) + " <= 0");
    return fm;
}

FlowMap invert_flow(const Trajectory& traj, const FlowMap& fm,
                    const FlowConfig& cfg) {
    return integrate_flow(traj, fm.t_to, fm.t_from, fm.positions, cfg);
}

double compose_norm_ratio(const Trajectory& traj, double t_from, double t_to,
                          const RealField& h, double s, const FlowConfig& cfg) {
    const double h_norm = sobolev_norm(h, s);
    if (h_norm == 0.0) throw ZeroField("compose_norm_ratio needs nonzero h");
    const TorusGrid& g = h.grid;
    std::vector<double> seeds(g.n_points);
    for (int j = 0; j < g.n_points; ++j) seeds[j] = g.x(j);
    const FlowMap fm = integrate_flow(traj, t_from, t_to, seeds, cfg);
    const Spectrum sh = forward_transform(h);
    RealField composed = RealField::zeros(g);
    for (int j = 0; j < g.n_points; ++j)
        composed.samples[j] = evaluate_offgrid(sh, fm.positions[j]);
    return sobolev_norm(composed, s) / h_norm;
}

double transport_check(const Trajectory& traj, const std::vector<double>& seeds,
                       const FlowConfig& cfg) {
    const FlowMap fm =
        integrate_flow(traj, traj.times.front(), traj.times.back(), seeds, cfg);
    const Spectrum s_end = forward_transform(traj.states.back());
    const Spectrum s_ini = forward_transform(traj.states.front());
    double worst = 0.0;
    for (size_t j = 0; j < seeds.size(); ++j) {
        const double there = evaluate_offgrid(s_end, fm.positions[j]);
        const double here = evaluate_offgrid(s_ini, seeds[j]);
        worst = std::max(worst, std::abs(there - here));
    }
    return worst;
}

double transport_check(const Trajectory& traj, const FlowConfig& cfg) {
    const TorusGrid& g = traj.states.front().grid;
    std::vector<double> seeds(g.n_points);
    for (int j = 0; j < g.n_points; ++j) seeds[j] = g.x(j);
    return transport_check(traj, seeds, cfg);
}

}  // namespace qf
