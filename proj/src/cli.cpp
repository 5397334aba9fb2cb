#include "quasiflow/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "quasiflow/ansatz.hpp"
#include "quasiflow/characteristics.hpp"
#include "quasiflow/evolve.hpp"
#include "quasiflow/experiments.hpp"
#include "quasiflow/norms.hpp"
#include "quasiflow/paradiff.hpp"
#include "quasiflow/wwsymbols.hpp"

namespace qf {

namespace {

std::string fmt_g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string base_name(const std::string& out_dir, const std::string& experiment,
                      double alpha, double s) {
    return out_dir + "/" + experiment + "__alpha" + fmt_g(alpha) + "__s" +
           fmt_g(s);
}

void atomic_write_text(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot open " + tmp);
        f << content;
        if (!f.good()) throw IoError("short write to " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw IoError("cannot rename " + tmp + " to " + path);
}

}  // namespace

// Fixed-size SVG with one normalized polyline per series; deterministic
// output, %.6g coordinates.
void emit_svg_plot(const std::string& path, const std::string& title,
                   const std::vector<PlotSeries>& series) {
    const double W = 800.0, H = 600.0, mx = 60.0, my = 40.0;
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#9467bd", "#ff7f0e", "#8c564b"};
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\">\n";
    os << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
    os << "<text x=\"20\" y=\"24\" font-size=\"16\">" << title << "</text>\n";
    os << "<line x1=\"" << fmt6(mx) << "\" y1=\"" << fmt6(H - my) << "\" x2=\""
       << fmt6(W - mx) << "\" y2=\"" << fmt6(H - my)
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << fmt6(mx) << "\" y1=\"" << fmt6(my) << "\" x2=\""
       << fmt6(mx) << "\" y2=\"" << fmt6(H - my) << "\" stroke=\"black\"/>\n";
    int color = 0;
    for (const auto& s : series) {
        if (s.xs.size() < 1 || s.xs.size() != s.ys.size()) continue;
        double xlo = s.xs[0], xhi = s.xs[0], ylo = s.ys[0], yhi = s.ys[0];
        for (size_t i = 0; i < s.xs.size(); ++i) {
            xlo = std::min(xlo, s.xs[i]);
            xhi = std::max(xhi, s.xs[i]);
            ylo = std::min(ylo, s.ys[i]);
            yhi = std::max(yhi, s.ys[i]);
        }
        const double xspan = xhi > xlo ? xhi - xlo : 1.0;
        const double yspan = yhi > ylo ? yhi - ylo : 1.0;
        os << "<polyline fill=\"none\" stroke=\"" << palette[color % 6]
           << "\" stroke-width=\"1.5\" points=\"";
        for (size_t i = 0; i < s.xs.size(); ++i) {
            const double px = mx + (W - 2 * mx) * (s.xs[i] - xlo) / xspan;
            const double py = H - my - (H - 2 * my) * (s.ys[i] - ylo) / yspan;
            os << fmt6(px) << "," << fmt6(py) << " ";
        }
        os << "\"/>\n";
        os << "<text x=\"" << fmt6(W - mx - 200) << "\" y=\""
           << fmt6(my + 18.0 * (color + 1)) << "\" font-size=\"12\" fill=\""
           << palette[color % 6] << "\">" << s.label << " [" << fmt6(ylo)
           << ", " << fmt6(yhi) << "]</text>\n";
        ++color;
    }
    os << "</svg>\n";
    atomic_write_text(path, os.str());
}

namespace {

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
}

void print_record(const SeparationRecord& r, double s, double sw) {
    if (!r.error.empty()) {
        std::cout << "n=" << r.n << " ERROR: " << r.error << "\n";
        return;
    }
    std::cout << "n=" << r.n << " lambda=" << fmt_g(r.lambda)
              << " eps=" << fmt6(r.epsilon) << " tau=" << fmt6(r.tau)
              << " d0=" << fmt6(r.d0) << " d_tau=" << fmt6(r.d_tau)
              << " d_tau_weak(H^" << fmt_g(sw) << ")=" << fmt6(r.d_tau_weak)
              << " weak_ratio=" << fmt6(r.weak_ratio)
              << " gap=" << fmt6(r.support_gap)
              << " gap*lambda=" << fmt6(r.gap_times_lambda)
              << " grid_n=" << r.grid_n << " wall=" << fmt6(r.wall_time_s)
              << "s (strong index s=" << fmt_g(s) << ")\n";
}

int finish_separation(const std::vector<SeparationRecord>& recs,
                      const std::string& base, double s, double sw) {
    export_records_csv(recs, base + ".csv");
    export_records_jsonl(recs, base + ".jsonl");
    PlotSeries d0{"d0", {}, {}}, dt{"d_tau", {}, {}}, wr{"weak_ratio", {}, {}};
    bool any_error = false;
    for (const auto& r : recs) {
        print_record(r, s, sw);
        if (!r.error.empty()) {
            any_error = true;
            continue;
        }
        d0.xs.push_back(r.n);
        d0.ys.push_back(r.d0);
        dt.xs.push_back(r.n);
        dt.ys.push_back(r.d_tau);
        wr.xs.push_back(r.n);
        wr.ys.push_back(r.weak_ratio);
    }
    emit_svg_plot(base + ".svg", base.substr(base.find_last_of('/') + 1),
                  {d0, dt, wr});
    std::cout << "wrote " << base << ".csv/.jsonl/.svg\n";
    return any_error ? 1 : 0;
}

double weak_index_of(double s, double alpha, double eps_prime, int sign) {
    return s - 1.0 + std::max(alpha - 1.0, 0.0) +
           (sign >= 0 ? eps_prime : -eps_prime);
}

struct CommonOpts {
    double alpha = 1.0;
    double s = 2.6;
    double eps_prime = 0.5;
    int eps_prime_sign = 1;
    int n_lo = 3, n_hi = 7;
    int threads = 0;
    bool no_c1 = false;
    bool force_eps_zero = false;
    bool no_flows = false;
    std::string out_dir = ".";
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_alpha = true) {
    if (with_alpha)
        cmd->add_option("--alpha", o.alpha, "dispersive order in [0,2]");
    cmd->add_option("--s", o.s, "strong Sobolev index");
    cmd->add_option("--eps-prime", o.eps_prime, "weak-index offset eps'");
    cmd->add_option("--eps-prime-sign", o.eps_prime_sign,
                    "+1 or -1: sign of eps' in the weak index")
        ->check(CLI::IsMember({1, -1}));
    cmd->add_option("--n-lo", o.n_lo, "first dyadic level");
    cmd->add_option("--n-hi", o.n_hi, "last dyadic level");
    cmd->add_option("--threads", o.threads,
                    "worker threads (0 = hardware, QUASIFLOW_THREADS caps)");
    cmd->add_flag("--no-c1", o.no_c1, "drop the C^1-regime constraint");
    cmd->add_flag("--epsilon-zero", o.force_eps_zero,
                  "null test: run both members with identical data");
    cmd->add_flag("--no-flows", o.no_flows, "skip characteristic flows");
    cmd->add_option("--out-dir", o.out_dir, "output directory");
}

int cmd_feasibility(const CommonOpts& o) {
    ensure_dir(o.out_dir);
    const auto r = feasible_exponents(o.alpha, o.eps_prime, !o.no_c1);
    if (!r) {
        std::cout << "alpha=" << fmt_g(o.alpha)
                  << ": no admissible exponent pair (infeasible)\n";
        return 1;
    }
    std::cout << "alpha=" << fmt_g(o.alpha) << " delta1=" << fmt6(r->delta1)
              << " delta2=" << fmt6(r->delta2) << "\n";
    const auto sched = schedule(*r, o.alpha, o.n_lo, o.n_hi);
    std::ostringstream os;
    os << "n,lambda,epsilon,tau,lambda_eps_tau,quad_error,weak_decay\n";
    for (const auto& e : sched) {
        std::cout << "n=" << e.n << " lambda=" << fmt_g(e.lambda)
                  << " eps=" << fmt6(e.epsilon) << " tau=" << fmt6(e.tau)
                  << " lambda*eps*tau=" << fmt6(e.lambda_eps_tau)
                  << " quad_err=" << fmt6(e.quad_error)
                  << " weak_decay=" << fmt6(e.weak_decay) << "\n";
        char buf[256];
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      e.n, e.lambda, e.epsilon, e.tau, e.lambda_eps_tau,
                      e.quad_error, e.weak_decay);
        os << buf;
    }
    const std::string base = base_name(o.out_dir, "feasibility", o.alpha, o.s);
    atomic_write_text(base + ".csv", os.str());
    std::cout << "wrote " << base << ".csv\n";
    return 0;
}

int cmd_separation(const CommonOpts& o, bool system, double gamma_order) {
    ensure_dir(o.out_dir);
    const double order = system ? gamma_order : o.alpha;
    const auto r = feasible_exponents(order, o.eps_prime, !o.no_c1);
    if (!r) {
        std::cout << "order=" << fmt_g(order)
                  << ": no admissible exponent pair (infeasible)\n";
        return 1;
    }
    std::cout << "exponents: delta1=" << fmt6(r->delta1)
              << " delta2=" << fmt6(r->delta2) << "\n";
    ExperimentConfig cfg;
    cfg.force_epsilon_zero = o.force_eps_zero;
    cfg.eps_prime_sign = o.eps_prime_sign;
    cfg.with_flows = !o.no_flows;
    cfg.threads = o.threads;
    const auto recs =
        system ? run_system_separation(order, *r, o.n_lo, o.n_hi, o.s,
                                       o.eps_prime, cfg)
               : run_separation(order, *r, o.n_lo, o.n_hi, o.s, o.eps_prime, cfg);
    const double sw = weak_index_of(o.s, order, o.eps_prime, o.eps_prime_sign);
    const std::string base = base_name(
        o.out_dir, system ? "system-separation" : "separation", order, o.s);
    return finish_separation(recs, base, o.s, sw);
}

struct SolveOpts {
    double alpha = 1.0;
    double t_end = 0.5;
    double amplitude = 0.1;
    int grid_n = 1024;
    double s = 2.6;
    std::string init = "cos";
    std::string out_dir = ".";
};

int cmd_solve(const SolveOpts& o) {
    ensure_dir(o.out_dir);
    const TorusGrid g = TorusGrid::make(o.grid_n);
    RealField u0 = RealField::zeros(g);
    if (o.init == "cos") {
        u0 = RealField::from_function(
            g, [&](double x) { return o.amplitude * std::cos(x); });
    } else if (o.init == "bump") {
        u0 = o.amplitude * bump_field(g, 1.0, 0.0);
    } else {
        throw UsageError("unknown --init " + o.init);
    }
    const Trajectory traj = solve_dispersive_burgers(u0, o.alpha, o.t_end);
    PlotSeries l2{"L2", {}, {}}, hs{"H^" + fmt_g(o.s), {}, {}};
    std::ostringstream os;
    os << "t,l2,sobolev_s,sup\n";
    for (size_t i = 0; i < traj.times.size(); ++i) {
        const double t = traj.times[i];
        const double a = l2_norm(traj.states[i]);
        const double b = sobolev_norm(traj.states[i], o.s);
        const double c = sup_norm(traj.states[i]);
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", t, a, b, c);
        os << buf;
        l2.xs.push_back(t);
        l2.ys.push_back(a);
        hs.xs.push_back(t);
        hs.ys.push_back(b);
    }
    const std::string base = base_name(o.out_dir, "solve", o.alpha, o.s);
    atomic_write_text(base + ".csv", os.str());
    emit_svg_plot(base + ".svg", "norm history", {l2, hs});
    std::cout << "steps=" << traj.times.size() - 1 << " dt=" << fmt6(traj.dt)
              << " final L2=" << fmt6(l2.ys.back())
              << " final H^s=" << fmt6(hs.ys.back()) << "\n";
    std::cout << "wrote " << base << ".csv/.svg\n";
    return 0;
}

struct WwOpts {
    int grid_n = 256;
    double eta_amp = 0.05;
    int eta_mode = 1;
    double s = 2.6;
    std::string out_dir = ".";
};

int cmd_ww(const WwOpts& o) {
    ensure_dir(o.out_dir);
    const TorusGrid g = TorusGrid::make(o.grid_n);
    const RealField eta = RealField::from_function(g, [&](double x) {
        return o.eta_amp * std::cos(o.eta_mode * x);
    });
    const CapillarySymbols sym = capillary_symbols(eta);
    const RealField deta = spectral_derivative(eta, 1);
    double max_slope2 = 0.0;
    for (double v : deta.samples)
        max_slope2 = std::max(max_slope2, v * v);
    double worst = 1e300;
    const int n = g.n_points;
    for (int i = 0; i < n; ++i) {
        const int k = mode_of_index(i, n);
        if (std::abs(k) < 2) continue;
        for (int j = 0; j < n; ++j) {
            const double axi = std::abs(static_cast<double>(k));
            worst = std::min(worst, sym.gamma32.value(j, k).real() /
                                        std::pow(axi, 1.5));
        }
    }
    std::cout << "ellipticity: min gamma32/|k|^{3/2}=" << fmt6(worst)
              << " expected=" << fmt6(std::pow(1.0 + max_slope2, -0.75)) << "\n";
    std::vector<int> probes;
    for (int k = 8; k <= g.dealias_cutoff && k <= 64; k *= 2) probes.push_back(k);
    const CommutationReport rep = verify_commutation(eta, probes);
    PlotSeries pri{"primary", {}, {}}, lit{"literal", {}, {}};
    std::ostringstream os;
    os << "mode,residual_primary,residual_literal\n";
    for (size_t i = 0; i < rep.modes.size(); ++i) {
        std::cout << "k=" << rep.modes[i]
                  << " residual_primary=" << fmt6(rep.residual_primary[i])
                  << " residual_literal=" << fmt6(rep.residual_literal[i])
                  << "\n";
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", rep.modes[i],
                      rep.residual_primary[i], rep.residual_literal[i]);
        os << buf;
        pri.xs.push_back(rep.modes[i]);
        pri.ys.push_back(rep.residual_primary[i]);
        lit.xs.push_back(rep.modes[i]);
        lit.ys.push_back(rep.residual_literal[i]);
    }
    const std::string base = base_name(o.out_dir, "ww-symbols", 1.5, o.s);
    atomic_write_text(base + ".csv", os.str());
    emit_svg_plot(base + ".svg", "commutation residuals", {pri, lit});
    std::cout << "wrote " << base << ".csv/.svg\n";
    return 0;
}

struct ParadiffOpts {
    int grid_n = 256;
    std::string out_dir = ".";
};

int cmd_paradiff_check(const ParadiffOpts& o) {
    ensure_dir(o.out_dir);
    const TorusGrid g = TorusGrid::make(o.grid_n);
    struct Check {
        std::string name;
        double value, tol;
    };
    std::vector<Check> checks;

    // x-independent symbol acts as psi(k) a(k)
    {
        const GridSymbol a =
            GridSymbol::from_multiplier(g, multiplier_frac_abs(1.0));
        const RealField u = RealField::from_function(
            g, [](double x) { return std::cos(16.0 * x) + 0.3 * std::sin(x); });
        const Spectrum su = forward_transform(u);
        const Spectrum out = paradiff_apply(a, su);
        double worst = 0.0;
        for (int i = 0; i < g.n_points; ++i) {
            const int k = mode_of_index(i, g.n_points);
            const cx want = std::abs(k) >= 2
                                ? cx(std::abs(static_cast<double>(k)), 0.0) *
                                      su.coeffs[i]
                                : cx(0.0, 0.0);
            worst = std::max(worst, std::abs(out.coeffs[i] - want));
        }
        checks.push_back({"x_independent_identity", worst, 1e-12});
    }
    // transpose pairing <T_a u, v> = <u, T_a^T v>
    {
        const GridSymbol a = GridSymbol::from_function(
            g, 1.0, [](double x, double xi) {
                return cx(std::abs(xi) * (1.0 + 0.3 * std::cos(x)), 0.0);
            });
        const RealField u = RealField::from_function(
            g, [](double x) { return std::cos(12.0 * x) + std::sin(5.0 * x); });
        const RealField v = RealField::from_function(
            g, [](double x) { return std::sin(20.0 * x) + 0.5 * std::cos(x); });
        const Spectrum su = forward_transform(u), sv = forward_transform(v);
        const Spectrum au = paradiff_apply(a, su);
        const Spectrum atv = paradiff_apply_transpose(a, sv);
        cx lhs(0.0, 0.0), rhs(0.0, 0.0);
        for (int i = 0; i < g.n_points; ++i) {
            lhs += au.coeffs[i] * std::conj(sv.coeffs[i]);
            rhs += su.coeffs[i] * std::conj(atv.coeffs[i]);
        }
        checks.push_back({"transpose_pairing", std::abs(lhs - rhs), 1e-12});
    }
    // paraproduct with constant 1 keeps exactly the modes |k| >= 8
    {
        const RealField one = RealField::from_function(g, [](double) { return 1.0; });
        const RealField u = RealField::from_function(
            g, [](double x) { return std::cos(3.0 * x) + std::cos(32.0 * x); });
        const RealField tu = paraproduct(one, u);
        const RealField want = RealField::from_function(
            g, [](double x) { return std::cos(32.0 * x); });
        checks.push_back({"paraproduct_constant", sup_norm(tu - want), 1e-12});
    }
    // Bony remainder of cos*cos
    {
        const RealField c = RealField::from_function(
            g, [](double x) { return std::cos(x); });
        const RealField rem = bony_remainder(c, c);
        const RealField want = RealField::from_function(
            g, [](double x) { return 0.5 * (1.0 + std::cos(2.0 * x)); });
        checks.push_back({"bony_cos_cos", sup_norm(rem - want), 1e-12});
    }
    // paracomposition with a translation is exact composition
    {
        const double c = 0.7;
        const Diffeo chi =
            Diffeo::make(g, [c](double x) { return x + c; });
        const RealField u = RealField::from_function(g, [](double x) {
            return std::sin(9.0 * x) + 0.2 * std::cos(40.0 * x);
        });
        const RealField pc = paracompose(chi, u);
        const RealField want = RealField::from_function(g, [&](double x) {
            return std::sin(9.0 * (x + c)) + 0.2 * std::cos(40.0 * (x + c));
        });
        checks.push_back({"paracompose_translation", sup_norm(pc - want), 1e-10});
    }
    // composition of x-independent symbols is exact at rho = 1
    {
        const GridSymbol a =
            GridSymbol::from_multiplier(g, multiplier_frac_abs(1.0));
        const GridSymbol b =
            GridSymbol::from_multiplier(g, multiplier_frac_abs(0.5));
        const ComposeReport rep = compose_residual(a, b, 1);
        double worst = 0.0;
        for (double r : rep.probe_ratios) worst = std::max(worst, r);
        checks.push_back({"compose_x_independent", worst, 1e-10});
    }

    std::ostringstream os;
    os << "check,value,tolerance,pass\n";
    bool all = true;
    for (const auto& c : checks) {
        const bool ok = c.value <= c.tol;
        all = all && ok;
        std::cout << c.name << ": " << fmt6(c.value) << " (tol " << fmt6(c.tol)
                  << ") " << (ok ? "ok" : "FAIL") << "\n";
        char buf[192];
        std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%d\n", c.name.c_str(),
                      c.value, c.tol, ok ? 1 : 0);
        os << buf;
    }
    const std::string base = base_name(o.out_dir, "paradiff-check", 0.0, 0.0);
    atomic_write_text(base + ".csv", os.str());
    std::cout << "wrote " << base << ".csv\n";
    return all ? 0 : 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"pseudospectral experiments for quasi-linear dispersive flows"};
    app.require_subcommand(1);
    app.set_config("--config")->configurable(false);
    app.allow_config_extras(CLI::config_extras_mode::error);

    CommonOpts sep, sys, feas;
    double gamma_order = 1.5;
    SolveOpts solve;
    WwOpts ww;
    ParadiffOpts pd;

    CLI::App* c_solve = app.add_subcommand("solve", "single dispersive solve");
    c_solve->add_option("--alpha", solve.alpha, "dispersive order in [0,2]");
    c_solve->add_option("--t-end", solve.t_end, "final time");
    c_solve->add_option("--amplitude", solve.amplitude, "initial amplitude");
    c_solve->add_option("--grid-n", solve.grid_n, "grid points (even, >= 8)");
    c_solve->add_option("--s", solve.s, "Sobolev index to report");
    c_solve->add_option("--init", solve.init, "initial shape: cos | bump");
    c_solve->add_option("--out-dir", solve.out_dir, "output directory");

    CLI::App* c_sep =
        app.add_subcommand("separation", "two-member Burgers sweep");
    add_common(c_sep, sep);

    CLI::App* c_sys = app.add_subcommand("system-separation",
                                         "symmetrized-system sweep");
    add_common(c_sys, sys, /*with_alpha=*/false);
    c_sys->add_option("--gamma-order", gamma_order,
                      "order of the coupling symbol |xi|^m");

    CLI::App* c_feas =
        app.add_subcommand("feasibility", "admissible exponents + schedule");
    add_common(c_feas, feas);

    CLI::App* c_ww = app.add_subcommand("ww-symbols",
                                        "water-wave symbol tables and checks");
    c_ww->add_option("--grid-n", ww.grid_n, "grid points");
    c_ww->add_option("--eta-amp", ww.eta_amp, "surface amplitude");
    c_ww->add_option("--eta-mode", ww.eta_mode, "surface mode");
    c_ww->add_option("--s", ww.s, "Sobolev index (file naming)");
    c_ww->add_option("--out-dir", ww.out_dir, "output directory");

    CLI::App* c_pd =
        app.add_subcommand("paradiff-check", "paradifferential identities");
    c_pd->add_option("--grid-n", pd.grid_n, "grid points");
    c_pd->add_option("--out-dir", pd.out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (c_solve->parsed()) return cmd_solve(solve);
        if (c_sep->parsed()) return cmd_separation(sep, false, 0.0);
        if (c_sys->parsed()) return cmd_separation(sys, true, gamma_order);
        if (c_feas->parsed()) return cmd_feasibility(feas);
        if (c_ww->parsed()) return cmd_ww(ww);
        if (c_pd->parsed()) return cmd_paradiff_check(pd);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace qf
