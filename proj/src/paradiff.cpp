#include "quasiflow/paradiff.hpp"

#include <algorithm>
#include <cmath>

namespace qf {

namespace {

constexpr double kSupportRelTol = 1e-14;

bool rows_identical(const std::vector<cx>& values, int n) {
    for (int j = 1; j < n; ++j)
        for (int i = 0; i < n; ++i)
            if (values[j * n + i] != values[i]) return false;
    return true;
}

}  // namespace

void GridSymbol::finalize() {
    const int n = grid.n_points;
    if (x_independent) {
        hat.clear();
        support.clear();
        double sn = 0.0;
        for (int i = 0; i < n; ++i) {
            const int k = mode_of_index(i, n);
            sn = std::max(sn, std::abs(values[i]) /
                                  std::pow(1.0 + std::abs(static_cast<double>(k)), order));
        }
        seminorm_M = sn;
        return;
    }
    hat.assign(static_cast<size_t>(n) * n, cx(0.0, 0.0));
    support.assign(n, -1);
    std::vector<cx> col(n), colhat(n);
    double sn = 0.0;
    for (int i = 0; i < n; ++i) {
        const int k = mode_of_index(i, n);
        double colmax_val = 0.0;
        for (int j = 0; j < n; ++j) {
            col[j] = values[static_cast<size_t>(j) * n + i];
            colmax_val = std::max(colmax_val, std::abs(col[j]));
        }
        sn = std::max(sn, colmax_val /
                              std::pow(1.0 + std::abs(static_cast<double>(k)), order));
        fft_forward_scaled(col, colhat);
        std::copy(colhat.begin(), colhat.end(),
                  hat.begin() + static_cast<size_t>(i) * n);
        double hmax = 0.0;
        for (const cx& c : colhat) hmax = std::max(hmax, std::abs(c));
        if (hmax == 0.0) continue;
        int rad = 0;
        for (int iz = 0; iz < n; ++iz) {
            if (std::abs(colhat[iz]) > kSupportRelTol * hmax)
                rad = std::max(rad, std::abs(mode_of_index(iz, n)));
        }
        support[i] = rad;
    }
    seminorm_M = sn;
}

GridSymbol GridSymbol::from_function(const TorusGrid& g, double order_,
                                     const std::function<cx(double, double)>& a) {
    GridSymbol s;
    s.grid = g;
    s.order = order_;
    const int n = g.n_points;
    s.values.resize(static_cast<size_t>(n) * n);
    for (int j = 0; j < n; ++j) {
        const double x = g.x(j);
        for (int i = 0; i < n; ++i)
            s.values[static_cast<size_t>(j) * n + i] =
                a(x, static_cast<double>(mode_of_index(i, n)));
    }
    if (rows_identical(s.values, n)) {
        s.x_independent = true;
        s.values.resize(n);
    }
    s.finalize();
    return s;
}

GridSymbol GridSymbol::from_multiplier(const TorusGrid& g, const Multiplier& m) {
    GridSymbol s;
    s.grid = g;
    s.order = m.order;
    s.x_independent = true;
    const int n = g.n_points;
    s.values.resize(n);
    for (int i = 0; i < n; ++i) s.values[i] = m.symbol(mode_of_index(i, n));
    s.finalize();
    return s;
}

GridSymbol GridSymbol::from_table(const TorusGrid& g, double order_,
                                  std::vector<cx> table) {
    const int n = g.n_points;
    if (table.size() != static_cast<size_t>(n) * n)
        throw GridMismatch("symbol table size does not match grid");
    GridSymbol s;
    s.grid = g;
    s.order = order_;
    s.values = std::move(table);
    if (rows_identical(s.values, n)) {
        s.x_independent = true;
        s.values.resize(n);
    }
    s.finalize();
    return s;
}

GridSymbol GridSymbol::from_field(const RealField& a) {
    GridSymbol s;
    s.grid = a.grid;
    s.order = 0.0;
    const int n = a.n();
    s.values.resize(static_cast<size_t>(n) * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            s.values[static_cast<size_t>(j) * n + i] = cx(a.samples[j], 0.0);
    if (rows_identical(s.values, n)) {
        s.x_independent = true;
        s.values.resize(n);
    }
    s.finalize();
    return s;
}

cx GridSymbol::value(int j, int k) const {
    const int n = grid.n_points;
    const int i = k >= 0 ? k : k + n;
    return x_independent ? values[i] : values[static_cast<size_t>(j) * n + i];
}

cx GridSymbol::hat_at(int zeta, int i_eta) const {
    const int n = grid.n_points;
    const int iz = zeta >= 0 ? zeta : zeta + n;
    return hat[static_cast<size_t>(i_eta) * n + iz];
}

cx GridSymbol::value_offgrid(double y, int k) const {
    const int n = grid.n_points;
    const int i = k >= 0 ? k : k + n;
    if (x_independent) return values[i];
    const int rad = support[i];
    if (rad < 0) return cx(0.0, 0.0);
    cx acc(0.0, 0.0);
    for (int z = -rad; z <= rad; ++z) {
        if (z < grid.min_mode() || z > grid.max_mode()) continue;
        acc += hat_at(z, i) * std::polar(1.0, z * y);
    }
    return acc;
}

Spectrum paradiff_apply(const GridSymbol& a, const Spectrum& u,
                        const CutoffConfig& cfg) {
    if (!(a.grid == u.grid)) throw GridMismatch("symbol and field grids differ");
    const int n = u.n();
    Spectrum out = Spectrum::zeros(u.grid);
    if (a.x_independent) {
        for (int i = 0; i < n; ++i) {
            const int k = mode_of_index(i, n);
            if (cfg.passes_psi(k)) out.coeffs[i] = a.values[i] * u.coeffs[i];
        }
        return out;
    }
    const int kmin = u.grid.min_mode(), kmax = u.grid.max_mode();
    for (int i = 0; i < n; ++i) {
        const int eta = mode_of_index(i, n);
        if (!cfg.passes_psi(eta)) continue;
        const cx cu = u.coeffs[i];
        if (cu == cx(0.0, 0.0)) continue;
        const int rad = std::min(cfg.zeta_radius(eta), a.support[i]);
        for (int z = -rad; z <= rad; ++z) {
            const int xi = eta + z;
            if (xi < kmin || xi > kmax) continue;
            out.at_mode(xi) += a.hat_at(z, i) * cu;
        }
    }
    return out;
}

RealField paradiff_apply(const GridSymbol& a, const RealField& u,
                         const CutoffConfig& cfg) {
    return inverse_transform(paradiff_apply(a, forward_transform(u), cfg));
}

Spectrum paradiff_apply_transpose(const GridSymbol& a, const Spectrum& u,
                                  const CutoffConfig& cfg) {
    if (!(a.grid == u.grid)) throw GridMismatch("symbol and field grids differ");
    const int n = u.n();
    Spectrum out = Spectrum::zeros(u.grid);
    if (a.x_independent) {
        for (int i = 0; i < n; ++i) {
            const int k = mode_of_index(i, n);
            if (cfg.passes_psi(k))
                out.coeffs[i] = std::conj(a.values[i]) * u.coeffs[i];
        }
        return out;
    }
    const int kmin = u.grid.min_mode(), kmax = u.grid.max_mode();
    for (int i = 0; i < n; ++i) {
        const int xi = mode_of_index(i, n);
        if (!cfg.passes_psi(xi)) continue;
        const int rad = std::min(cfg.zeta_radius(xi), a.support[i]);
        cx acc(0.0, 0.0);
        for (int z = -rad; z <= rad; ++z) {
            const int src = xi + z;
            if (src < kmin || src > kmax) continue;
            acc += std::conj(a.hat_at(z, i)) * u.coeffs[u.index_of(src)];
        }
        out.coeffs[i] = acc;
    }
    return out;
}

RealField paraproduct(const RealField& a, const RealField& u) {
    if (!(a.grid == u.grid)) throw GridMismatch("field grids differ");
    const TorusGrid& g = a.grid;
    const Spectrum sa = forward_transform(a);
    const Spectrum su = forward_transform(u);
    const int nblocks = dyadic_block_count(g);
    RealField acc = RealField::zeros(g);
    Spectrum prefix = Spectrum::zeros(g);  // running S_p(a)
    int p_current = -1;
    for (int q = 3; q < nblocks; ++q) {
        while (p_current < q - 3) {
            ++p_current;
            const Spectrum blk = dyadic_block(sa, p_current);
            for (int i = 0; i < g.n_points; ++i) prefix.coeffs[i] += blk.coeffs[i];
        }
        const RealField Sa = inverse_transform_real(prefix);
        const RealField Du = inverse_transform_real(dyadic_block(su, q));
        for (int j = 0; j < g.n_points; ++j)
            acc.samples[j] += Sa.samples[j] * Du.samples[j];
    }
    return inverse_transform_real(dealias(forward_transform(acc)));
}

RealField bony_remainder(const RealField& a, const RealField& b) {
    RealField prod = inverse_transform_real(dealias(forward_transform(a * b)));
    return prod - paraproduct(a, b) - paraproduct(b, a);
}

Diffeo Diffeo::make(const TorusGrid& g, const std::function<double(double)>& chi_fn) {
    Diffeo d;
    d.grid = g;
    const int n = g.n_points;
    d.chi.resize(n);
    std::vector<double> periodic_part(n);
    for (int j = 0; j < n; ++j) {
        d.chi[j] = chi_fn(g.x(j));
        periodic_part[j] = d.chi[j] - g.x(j);
    }
    RealField perturb(g, std::move(periodic_part));
    RealField dp = spectral_derivative(perturb, 1);
    d.dchi.resize(n);
    double mn = 1e300;
    for (int j = 0; j < n; ++j) {
        d.dchi[j] = 1.0 + dp.samples[j];
        mn = std::min(mn, d.dchi[j]);
    }
    if (mn <= 0.0)
        throw NotDiffeomorphism("chi' attains " + std::to_string(mn) +
                                " <= 0 on the grid");
    return d;
}

double Diffeo::sup_dchi() const {
    double m = 0.0;
    for (double v : dchi) m = std::max(m, std::abs(v));
    return m;
}

double Diffeo::inf_dchi() const {
    double m = 1e300;
    for (double v : dchi) m = std::min(m, v);
    return m;
}

int paracompose_default_width(const Diffeo& chi) {
    const double bound = std::max(chi.sup_dchi(), 1.0 / chi.inf_dchi()) + 1.0;
    int w = 0;
    while (std::pow(2.0, w) <= bound) ++w;
    return w;
}

RealField paracompose(const Diffeo& chi, const RealField& u, int width) {
    if (!(chi.grid == u.grid)) throw GridMismatch("diffeo and field grids differ");
    if (width < 0) width = paracompose_default_width(chi);
    const TorusGrid& g = u.grid;
    const int n = g.n_points;
    const Spectrum su = forward_transform(u);
    const int nblocks = dyadic_block_count(g);
    Spectrum acc = Spectrum::zeros(g);
    std::vector<cx> comp(n), comp_hat(n);
    for (int k = 0; k < nblocks; ++k) {
        // modes of block k, as (mode, coeff) pairs
        std::vector<std::pair<int, cx>> modes;
        for (int i = 0; i < n; ++i) {
            const int m = mode_of_index(i, n);
            if (dyadic_block_index(m) == k && su.coeffs[i] != cx(0.0, 0.0))
                modes.emplace_back(m, su.coeffs[i]);
        }
        if (modes.empty()) continue;
        for (int j = 0; j < n; ++j) {
            const double y = chi.chi[j];
            cx v(0.0, 0.0);
            for (const auto& [m, c] : modes) v += c * std::polar(1.0, m * y);
            comp[j] = cx(v.real(), 0.0);
        }
        fft_forward_scaled(comp, comp_hat);
        const int l_lo = std::max(0, k - width);
        const int l_hi = std::min(nblocks - 1, k + width);
        for (int i = 0; i < n; ++i) {
            const int m = mode_of_index(i, n);
            const int l = dyadic_block_index(m);
            if (l >= l_lo && l <= l_hi) acc.coeffs[i] += comp_hat[i];
        }
    }
    return inverse_transform_real(acc);
}

GridSymbol pullback_symbol(const GridSymbol& a, const Diffeo& chi) {
    if (!(a.grid == chi.grid)) throw GridMismatch("symbol and diffeo grids differ");
    const TorusGrid& g = a.grid;
    const int n = g.n_points;
    GridSymbol r;
    r.grid = g;
    r.order = a.order;
    r.x_independent = false;
    r.values.resize(static_cast<size_t>(n) * n);
    const double kmin = g.min_mode(), kmax = g.max_mode();

    // per-row phase table e^{i z y} for the trigonometric interpolation in x
    std::vector<cx> phase(n);
    for (int j = 0; j < n; ++j) {
        const double y = chi.chi[j];
        const double d = chi.dchi[j];
        if (!a.x_independent) {
            const cx step = std::polar(1.0, y);
            cx w = std::polar(1.0, g.min_mode() * y);
            for (int z = g.min_mode(); z <= g.max_mode(); ++z) {
                phase[z >= 0 ? z : z + n] = w;
                w *= step;
            }
        }
        auto eval_col = [&](int k) -> cx {
            const int i = k >= 0 ? k : k + n;
            if (a.x_independent) return a.values[i];
            const int rad = a.support[i];
            if (rad < 0) return cx(0.0, 0.0);
            cx acc(0.0, 0.0);
            for (int z = std::max(-rad, g.min_mode());
                 z <= std::min(rad, g.max_mode()); ++z)
                acc += a.hat_at(z, i) * phase[z >= 0 ? z : z + n];
            return acc;
        };
        for (int i = 0; i < n; ++i) {
            const int k = mode_of_index(i, n);
            double xi = static_cast<double>(k) / d;
            xi = std::clamp(xi, kmin, kmax);
            int lo = static_cast<int>(std::floor(xi));
            int hi = lo + 1;
            if (hi > g.max_mode()) {
                hi = g.max_mode();
                lo = hi - 1;
            }
            const double w = xi - lo;
            r.values[static_cast<size_t>(j) * n + i] =
                (1.0 - w) * eval_col(lo) + w * eval_col(hi);
        }
    }
    r.finalize();
    return r;
}

std::vector<cx> table_dx(const TorusGrid& g, const std::vector<cx>& t) {
    const int n = g.n_points;
    if (t.size() != static_cast<size_t>(n) * n)
        throw GridMismatch("table size does not match grid");
    std::vector<cx> out(t.size());
    std::vector<cx> col(n), colh(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) col[j] = t[static_cast<size_t>(j) * n + i];
        fft_forward_scaled(col, colh);
        for (int iz = 0; iz < n; ++iz) {
            const int z = mode_of_index(iz, n);
            colh[iz] *= std::abs(z) == n / 2 ? cx(0.0, 0.0)
                                             : cx(0.0, static_cast<double>(z));
        }
        fft_backward(colh, col);
        for (int j = 0; j < n; ++j) out[static_cast<size_t>(j) * n + i] = col[j];
    }
    return out;
}

std::vector<cx> table_dxi(const TorusGrid& g, const std::vector<cx>& t) {
    const int n = g.n_points;
    if (t.size() != static_cast<size_t>(n) * n)
        throw GridMismatch("table size does not match grid");
    std::vector<cx> out(t.size());
    for (int j = 0; j < n; ++j) {
        const size_t row = static_cast<size_t>(j) * n;
        auto at = [&](int kk) { return t[row + (kk >= 0 ? kk : kk + n)]; };
        for (int i = 0; i < n; ++i) {
            const int k = mode_of_index(i, n);
            if (k - 1 < g.min_mode())
                out[row + i] = at(k + 1) - at(k);
            else if (k + 1 > g.max_mode())
                out[row + i] = at(k) - at(k - 1);
            else
                out[row + i] = 0.5 * (at(k + 1) - at(k - 1));
        }
    }
    return out;
}

ComposeReport compose_residual(const GridSymbol& a, const GridSymbol& b, int rho,
                               const CutoffConfig& cfg) {
    if (!(a.grid == b.grid)) throw GridMismatch("symbol grids differ");
    if (rho < 1) throw InvalidOrder("composition truncation rho must be >= 1");
    const TorusGrid& g = a.grid;
    const int n = g.n_points;

    // full tables in k order are more convenient here; index by (j, i)
    auto table_of = [&](const GridSymbol& s) {
        std::vector<cx> t(static_cast<size_t>(n) * n);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                t[static_cast<size_t>(j) * n + i] = s.value(j, mode_of_index(i, n));
        return t;
    };

    std::vector<cx> da = table_of(a);  // d_xi^alpha a, updated in place
    std::vector<cx> db = table_of(b);  // d_x^alpha b, updated in place
    GridSymbol c;
    c.grid = g;
    c.order = a.order + b.order;
    c.x_independent = false;
    c.values.assign(static_cast<size_t>(n) * n, cx(0.0, 0.0));

    cx ipow(1.0, 0.0);  // i^alpha
    double fact = 1.0;
    for (int alpha = 0; alpha < rho; ++alpha) {
        if (alpha > 0) {
            da = table_dxi(g, da);
            if (b.x_independent)
                std::fill(db.begin(), db.end(), cx(0.0, 0.0));
            else
                db = table_dx(g, db);
            ipow *= cx(0.0, 1.0);
            fact *= alpha;
        }
        const cx coeff = 1.0 / (ipow * fact);
        for (size_t idx = 0; idx < c.values.size(); ++idx)
            c.values[idx] += coeff * da[idx] * db[idx];
    }
    if (rows_identical(c.values, n)) {
        c.x_independent = true;
        c.values.resize(n);
    }
    c.finalize();

    ComposeReport rep;
    rep.composed = c;
    for (int k : {8, 16, 32, 64, 128}) {
        if (k > g.dealias_cutoff) continue;
        RealField u = RealField::from_function(
            g, [k](double x) { return std::cos(k * x); });
        const Spectrum su = forward_transform(u);
        const Spectrum two_step = paradiff_apply(a, paradiff_apply(b, su, cfg), cfg);
        const Spectrum one_step = paradiff_apply(c, su, cfg);
        double diff2 = 0.0;
        for (int i = 0; i < n; ++i) diff2 += std::norm(two_step.coeffs[i] - one_step.coeffs[i]);
        rep.probe_modes.push_back(k);
        rep.probe_ratios.push_back(std::sqrt(kTwoPi * diff2) / l2_norm(u));
    }
    return rep;
}

}  // namespace qf
