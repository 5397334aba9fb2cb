#include "quasiflow/wwsymbols.hpp"

#include <cmath>

namespace qf {

namespace {

int sign_of(int k) { return (k > 0) - (k < 0); }

using Table = std::vector<cx>;

Table make_table(int n) { return Table(static_cast<size_t>(n) * n, cx(0.0, 0.0)); }

}  // namespace

std::vector<double> dn_principal(const RealField& eta, double xi) {
    if (xi == 0.0) throw ZeroFrequency("dn_principal: xi = 0");
    const RealField deta = spectral_derivative(eta, 1);
    std::vector<double> out(eta.samples.size());
    for (size_t j = 0; j < out.size(); ++j) {
        const double ep = deta.samples[j];
        out[j] = std::sqrt((1.0 + ep * ep) * xi * xi - ep * ep * xi * xi);
    }
    return out;
}

double dn_principal(const std::array<double, 2>& grad_eta,
                    const std::array<double, 2>& xi) {
    const double xi2 = xi[0] * xi[0] + xi[1] * xi[1];
    if (xi2 == 0.0) throw ZeroFrequency("dn_principal: xi = 0");
    const double g2 = grad_eta[0] * grad_eta[0] + grad_eta[1] * grad_eta[1];
    const double dot = grad_eta[0] * xi[0] + grad_eta[1] * xi[1];
    return std::sqrt((1.0 + g2) * xi2 - dot * dot);
}

CapillarySymbols capillary_symbols(const RealField& eta) {
    const TorusGrid& g = eta.grid;
    const int n = g.n_points;
    const RealField deta = spectral_derivative(eta, 1);

    // pointwise building blocks per row j
    std::vector<double> ep(n), w2(n);  // eta', 1 + eta'^2
    for (int j = 0; j < n; ++j) {
        ep[j] = deta.samples[j];
        w2[j] = 1.0 + ep[j] * ep[j];
    }

    Table t_lambda1 = make_table(n), t_alpha1 = make_table(n),
          t_l2 = make_table(n), t_q = make_table(n), t_ph = make_table(n),
          t_g32 = make_table(n);
    for (int j = 0; j < n; ++j) {
        const size_t row = static_cast<size_t>(j) * n;
        for (int i = 0; i < n; ++i) {
            const int k = mode_of_index(i, n);
            const double xi = static_cast<double>(k);
            const double axi = std::abs(xi);
            t_lambda1[row + i] = cx(axi, 0.0);
            t_alpha1[row + i] = cx(axi, ep[j] * xi) / std::sqrt(w2[j]);
            t_l2[row + i] = cx(xi * xi * std::pow(w2[j], -1.5), 0.0);
            t_q[row + i] = cx(1.0 / std::sqrt(w2[j]), 0.0);
            t_ph[row + i] = cx(std::pow(w2[j], -1.25) * std::sqrt(axi), 0.0);
            t_g32[row + i] =
                cx(std::sqrt(t_l2[row + i].real() * axi), 0.0);
        }
    }

    // lambda0 = ((1+eta'^2)/(2|xi|)) (d_x(alpha1 eta') + i sign(xi) d_x alpha1)
    Table a1ep = t_alpha1;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) a1ep[static_cast<size_t>(j) * n + i] *= ep[j];
    const Table dx_a1ep = table_dx(g, a1ep);
    const Table dx_a1 = table_dx(g, t_alpha1);
    Table t_lambda0 = make_table(n);
    for (int j = 0; j < n; ++j) {
        const size_t row = static_cast<size_t>(j) * n;
        for (int i = 0; i < n; ++i) {
            const int k = mode_of_index(i, n);
            if (k == 0) continue;  // lambda-quotients vanish at xi = 0
            const double axi = std::abs(static_cast<double>(k));
            t_lambda0[row + i] =
                (w2[j] / (2.0 * axi)) *
                (dx_a1ep[row + i] + cx(0.0, static_cast<double>(sign_of(k))) *
                                        dx_a1[row + i]);
        }
    }

    // l1 = -(i/2) d_x d_xi l2
    const Table dxdxi_l2 = table_dx(g, table_dxi(g, t_l2));
    Table t_l1 = make_table(n);
    for (size_t idx = 0; idx < t_l1.size(); ++idx)
        t_l1[idx] = cx(0.0, -0.5) * dxdxi_l2[idx];

    // gamma = gamma32 + sqrt(l2/lambda1) Re(lambda0)/2 - (i/2) d_xi d_x gamma32
    const Table dxi_dx_g32 = table_dxi(g, table_dx(g, t_g32));
    Table t_gamma = make_table(n), t_g12 = make_table(n);
    for (int j = 0; j < n; ++j) {
        const size_t row = static_cast<size_t>(j) * n;
        for (int i = 0; i < n; ++i) {
            const int k = mode_of_index(i, n);
            if (k == 0) continue;
            const double axi = std::abs(static_cast<double>(k));
            const double ratio = std::sqrt(t_l2[row + i].real() / axi);
            t_gamma[row + i] = t_g32[row + i] +
                               cx(ratio * t_lambda0[row + i].real() / 2.0, 0.0) -
                               cx(0.0, 0.5) * dxi_dx_g32[row + i];
            t_g12[row + i] = t_gamma[row + i] - t_g32[row + i];
        }
    }

    // p_mhalf = (1/gamma32)(q l1 - gamma12 p_half + i d_xi gamma32 d_x p_half)
    const Table dxi_g32 = table_dxi(g, t_g32);
    const Table dx_ph = table_dx(g, t_ph);
    Table t_pm = make_table(n);
    for (int j = 0; j < n; ++j) {
        const size_t row = static_cast<size_t>(j) * n;
        for (int i = 0; i < n; ++i) {
            const int k = mode_of_index(i, n);
            if (k == 0) continue;
            t_pm[row + i] = (t_q[row + i] * t_l1[row + i] -
                             t_g12[row + i] * t_ph[row + i] +
                             cx(0.0, 1.0) * dxi_g32[row + i] * dx_ph[row + i]) /
                            t_g32[row + i];
        }
    }

    CapillarySymbols out;
    out.lambda1 = GridSymbol::from_table(g, 1.0, std::move(t_lambda1));
    out.lambda0 = GridSymbol::from_table(g, 0.0, std::move(t_lambda0));
    out.alpha1 = GridSymbol::from_table(g, 1.0, std::move(t_alpha1));
    out.l2 = GridSymbol::from_table(g, 2.0, std::move(t_l2));
    out.l1 = GridSymbol::from_table(g, 1.0, std::move(t_l1));
    out.q0 = GridSymbol::from_table(g, 0.0, std::move(t_q));
    out.p_half = GridSymbol::from_table(g, 0.5, std::move(t_ph));
    out.p_mhalf = GridSymbol::from_table(g, -0.5, std::move(t_pm));
    out.gamma32 = GridSymbol::from_table(g, 1.5, std::move(t_g32));
    out.gamma12 = GridSymbol::from_table(g, 0.5, std::move(t_g12));
    out.gamma = GridSymbol::from_table(g, 1.5, std::move(t_gamma));
    return out;
}

GravitySymbols gravity_symbols(const RealField& taylor_a) {
    const TorusGrid& g = taylor_a.grid;
    const int n = g.n_points;
    for (double v : taylor_a.samples)
        if (v <= 0.0)
            throw TaylorSignViolation("Taylor coefficient attains " +
                                      std::to_string(v) + " <= 0");
    Table t_gamma = make_table(n), t_q = make_table(n);
    for (int j = 0; j < n; ++j) {
        const size_t row = static_cast<size_t>(j) * n;
        const double sq = std::sqrt(taylor_a.samples[j]);
        for (int i = 0; i < n; ++i) {
            const int k = mode_of_index(i, n);
            if (k == 0) continue;  // q has negative order; assign 0 at xi = 0
            const double axi = std::abs(static_cast<double>(k));
            t_gamma[row + i] = cx(sq * std::sqrt(axi), 0.0);
            t_q[row + i] = cx(sq / std::sqrt(axi), 0.0);
        }
    }
    GravitySymbols out;
    out.gamma = GridSymbol::from_table(g, 0.5, std::move(t_gamma));
    out.q = GridSymbol::from_table(g, -0.5, std::move(t_q));
    return out;
}

Traces linearized_traces(const RealField& eta, const RealField& psi) {
    if (!(eta.grid == psi.grid)) throw GridMismatch("trace grids differ");
    const RealField ep = spectral_derivative(eta, 1);
    const RealField dpsi = spectral_derivative(psi, 1);
    const RealField absD_psi = apply_multiplier(
        psi, Multiplier(1.0, [](int k) {
            return cx(std::abs(static_cast<double>(k)), 0.0);
        }));
    Traces tr;
    tr.B = RealField::zeros(eta.grid);
    for (int j = 0; j < eta.n(); ++j)
        tr.B.samples[j] = (ep.samples[j] * dpsi.samples[j] + absD_psi.samples[j]) /
                          (1.0 + ep.samples[j] * ep.samples[j]);
    tr.V = dpsi - tr.B * ep;
    return tr;
}

RealField good_unknown(const RealField& eta, const RealField& psi, double kappa) {
    const Traces tr = linearized_traces(eta, psi);
    if (kappa != 0.0) return psi - paraproduct(tr.B, eta);
    const RealField ep = spectral_derivative(eta, 1);
    return tr.V + paraproduct(ep, tr.B);
}

CommutationReport verify_commutation(const RealField& eta,
                                     const std::vector<int>& probe_modes,
                                     const CutoffConfig& cfg) {
    const TorusGrid& g = eta.grid;
    const int n = g.n_points;
    const CapillarySymbols sym = capillary_symbols(eta);

    // Lambda = lambda1 + lambda0 and P = p_half + p_mhalf as single tables
    auto table_of = [&](const GridSymbol& s) {
        Table t(static_cast<size_t>(n) * n);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                t[static_cast<size_t>(j) * n + i] = s.value(j, mode_of_index(i, n));
        return t;
    };
    Table t_lambda = table_of(sym.lambda1);
    {
        const Table t0 = table_of(sym.lambda0);
        for (size_t i = 0; i < t_lambda.size(); ++i) t_lambda[i] += t0[i];
    }
    Table t_p = table_of(sym.p_half);
    {
        const Table pm = table_of(sym.p_mhalf);
        for (size_t i = 0; i < t_p.size(); ++i) t_p[i] += pm[i];
    }

    // Coupling symbol for the order-consistent pairing, solved from the
    // composition expansion through two orders:
    //   gamma_c = (P*Lambda + (1/i) d_xi P d_x Lambda - (1/i) d_xi g32 d_x q)/q
    // Its principal part is gamma32 exactly; only the subprincipal differs
    // from the table's gamma (which is normalized for transpose symmetry, a
    // constraint incompatible with this one at subprincipal order).
    Table t_gc = make_table(n);
    {
        const Table dxi_p = table_dxi(g, t_p);
        const Table dx_l = table_dx(g, t_lambda);
        const Table t_g32 = table_of(sym.gamma32);
        const Table dxi_g32 = table_dxi(g, t_g32);
        const Table t_q = table_of(sym.q0);
        const Table dx_q = table_dx(g, t_q);
        const cx inv_i(0.0, -1.0);
        for (int j = 0; j < n; ++j) {
            const size_t row = static_cast<size_t>(j) * n;
            for (int i = 0; i < n; ++i) {
                if (mode_of_index(i, n) == 0) continue;
                t_gc[row + i] = (t_p[row + i] * t_lambda[row + i] +
                                 inv_i * dxi_p[row + i] * dx_l[row + i] -
                                 inv_i * dxi_g32[row + i] * dx_q[row + i]) /
                                t_q[row + i];
            }
        }
    }
    const GridSymbol GammaC = GridSymbol::from_table(g, 1.5, std::move(t_gc));
    const GridSymbol Lambda = GridSymbol::from_table(g, 1.0, std::move(t_lambda));
    const GridSymbol P = GridSymbol::from_table(g, 0.5, std::move(t_p));

    CommutationReport rep;
    for (int k : probe_modes) {
        if (k > g.dealias_cutoff)
            throw InvalidOrder("probe mode beyond dealias cutoff");
        const RealField u = RealField::from_function(
            g, [k](double x) { return std::cos(k * x); });
        const Spectrum su = forward_transform(u);
        const Spectrum qu = paradiff_apply(sym.q0, su, cfg);
        const Spectrum lhs =
            paradiff_apply(P, paradiff_apply(Lambda, su, cfg), cfg);
        const Spectrum rhs = paradiff_apply(GammaC, qu, cfg);
        const Spectrum lit =
            paradiff_apply(sym.q0, paradiff_apply(Lambda, su, cfg), cfg);
        const Spectrum rhs_lit = paradiff_apply(sym.gamma, qu, cfg);
        double d_primary = 0.0, d_literal = 0.0;
        for (int i = 0; i < n; ++i) {
            d_primary += std::norm(lhs.coeffs[i] - rhs.coeffs[i]);
            d_literal += std::norm(lit.coeffs[i] - rhs_lit.coeffs[i]);
        }
        const double nu = l2_norm(u);
        rep.modes.push_back(k);
        rep.residual_primary.push_back(std::sqrt(kTwoPi * d_primary) / nu);
        rep.residual_literal.push_back(std::sqrt(kTwoPi * d_literal) / nu);
    }
    return rep;
}

}  // namespace qf
