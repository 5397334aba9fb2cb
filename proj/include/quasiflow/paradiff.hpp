#pragma once

#include <cmath>
#include <cstdlib>
#include <functional>
#include <vector>

#include "quasiflow/norms.hpp"
#include "quasiflow/spectral.hpp"

namespace qf {

// Frequency cutoffs defining the quantization. theta is the sharp cutoff
// 1_{|zeta| <= eps1 |eta|} on symbol frequency zeta vs input frequency eta;
// psi(eta) = 0 for |eta| <= psi_threshold kills low input frequencies.
// eps2 > eps1 bounds the admissible cutoff class; the sharp theta sits
// strictly inside it and eps2 plays no computational role.
struct CutoffConfig {
    double eps1 = 0.125;
    double eps2 = 0.25;
    double psi_threshold = 1.0;

    bool passes_psi(int eta) const {
        return std::abs(eta) > psi_threshold;
    }
    int zeta_radius(int eta) const {
        return static_cast<int>(eps1 * std::abs(eta));
    }
};

// Symbol a(x, xi) tabulated on grid nodes x_j and integer modes xi = k.
// For x-dependent symbols the partial Fourier transform over x
//   hat(zeta, eta) = (1/n) sum_j a(x_j, eta) e^{-i zeta x_j}
// is precomputed per eta-column along with a support radius (largest |zeta|
// carrying non-negligible mass) so the quantization loop can stay sparse.
struct GridSymbol {
    TorusGrid grid;
    double order = 0.0;
    bool x_independent = false;
    // x_independent: values has size n, values[i] = a(k(i)).
    // otherwise:     values has size n*n, values[j*n+i] = a(x_j, k(i)).
    std::vector<cx> values;
    std::vector<cx> hat;       // size n*n, hat[i_eta*n + index(zeta)]; empty if x_independent
    std::vector<int> support;  // per eta-column; -1 for an all-zero column
    double seminorm_M = 0.0;   // sup_k (1+|k|)^{-order} max_j |a(x_j,k)|

    static GridSymbol from_function(const TorusGrid& g, double order,
                                    const std::function<cx(double, double)>& a);
    static GridSymbol from_multiplier(const TorusGrid& g, const Multiplier& m);
    static GridSymbol from_field(const RealField& a);  // a(x), order 0
    // n*n row-major table values[j*n+i]; collapses x-independent tables.
    static GridSymbol from_table(const TorusGrid& g, double order,
                                 std::vector<cx> table);

    cx value(int j, int k) const;
    cx hat_at(int zeta, int i_eta) const;
    // Trigonometric interpolation of a(., k) at off-grid point y via hat.
    cx value_offgrid(double y, int k) const;

    // Recompute hat/support/seminorm after filling `values` directly.
    void finalize();
};

// T_a u in the sharp-cutoff quantization:
//   (T_a u)^(xi) = sum_{|eta|>threshold} sum_{|zeta|<=eps1|eta|}
//                    hat(zeta,eta) u_hat(eta) [xi = eta+zeta],
// with out-of-range output modes dropped. x-independent symbols reduce to
// the multiplier psi(xi) a(xi) u_hat(xi).
Spectrum paradiff_apply(const GridSymbol& a, const Spectrum& u,
                        const CutoffConfig& cfg = {});
RealField paradiff_apply(const GridSymbol& a, const RealField& u,
                         const CutoffConfig& cfg = {});

// Real-L2 transpose of T_a:
//   (T_a^T u)^(xi) = sum_{|zeta|<=eps1|xi|} conj(hat(zeta,xi)) u_hat(xi+zeta)
// for |xi| > threshold, zero otherwise. <T_a u, v> = <u, T_a^T v> holds
// term by term for real pairings.
Spectrum paradiff_apply_transpose(const GridSymbol& a, const Spectrum& u,
                                  const CutoffConfig& cfg = {});

// Bony paraproduct T_a u = sum_{q>=2} S_{q-3}(a) Delta_q(u) over the sharp
// dyadic blocks (S_{-1} = S_{-2} = 0), dealiased. For constant a this passes
// exactly the modes in blocks q >= 3, i.e. |k| >= 8.
RealField paraproduct(const RealField& a, const RealField& u);

// R(a,b) = dealias(ab) - T_a b - T_b a.
RealField bony_remainder(const RealField& a, const RealField& b);

// Orientation-preserving torus diffeomorphism chi with chi(x) - x periodic.
struct Diffeo {
    TorusGrid grid;
    std::vector<double> chi;   // chi(x_j)
    std::vector<double> dchi;  // chi'(x_j), spectral

    static Diffeo make(const TorusGrid& g, const std::function<double(double)>& chi);

    double sup_dchi() const;
    double inf_dchi() const;
};

// Smallest w with 2^w > max(sup|chi'|, sup|1/chi'|) + 1.
int paracompose_default_width(const Diffeo& chi);

// Paracomposition chi^* u = sum_k sum_{|l-k|<=width} Delta_l( (Delta_k u) o chi ),
// with each block composed through its trigonometric interpolant. width < 0
// selects the default rule. Exact for translations chi(x) = x + c at any
// width >= 0 because sharp blocks are translation invariant.
RealField paracompose(const Diffeo& chi, const RealField& u, int width = -1);

// a*(x, xi) = a(chi(x), xi / chi'(x)): trigonometric interpolation in x,
// linear interpolation between adjacent integer modes in xi (exact for
// symbols piecewise linear in xi such as |xi|); xi/chi' clamped to the
// tabulated mode range.
GridSymbol pullback_symbol(const GridSymbol& a, const Diffeo& chi);

// Truncated symbolic composition a#b = sum_{alpha<rho} (1/(i^alpha alpha!))
// d_xi^alpha a . d_x^alpha b (centered differences of step 1 in xi, spectral
// in x), plus probe residuals ||T_a T_b u - T_{a#b} u||_{L2} / ||u||_{L2}
// for probes cos(kx), k in {8,16,32,64,128} (clipped to the dealias range).
struct ComposeReport {
    GridSymbol composed;
    std::vector<int> probe_modes;
    std::vector<double> probe_ratios;
};
ComposeReport compose_residual(const GridSymbol& a, const GridSymbol& b, int rho,
                               const CutoffConfig& cfg = {});

// Derivatives of n*n symbol tables laid out like GridSymbol::values:
// d/dx spectrally per mode column, d/dxi by centered differences of step 1
// in the mode direction (one-sided at the ends of the mode range).
std::vector<cx> table_dx(const TorusGrid& g, const std::vector<cx>& t);
std::vector<cx> table_dxi(const TorusGrid& g, const std::vector<cx>& t);

}  // namespace qf
