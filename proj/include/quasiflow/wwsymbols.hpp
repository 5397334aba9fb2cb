#pragma once

#include <array>
#include <vector>

#include "quasiflow/paradiff.hpp"

namespace qf {

// Principal Dirichlet-Neumann symbol
//   lambda1(x, xi) = sqrt((1 + |grad eta|^2)|xi|^2 - (grad eta . xi)^2),
// evaluated from the literal formula. Over a one-dimensional surface it
// collapses to |xi| identically; the second overload evaluates pointwise
// two-dimensional data (sampled gradient, vector frequency). Throws
// ZeroFrequency when xi = 0.
std::vector<double> dn_principal(const RealField& eta, double xi);
double dn_principal(const std::array<double, 2>& grad_eta,
                    const std::array<double, 2>& xi);

// First-order symbol tables for the one-dimensional capillary water-wave
// linearization around a surface eta (unit surface tension, unit depth
// regime with the flat-bottom Dirichlet-Neumann operator approximated by
// |D| in the traces). Orders: lambda1 = 1, lambda0 = 0, alpha1 = 1, l2 = 2,
// l1 = 1, q0 = 0, p_half = 1/2, p_mhalf = -1/2, gamma32 = 3/2,
// gamma12 = 1/2, gamma = 3/2.
struct CapillarySymbols {
    GridSymbol lambda1, lambda0, alpha1;
    GridSymbol l2, l1;
    GridSymbol q0, p_half, p_mhalf;
    GridSymbol gamma32, gamma12, gamma;
};

// All tables built from eta' (spectral) with x-derivatives taken spectrally
// per mode column and xi-derivatives by centered differences of step 1.
// A flat surface collapses to (q, p, gamma) = (1, |xi|^{1/2}, |xi|^{3/2}).
CapillarySymbols capillary_symbols(const RealField& eta);

// Pure-gravity pair gamma = sqrt(a) |xi|^{1/2}, q = sqrt(a) |xi|^{-1/2}
// (zero at xi = 0), so q * gamma = a for xi != 0. Throws TaylorSignViolation
// when the Taylor coefficient a is not strictly positive.
struct GravitySymbols {
    GridSymbol gamma, q;
};
GravitySymbols gravity_symbols(const RealField& taylor_a);

// Linearized boundary traces with G(eta) ~ |D|:
//   B = (eta' psi' + |D| psi) / (1 + eta'^2),   V = psi' - B eta'.
struct Traces {
    RealField B, V;
};
Traces linearized_traces(const RealField& eta, const RealField& psi);

// kappa != 0 (capillary): psi - T_B eta; kappa = 0 (gravity): V + T_{eta'} B.
RealField good_unknown(const RealField& eta, const RealField& psi, double kappa);

// Residuals of the symmetrizer commutation identity on probes cos(kx):
//   primary:  || T_P T_Lambda u - T_Gamma T_Q u || / ||u||   (P = p_half +
//             p_mhalf, Lambda = lambda1 + lambda0, Gamma = gamma, Q = q0;
//             both pairings have total order 3/2)
//   literal:  || T_Q T_Lambda u - T_Gamma T_Q u || / ||u||   (kept for
//             reference; the orders differ, so it does not vanish)
// Per probe cos(kx): residual_primary pairs op(p)op(lambda) against
// op(gamma_c)op(q) where gamma_c solves the composition identity through two
// orders (same principal part as gamma; only the subprincipal differs), so
// the ratio decays one order below the operators. residual_literal pairs
// op(q)op(lambda) against op(gamma)op(q) with the table's gamma, whose
// subprincipal is normalized for transpose symmetry instead; that ratio grows.
struct CommutationReport {
    std::vector<int> modes;
    std::vector<double> residual_primary;
    std::vector<double> residual_literal;
};
CommutationReport verify_commutation(const RealField& eta,
                                     const std::vector<int>& probe_modes,
                                     const CutoffConfig& cfg = {});

}  // namespace qf
