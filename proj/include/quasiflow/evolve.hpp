#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "quasiflow/paradiff.hpp"
#include "quasiflow/spectral.hpp"

namespace qf {

struct SolverConfig {
    double dt_max = 5e-3;
    double cfl = 0.4;
    bool dealias = true;
    int store_every = 1;
    DispersiveKind dispersive_kind = DispersiveKind::homogeneous;
    // Minimum admissible min_{x,|k|>=2} |gamma(x,k)| / |k|^order for the
    // symmetrized system solver.
    double ellipticity_floor = 1e-6;
    // L2 growth envelope ||u(t)|| <= e^{ct} ||u0|| enforced by the
    // pulled-back solver; infinity disables the check.
    double growth_envelope_c = std::numeric_limits<double>::infinity();
};

// Checkpointed solution. derivs[i] is the full right-hand side du/dt at
// (times[i], states[i]) so trajectories support cubic Hermite interpolation
// between checkpoints. dt is the actual uniform step used.
struct Trajectory {
    std::vector<double> times;
    std::vector<RealField> states;
    std::vector<RealField> derivs;
    SolverConfig config;
    double dt = 0.0;

    const RealField& final_state() const { return states.back(); }
    double t_end() const { return times.back(); }
};

struct PairTrajectory {
    std::vector<double> times;
    std::vector<RealField> states1, states2;
    std::vector<RealField> derivs1, derivs2;
    SolverConfig config;
    double dt = 0.0;
};

// Exact solution operator of dt u + H |D|^alpha u = 0 over time t
// (H = Hilbert transform): multiplication by e^{i sign(k) phi(k) t} with
// phi = |k|^alpha or <k>^alpha. Negative t propagates backward.
RealField linear_propagate(const RealField& u0, double alpha, double t,
                           DispersiveKind kind = DispersiveKind::homogeneous);

// dt u + u u_x + H |D|^alpha u = 0 via integrating-factor RK4 in Fourier
// space; the quadratic term is dealiased (2/3 rule) when cfg.dealias is set.
// Mode 0 is conserved exactly. Throws ShockSuspected when sup|u_x| exceeds
// 50x its initial value, StepUnstable on non-finite samples.
Trajectory solve_dispersive_burgers(const RealField& u0, double alpha,
                                    double t_end, const SolverConfig& cfg = {});

// alpha-independent special case dt u + u u_x = 0 (no dispersive term).
Trajectory solve_burgers(const RealField& u0, double t_end,
                         const SolverConfig& cfg = {});

// Transport velocity rule V = v(t, phi1, phi2) for the symmetrized system.
using VRule =
    std::function<RealField(double, const RealField&, const RealField&)>;
VRule v_rule_first_component();        // V = phi1
VRule v_rule_fixed(RealField w);       // V = w, frozen
VRule v_rule_zero();

// Symmetrized transport-dispersive pair
//   dt phi1 = -T_V dx phi1 + G phi2
//   dt phi2 = -T_V dx phi2 - G phi1,      G = (T_gamma + T_gamma^T)/2,
// with T_V the Bony paraproduct and G the symmetric part of the
// paradifferential quantization of gamma (order cfg-independent, carried by
// the symbol). The coupling block is exactly skew, so V = 0 conserves
// ||phi1||^2 + ||phi2||^2 up to rounding. Classical RK4; the step satisfies
// dt <= 2.5 / max |gamma| over retained modes. Throws EllipticityViolated if
// min_{x,|k|>=2} |gamma|/|k|^order < cfg.ellipticity_floor.
PairTrajectory solve_symmetrized_system(const RealField& phi1_0,
                                        const RealField& phi2_0,
                                        const GridSymbol& gamma, const VRule& v,
                                        double t_end,
                                        const SolverConfig& cfg = {});

// Exact solution of the V = 0 system for x-independent real gamma: each
// psi-passed mode rotates, Z = phi1 + i phi2 gaining e^{-i gamma(k) t}.
// Modes with |k| <= psi threshold are left untouched.
std::pair<RealField, RealField> system_linear_propagate(
    const RealField& phi1, const RealField& phi2, const GridSymbol& gamma,
    double t, const CutoffConfig& cutoffs = {});

// dt u + T_{a*(t)} u = 0 where a*(t) is the pullback of the symbol a through
// the time-dependent diffeomorphism chi_at(t) (recomputed at every RK4 stage
// time). Enforces the L2 growth envelope when cfg.growth_envelope_c is
// finite.
Trajectory solve_pulled_back(const RealField& u0, const GridSymbol& a,
                             const std::function<Diffeo(double)>& chi_at,
                             double t_end, const SolverConfig& cfg = {});

}  // namespace qf
