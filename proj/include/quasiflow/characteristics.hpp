#pragma once

#include <vector>

#include "quasiflow/evolve.hpp"

namespace qf {

// Characteristic flow chi(t_to, t_from, x) of dX/dt = u(t, X) along a
// checkpointed trajectory, for a set of seed points.
struct FlowMap {
    double t_from = 0.0;
    double t_to = 0.0;
    std::vector<double> seeds;
    std::vector<double> positions;
    std::vector<double> jacobian;  // d(position)/d(seed)
};

struct FlowConfig {
    double flow_dt_max = 5e-3;
};

// RK4 on the particle ODE with the velocity reconstructed by cubic Hermite
// interpolation of the trajectory checkpoints (states + stored derivatives)
// in time and trigonometric interpolation in space. The Jacobian integrates
// the variational equation dJ/dt = u_x(t, X) J alongside; when the seeds are
// exactly the grid nodes it is replaced by the spectral derivative of the
// interpolated displacement map, and FlowDegenerate is thrown if it is not
// strictly positive. Throws TimeOutOfRange for queries outside the stored
// span. t_to < t_from integrates backward.
FlowMap integrate_flow(const Trajectory& traj, double t_from, double t_to,
                       const std::vector<double>& seeds,
                       const FlowConfig& cfg = {});

// Flow from fm.t_to back to fm.t_from seeded at fm.positions; composing with
// fm should return the original seeds.
FlowMap invert_flow(const Trajectory& traj, const FlowMap& fm,
                    const FlowConfig& cfg = {});

// || h o chi ||_{H^s} / || h ||_{H^s} with chi the flow map over
// [t_from, t_to] seeded at the grid nodes. Throws ZeroField if ||h|| = 0.
double compose_norm_ratio(const Trajectory& traj, double t_from, double t_to,
                          const RealField& h, double s,
                          const FlowConfig& cfg = {});

// max_j |u(t_end, chi(t_end, t0, x_j)) - u0(x_j)|: exactness of transport
// along characteristics (zero for pure advection until shocks form).
double transport_check(const Trajectory& traj, const std::vector<double>& seeds,
                       const FlowConfig& cfg = {});
// convenience overload: seeds = all grid nodes
double transport_check(const Trajectory& traj, const FlowConfig& cfg = {});

}  // namespace qf
