#pragma once

#include <optional>
#include <vector>

#include "quasiflow/evolve.hpp"
#include "quasiflow/spectral.hpp"

namespace qf {

// Smooth bump: 1 on |x| <= 1/2, 0 on |x| >= 1, glued by the standard
// exp(-1/t) partition function in between; bump(3/4) = 1/2 exactly by
// symmetry of the glue.
double bump(double x);

// bump(lambda * wrap(x - center)) sampled on the grid, with wrap into
// [-pi, pi).
RealField bump_field(const TorusGrid& g, double lambda, double center);

struct AnsatzPair {
    RealField u0, v0;
    double lambda = 0.0, epsilon = 0.0, x_w = 0.0;
};

// u0 = lambda^{1/2-s} bump(lambda .), v0 = u0 + epsilon bump(.), both
// centered at x_w. Throws UnderResolved when the grid has fewer than
// 32*lambda points.
AnsatzPair make_ansatz_pair(const TorusGrid& g, double lambda, double epsilon,
                            double s, double x_w = 0.0);

struct RegimeExponents {
    double delta1 = 0.0;  // epsilon = lambda^{-delta1}
    double delta2 = 0.0;  // tau     = lambda^{-delta2}
};

// Analytic center of the open polygon of admissible exponent pairs
//   delta2 > (alpha-1)+        (weak-norm decay)
//   delta1 + delta2 < 1        (separation growth)
//   delta1 + 2*delta2 > alpha  (quadratic error control)
//   delta1 > 0
//   delta1 > 1 - (alpha-1)+ - eps_prime   (only when want_c1)
// via a feasibility grid scan followed by Newton iterations on the
// log-barrier. Returns nullopt when the polygon is empty (e.g. alpha = 2).
// Throws InvalidOrder outside alpha in [0, 2.5].
std::optional<RegimeExponents> feasible_exponents(double alpha,
                                                  double eps_prime = 0.0,
                                                  bool want_c1 = false);

struct ScheduleEntry {
    int n = 0;
    double lambda = 0.0, epsilon = 0.0, tau = 0.0;
    double lambda_eps_tau = 0.0;  // lambda*eps*tau, must grow with n
    double quad_error = 0.0;      // lambda^alpha*eps*tau^2, must shrink
    double weak_decay = 0.0;      // tau*lambda^{(alpha-1)+}, must shrink
};

// lambda = 2^n for n in [n_lo, n_hi]; verifies the three monotonicity
// requirements implied by a feasible exponent pair and throws InvalidOrder
// if any fails.
std::vector<ScheduleEntry> schedule(const RegimeExponents& r, double alpha,
                                    int n_lo, int n_hi);

// Measures the averaged linearization bound of a velocity rule at the zero
// state in the direction of the unit bump: with I(x) = integral over [0,t]
// of the difference quotient (V(s, h*bump, 0) - V(s, 0, 0))/h (composite
// Simpson, h = 1e-6), returns (min, max) of |I(x)|/t over the plateau nodes
// |x - x_w| <= 1/2. The identity rule V = phi1 gives exactly (1, 1).
std::pair<double, double> check_h1(const VRule& v, const TorusGrid& g,
                                   double t_end, double x_w = 0.0);

}  // namespace qf
