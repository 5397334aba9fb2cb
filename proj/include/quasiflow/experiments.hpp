#pragma once

#include <string>
#include <vector>

#include "quasiflow/ansatz.hpp"
#include "quasiflow/characteristics.hpp"
#include "quasiflow/evolve.hpp"

namespace qf {

// One row of a norm-separation sweep. All floating-point fields are written
// with 17 significant digits; a non-empty `error` marks a failed row whose
// numeric fields are meaningless.
struct SeparationRecord {
    int n = 0;
    double lambda = 0.0;
    double epsilon = 0.0;
    double tau = 0.0;
    double d0 = 0.0;          // ||u - v||_{H^s} right after data preparation
    double d_tau = 0.0;       // same norm at t = tau
    double d_tau_weak = 0.0;  // H^{s_w}, s_w = s-1+(alpha-1)+ +- eps_prime
    double weak_ratio = 0.0;  // d_tau_weak / d0 (0 when d0 = 0)
    double support_gap = 0.0;       // |chi_u(tau, x_w) - chi_v(tau, x_w)|
    double gap_times_lambda = 0.0;  // support_gap * lambda
    int grid_n = 0;
    double wall_time_s = 0.0;
    std::string error;
};

struct ExperimentConfig {
    SolverConfig solver;
    bool force_epsilon_zero = false;  // null test: both members identical
    int eps_prime_sign = +1;          // sign of eps_prime in the weak index
    bool with_flows = true;
    int threads = 0;  // 0 = hardware concurrency; QUASIFLOW_THREADS caps
    double x_w = 0.0;
};

// Two-member sweep for the dispersive Burgers flow: for each n in
// [n_lo, n_hi], lambda = 2^n, epsilon = lambda^{-delta1}, tau =
// lambda^{-delta2}, grid 32 lambda (rounded up to a power of two). Data is
// the two-parameter
// ansatz pair propagated backward by the exact linear flow, then solved
// forward to tau. Rows that throw carry the message in `error`. Output is
// sorted by n and deterministic for a fixed configuration.
std::vector<SeparationRecord> run_separation(double alpha,
                                             const RegimeExponents& r, int n_lo,
                                             int n_hi, double s,
                                             double eps_prime,
                                             const ExperimentConfig& cfg = {});

// Same sweep for the symmetrized transport-dispersive pair with coupling
// symbol gamma(xi) = |xi|^gamma_order, data in the first component, V =
// phi1, backward data preparation by the exact mode rotation.
std::vector<SeparationRecord> run_system_separation(double gamma_order,
                                                    const RegimeExponents& r,
                                                    int n_lo, int n_hi, double s,
                                                    double eps_prime,
                                                    const ExperimentConfig& cfg = {});

// CSV with the exact header
//   n,lambda,epsilon,tau,d0,d_tau,d_tau_weak,weak_ratio,support_gap,
//   gap_times_lambda,grid_n,wall_time_s,error
// (%.17g floats, non-finite as nan) and a JSONL mirror (non-finite as null).
// Both writers go through a temp file + rename.
void export_records_csv(const std::vector<SeparationRecord>& rs,
                        const std::string& path);
void export_records_jsonl(const std::vector<SeparationRecord>& rs,
                          const std::string& path);
std::vector<SeparationRecord> parse_records_csv(const std::string& path);
std::vector<SeparationRecord> parse_records_jsonl(const std::string& path);

// min(requested or hardware, QUASIFLOW_THREADS if set, jobs), at least 1.
int resolve_thread_count(int requested, int jobs);

}  // namespace qf
