#pragma once

#include <vector>

#include "quasiflow/spectral.hpp"

namespace qf {

// Sharp dyadic decomposition of the mode set {-n/2+1, ..., n/2}:
//   block 0:      |k| <= 2
//   block q >= 1: floor(log2 |k|) == q for |k| >= 3 (so block 1 = {3},
//                 block 2 = {4..7}, block q = {2^q .. 2^{q+1}-1}).
// Every mode lands in exactly one block, and block q is supported in the
// ring [2^{q-1}, 2^{q+1}] as the classical decomposition requires.
int dyadic_block_index(int k);
int dyadic_block_count(const TorusGrid& g);  // q_max + 1

// Frequency projection onto dyadic block q.
Spectrum dyadic_block(const Spectrum& s, int q);
RealField dyadic_block(const RealField& u, int q);

// Low-pass partial sum S_p = sum of blocks 0..p; S_{-1} = 0.
Spectrum dyadic_partial_sum(const Spectrum& s, int p);
RealField dyadic_partial_sum(const RealField& u, int p);

// ||u||_{H^s}^2 = 2*pi * sum_k (1+k^2)^s |u_hat(k)|^2.
double sobolev_norm(const RealField& u, double s);
double sobolev_norm(const Spectrum& sp, double s);

// ( sum_q 2^{2qs} ||u_q||_{L^2}^2 )^{1/2} over the sharp blocks above.
double dyadic_sobolev_norm(const RealField& u, double s);

// max_{0<=j<=k} sup_x |d^j u / dx^j| with spectral differentiation; k <= 4.
double holder_norm(const RealField& u, int k);

}  // namespace qf
