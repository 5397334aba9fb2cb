#include "quasiflow/norms.hpp"

#include <cmath>

namespace qf {

int dyadic_block_index(int k) {
    const int a = std::abs(k);
    if (a <= 2) return 0;
    int q = 0;
    int v = a;
    while (v > 1) {
        v >>= 1;
        ++q;
    }
    return q;  // floor(log2 a); 1 for a in {3}, 2 for {4..7}, ...
}

int dyadic_block_count(const TorusGrid& g) {
    const int kmax = g.n_points / 2;
    return dyadic_block_index(kmax) + 1;
}

Spectrum dyadic_block(const Spectrum& s, int q) {
    Spectrum r = Spectrum::zeros(s.grid);
    const int n = s.n();
    for (int i = 0; i < n; ++i) {
        const int k = mode_of_index(i, n);
        if (dyadic_block_index(k) == q) r.coeffs[i] = s.coeffs[i];
    }
    return r;
}

RealField dyadic_block(const RealField& u, int q) {
    return inverse_transform(dyadic_block(forward_transform(u), q));
}

Spectrum dyadic_partial_sum(const Spectrum& s, int p) {
    Spectrum r = Spectrum::zeros(s.grid);
    if (p < 0) return r;
    const int n = s.n();
    for (int i = 0; i < n; ++i) {
        const int k = mode_of_index(i, n);
        if (dyadic_block_index(k) <= p) r.coeffs[i] = s.coeffs[i];
    }
    return r;
}

RealField dyadic_partial_sum(const RealField& u, int p) {
    return inverse_transform(dyadic_partial_sum(forward_transform(u), p));
}

double sobolev_norm(const Spectrum& sp, double s) {
    const int n = sp.n();
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const int k = mode_of_index(i, n);
        const double w = std::pow(1.0 + static_cast<double>(k) * k, s);
        acc += w * std::norm(sp.coeffs[i]);
    }
    return std::sqrt(kTwoPi * acc);
}

double sobolev_norm(const RealField& u, double s) {
    return sobolev_norm(forward_transform(u), s);
}

double dyadic_sobolev_norm(const RealField& u, double s) {
    Spectrum sp = forward_transform(u);
    const int n = sp.n();
    const int nblocks = dyadic_block_count(u.grid);
    std::vector<double> block_l2sq(nblocks, 0.0);
    for (int i = 0; i < n; ++i) {
        const int k = mode_of_index(i, n);
        block_l2sq[dyadic_block_index(k)] += kTwoPi * std::norm(sp.coeffs[i]);
    }
    double acc = 0.0;
    for (int q = 0; q < nblocks; ++q)
        acc += std::pow(4.0, q * s) * block_l2sq[q];
    return std::sqrt(acc);
}

double holder_norm(const RealField& u, int k) {
    if (k < 0 || k > 4) throw InvalidOrder("holder_norm supports 0 <= k <= 4");
    double m = sup_norm(u);
    for (int j = 1; j <= k; ++j)
        m = std::max(m, sup_norm(spectral_derivative(u, j)));
    return m;
}

}  // namespace qf
