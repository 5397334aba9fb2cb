#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "quasiflow/errors.hpp"

namespace qf {

using cx = std::complex<double>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Uniform grid on the 2pi torus, nodes x_j = 2*pi*j/n. Dealias cutoff is the
// 2/3 rule for quadratic nonlinearities: retained modes satisfy |k| <= floor(n/3).
struct TorusGrid {
    int n_points = 0;
    double period = kTwoPi;
    int dealias_cutoff = 0;

    static TorusGrid make(int n_points);

    double x(int j) const { return period * static_cast<double>(j) / n_points; }
    double dx() const { return period / n_points; }
    int max_mode() const { return n_points / 2; }
    int min_mode() const { return -n_points / 2 + 1; }

    friend bool operator==(const TorusGrid& a, const TorusGrid& b) {
        return a.n_points == b.n_points;
    }
};

struct RealField {
    TorusGrid grid;
    std::vector<double> samples;

    RealField() = default;
    RealField(const TorusGrid& g, std::vector<double> s);

    static RealField zeros(const TorusGrid& g);
    static RealField from_function(const TorusGrid& g,
                                   const std::function<double(double)>& f);

    int n() const { return grid.n_points; }
};

RealField operator+(const RealField& a, const RealField& b);
RealField operator-(const RealField& a, const RealField& b);
RealField operator*(double c, const RealField& a);

// Fourier coefficients of a grid function, stored in FFT index order:
// index i holds mode k = i for i <= n/2, k = i - n otherwise,
// so modes run over {-n/2+1, ..., n/2}. Normalization is 1/n on the forward
// transform (coefficients approximate Fourier-series coefficients).
struct Spectrum {
    TorusGrid grid;
    std::vector<cx> coeffs;

    static Spectrum zeros(const TorusGrid& g);

    int n() const { return grid.n_points; }
    int index_of(int k) const { return k >= 0 ? k : k + grid.n_points; }
    cx coeff(int k) const { return coeffs[index_of(k)]; }
    cx& at_mode(int k) { return coeffs[index_of(k)]; }
};

inline int mode_of_index(int i, int n) { return i <= n / 2 ? i : i - n; }

// max_k |c(-k) - conj(c(k))| (the Nyquist mode pairs with itself, so its
// imaginary part counts), i.e. the absolute deviation from representing a
// real field.
double hermitian_defect(const Spectrum& s);

struct Multiplier {
    double order = 0.0;
    std::function<cx(int)> symbol;
    // sup over the checked mode range of |symbol(k)| / (1+|k|)^order
    double growth_const = 0.0;

    Multiplier() = default;
    Multiplier(double order_, std::function<cx(int)> symbol_, int check_range = 4096);
};

enum class DispersiveKind {
    homogeneous,    // |D|^a, symbol |k|^a
    inhomogeneous,  // <D>^a, symbol (1+k^2)^{a/2}
};

Multiplier multiplier_identity();
Multiplier multiplier_hilbert();  // -i sign(k), sign(0) = 0
Multiplier multiplier_frac_abs(double alpha);  // |k|^alpha, alpha in [0,2]
Multiplier multiplier_bessel(double s);        // (1+k^2)^{s/2}
// e^{i sign(k) |k|^alpha t} (or the <k>^alpha variant): exact propagator of
// dt u + H|D|^alpha u = 0 over time t. alpha in [0,2].
Multiplier multiplier_linear_phase(double alpha, double t,
                                   DispersiveKind kind = DispersiveKind::homogeneous);
// (ik)^j; for odd j the Nyquist mode is zeroed to keep real fields real.
Multiplier multiplier_derivative(int j);

Spectrum forward_transform(const RealField& u);
// Throws NonHermitianSpectrum if the relative Hermitian defect exceeds 1e-8.
RealField inverse_transform(const Spectrum& s);
// Inverse discarding the imaginary part without a symmetry check (for
// internal use where the output is real by construction or by fiat).
RealField inverse_transform_real(const Spectrum& s);

Spectrum apply_multiplier(const Spectrum& s, const Multiplier& m);
RealField apply_multiplier(const RealField& u, const Multiplier& m);
Spectrum dealias(const Spectrum& s);

// Direct mode summation sum_k c_k e^{ikx}; real part. O(n) per point.
double evaluate_offgrid(const Spectrum& s, double x);
// Same but of the spectral derivative (ik factors, odd-derivative Nyquist zeroed).
double evaluate_offgrid_derivative(const Spectrum& s, double x);

RealField spectral_derivative(const RealField& u, int order);

double sup_norm(const RealField& u);
double l2_norm(const RealField& u);  // sqrt(integral of u^2) via Parseval
double mean(const RealField& u);

RealField operator*(const RealField& a, const RealField& b);  // pointwise

// Low-level c2c transforms for complex tables (symbol columns etc.);
// the forward direction carries the 1/n normalization.
void fft_forward_scaled(const std::vector<cx>& in, std::vector<cx>& out);
void fft_backward(const std::vector<cx>& in, std::vector<cx>& out);

}  // namespace qf
