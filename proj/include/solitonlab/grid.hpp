#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "solitonlab/errors.hpp"

namespace slab {

using cplx = std::complex<double>;

/// Uniform periodic grid on [-L/2, L/2). Points are x_i = (i - n/2) h,
/// wavenumbers k_j = 2*pi*j / L over the symmetric integer range.
struct GridSpec {
    double length = 100.0;
    int n = 4096;
    double dealias_fraction = 2.0 / 3.0;

    double spacing() const { return length / n; }
    double x(int i) const { return (i - n / 2) * spacing(); }
    /// signed wavenumber of FFT bin j (j in [0, n))
    double wavenumber(int j) const;
    std::vector<double> points() const;
    void validate() const;
    bool operator==(const GridSpec& o) const {
        return length == o.length && n == o.n;
    }
};

/// Real-valued function sampled on a grid, with a time stamp.
struct Field {
    GridSpec grid;
    std::vector<double> v;
    double time = 0.0;

    Field() = default;
    explicit Field(const GridSpec& g, double fill = 0.0)
        : grid(g), v(static_cast<size_t>(g.n), fill) {}
    int n() const { return grid.n; }
    double& operator[](int i) { return v[static_cast<size_t>(i)]; }
    double operator[](int i) const { return v[static_cast<size_t>(i)]; }
};

/// Complex-valued counterpart.
struct CField {
    GridSpec grid;
    std::vector<cplx> v;
    double time = 0.0;

    CField() = default;
    explicit CField(const GridSpec& g, cplx fill = 0.0)
        : grid(g), v(static_cast<size_t>(g.n), fill) {}
    int n() const { return grid.n; }
    cplx& operator[](int i) { return v[static_cast<size_t>(i)]; }
    cplx operator[](int i) const { return v[static_cast<size_t>(i)]; }
};

CField to_complex(const Field& f);
/// imaginary part must be below tol * max|f|
Field to_real(const CField& f, double tol = 1e-10);

// ---- spectral calculus -------------------------------------------------

/// order-th derivative by Fourier multiplier (i k)^order; order <= 4.
Field spectral_derivative(const Field& f, int order);
CField spectral_derivative(const CField& f, int order);

/// H^s norm via the multiplier (1+k^2)^{s/2}; s >= 0.
double sobolev_norm(const Field& f, double s);
double sobolev_norm(const CField& f, double s);

/// quadrature of the bilinear pairing  int f g dx  (no conjugation)
double inner_product(const Field& f, const Field& g);
cplx inner_product(const CField& f, const CField& g);

/// zero the top (1 - dealias_fraction) of the spectrum
Field dealias(const Field& f);

/// cumulative integral from the left grid boundary, composite Simpson.
/// Sets *tail_warning if |f| at the left boundary exceeds 1e-8.
Field antiderivative(const Field& f, bool* tail_warning = nullptr);

namespace detail {
/// antiderivative through Fourier space plus an exact mean ramp; spectral
/// accuracy for smooth periodic integrands, normalized to vanish at x=0.
Field antiderivative_spectral(const Field& f);
std::vector<double> antiderivative_spectral(const GridSpec& g,
                                            const std::vector<double>& f);
}  // namespace detail

// ---- serialization -----------------------------------------------------

void write_csv(const Field& f, const std::string& path);
void write_csv(const CField& f, const std::string& path);
/// binary container with grid metadata (length, n, time)
void write_bin(const CField& f, const std::string& path);
CField read_bin(const std::string& path);
void write_bin(const Field& f, const std::string& path);
Field read_bin_real(const std::string& path);

}  // namespace slab
