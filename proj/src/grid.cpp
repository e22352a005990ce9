#include "solitonlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>

#include "solitonlab/detail/fft.hpp"

namespace slab {

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void check_finite(const std::vector<cplx>& v) {
    for (const cplx& z : v)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw Error("non-finite value in field");
}

void check_finite(const std::vector<double>& v) {
    for (double z : v)
        if (!std::isfinite(z)) throw Error("non-finite value in field");
}

}  // namespace

double GridSpec::wavenumber(int j) const {
    const int half = n / 2;
    const int jj = (j <= half) ? j : j - n;
    return 2.0 * std::numbers::pi * jj / length;
}

std::vector<double> GridSpec::points() const {
    std::vector<double> xs(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) xs[static_cast<size_t>(i)] = x(i);
    return xs;
}

void GridSpec::validate() const {
    if (length <= 0) throw Error("grid: domain length must be positive");
    if (!power_of_two(n)) throw Error("grid: num_points must be a power of two");
    if (dealias_fraction <= 0 || dealias_fraction > 1)
        throw Error("grid: dealias_fraction must lie in (0,1]");
}

CField to_complex(const Field& f) {
    CField g(f.grid);
    g.time = f.time;
    for (int i = 0; i < f.n(); ++i) g[i] = f[i];
    return g;
}

Field to_real(const CField& f, double tol) {
    double amax = 0, imax = 0;
    for (const cplx& z : f.v) {
        amax = std::max(amax, std::abs(z));
        imax = std::max(imax, std::abs(z.imag()));
    }
    if (imax > tol * std::max(amax, 1.0))
        throw Error("to_real: field has a non-negligible imaginary part");
    Field g(f.grid);
    g.time = f.time;
    for (int i = 0; i < f.n(); ++i) g[i] = f[i].real();
    return g;
}

CField spectral_derivative(const CField& f, int order) {
    if (order < 0 || order > 4)
        throw Error("spectral_derivative: order must be in [0,4]");
    check_finite(f.v);
    std::vector<cplx> fh = detail::fft(f.v);
    const int n = f.n();
    for (int j = 0; j < n; ++j) {
        cplx ik(0.0, f.grid.wavenumber(j));
        cplx m = 1.0;
        for (int q = 0; q < order; ++q) m *= ik;
        // Nyquist mode of an odd-order derivative has no consistent sign
        if (order % 2 == 1 && j == n / 2) m = 0.0;
        fh[static_cast<size_t>(j)] *= m;
    }
    CField out(f.grid);
    out.time = f.time;
    out.v = detail::ifft(fh);
    return out;
}

Field spectral_derivative(const Field& f, int order) {
    if (order < 0 || order > 4)
        throw Error("spectral_derivative: order must be in [0,4]");
    check_finite(f.v);
    const int n = f.n();
    std::vector<cplx> fh = detail::rfft(f.v);
    for (int j = 0; j <= n / 2; ++j) {
        cplx ik(0.0, f.grid.wavenumber(j));
        cplx m = 1.0;
        for (int q = 0; q < order; ++q) m *= ik;
        if (order % 2 == 1 && j == n / 2) m = 0.0;
        fh[static_cast<size_t>(j)] *= m;
    }
    Field out(f.grid);
    out.time = f.time;
    out.v = detail::irfft(fh, n);
    return out;
}

namespace {

template <typename FieldT>
double sobolev_impl(const FieldT& f, double s) {
    if (s < 0) throw Error("sobolev_norm: s must be nonnegative");
    std::vector<cplx> fh;
    if constexpr (std::is_same_v<FieldT, Field>) {
        fh = detail::fft(to_complex(f).v);
    } else {
        fh = detail::fft(f.v);
    }
    const int n = f.n();
    const double norm = f.grid.length / (static_cast<double>(n) * n);
    double acc = 0;
    for (int j = 0; j < n; ++j) {
        const double k = f.grid.wavenumber(j);
        acc += std::pow(1.0 + k * k, s) * std::norm(fh[static_cast<size_t>(j)]);
    }
    return std::sqrt(acc * norm);
}

}  // namespace

double sobolev_norm(const Field& f, double s) { return sobolev_impl(f, s); }
double sobolev_norm(const CField& f, double s) { return sobolev_impl(f, s); }

double inner_product(const Field& f, const Field& g) {
    if (!(f.grid == g.grid)) throw Error("inner_product: mismatched grids");
    double acc = 0;
    for (int i = 0; i < f.n(); ++i) acc += f[i] * g[i];
    return acc * f.grid.spacing();
}

cplx inner_product(const CField& f, const CField& g) {
    if (!(f.grid == g.grid)) throw Error("inner_product: mismatched grids");
    cplx acc = 0;
    for (int i = 0; i < f.n(); ++i) acc += f[i] * g[i];
    return acc * f.grid.spacing();
}

Field dealias(const Field& f) {
    const int n = f.n();
    std::vector<cplx> fh = detail::rfft(f.v);
    const int kc = static_cast<int>(std::floor((n / 2) * f.grid.dealias_fraction));
    for (int j = kc + 1; j <= n / 2; ++j) fh[static_cast<size_t>(j)] = 0.0;
    Field out(f.grid);
    out.time = f.time;
    out.v = detail::irfft(fh, n);
    return out;
}

Field antiderivative(const Field& f, bool* tail_warning) {
    check_finite(f.v);
    const int n = f.n();
    const double h = f.grid.spacing();
    if (tail_warning) *tail_warning = std::abs(f[0]) > 1e-8;
    Field out(f.grid);
    out.time = f.time;
    out[0] = 0.0;
    // composite Simpson cumulative: even offsets by full Simpson pairs,
    // odd offsets by a quadratic fit through the three surrounding points
    for (int i = 2; i < n; i += 2)
        out[i] = out[i - 2] + h / 3.0 * (f[i - 2] + 4.0 * f[i - 1] + f[i]);
    for (int i = 1; i < n; i += 2) {
        if (i + 1 < n)
            out[i] = out[i - 1] + h / 12.0 * (5.0 * f[i - 1] + 8.0 * f[i] - f[i + 1]);
        else
            out[i] = out[i - 1] + h / 12.0 * (-f[i - 2] + 8.0 * f[i - 1] + 5.0 * f[i]);
    }
    return out;
}

namespace detail {

std::vector<double> antiderivative_spectral(const GridSpec& g,
                                            const std::vector<double>& f) {
    const int n = g.n;
    std::vector<cplx> fh = rfft(f);
    const double mean = fh[0].real() / n;
    fh[0] = 0.0;
    for (int j = 1; j <= n / 2; ++j) {
        const double k = g.wavenumber(j);
        fh[static_cast<size_t>(j)] /= cplx(0.0, k);
    }
    std::vector<double> out = irfft(fh, n);
    const int i0 = n / 2;  // x = 0
    const double off = out[static_cast<size_t>(i0)];
    for (int i = 0; i < n; ++i)
        out[static_cast<size_t>(i)] += mean * g.x(i) - off;
    return out;
}

Field antiderivative_spectral(const Field& f) {
    Field out(f.grid);
    out.time = f.time;
    out.v = antiderivative_spectral(f.grid, f.v);
    return out;
}

}  // namespace detail

// ---- serialization -----------------------------------------------------

namespace {

void write_csv_impl(const GridSpec& g, const std::vector<cplx>& v,
                    bool complex_col, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out.precision(17);
    out << (complex_col ? "x,value_re,value_im\n" : "x,value_re\n");
    for (int i = 0; i < g.n; ++i) {
        out << g.x(i) << ',' << v[static_cast<size_t>(i)].real();
        if (complex_col) out << ',' << v[static_cast<size_t>(i)].imag();
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

constexpr uint64_t kBinMagic = 0x534c414246494c44ull;  // "SLABFILD"

}  // namespace

void write_csv(const Field& f, const std::string& path) {
    write_csv_impl(f.grid, to_complex(f).v, false, path);
}

void write_csv(const CField& f, const std::string& path) {
    write_csv_impl(f.grid, f.v, true, path);
}

void write_bin(const CField& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    uint64_t magic = kBinMagic;
    uint32_t n = static_cast<uint32_t>(f.n()), is_complex = 1;
    double len = f.grid.length, t = f.time;
    out.write(reinterpret_cast<const char*>(&magic), 8);
    out.write(reinterpret_cast<const char*>(&n), 4);
    out.write(reinterpret_cast<const char*>(&is_complex), 4);
    out.write(reinterpret_cast<const char*>(&len), 8);
    out.write(reinterpret_cast<const char*>(&t), 8);
    out.write(reinterpret_cast<const char*>(f.v.data()),
              static_cast<std::streamsize>(f.v.size() * sizeof(cplx)));
    if (!out) throw IoError("write failed: " + path);
}

void write_bin(const Field& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    uint64_t magic = kBinMagic;
    uint32_t n = static_cast<uint32_t>(f.n()), is_complex = 0;
    double len = f.grid.length, t = f.time;
    out.write(reinterpret_cast<const char*>(&magic), 8);
    out.write(reinterpret_cast<const char*>(&n), 4);
    out.write(reinterpret_cast<const char*>(&is_complex), 4);
    out.write(reinterpret_cast<const char*>(&len), 8);
    out.write(reinterpret_cast<const char*>(&t), 8);
    out.write(reinterpret_cast<const char*>(f.v.data()),
              static_cast<std::streamsize>(f.v.size() * sizeof(double)));
    if (!out) throw IoError("write failed: " + path);
}

namespace {

struct BinHeader {
    uint32_t n = 0, is_complex = 0;
    double length = 0, time = 0;
};

BinHeader read_header(std::ifstream& in, const std::string& path) {
    uint64_t magic = 0;
    BinHeader h;
    in.read(reinterpret_cast<char*>(&magic), 8);
    in.read(reinterpret_cast<char*>(&h.n), 4);
    in.read(reinterpret_cast<char*>(&h.is_complex), 4);
    in.read(reinterpret_cast<char*>(&h.length), 8);
    in.read(reinterpret_cast<char*>(&h.time), 8);
    if (!in || magic != kBinMagic) throw IoError("bad field container: " + path);
    return h;
}

}  // namespace

CField read_bin(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    BinHeader h = read_header(in, path);
    GridSpec g{h.length, static_cast<int>(h.n)};
    g.validate();
    CField f(g);
    f.time = h.time;
    if (h.is_complex) {
        in.read(reinterpret_cast<char*>(f.v.data()),
                static_cast<std::streamsize>(f.v.size() * sizeof(cplx)));
    } else {
        std::vector<double> r(h.n);
        in.read(reinterpret_cast<char*>(r.data()),
                static_cast<std::streamsize>(r.size() * sizeof(double)));
        for (uint32_t i = 0; i < h.n; ++i) f.v[i] = r[i];
    }
    if (!in) throw IoError("truncated field container: " + path);
    return f;
}

Field read_bin_real(const std::string& path) { return to_real(read_bin(path)); }

}  // namespace slab
