#include "solitonlab/detail/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace slab::detail {

namespace {

// FFTW planning is not thread-safe; executing a plan on distinct buffers is.
// FFTW_ESTIMATE keeps plan selection deterministic run to run.
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

struct PlanSet {
    fftw_plan fwd = nullptr, bwd = nullptr, r2c = nullptr, c2r = nullptr;
    std::vector<cplx> cbuf_in, cbuf_out;
    std::vector<double> rbuf;
};

PlanSet& plans_for(int n) {
    static std::map<int, PlanSet> cache;
    std::lock_guard<std::mutex> lock(plan_mutex());
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    PlanSet& p = cache[n];
    p.cbuf_in.resize(static_cast<size_t>(n));
    p.cbuf_out.resize(static_cast<size_t>(n));
    p.rbuf.resize(static_cast<size_t>(n));
    auto* ci = reinterpret_cast<fftw_complex*>(p.cbuf_in.data());
    auto* co = reinterpret_cast<fftw_complex*>(p.cbuf_out.data());
    p.fwd = fftw_plan_dft_1d(n, ci, co, FFTW_FORWARD, FFTW_ESTIMATE);
    p.bwd = fftw_plan_dft_1d(n, ci, co, FFTW_BACKWARD, FFTW_ESTIMATE);
    p.r2c = fftw_plan_dft_r2c_1d(n, p.rbuf.data(), co, FFTW_ESTIMATE);
    p.c2r = fftw_plan_dft_c2r_1d(n, ci, p.rbuf.data(), FFTW_ESTIMATE);
    return p;
}

}  // namespace

void fft(int n, const cplx* in, cplx* out) {
    PlanSet& p = plans_for(n);
    std::vector<cplx> tmp(in, in + n);
    fftw_execute_dft(p.fwd, reinterpret_cast<fftw_complex*>(tmp.data()),
                     reinterpret_cast<fftw_complex*>(out));
}

void ifft(int n, const cplx* in, cplx* out) {
    PlanSet& p = plans_for(n);
    std::vector<cplx> tmp(in, in + n);
    fftw_execute_dft(p.bwd, reinterpret_cast<fftw_complex*>(tmp.data()),
                     reinterpret_cast<fftw_complex*>(out));
    const double s = 1.0 / n;
    for (int i = 0; i < n; ++i) out[i] *= s;
}

std::vector<cplx> fft(const std::vector<cplx>& in) {
    std::vector<cplx> out(in.size());
    fft(static_cast<int>(in.size()), in.data(), out.data());
    return out;
}

std::vector<cplx> ifft(const std::vector<cplx>& in) {
    std::vector<cplx> out(in.size());
    ifft(static_cast<int>(in.size()), in.data(), out.data());
    return out;
}

void rfft(int n, const double* in, cplx* out) {
    PlanSet& p = plans_for(n);
    std::vector<double> tmp(in, in + n);
    fftw_execute_dft_r2c(p.r2c, tmp.data(),
                         reinterpret_cast<fftw_complex*>(out));
}

void irfft(int n, const cplx* in, double* out) {
    PlanSet& p = plans_for(n);
    std::vector<cplx> tmp(in, in + n / 2 + 1);  // c2r destroys its input
    fftw_execute_dft_c2r(p.c2r, reinterpret_cast<fftw_complex*>(tmp.data()),
                         out);
    const double s = 1.0 / n;
    for (int i = 0; i < n; ++i) out[i] *= s;
}

std::vector<cplx> rfft(const std::vector<double>& in) {
    const int n = static_cast<int>(in.size());
    std::vector<cplx> out(static_cast<size_t>(n / 2 + 1));
    rfft(n, in.data(), out.data());
    return out;
}

std::vector<double> irfft(const std::vector<cplx>& in, int n) {
    std::vector<double> out(static_cast<size_t>(n));
    irfft(n, in.data(), out.data());
    return out;
}

}  // namespace slab::detail
