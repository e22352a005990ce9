#include "solitonlab/backlund.hpp"

#include <cmath>
#include <numbers>

#include "solitonlab/detail/fft.hpp"
#include "solitonlab/solver.hpp"

namespace slab {

namespace detail {

namespace {
CField guarded_trig(const CField& f, bool sine) {
    CField out(f.grid);
    out.time = f.time;
    for (int i = 0; i < f.n(); ++i) {
        if (std::abs(f[i].imag()) > 50.0)
            throw Error("complex trig: |Im| beyond the overflow guard");
        out[i] = sine ? std::sin(f[i]) : std::cos(f[i]);
    }
    return out;
}
}  // namespace

CField guarded_sin(const CField& f) { return guarded_trig(f, true); }
CField guarded_cos(const CField& f) { return guarded_trig(f, false); }

}  // namespace detail

namespace {

/// primitive consistency: d_x u~ = u, after removing the exact linear ramp
/// (primitives of nonzero-mean u are not periodic)
void check_primitive(const CField& u, const CField& ut, const char* who) {
    if (!(u.grid == ut.grid)) throw Error("backlund: mismatched grids");
    const int n = u.grid.n;
    const double L = u.grid.length;
    const cplx slope = (ut[n - 1] - ut[0]) / L;  // period mean of u
    CField flat(ut.grid);
    for (int i = 0; i < n; ++i) flat[i] = ut[i] - slope * u.grid.x(i);
    const CField d = spectral_derivative(flat, 1);
    double err = 0, scale = 1e-30;
    for (int i = 0; i < n; ++i) {
        err = std::max(err, std::abs(d[i] + slope - u[i]));
        scale = std::max(scale, std::abs(u[i]));
    }
    if (err > 1e-6 * std::max(scale, 1.0))
        throw Error(std::string("backlund: ") + who +
                    " primitive inconsistent with its field");
}

}  // namespace

BacklundPair BacklundPair::make(CField ua, CField ua_tilde, CField ub,
                                CField ub_tilde, cplx m) {
    check_primitive(ua, ua_tilde, "ua");
    check_primitive(ub, ub_tilde, "ub");
    return {std::move(ua), std::move(ua_tilde), std::move(ub),
            std::move(ub_tilde), m};
}

CField backlund_residual(const BacklundPair& pair) {
    const GridSpec& g = pair.ua.grid;
    CField S(g);
    for (int i = 0; i < g.n; ++i)
        S[i] = (pair.ua_tilde[i] + pair.ub_tilde[i]) / std::numbers::sqrt2;
    const CField sinS = detail::guarded_sin(S);
    CField out(g);
    for (int i = 0; i < g.n; ++i)
        out[i] = (pair.ua[i] - pair.ub[i]) / std::numbers::sqrt2 -
                 pair.m * sinS[i];
    return out;
}

CField backlund_time_residual(const BacklundPair& pair,
                              const CField& ua_t_tilde,
                              const CField& ub_t_tilde) {
    const GridSpec& g = pair.ua.grid;
    CField S(g), sum(g);
    for (int i = 0; i < g.n; ++i) {
        S[i] = (pair.ua_tilde[i] + pair.ub_tilde[i]) / std::numbers::sqrt2;
        sum[i] = pair.ua[i] + pair.ub[i];
    }
    const CField sinS = detail::guarded_sin(S);
    const CField cosS = detail::guarded_cos(S);
    const CField sum_x = spectral_derivative(sum, 1);
    CField out(g);
    for (int i = 0; i < g.n; ++i) {
        const cplx sq =
            (pair.ua[i] * pair.ua[i] + pair.ub[i] * pair.ub[i]) / std::numbers::sqrt2;
        out[i] = (ua_t_tilde[i] - ub_t_tilde[i]) +
                 pair.m * (sum_x[i] * cosS[i] + sq * sinS[i]);
    }
    return out;
}

BreatherIdentityResiduals breather_identity_residuals(const BreatherParams& prm,
                                                      double t,
                                                      const GridSpec& grid) {
    prm.validate();
    grid.validate();
    const int n = grid.n;
    const double a2 = prm.alpha * prm.alpha, b2 = prm.beta * prm.beta;
    const double d = prm.delta(), gm = prm.gamma();

    Field B(grid), Bx(grid), Bxx(grid), B4x(grid), Btt(grid), Bt(grid), Bxt(grid);
    for (int i = 0; i < n; ++i) {
        const auto s = detail::breather_series(prm, t, grid.x(i));
        B[i] = detail::profile_x_derivative(s, 0).real();
        Bx[i] = detail::profile_x_derivative(s, 1).real();
        Bxx[i] = detail::profile_x_derivative(s, 2).real();
        B4x[i] = detail::profile_x_derivative(s, 4).real();
        Btt[i] = (d * s.deriv(1, 0) + gm * s.deriv(0, 1)).real();
        const double b1 = (s.deriv(2, 0) + s.deriv(1, 1)).real();
        const double b2v = (s.deriv(1, 1) + s.deriv(0, 2)).real();
        Bt[i] = d * b1 + gm * b2v;
        const double b1x = (s.deriv(3, 0) + 2.0 * s.deriv(2, 1) + s.deriv(1, 2)).real();
        const double b2x = (s.deriv(2, 1) + 2.0 * s.deriv(1, 2) + s.deriv(0, 3)).real();
        Bxt[i] = d * b1x + gm * b2x;
    }

    // M_t(x) = int_{-inf}^x B B_t, from the closed-form time derivative
    Field BBt(grid);
    for (int i = 0; i < n; ++i) BBt[i] = B[i] * Bt[i];
    Field Mt = detail::antiderivative_spectral(BBt);
    const double left = Mt[0];
    for (int i = 0; i < n; ++i) Mt[i] -= left;

    BreatherIdentityResiduals r{0, 0, 0, 0};
    for (int i = 0; i < n; ++i) {
        const double Bi = B[i];
        r.first = std::max(r.first, std::abs(Btt[i] + Bxx[i] + Bi * Bi * Bi));
        r.second = std::max(
            r.second, std::abs(Bx[i] * Bx[i] + 0.5 * std::pow(Bi, 4) +
                               2.0 * Bi * Btt[i] - 2.0 * Mt[i]));
        r.nonlocal = std::max(
            r.nonlocal, std::abs(Bxt[i] + 2.0 * Mt[i] * Bi -
                                 2.0 * (b2 - a2) * Btt[i] -
                                 (a2 + b2) * (a2 + b2) * Bi));
        r.elliptic = std::max(
            r.elliptic,
            std::abs(B4x[i] - 2.0 * (b2 - a2) * (Bxx[i] + Bi * Bi * Bi) +
                     (a2 + b2) * (a2 + b2) * Bi + 5.0 * Bi * Bx[i] * Bx[i] +
                     5.0 * Bi * Bi * Bxx[i] + 1.5 * std::pow(Bi, 5)));
    }
    return r;
}

double lyapunov_H(const Field& u, const BreatherParams& prm) {
    prm.validate();
    const ConservedTriple c = conserved_quantities(u, 3, true);
    const double a2 = prm.alpha * prm.alpha, b2 = prm.beta * prm.beta;
    return *c.F + 2.0 * (b2 - a2) * c.E + (a2 + b2) * (a2 + b2) * c.M;
}

}  // namespace slab
