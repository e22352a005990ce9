#include "solitonlab/profiles.hpp"

#include <cmath>
#include <numbers>

namespace slab {

namespace {

double wrap(double s, double length) {
    // fold into [-L/2, L/2)
    double t = std::remainder(s, length);
    if (t == length / 2) t = -length / 2;
    return t;
}

// binomial coefficients up to the jet degree
constexpr double kBinom[7][7] = {
    {1, 0, 0, 0, 0, 0, 0},      {1, 1, 0, 0, 0, 0, 0},
    {1, 2, 1, 0, 0, 0, 0},      {1, 3, 3, 1, 0, 0, 0},
    {1, 4, 6, 4, 1, 0, 0},      {1, 5, 10, 10, 5, 1, 0},
    {1, 6, 15, 20, 15, 6, 1}};

}  // namespace

void SolitonParams::validate(bool for_evolution) const {
    if (c <= 0) throw Error("soliton: c must be positive");
    if (p < 2 || p > 5) throw Error("soliton: p must be one of 2,3,4,5");
    if (for_evolution && p >= 5)
        throw Error("soliton: p >= 5 evolution is refused (blow-up regime)");
}

void BreatherParams::validate() const {
    if (alpha <= 0 || beta <= 0) throw Error("breather: alpha, beta must be positive");
}

double soliton_value(const SolitonParams& prm, double x, int order) {
    const int p = prm.p;
    const double s = x - prm.x0;
    const double kap = 0.5 * (p - 1) * std::sqrt(prm.c);
    const double sech2 = 1.0 / std::cosh(kap * s) / std::cosh(kap * s);
    const double Q = std::pow(prm.c, 1.0 / (p - 1)) *
                     std::pow(0.5 * (p + 1) * sech2, 1.0 / (p - 1));
    if (order == 0) return Q;
    const double Q1 = -std::sqrt(prm.c) * std::tanh(kap * s) * Q;
    if (order == 1) return Q1;
    const double Qp = std::pow(Q, p);
    const double Q2 = prm.c * Q - Qp;  // soliton ODE
    if (order == 2) return Q2;
    const double Q3 = prm.c * Q1 - p * std::pow(Q, p - 1) * Q1;
    if (order == 3) return Q3;
    const double Q4 = prm.c * Q2 - p * (p - 1) * std::pow(Q, p - 2) * Q1 * Q1 -
                      p * std::pow(Q, p - 1) * Q2;
    if (order == 4) return Q4;
    throw Error("soliton_value: order must be in [0,4]");
}

Field soliton_profile_derivative(const SolitonParams& prm,
                                 const GridSpec& grid, int order) {
    prm.validate();
    grid.validate();
    Field f(grid);
    for (int i = 0; i < grid.n; ++i) {
        const double s = wrap(grid.x(i) - prm.x0, grid.length);
        SolitonParams centered{prm.p, prm.c, 0.0};
        f[i] = soliton_value(centered, s, order);
    }
    return f;
}

Field soliton_profile(const SolitonParams& prm, const GridSpec& grid) {
    return soliton_profile_derivative(prm, grid, 0);
}

Field scaling_direction(const SolitonParams& prm, const GridSpec& grid) {
    prm.validate();
    grid.validate();
    Field f(grid);
    for (int i = 0; i < grid.n; ++i) {
        const double s = wrap(grid.x(i) - prm.x0, grid.length);
        SolitonParams centered{prm.p, prm.c, 0.0};
        const double Q = soliton_value(centered, s, 0);
        const double Q1 = soliton_value(centered, s, 1);
        f[i] = (Q / (prm.p - 1) + 0.5 * s * Q1) / prm.c;
    }
    return f;
}

namespace detail {

Taylor2 breather_series(const BreatherParams& prm, double t, double x) {
    // y1, y2 are the two independent jet directions
    const Taylor2 y1 = Taylor2::var1(x + prm.delta() * t + prm.x1);
    const Taylor2 y2 = Taylor2::var2(x + prm.gamma() * t + prm.x2);
    const Taylor2 g =
        (prm.beta / prm.alpha) * tsin(y1 * prm.alpha) * trecip(tcosh(y2 * prm.beta));
    return 2.0 * std::numbers::sqrt2 * tatan(g);
}

Taylor2 complex_soliton_series(const BreatherParams& prm, double x) {
    const Taylor2 y1 = Taylor2::var1(x + prm.x1);
    const Taylor2 y2 = Taylor2::var2(x + prm.x2);
    const cplx i(0.0, 1.0);
    const Taylor2 w = y2 * cplx(prm.beta) + y1 * (i * prm.alpha);
    return 2.0 * std::numbers::sqrt2 * tatan(texp(w));
}

cplx profile_x_derivative(const Taylor2& series, int m) {
    // d_x = d_{y1} + d_{y2}; profile = d_x primitive
    cplx acc = 0.0;
    const int tot = m + 1;
    for (int j = 0; j <= tot; ++j)
        acc += kBinom[tot][j] * series.deriv(tot - j, j);
    return acc;
}

}  // namespace detail

Field breather_profile(const BreatherParams& prm, double t,
                       const GridSpec& grid) {
    prm.validate();
    grid.validate();
    Field f(grid);
    f.time = t;
    for (int i = 0; i < grid.n; ++i) {
        const auto s = detail::breather_series(prm, t, grid.x(i));
        f[i] = detail::profile_x_derivative(s, 0).real();
    }
    return f;
}

BreatherDirections breather_directions(const BreatherParams& prm, double t,
                                       const GridSpec& grid) {
    prm.validate();
    grid.validate();
    BreatherDirections d{Field(grid), Field(grid), Field(grid)};
    d.B1.time = d.B2.time = d.Btilde_t.time = t;
    for (int i = 0; i < grid.n; ++i) {
        const auto s = detail::breather_series(prm, t, grid.x(i));
        // B = d(1,0)+d(0,1); B1 = d_{y1}B, B2 = d_{y2}B
        d.B1[i] = (s.deriv(2, 0) + s.deriv(1, 1)).real();
        d.B2[i] = (s.deriv(1, 1) + s.deriv(0, 2)).real();
        d.Btilde_t[i] =
            (prm.delta() * s.deriv(1, 0) + prm.gamma() * s.deriv(0, 1)).real();
    }
    return d;
}

double singular_shift_distance(const BreatherParams& prm) {
    const double period = std::numbers::pi / prm.alpha;
    // distance of (x1 - x2) from period*(k + 1/2)
    const double r = std::remainder(prm.x1 - prm.x2, period);  // in [-p/2, p/2]
    return (period / 2.0 - std::abs(r)) / period;  // in units of pi/alpha
}

ComplexSoliton complex_soliton(const BreatherParams& prm, const GridSpec& grid,
                               double eps_sing) {
    prm.validate();
    grid.validate();
    if (singular_shift_distance(prm) < eps_sing)
        throw SingularShiftError(
            "complex_soliton: shifts within eps_sing of the singular set "
            "x1 = x2 + (pi/alpha)(k+1/2)");
    ComplexSoliton cs{CField(grid), CField(grid), CField(grid)};
    const cplx m(prm.beta, prm.alpha);
    const double jump = 2.0 * std::numbers::sqrt2 * std::numbers::pi;
    double offset = 0.0;
    double prev = 0.0;
    for (int i = 0; i < grid.n; ++i) {
        const auto s = detail::complex_soliton_series(prm, grid.x(i));
        cplx qt = s.deriv(0, 0);
        // unwrap the arctan branch so that d_x Qtilde = Q holds along the grid
        if (i > 0) {
            const double d = qt.real() + offset - prev;
            offset -= jump * std::round(d / jump);
        }
        qt += offset;
        prev = qt.real();
        cs.Qtilde[i] = qt;
        cs.Q[i] = s.deriv(1, 0) + s.deriv(0, 1);
        cs.Qtilde_t[i] = -m * m * cs.Q[i];
    }
    return cs;
}

}  // namespace slab
