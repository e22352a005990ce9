#pragma once

#include "solitonlab/detail/taylor2.hpp"
#include "solitonlab/grid.hpp"

namespace slab {

/// gKdV soliton parameters: u(t,x) = Q_c(x - c t - x0).
struct SolitonParams {
    int p = 2;       // nonlinearity power, 2..5 (5 only for profiles)
    double c = 1.0;  // speed/scaling, > 0
    double x0 = 0.0;
    void validate(bool for_evolution = false) const;
};

/// mKdV breather parameters. delta/gamma are always derived, never stored.
struct BreatherParams {
    double alpha = 1.0;
    double beta = 1.0;
    double x1 = 0.0;
    double x2 = 0.0;
    double delta() const { return alpha * alpha - 3.0 * beta * beta; }
    double gamma() const { return 3.0 * alpha * alpha - beta * beta; }
    void validate() const;
};

/// Q_c(x - x0) with Q(s) = ((p+1) / (2 cosh^2((p-1)s/2)))^{1/(p-1)},
/// Q_c(s) = c^{1/(p-1)} Q(sqrt(c) s). Arguments wrap periodically.
Field soliton_profile(const SolitonParams& prm, const GridSpec& grid);

/// d^m/ds^m Q_c(x - x0) from the closed form and the soliton ODE, m <= 4
Field soliton_profile_derivative(const SolitonParams& prm,
                                 const GridSpec& grid, int order);

/// scaling direction  Lambda Q_c = (1/c)(Q_c/(p-1) + (s/2) Q_c')
Field scaling_direction(const SolitonParams& prm, const GridSpec& grid);

/// pointwise evaluation off the grid
double soliton_value(const SolitonParams& prm, double x, int order = 0);

Field breather_profile(const BreatherParams& prm, double t,
                       const GridSpec& grid);

struct BreatherDirections {
    Field B1;        // d_{x1} B
    Field B2;        // d_{x2} B
    Field Btilde_t;  // delta d_{x1} Btilde + gamma d_{x2} Btilde
};
BreatherDirections breather_directions(const BreatherParams& prm, double t,
                                       const GridSpec& grid);

struct ComplexSoliton {
    CField Qtilde;    // 2 sqrt2 arctan(e^{beta y2 + i alpha y1}), unwrapped
    CField Q;         // d_x Qtilde
    CField Qtilde_t;  // -(beta + i alpha)^2 Q
};
/// throws SingularShiftError when (x1,x2) is within eps_sing*(pi/alpha) of
/// the singular set x1 = x2 + (pi/alpha)(k + 1/2)
ComplexSoliton complex_soliton(const BreatherParams& prm, const GridSpec& grid,
                               double eps_sing = 1e-3);

/// distance of (x1 - x2) from the singular set, in units of pi/alpha
double singular_shift_distance(const BreatherParams& prm);

namespace detail {

/// Taylor series (degree 6) of Btilde in the two translation directions
/// (y1, y2) at the point x; deriv(a,b) = d_{y1}^a d_{y2}^b Btilde.
Taylor2 breather_series(const BreatherParams& prm, double t, double x);

/// same for the complex soliton primitive Qtilde (y1 = x+x1, y2 = x+x2)
Taylor2 complex_soliton_series(const BreatherParams& prm, double x);

/// x-derivative of order m of the profile (B or Q) from a primitive series:
/// d_x^m (d_x P) where d_x = d_{y1} + d_{y2}
cplx profile_x_derivative(const Taylor2& series, int m);

}  // namespace detail

}  // namespace slab
