#pragma once

#include <vector>

#include "solitonlab/grid.hpp"
#include "solitonlab/modulation.hpp"
#include "solitonlab/profiles.hpp"

namespace slab {

/// interaction window: T_c = c^{-1/2 - delta0}. Runs start and end at a
/// separation of at least settle_sep_factor / sqrt(c) so the pure-sum
/// initialization and the post-collision fit both sit in the clean regime.
struct CollisionConfig {
    int p = 4;  // 3 or 4
    double c = 0.05;
    double delta0 = 0.05;
    GridSpec grid{1000.0, 16384};
    double dt = 1e-3;
    double settle_sep_factor = 16.0;
    double interaction_time() const;  // T_c
    void validate() const;
};

/// First- and second-order correction data around the big soliton (c = 1).
/// The kinks are stored split: B1(y) = b1 phi(y) + B1_local(y) with
/// phi = -Q'/Q = tanh((p-1)y/2), and likewise B2 = b phi + B2_local.
struct CollisionCorrections {
    int p = 0;
    GridSpec grid;
    Field A1;
    Field B1_local;
    double b1 = 0.0;  // kink coefficient of B1 (-2 exactly for p = 3)
    double a1 = 0.0;
    Field A2;
    Field B2_local;
    double a2 = 0.0;
    double b = 0.0;  // kink coefficient of B2; the defect carrier
    bool second_order = false;

    Field B1_kink() const;  // assembled b1 phi + B1_local
    Field B2() const;       // assembled b phi + B2_local
};

/// solves (L A1)' + a1 (3Q - 2Q^p)' = (p Q^{p-1})' and
/// (L B1)' + 3 a1 Q'' - 3 A1'' - p Q^{p-1} A1 = p Q^{p-1}
/// with a1 fixed by the Fredholm condition of the B1 equation
/// (a1 = -2 int Q / int Q^2 for p = 4, 0 for p = 3), A1 even, B1 odd.
CollisionCorrections first_order_corrections(int p, const GridSpec& grid);

/// solves the second-order system
///   (L A2)' + a2 (3Q - 2Q^p)' = F2
///   (L B2)' + 3 a2 Q'' - 3 A2'' - p Q^{p-1} A2 = G2
/// with a2 from the Fredholm condition and B2 = b phi + localized, the
/// limits matched at y -> +-inf
CollisionCorrections solve_second_order_system(int p, const GridSpec& grid,
                                               const CollisionCorrections& first);

struct Omega2Residuals {
    double eq_A1 = 0.0, eq_B1 = 0.0;  // first-order system, sup norms
    double eq_A2 = 0.0, eq_B2 = 0.0;  // (Omega2), sup norms
};
Omega2Residuals collision_system_residuals(const CollisionCorrections& cor);

/// assemble the approximate two-soliton solution at time t in the moving
/// frame; order selects v0 (pure sum), v3 (first order), v4 (second order)
Field collision_ansatz(const CollisionConfig& cfg,
                       const CollisionCorrections& cor, double t, int order);

struct DefectReport {
    std::vector<SolitonParams> pre_fit, post_fit;
    double defect_norm = 0.0;  // H1 of the fit residual right of the midpoint
    double defect_norm_full = 0.0;
    double t_measure = 0.0;
    double separation = 0.0;
};

/// evolve the pure two-soliton sum through the collision in the moving
/// frame, fit both solitons afterwards, and measure the residual defect
DefectReport measure_defect(const CollisionConfig& cfg);

namespace detail {
/// trigonometric interpolation of smooth periodic grid samples; evaluation
/// off the grid stays spectrally accurate, so spectral derivatives of
/// assembled ansatz fields see no interpolation kinks
class TrigInterpolant {
public:
    explicit TrigInterpolant(const Field& f);
    double operator()(double x) const;

private:
    double x0_, length_;
    std::vector<cplx> coef_;  // rfft / n
};
}  // namespace detail

}  // namespace slab
