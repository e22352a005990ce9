#pragma once

#include <vector>

#include "solitonlab/grid.hpp"
#include "solitonlab/profiles.hpp"
#include "solitonlab/solver.hpp"

namespace slab {

/// weighted pairing  sum_k (1+k^2)^s fhat conj(ghat)  (real fields)
double sobolev_inner_product(const Field& f, const Field& g, double s);

struct SingleFit {
    SolitonParams params;
    Field residual;
    int iterations = 0;
    double orthogonality = 0.0;  // max |constraint| at the solution
};

/// Newton solve of <z, Q_c'(.-rho)> = 0 (and <z, Q_c(.-rho)> = 0 when
/// fit_scaling), z = u - Q_c(.-rho). Guard: initial H1 residual must be
/// below 0.3 ||Q_c||_H1.
SingleFit fit_single(const Field& u, const SolitonParams& guess,
                     bool fit_scaling);

struct MultiFit {
    std::vector<SolitonParams> params;
    Field residual;
    int iterations = 0;
    double orthogonality = 0.0;
};

/// simultaneous 2N-condition fit around a sum of ordered solitons
MultiFit fit_multi(const Field& u, const std::vector<SolitonParams>& guesses);

/// M2 = 1/2 int u^2 phi((x - m0 t)/A) with the kink phi(s) = (2/pi) atan e^s
double localized_mass(const Field& u, double m0, double A, double t);

double kink_phi(double s);

struct BreatherFit {
    BreatherParams params;
    Field residual;
    int iterations = 0;
    double gradient_norm = 0.0;
};

/// least-squares fit of (x1, x2) minimizing ||u - B(t;...)||_{H^2}
BreatherFit fit_breather(const Field& u, const BreatherParams& guess, double t);

/// per-snapshot modulation of a trajectory (soliton kinds)
struct ModulationTrack {
    std::vector<double> times;
    std::vector<std::vector<double>> rho;      // [snapshot][structure]
    std::vector<std::vector<double>> c;        // [snapshot][structure]
    std::vector<double> residual_h1;
    std::vector<double> residual_h2;
    std::vector<bool> converged;
};

ModulationTrack track_trajectory(const Trajectory& traj,
                                 const std::vector<SolitonParams>& guesses,
                                 bool fit_scaling = true);

}  // namespace slab
