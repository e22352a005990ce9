#pragma once

#include <optional>
#include <vector>

#include "solitonlab/grid.hpp"

namespace slab {

/// Time evolution settings for u_t + (u_xx - frame_speed*u + u^p)_x = 0.
/// frame_speed = 0 is the lab frame; the collision module evolves in the
/// frame of the big soliton (frame_speed = 1).
struct EvolveConfig {
    int p = 2;  // 2, 3 or 4
    double dt = 1e-3;
    double t_end = 1.0;
    int snapshot_stride = 100;
    bool dealias = true;
    double frame_speed = 0.0;
    double conservation_guard = 1e-6;  // relative M/E drift that aborts
    void validate() const;
};

struct ConservedTriple {
    double M = 0.0;
    double E = 0.0;
    std::optional<double> F;  // only meaningful for p = 3
};

struct Trajectory {
    std::vector<Field> snapshots;               // strictly increasing times
    std::vector<ConservedTriple> conserved_log;  // one per snapshot
};

/// ETDRK4 pseudo-spectral integration; the linear group e^{-t(d_x^3 - s d_x)}
/// is applied exactly in Fourier space. Throws BlowupError on NaN/overflow
/// and AccuracyLossError when M or E drift beyond the guard.
Trajectory evolve(const Field& u0, const EvolveConfig& cfg);

/// M = 1/2 int u^2, E = 1/2 int u_x^2 - 1/(p+1) int u^{p+1};
/// F = 1/2 int u_xx^2 - 5/2 int u^2 u_x^2 + 1/4 int u^6 (p = 3 only).
ConservedTriple conserved_quantities(const Field& u, int p, bool want_F = false);

struct ScalingLawReport {
    double theta;        // E[Q_c] = c^theta E[Q]
    double theta_tilde;  // M[Q_c] = c^theta_tilde M[Q]
    double max_rel_dev_E = 0.0;
    double max_rel_dev_M = 0.0;
};

/// checks E[Q_c] = c^{2/(p-1)+1/2} E[Q], M[Q_c] = c^{2/(p-1)-1/2} M[Q]
/// by quadrature over the supplied list of scalings
ScalingLawReport scaling_laws_check(int p, const std::vector<double>& c_list);

}  // namespace slab
