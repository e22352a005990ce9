#pragma once

#include "solitonlab/grid.hpp"
#include "solitonlab/profiles.hpp"

namespace slab {

/// A pair of solutions linked by the spatial Backlund transformation,
/// together with their spatial primitives (d_x u_tilde = u, checked on
/// construction after removing the mean ramp).
struct BacklundPair {
    CField ua, ua_tilde, ub, ub_tilde;
    cplx m;

    static BacklundPair make(CField ua, CField ua_tilde, CField ub,
                             CField ub_tilde, cplx m);
};

/// G = (ua - ub)/sqrt2 - m sin((ua_tilde + ub_tilde)/sqrt2)
CField backlund_residual(const BacklundPair& pair);

/// left side of the time identities (zero1)/(zerot2):
/// (ua_t~ - ub_t~) + m [ (ua+ub)_x cos(S) + (ua^2+ub^2)/sqrt2 sin(S) ],
/// S = (ua~ + ub~)/sqrt2
CField backlund_time_residual(const BacklundPair& pair,
                              const CField& ua_t_tilde,
                              const CField& ub_t_tilde);

struct BreatherIdentityResiduals {
    double first;     // Btilde_t + B_xx + B^3
    double second;    // B_x^2 + B^4/2 + 2 B Btilde_t - 2 M_t
    double nonlocal;  // B_xt + 2 M_t B - 2(b^2-a^2) Btilde_t - (a^2+b^2)^2 B
    double elliptic;  // G[B]
};

/// sup-norms of the four closed-form identities satisfied by the breather
BreatherIdentityResiduals breather_identity_residuals(const BreatherParams& prm,
                                                      double t,
                                                      const GridSpec& grid);

/// H[u] = F[u] + 2(beta^2-alpha^2) E[u] + (alpha^2+beta^2)^2 M[u]
double lyapunov_H(const Field& u, const BreatherParams& prm);

namespace detail {
/// sin/cos on complex fields with an argument-overflow guard (|Im| <= 50)
CField guarded_sin(const CField& f);
CField guarded_cos(const CField& f);
}  // namespace detail

}  // namespace slab
