#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "solitonlab/backlund.hpp"
#include "solitonlab/solver.hpp"

using namespace slab;

namespace {

double sup_abs(const CField& f) {
    double m = 0;
    for (const cplx& v : f.v) m = std::max(m, std::abs(v));
    return m;
}

struct BreatherProfileSet {
    Field B, Btil, Btil_t;
};

BreatherProfileSet breather_set(const BreatherParams& prm, double t,
                                const GridSpec& g) {
    BreatherProfileSet s{Field(g), Field(g), Field(g)};
    for (int i = 0; i < g.n; ++i) {
        const auto ser = detail::breather_series(prm, t, g.x(i));
        s.Btil[i] = ser.deriv(0, 0).real();
        s.B[i] = (ser.deriv(1, 0) + ser.deriv(0, 1)).real();
        s.Btil_t[i] =
            (prm.delta() * ser.deriv(1, 0) + prm.gamma() * ser.deriv(0, 1)).real();
    }
    return s;
}

}  // namespace

TEST_CASE("vacuum pair residuals vanish") {
    GridSpec g{100.0, 1024};
    const CField zero(g);
    const BacklundPair pair = BacklundPair::make(zero, zero, zero, zero,
                                                 cplx(1.0, 1.0));
    CHECK(sup_abs(backlund_residual(pair)) == 0.0);
    CHECK(sup_abs(backlund_time_residual(pair, zero, zero)) == 0.0);
}

TEST_CASE("inconsistent primitive rejected") {
    GridSpec g{100.0, 1024};
    const ComplexSoliton cs = complex_soliton({1.0, 1.0, 0.0, 0.0}, g);
    const CField zero(g);
    CHECK_THROWS_AS(BacklundPair::make(cs.Q, cs.Q, zero, zero, cplx(1.0, 1.0)),
                    Error);
}

TEST_CASE("G(Q, 0, beta + i alpha) = 0") {
    GridSpec g{100.0, 4096};
    const BreatherParams prm{1.0, 1.0, 0.0, 0.0};
    const ComplexSoliton cs = complex_soliton(prm, g);
    const CField zero(g);
    const BacklundPair pair =
        BacklundPair::make(cs.Q, cs.Qtilde, zero, zero, cplx(1.0, 1.0));
    CHECK(sup_abs(backlund_residual(pair)) < 1e-9);

    SUBCASE("time residual (zero1)") {
        CHECK(sup_abs(backlund_time_residual(pair, cs.Qtilde_t, zero)) < 1e-8);
    }
    SUBCASE("conjugation symmetry") {
        CField qc = cs.Q, qtc = cs.Qtilde;
        for (int i = 0; i < g.n; ++i) {
            qc[i] = std::conj(qc[i]);
            qtc[i] = std::conj(qtc[i]);
        }
        const BacklundPair cpair =
            BacklundPair::make(qc, qtc, zero, zero, cplx(1.0, -1.0));
        const CField r = backlund_residual(pair);
        const CField rc = backlund_residual(cpair);
        double worst = 0;
        for (int i = 0; i < g.n; ++i)
            worst = std::max(worst, std::abs(rc[i] - std::conj(r[i])));
        CHECK(worst < 1e-13);
    }
}

TEST_CASE("G(B, Q, beta - i alpha) = 0 and its time identity") {
    GridSpec g{100.0, 4096};
    const BreatherParams prm{1.0, 1.0, 0.1, -0.2};
    const ComplexSoliton cs = complex_soliton(prm, g);
    // frozen-time profile convention: t enters through the shifts
    const BreatherProfileSet bs = breather_set(prm, 0.0, g);
    const BacklundPair pair = BacklundPair::make(
        to_complex(bs.B), to_complex(bs.Btil), cs.Q, cs.Qtilde, cplx(1.0, -1.0));
    CHECK(sup_abs(backlund_residual(pair)) < 1e-9);
    CHECK(sup_abs(backlund_time_residual(pair, to_complex(bs.Btil_t),
                                         cs.Qtilde_t)) < 1e-8);
}

TEST_CASE("translation covariance of Backlund residuals") {
    GridSpec g{100.0, 2048};
    const int shift = 37;
    const double a = shift * g.spacing();
    const BreatherParams prm{1.0, 1.0, 0.0, 0.0};
    const BreatherParams shifted{1.0, 1.0, a, a};
    const ComplexSoliton cs = complex_soliton(prm, g);
    const ComplexSoliton cs2 = complex_soliton(shifted, g);
    const CField zero(g);
    const CField r1 = backlund_residual(
        BacklundPair::make(cs.Q, cs.Qtilde, zero, zero, cplx(1.0, 1.0)));
    const CField r2 = backlund_residual(
        BacklundPair::make(cs2.Q, cs2.Qtilde, zero, zero, cplx(1.0, 1.0)));
    double worst = 0;
    for (int i = 0; i < g.n; ++i) {
        const int j = (i + shift) % g.n;  // x_j = x_i + a up to wrap
        worst = std::max(worst, std::abs(r2[i] - r1[j]));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("breather identity residuals") {
    GridSpec g{100.0, 2048};
    for (auto [a, b] : {std::pair{1.0, 1.0}, {2.0, 1.0}, {1.5, 1.0}}) {
        for (double t : {0.0, 0.3}) {
            const BreatherIdentityResiduals r =
                breather_identity_residuals({a, b, 0.0, 0.0}, t, g);
            CHECK(r.first < 1e-7);
            CHECK(r.second < 1e-7);
            CHECK(r.nonlocal < 1e-7);
            CHECK(r.elliptic < 1e-7);
        }
    }
    SUBCASE("shift invariance") {
        const BreatherIdentityResiduals r =
            breather_identity_residuals({1.5, 1.0, 5.0, -3.0}, 0.1, g);
        CHECK(r.first < 1e-7);
        CHECK(r.second < 1e-7);
        CHECK(r.nonlocal < 1e-7);
        CHECK(r.elliptic < 1e-7);
    }
}

TEST_CASE("elliptic identity discriminates a gaussian impostor") {
    GridSpec g{100.0, 2048};
    const BreatherParams prm{1.5, 1.0, 0.0, 0.0};
    const Field b = breather_profile(prm, 0.0, g);
    const double mass = inner_product(b, b);
    // gaussian of equal mass
    Field imp(g);
    double gm = 0;
    for (int i = 0; i < g.n; ++i) {
        imp[i] = std::exp(-0.5 * g.x(i) * g.x(i));
        gm += imp[i] * imp[i];
    }
    gm *= g.spacing();
    for (int i = 0; i < g.n; ++i) imp[i] *= std::sqrt(mass / gm);

    const double a2 = prm.alpha * prm.alpha, b2 = prm.beta * prm.beta;
    const Field ixx = spectral_derivative(imp, 2);
    const Field ix = spectral_derivative(imp, 1);
    const Field i4x = spectral_derivative(imp, 4);
    double worst = 0;
    for (int i = 0; i < g.n; ++i) {
        const double v = imp[i];
        worst = std::max(
            worst, std::abs(i4x[i] - 2.0 * (b2 - a2) * (ixx[i] + v * v * v) +
                            (a2 + b2) * (a2 + b2) * v + 5.0 * v * ix[i] * ix[i] +
                            5.0 * v * v * ixx[i] + 1.5 * std::pow(v, 5)));
    }
    CHECK(worst > 1e-2);
}

TEST_CASE("Lyapunov functional") {
    GridSpec g{100.0, 4096};
    const BreatherParams prm{1.5, 1.0, 0.0, 0.0};
    SUBCASE("H[0] = 0") { CHECK(lyapunov_H(Field(g), prm) == 0.0); }
    SUBCASE("conserved along a perturbed evolution") {
        Field u0 = breather_profile(prm, 0.0, g);
        for (int i = 0; i < g.n; ++i)
            u0[i] += 1e-3 * std::exp(-0.5 * g.x(i) * g.x(i));
        const double h0 = lyapunov_H(u0, prm);
        EvolveConfig cfg{3, 2e-4, 0.5, 500};
        const Trajectory traj = evolve(u0, cfg);
        for (const Field& u : traj.snapshots)
            CHECK(std::abs(lyapunov_H(u, prm) - h0) < 1e-7 * std::abs(h0));
    }
    SUBCASE("quadratic expansion via the fourth-order operator") {
        // (H[B+eps z] - H[B] - eps^2/2 <z, L z>) / eps^3 stays bounded
        const Field b = breather_profile(prm, 0.0, g);
        std::mt19937_64 rng(3);
        std::normal_distribution<double> dist;
        for (int trial = 0; trial < 5; ++trial) {
            Field z(g);
            for (int m = 1; m <= 6; ++m) {
                const double aa = dist(rng), ph = dist(rng);
                for (int i = 0; i < g.n; ++i)
                    z[i] += aa * std::cos(2 * std::numbers::pi * m *
                                              g.x(i) / g.length + ph);
            }
            Field ze(g);
            for (int i = 0; i < g.n; ++i)
                ze[i] = z[i] * std::exp(-0.01 * g.x(i) * g.x(i));
            const double nz = sobolev_norm(ze, 2.0);
            for (int i = 0; i < g.n; ++i) ze[i] /= nz;

            // quadratic form via the identity-level operator action
            const Field zxx = spectral_derivative(ze, 2);
            const Field zx = spectral_derivative(ze, 1);
            const Field z4x = spectral_derivative(ze, 4);
            const Field bx = spectral_derivative(b, 1);
            const Field bxx = spectral_derivative(b, 2);
            const double A2 = prm.alpha * prm.alpha, B2 = prm.beta * prm.beta;
            Field Lz(g);
            for (int i = 0; i < g.n; ++i)
                Lz[i] = z4x[i] - 2.0 * (B2 - A2) * zxx[i] +
                        std::pow(A2 + B2, 2) * ze[i] +
                        5.0 * b[i] * b[i] * zxx[i] +
                        10.0 * b[i] * bx[i] * zx[i] +
                        (5.0 * bx[i] * bx[i] + 10.0 * b[i] * bxx[i] +
                         7.5 * std::pow(b[i], 4) -
                         6.0 * (B2 - A2) * b[i] * b[i]) *
                            ze[i];
            const double quad = inner_product(ze, Lz);
            const double hb = lyapunov_H(b, prm);
            double prev_ratio = 0;
            for (double eps : {1e-2, 1e-3, 1e-4}) {
                Field u = b;
                for (int i = 0; i < g.n; ++i) u[i] += eps * ze[i];
                const double ratio =
                    (lyapunov_H(u, prm) - hb - 0.5 * eps * eps * quad) /
                    (eps * eps * eps);
                CHECK(std::abs(ratio) < 50.0);
                if (prev_ratio != 0)
                    CHECK(std::abs(ratio) < 10.0 * std::abs(prev_ratio) + 1.0);
                prev_ratio = ratio;
            }
        }
    }
}
