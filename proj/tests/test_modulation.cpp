#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "solitonlab/modulation.hpp"
#include "solitonlab/profiles.hpp"

using namespace slab;

TEST_CASE("exact soliton is recovered with zero residual") {
    GridSpec g{100.0, 4096};
    const Field u = soliton_profile({2, 1.0, 3.7}, g);
    const SingleFit fit = fit_single(u, {2, 1.0, 3.5}, true);
    CHECK(std::abs(fit.params.x0 - 3.7) < 1e-10);
    CHECK(std::abs(fit.params.c - 1.0) < 1e-10);
    CHECK(fit.orthogonality < 1e-13);
    CHECK(sobolev_norm(fit.residual, 1.0) < 1e-9);
}

TEST_CASE("guesses equal to truth need no Newton steps") {
    GridSpec g{100.0, 4096};
    const Field u = soliton_profile({3, 1.0, -2.0}, g);
    const MultiFit fit = fit_multi(u, {{3, 1.0, -2.0}});
    CHECK(fit.iterations == 0);
}

TEST_CASE("small bump moves the shift by O(eps)") {
    GridSpec g{100.0, 4096};
    const double eps = 1e-3;
    Field u = soliton_profile({2, 1.0, 0.0}, g);
    for (int i = 0; i < g.n; ++i)
        u[i] += eps * std::exp(-0.5 * std::pow(g.x(i) - 2.0, 2));
    const SingleFit fit = fit_single(u, {2, 1.0, 0.0}, true);
    // |rho| <= C eps with C from the nondegeneracy int Q'^2 != 0
    const Field qp = soliton_profile_derivative({2, 1.0, 0.0}, g, 1);
    const double C = 5.0 / inner_product(qp, qp);
    CHECK(std::abs(fit.params.x0) <= C * eps);
    CHECK(std::abs(fit.params.c - 1.0) <= 10 * eps);
    CHECK(fit.orthogonality < 1e-12);
}

TEST_CASE("shift Jacobian at the solution is -int Q'^2") {
    GridSpec g{100.0, 4096};
    const SolitonParams prm{2, 1.0, 0.0};
    const Field u = soliton_profile(prm, g);
    const Field qp = soliton_profile_derivative(prm, g, 1);
    // constraint G(rho) = <u - Q(.-rho), d_rho Q(.-rho)>; at rho = 0 the
    // analytic derivative dG/drho is -int Q'^2
    const double h = 1e-6;
    auto G = [&](double rho) {
        const Field q = soliton_profile({2, 1.0, rho}, g);
        const Field dq = soliton_profile_derivative({2, 1.0, rho}, g, 1);
        double acc = 0;
        for (int i = 0; i < g.n; ++i)
            acc += (u[i] - q[i]) * (-dq[i]);
        return acc * g.spacing();
    };
    const double dG = (G(h) - G(-h)) / (2 * h);
    CHECK(dG == doctest::Approx(-inner_product(qp, qp)).epsilon(1e-6));
}

TEST_CASE("two-soliton pure sum is recovered") {
    GridSpec g{200.0, 8192};
    Field u = soliton_profile({3, 1.0, -20.0}, g);
    {
        const Field q2 = soliton_profile({3, 2.0, 20.0}, g);
        for (int i = 0; i < g.n; ++i) u[i] += q2[i];
    }
    const MultiFit fit = fit_multi(u, {{3, 1.02, -19.9}, {3, 1.97, 20.1}});
    CHECK(std::abs(fit.params[0].c - 1.0) < 1e-8);
    CHECK(std::abs(fit.params[0].x0 + 20.0) < 1e-8);
    CHECK(std::abs(fit.params[1].c - 2.0) < 1e-8);
    CHECK(std::abs(fit.params[1].x0 - 20.0) < 1e-8);
}

TEST_CASE("bump between two solitons") {
    GridSpec g{200.0, 8192};
    Field u = soliton_profile({4, 1.0, -20.0}, g);
    {
        const Field q2 = soliton_profile({4, 2.0, 20.0}, g);
        for (int i = 0; i < g.n; ++i) u[i] += q2[i];
    }
    for (int i = 0; i < g.n; ++i)
        u[i] += 1e-3 * std::exp(-0.5 * g.x(i) * g.x(i));
    const MultiFit fit = fit_multi(u, {{4, 1.0, -20.0}, {4, 2.0, 20.0}});
    CHECK(fit.orthogonality < 1e-12);
    CHECK(std::abs(fit.params[0].x0 + 20.0) < 1e-2);
    CHECK(std::abs(fit.params[1].x0 - 20.0) < 1e-2);
    CHECK(std::abs(fit.params[0].c - 1.0) < 1e-2);

    SUBCASE("decomposition reconstructs u exactly") {
        Field recon = fit.residual;
        for (const SolitonParams& prm : fit.params) {
            const Field q = soliton_profile(prm, g);
            for (int i = 0; i < g.n; ++i) recon[i] += q[i];
        }
        double worst = 0;
        for (int i = 0; i < g.n; ++i)
            worst = std::max(worst, std::abs(recon[i] - u[i]));
        CHECK(worst < 1e-13);
    }
}

TEST_CASE("unordered guesses are rejected") {
    GridSpec g{200.0, 8192};
    Field u = soliton_profile({3, 1.0, -20.0}, g);
    const Field q2 = soliton_profile({3, 2.0, 20.0}, g);
    for (int i = 0; i < g.n; ++i) u[i] += q2[i];
    CHECK_THROWS_AS(fit_multi(u, {{3, 2.0, 20.0}, {3, 1.0, -20.0}}),
                    CrossingDetectedError);
}

TEST_CASE("guard rejects far-off data") {
    GridSpec g{100.0, 4096};
    Field u(g);
    for (int i = 0; i < g.n; ++i)
        u[i] = 0.05 * std::exp(-0.1 * g.x(i) * g.x(i));
    CHECK_THROWS_AS(fit_single(u, {2, 1.0, 0.0}, true), NoConvergenceError);
}

TEST_CASE("localized mass") {
    GridSpec g{400.0, 8192};
    SUBCASE("zero field") {
        CHECK(localized_mass(Field(g), 1.0, 8.0, 0.0) == 0.0);
    }
    SUBCASE("A below 4 rejected") {
        CHECK_THROWS_AS(localized_mass(Field(g), 1.0, 2.0, 0.0), Error);
    }
    SUBCASE("kink properties") {
        CHECK(kink_phi(-20.0) < 1e-8);
        CHECK(kink_phi(20.0) > 1.0 - 1e-8);
        // |phi'''| <= 2 phi' on a fine grid, with the closed-form derivatives
        // phi' = 1/(pi cosh s), phi''' = (sinh^2 s - 1)/(pi cosh^3 s)
        bool vouched = false;
        for (int i = 0; i <= 4000; ++i) {
            const double s = -20.0 + 0.01 * i;
            const double d1 = 1.0 / (std::numbers::pi * std::cosh(s));
            const double d3 = (std::sinh(s) * std::sinh(s) - 1.0) /
                              (std::numbers::pi * std::pow(std::cosh(s), 3));
            CHECK(std::abs(d3) <= 2.0 * d1);
            if (std::abs(s) < 3.0) {
                // closed forms agree with finite differences of kink_phi
                const double h = 1e-4;
                const double fd = (kink_phi(s + h) - kink_phi(s - h)) / (2 * h);
                CHECK(fd == doctest::Approx(d1).epsilon(1e-6));
                vouched = true;
            }
        }
        CHECK(vouched);
    }
    SUBCASE("captures the mass right of the kink") {
        // small soliton far left of m0 t, big soliton far right
        const double t = 10.0, m0 = 1.5;
        Field u = soliton_profile({4, 1.0, m0 * t - 120.0}, g);
        const Field q2 = soliton_profile({4, 2.0, m0 * t + 120.0}, g);
        for (int i = 0; i < g.n; ++i) u[i] += q2[i];
        const double m2 = localized_mass(u, m0, 8.0, t);
        const double mass_q2 = 0.5 * inner_product(q2, q2);
        CHECK(std::abs(m2 - mass_q2) < 1e-6);
    }
}

TEST_CASE("breather fit") {
    GridSpec g{100.0, 4096};
    const BreatherParams truth{1.5, 1.0, 0.25, -0.15};
    const double t = 0.1;
    const Field u = breather_profile(truth, t, g);
    SUBCASE("exact recovery") {
        const BreatherFit fit = fit_breather(u, truth, t);
        CHECK(std::abs(fit.params.x1 - truth.x1) < 1e-12);
        CHECK(std::abs(fit.params.x2 - truth.x2) < 1e-12);
        CHECK(sobolev_norm(fit.residual, 2.0) < 1e-10);
    }
    SUBCASE("shifted guess recovers to 1e-8") {
        const BreatherFit fit =
            fit_breather(u, {1.5, 1.0, 0.25 - 0.1, -0.15 + 0.05}, t);
        CHECK(std::abs(fit.params.x1 - truth.x1) < 1e-8);
        CHECK(std::abs(fit.params.x2 - truth.x2) < 1e-8);
        CHECK(fit.gradient_norm < 1e-10);
    }
}

TEST_CASE("track_trajectory produces a coherent track") {
    GridSpec g{100.0, 2048};
    Trajectory traj;
    for (double t : {0.0, 0.5, 1.0}) {
        Field u = soliton_profile({2, 1.0, t}, g);
        u.time = t;
        traj.snapshots.push_back(u);
    }
    const ModulationTrack track = track_trajectory(traj, {{2, 1.0, 0.0}});
    REQUIRE(track.times.size() == 3);
    for (size_t k = 0; k < 3; ++k) {
        CHECK(track.converged[k]);
        CHECK(std::abs(track.rho[k][0] - track.times[k]) < 1e-9);
        CHECK(track.residual_h1[k] < 1e-9);
    }
}
