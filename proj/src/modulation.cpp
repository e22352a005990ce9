#include "solitonlab/modulation.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "solitonlab/detail/fft.hpp"

namespace slab {

double sobolev_inner_product(const Field& f, const Field& g, double s) {
    if (!(f.grid == g.grid)) throw Error("sobolev_inner_product: mismatched grids");
    const int n = f.n();
    const std::vector<cplx> fh = detail::rfft(f.v);
    const std::vector<cplx> gh = detail::rfft(g.v);
    const double norm = f.grid.length / (static_cast<double>(n) * n);
    double acc = 0;
    for (int j = 0; j <= n / 2; ++j) {
        const double k = f.grid.wavenumber(j);
        const double w = std::pow(1.0 + k * k, s) * ((j == 0 || j == n / 2) ? 1.0 : 2.0);
        acc += w * (fh[static_cast<size_t>(j)] * std::conj(gh[static_cast<size_t>(j)])).real();
    }
    return acc * norm;
}

double kink_phi(double s) {
    return (2.0 / std::numbers::pi) * std::atan(std::exp(s));
}

double localized_mass(const Field& u, double m0, double A, double t) {
    if (A < 4.0) throw Error("localized_mass: A must be >= 4");
    const double h = u.grid.spacing();
    double acc = 0;
    for (int i = 0; i < u.n(); ++i) {
        const double s = (u.grid.x(i) - m0 * t) / A;
        acc += u[i] * u[i] * kink_phi(s);
    }
    return 0.5 * acc * h;
}

namespace {

constexpr int kMaxIter = 50;
constexpr double kOrthTol = 1e-12;
constexpr double kCondLimit = 1e12;

struct SolitonPieces {
    Field Q, Qp, Qpp, Lam, Lamp;
};

SolitonPieces pieces(const SolitonParams& prm, const GridSpec& g) {
    SolitonPieces s{soliton_profile(prm, g),
                    soliton_profile_derivative(prm, g, 1),
                    soliton_profile_derivative(prm, g, 2),
                    scaling_direction(prm, g), Field(g)};
    s.Lamp = spectral_derivative(s.Lam, 1);
    return s;
}

double cond_estimate(const Eigen::MatrixXd& J) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    return (smin > 0) ? sv(0) / smin : std::numeric_limits<double>::infinity();
}

}  // namespace

MultiFit fit_multi(const Field& u, const std::vector<SolitonParams>& guesses) {
    const int N = static_cast<int>(guesses.size());
    if (N == 0) throw Error("fit_multi: empty guess list");
    const GridSpec& g = u.grid;

    std::vector<double> rho(static_cast<size_t>(N)), cvals(static_cast<size_t>(N));
    for (int j = 0; j < N; ++j) {
        guesses[static_cast<size_t>(j)].validate();
        rho[static_cast<size_t>(j)] = guesses[static_cast<size_t>(j)].x0;
        cvals[static_cast<size_t>(j)] = guesses[static_cast<size_t>(j)].c;
    }
    for (int j = 0; j + 1 < N; ++j)
        if (!(rho[static_cast<size_t>(j)] < rho[static_cast<size_t>(j + 1)]))
            throw CrossingDetectedError("fit_multi: guesses must be ordered");

    auto assemble = [&](std::vector<SolitonPieces>& ps, Field& z) {
        z = u;
        ps.clear();
        for (int j = 0; j < N; ++j) {
            SolitonParams prm{guesses[static_cast<size_t>(j)].p, cvals[static_cast<size_t>(j)], rho[static_cast<size_t>(j)]};
            ps.push_back(pieces(prm, g));
            for (int i = 0; i < g.n; ++i) z[i] -= ps.back().Q[i];
        }
    };

    std::vector<SolitonPieces> ps;
    Field z(g);
    assemble(ps, z);

    // Newton guard relative to the smallest structure
    {
        double qmin = 1e300;
        for (const auto& s : ps) qmin = std::min(qmin, sobolev_norm(s.Q, 1.0));
        if (sobolev_norm(z, 1.0) >= 0.3 * qmin)
            throw NoConvergenceError("fit: initial residual beyond the Newton guard");
    }

    auto constraints = [&](const std::vector<SolitonPieces>& p, const Field& zz,
                           Eigen::VectorXd& G) {
        G.resize(2 * N);
        for (int j = 0; j < N; ++j) {
            G(2 * j) = -inner_product(zz, p[static_cast<size_t>(j)].Qp);
            G(2 * j + 1) = inner_product(zz, p[static_cast<size_t>(j)].Q);
        }
    };

    Eigen::VectorXd G;
    constraints(ps, z, G);
    double gnorm = G.cwiseAbs().maxCoeff();

    MultiFit out;
    out.residual = z;
    int it = 0;
    while (gnorm > kOrthTol && it < kMaxIter) {
        ++it;
        // analytic Jacobian; dz/drho_k = +Q_k', dz/dc_k = -Lambda Q_k,
        // rows follow G_j = (-<z, Q_j'>, <z, Q_j>)
        Eigen::MatrixXd J(2 * N, 2 * N);
        for (int j = 0; j < N; ++j) {
            const auto& pj = ps[static_cast<size_t>(j)];
            for (int k = 0; k < N; ++k) {
                const auto& pk = ps[static_cast<size_t>(k)];
                const double djk = (j == k) ? 1.0 : 0.0;
                J(2 * j, 2 * k) = -inner_product(pk.Qp, pj.Qp) + djk * inner_product(z, pj.Qpp);
                J(2 * j, 2 * k + 1) = inner_product(pk.Lam, pj.Qp) - djk * inner_product(z, pj.Lamp);
                J(2 * j + 1, 2 * k) = inner_product(pk.Qp, pj.Q) - djk * inner_product(z, pj.Qp);
                J(2 * j + 1, 2 * k + 1) = -inner_product(pk.Lam, pj.Q) + djk * inner_product(z, pj.Lam);
            }
        }
        if (cond_estimate(J) > kCondLimit)
            throw DegenerateError("fit: Jacobian conditioning beyond 1e12");
        Eigen::VectorXd step = J.partialPivLu().solve(-G);

        double damping = 1.0;
        bool accepted = false;
        for (int tries = 0; tries < 8 && !accepted; ++tries) {
            std::vector<double> rho_try = rho, c_try = cvals;
            bool feasible = true;
            for (int j = 0; j < N; ++j) {
                rho_try[static_cast<size_t>(j)] += damping * step(2 * j);
                c_try[static_cast<size_t>(j)] += damping * step(2 * j + 1);
                if (c_try[static_cast<size_t>(j)] <= 0) feasible = false;
            }
            if (feasible) {
                std::swap(rho, rho_try);
                std::swap(cvals, c_try);
                std::vector<SolitonPieces> ps_try;
                Field z_try(g);
                assemble(ps_try, z_try);
                Eigen::VectorXd G_try;
                constraints(ps_try, z_try, G_try);
                const double gn = G_try.cwiseAbs().maxCoeff();
                // take the last damped step even if not decreasing, so the
                // iteration cannot stall in a cycle
                if (gn < gnorm || gn <= kOrthTol || tries == 7) {
                    ps = std::move(ps_try);
                    z = std::move(z_try);
                    G = G_try;
                    gnorm = gn;
                    accepted = true;
                } else {
                    std::swap(rho, rho_try);  // roll back
                    std::swap(cvals, c_try);
                }
            }
            damping *= 0.5;  // damp non-decreasing steps
        }
        for (int j = 0; j + 1 < N; ++j)
            if (!(rho[static_cast<size_t>(j)] < rho[static_cast<size_t>(j + 1)]))
                throw CrossingDetectedError("fit_multi: fitted shifts lost their ordering");
    }
    if (gnorm > kOrthTol)
        throw NoConvergenceError("fit: Newton iterations exhausted, |G| = " +
                                 std::to_string(gnorm));

    out.params.clear();
    for (int j = 0; j < N; ++j)
        out.params.push_back({guesses[static_cast<size_t>(j)].p, cvals[static_cast<size_t>(j)], rho[static_cast<size_t>(j)]});
    out.residual = z;
    out.iterations = it;
    out.orthogonality = gnorm;
    return out;
}

SingleFit fit_single(const Field& u, const SolitonParams& guess,
                     bool fit_scaling) {
    if (fit_scaling) {
        MultiFit m = fit_multi(u, {guess});
        return {m.params[0], m.residual, m.iterations, m.orthogonality};
    }
    // shift-only Newton on  G(rho) = <z, d_rho R> = -<z, Q_c'(.-rho)>
    guess.validate();
    const GridSpec& g = u.grid;
    double rho = guess.x0;
    auto make = [&](double r) { return pieces({guess.p, guess.c, r}, g); };
    SolitonPieces ps = make(rho);
    Field z = u;
    for (int i = 0; i < g.n; ++i) z[i] -= ps.Q[i];
    if (sobolev_norm(z, 1.0) >= 0.3 * sobolev_norm(ps.Q, 1.0))
        throw NoConvergenceError("fit: initial residual beyond the Newton guard");
    double G = -inner_product(z, ps.Qp);
    int it = 0;
    while (std::abs(G) > kOrthTol && it < kMaxIter) {
        ++it;
        const double J = -inner_product(ps.Qp, ps.Qp) + inner_product(z, ps.Qpp);
        if (!(std::abs(J) > 0) || std::abs(1.0 / J) > kCondLimit)
            throw DegenerateError("fit: singular shift Jacobian");
        double step = -G / J, damping = 1.0;
        for (int tries = 0; tries < 8; ++tries) {
            const double r_try = rho + damping * step;
            SolitonPieces ps_try = make(r_try);
            Field z_try = u;
            for (int i = 0; i < g.n; ++i) z_try[i] -= ps_try.Q[i];
            const double G_try = -inner_product(z_try, ps_try.Qp);
            if (std::abs(G_try) < std::abs(G) || std::abs(G_try) <= kOrthTol) {
                rho = r_try;
                ps = std::move(ps_try);
                z = std::move(z_try);
                G = G_try;
                break;
            }
            damping *= 0.5;
        }
    }
    if (std::abs(G) > kOrthTol)
        throw NoConvergenceError("fit: Newton iterations exhausted");
    return {{guess.p, guess.c, rho}, z, it, std::abs(G)};
}

BreatherFit fit_breather(const Field& u, const BreatherParams& guess, double t) {
    guess.validate();
    const GridSpec& g = u.grid;
    double x1 = guess.x1, x2 = guess.x2;

    struct Samples {
        Field B, B1, B2, B11, B12, B22;
    };
    auto sample = [&](double s1, double s2) {
        BreatherParams prm{guess.alpha, guess.beta, s1, s2};
        Samples smp{Field(g), Field(g), Field(g), Field(g), Field(g), Field(g)};
        for (int i = 0; i < g.n; ++i) {
            const auto ser = detail::breather_series(prm, t, g.x(i));
            smp.B[i] = (ser.deriv(1, 0) + ser.deriv(0, 1)).real();
            smp.B1[i] = (ser.deriv(2, 0) + ser.deriv(1, 1)).real();
            smp.B2[i] = (ser.deriv(1, 1) + ser.deriv(0, 2)).real();
            smp.B11[i] = (ser.deriv(3, 0) + ser.deriv(2, 1)).real();
            smp.B12[i] = (ser.deriv(2, 1) + ser.deriv(1, 2)).real();
            smp.B22[i] = (ser.deriv(1, 2) + ser.deriv(0, 3)).real();
        }
        return smp;
    };

    Samples smp = sample(x1, x2);
    Field z = u;
    for (int i = 0; i < g.n; ++i) z[i] -= smp.B[i];
    if (sobolev_norm(z, 2.0) >= 0.3 * sobolev_norm(smp.B, 2.0))
        throw NoConvergenceError("fit_breather: initial residual beyond the guard");

    auto grad = [&](const Samples& s, const Field& zz, Eigen::Vector2d& G) {
        G(0) = -2.0 * sobolev_inner_product(zz, s.B1, 2.0);
        G(1) = -2.0 * sobolev_inner_product(zz, s.B2, 2.0);
    };
    Eigen::Vector2d G;
    grad(smp, z, G);
    int it = 0;
    while (G.cwiseAbs().maxCoeff() > 1e-12 && it < kMaxIter) {
        ++it;
        Eigen::Matrix2d H;
        H(0, 0) = 2.0 * (sobolev_inner_product(smp.B1, smp.B1, 2.0) -
                         sobolev_inner_product(z, smp.B11, 2.0));
        H(0, 1) = 2.0 * (sobolev_inner_product(smp.B1, smp.B2, 2.0) -
                         sobolev_inner_product(z, smp.B12, 2.0));
        H(1, 0) = H(0, 1);
        H(1, 1) = 2.0 * (sobolev_inner_product(smp.B2, smp.B2, 2.0) -
                         sobolev_inner_product(z, smp.B22, 2.0));
        if (cond_estimate(H) > kCondLimit)
            throw DegenerateError("fit_breather: Hessian conditioning beyond 1e12");
        Eigen::Vector2d step = H.partialPivLu().solve(-G);
        double damping = 1.0;
        for (int tries = 0; tries < 8; ++tries) {
            const double x1t = x1 + damping * step(0), x2t = x2 + damping * step(1);
            Samples st = sample(x1t, x2t);
            Field zt = u;
            for (int i = 0; i < g.n; ++i) zt[i] -= st.B[i];
            Eigen::Vector2d Gt;
            grad(st, zt, Gt);
            if (Gt.cwiseAbs().maxCoeff() < G.cwiseAbs().maxCoeff() ||
                Gt.cwiseAbs().maxCoeff() <= 1e-12) {
                x1 = x1t;
                x2 = x2t;
                smp = std::move(st);
                z = std::move(zt);
                G = Gt;
                break;
            }
            damping *= 0.5;
        }
    }
    if (G.cwiseAbs().maxCoeff() > 1e-10)
        throw NoConvergenceError("fit_breather: gradient did not converge");
    return {{guess.alpha, guess.beta, x1, x2}, z, it, G.cwiseAbs().maxCoeff()};
}

ModulationTrack track_trajectory(const Trajectory& traj,
                                 const std::vector<SolitonParams>& guesses,
                                 bool fit_scaling) {
    ModulationTrack track;
    std::vector<SolitonParams> warm = guesses;
    for (const Field& snap : traj.snapshots) {
        // advance the warm start by the free motion since the last snapshot
        std::vector<SolitonParams> advanced = warm;
        if (!track.times.empty()) {
            const double dtp = snap.time - track.times.back();
            for (auto& prm : advanced) prm.x0 += prm.c * dtp;
        }
        bool ok = true;
        try {
            if (advanced.size() == 1 && !fit_scaling) {
                SingleFit f = fit_single(snap, advanced[0], false);
                warm = {f.params};
                track.residual_h1.push_back(sobolev_norm(f.residual, 1.0));
                track.residual_h2.push_back(sobolev_norm(f.residual, 2.0));
            } else {
                MultiFit f = fit_multi(snap, advanced);
                warm = f.params;
                track.residual_h1.push_back(sobolev_norm(f.residual, 1.0));
                track.residual_h2.push_back(sobolev_norm(f.residual, 2.0));
            }
        } catch (const Error&) {
            ok = false;
            warm = advanced;
            track.residual_h1.push_back(std::numeric_limits<double>::quiet_NaN());
            track.residual_h2.push_back(std::numeric_limits<double>::quiet_NaN());
        }
        track.times.push_back(snap.time);
        std::vector<double> rhos, cs;
        for (const auto& prm : warm) {
            rhos.push_back(prm.x0);
            cs.push_back(prm.c);
        }
        track.rho.push_back(rhos);
        track.c.push_back(cs);
        track.converged.push_back(ok);
    }
    return track;
}

}  // namespace slab
