#include "solitonlab/collision.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "solitonlab/detail/fft.hpp"
#include "solitonlab/solver.hpp"
#include "solitonlab/spectral.hpp"

namespace slab {

double CollisionConfig::interaction_time() const {
    return std::pow(c, -0.5 - delta0);
}

void CollisionConfig::validate() const {
    if (p != 3 && p != 4) throw Error("collision: p must be 3 or 4");
    if (!(c > 0 && c < 0.2)) throw Error("collision: c must lie in (0, 0.2)");
    if (delta0 <= 0) throw Error("collision: delta0 must be positive");
    grid.validate();
}

namespace {

struct Kink {
    // phi = tanh((p-1)y/2) and derivatives, exact
    double kappa;
    explicit Kink(int p) : kappa(0.5 * (p - 1)) {}
    double phi(double y) const { return std::tanh(kappa * y); }
    double d1(double y) const {
        const double s = 1.0 / std::cosh(kappa * y);
        return kappa * s * s;
    }
    double d2(double y) const {
        const double s = 1.0 / std::cosh(kappa * y);
        return -2.0 * kappa * kappa * s * s * std::tanh(kappa * y);
    }
    double d3(double y) const {
        const double s2 = 1.0 / std::cosh(kappa * y) / std::cosh(kappa * y);
        const double t = std::tanh(kappa * y);
        return -2.0 * std::pow(kappa, 3) * s2 * (s2 - 2.0 * t * t);
    }
};

/// bordered factorization of the soliton operator L (kernel Q' pinned)
class SolitonOperatorSolver {
public:
    SolitonOperatorSolver(int p, const GridSpec& g)
        : g_(g), q_(soliton_profile({p, 1.0, 0.0}, g)),
          qp_(soliton_profile_derivative({p, 1.0, 0.0}, g, 1)) {
        const int n = g.n;
        L_ = -differentiation_matrix(g, 2);
        for (int i = 0; i < n; ++i)
            L_(i, i) += 1.0 - p * std::pow(q_[i], p - 1);
        L_ = 0.5 * (L_ + L_.transpose()).eval();
        double nrm = 0;
        for (int i = 0; i < n; ++i) nrm += qp_[i] * qp_[i];
        nrm = std::sqrt(nrm);
        qn_ = Eigen::VectorXd(n);
        for (int i = 0; i < n; ++i) qn_(i) = qp_[i] / nrm;
        Eigen::MatrixXd A(n + 1, n + 1);
        A.setZero();
        A.topLeftCorner(n, n) = L_;
        A.topRightCorner(n, 1) = qn_;
        A.bottomLeftCorner(1, n) = qn_.transpose();
        lu_.compute(A);
    }

    /// solve L w = rhs on the complement of span{Q'}; two rounds of
    /// iterative refinement keep the residual near roundoff
    Field solve(const Field& rhs) const {
        const int n = g_.n;
        Eigen::VectorXd r(n + 1);
        for (int i = 0; i < n; ++i) r(i) = rhs[i];
        r(n) = 0.0;
        Eigen::VectorXd w = lu_.solve(r).head(n);
        for (int pass = 0; pass < 2; ++pass) {
            Eigen::VectorXd res(n + 1);
            res.head(n) = -(L_ * w);
            for (int i = 0; i < n; ++i) res(i) += rhs[i];
            res.head(n) -= qn_ * (qn_.dot(res.head(n)));
            res(n) = 0.0;
            w += lu_.solve(res).head(n);
        }
        // project out the kernel component
        w -= qn_ * qn_.dot(w);
        Field out(g_);
        for (int i = 0; i < n; ++i) out[i] = w(i);
        return out;
    }

    const Field& Q() const { return q_; }
    const Field& Qp() const { return qp_; }

private:
    GridSpec g_;
    Field q_, qp_;
    Eigen::MatrixXd L_;
    Eigen::VectorXd qn_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

Field cumulative_from_left(const Field& f) {
    Field F = detail::antiderivative_spectral(f);
    const double left = F[0];
    for (int i = 0; i < F.n(); ++i) F[i] -= left;
    return F;
}

/// (L w)' for w that decays (spectral derivatives are safe)
Field L_prime_local(int p, const Field& Q, const Field& w) {
    Field Lw = spectral_derivative(w, 2);
    for (int i = 0; i < w.n(); ++i)
        Lw[i] = -Lw[i] + w[i] - p * std::pow(Q[i], p - 1) * w[i];
    return spectral_derivative(Lw, 1);
}

/// (L (k phi))' assembled from closed-form kink derivatives:
/// (L phi)' = -phi''' + phi' - p (Q^{p-1} phi)'
Field L_prime_kink(int p, const GridSpec& g, const Field& Q, double coeff) {
    const Kink K(p);
    Field qphi(g);
    for (int i = 0; i < g.n; ++i)
        qphi[i] = std::pow(Q[i], p - 1) * K.phi(g.x(i));
    const Field dqphi = spectral_derivative(qphi, 1);
    Field out(g);
    for (int i = 0; i < g.n; ++i) {
        const double y = g.x(i);
        out[i] = coeff * (-K.d3(y) + K.d1(y) - p * dqphi[i]);
    }
    return out;
}

}  // namespace

Field CollisionCorrections::B1_kink() const {
    const Kink K(p);
    Field f = B1_local;
    for (int i = 0; i < grid.n; ++i) f[i] += b1 * K.phi(grid.x(i));
    return f;
}

Field CollisionCorrections::B2() const {
    const Kink K(p);
    Field f = B2_local;
    for (int i = 0; i < grid.n; ++i) f[i] += b * K.phi(grid.x(i));
    return f;
}

CollisionCorrections first_order_corrections(int p, const GridSpec& grid) {
    if (p != 3 && p != 4) throw Error("collision corrections: p must be 3 or 4");
    grid.validate();
    SolitonOperatorSolver solver(p, grid);
    const Field& Q = solver.Q();
    const Field& Qp = solver.Qp();
    const int n = grid.n;

    Field pQ(grid), Q2(grid);
    for (int i = 0; i < n; ++i) {
        pQ[i] = p * std::pow(Q[i], p - 1);
        Q2[i] = Q[i] * Q[i];
    }
    const Field d2Q = spectral_derivative(Q, 2);

    // scaling-type direction with L Aa = -(3Q - 2Q^p)
    Field Aa(grid);
    for (int i = 0; i < n; ++i)
        Aa[i] = Q[i] / (p - 1) + 1.5 * grid.x(i) * Qp[i];

    Field A0(grid);
    if (p == 4) {
        // closed form: (1/3) Q' int_0^x Q^2 - (2/3) Q^3
        const Field R = detail::antiderivative_spectral(Q2);
        for (int i = 0; i < n; ++i)
            A0[i] = Qp[i] * R[i] / 3.0 - 2.0 / 3.0 * std::pow(Q[i], 3);
    } else {
        A0 = solver.solve(pQ);
    }

    // Fredholm condition of the B1 equation fixes a1
    Field num_f = spectral_derivative(A0, 2);
    for (int i = 0; i < n; ++i) num_f[i] = 3.0 * num_f[i] + pQ[i] * A0[i] + pQ[i];
    Field den_f = spectral_derivative(Aa, 2);
    for (int i = 0; i < n; ++i)
        den_f[i] = 3.0 * d2Q[i] - 3.0 * den_f[i] - pQ[i] * Aa[i];
    const double a1 = inner_product(num_f, Q) / inner_product(den_f, Q);

    CollisionCorrections cor;
    cor.p = p;
    cor.grid = grid;
    cor.a1 = a1;
    cor.A1 = Field(grid);
    for (int i = 0; i < n; ++i) cor.A1[i] = A0[i] + a1 * Aa[i];

    // B1 from (L B1)' = RHS1, kink-split
    Field RHS1 = spectral_derivative(cor.A1, 2);
    for (int i = 0; i < n; ++i)
        RHS1[i] = -3.0 * a1 * d2Q[i] + 3.0 * RHS1[i] + pQ[i] * cor.A1[i] + pQ[i];
    const double fredholm = inner_product(RHS1, Q);
    if (std::abs(fredholm) > 1e-8 * std::max(1.0, sobolev_norm(RHS1, 0.0)))
        throw InconsistentError("first order: B1 Fredholm condition violated");
    cor.b1 = 0.5 * inner_product(RHS1, Field(grid, 1.0));
    Field g1 = cumulative_from_left(RHS1);
    const Kink K(p);
    Field rhsV(grid);
    for (int i = 0; i < n; ++i) {
        const double y = grid.x(i);
        const double Lphi = -K.d2(y) + K.phi(y) - pQ[i] * K.phi(y);
        rhsV[i] = g1[i] - cor.b1 - cor.b1 * Lphi;
    }
    cor.B1_local = solver.solve(rhsV);
    return cor;
}

CollisionCorrections solve_second_order_system(int p, const GridSpec& grid,
                                               const CollisionCorrections& first) {
    if (first.p != p || !(first.grid == grid))
        throw Error("second order: mismatched first-order corrections");
    SolitonOperatorSolver solver(p, grid);
    const Field& Q = solver.Q();
    const int n = grid.n;
    const double a1 = first.a1;
    const double kap = 0.5 * p * (p - 1);  // binom(p,2)

    Field pQ(grid);
    for (int i = 0; i < n; ++i) pQ[i] = p * std::pow(Q[i], p - 1);
    const Field d2Q = spectral_derivative(Q, 2);
    const Field d3Q = spectral_derivative(Q, 3);

    const Field& A1 = first.A1;
    const Field dA1 = spectral_derivative(A1, 1);
    const Field d2A1 = spectral_derivative(A1, 2);
    const Field B1 = first.B1_kink();
    const Kink K(p);
    Field dB1 = spectral_derivative(first.B1_local, 1);
    Field d2B1 = spectral_derivative(first.B1_local, 2);
    for (int i = 0; i < n; ++i) {
        const double y = grid.x(i);
        dB1[i] += first.b1 * K.d1(y);
        d2B1[i] += first.b1 * K.d2(y);
    }

    // F2 = (kap Q^{p-2}(1+A1)^2)' - a1 (p Q^{p-1}(1+A1) + 3A1'')' + 3 a1^2 Q'''
    Field inner1(grid), inner2(grid);
    for (int i = 0; i < n; ++i) {
        const double one_a = 1.0 + A1[i];
        inner1[i] = kap * std::pow(Q[i], p - 2) * one_a * one_a;
        inner2[i] = pQ[i] * one_a + 3.0 * d2A1[i];
    }
    const Field dinner1 = spectral_derivative(inner1, 1);
    const Field dinner2 = spectral_derivative(inner2, 1);
    Field F2(grid);
    for (int i = 0; i < n; ++i)
        F2[i] = dinner1[i] - a1 * dinner2[i] + 3.0 * a1 * a1 * d3Q[i];

    // G2 = kap Q^{p-2}(1+A1)^2 + (kap Q^{p-2} B1 (1+A1))'
    //      - (a1/2)(9A1' + 3B1'' + p Q^{p-1} B1)' + (3/2) a1^2 Q''
    Field inner3(grid), inner4(grid);
    for (int i = 0; i < n; ++i) {
        inner3[i] = kap * std::pow(Q[i], p - 2) * B1[i] * (1.0 + A1[i]);
        inner4[i] = 9.0 * dA1[i] + 3.0 * d2B1[i] + pQ[i] * B1[i];
    }
    const Field dinner3 = spectral_derivative(inner3, 1);
    const Field dinner4 = spectral_derivative(inner4, 1);
    Field G2(grid);
    for (int i = 0; i < n; ++i)
        G2[i] = inner1[i] + dinner3[i] - 0.5 * a1 * dinner4[i] +
                1.5 * a1 * a1 * d2Q[i];

    // A2 = A20 + a2 Aa with L A20 = int F2, L Aa = -(3Q - 2Q^p)
    Field Aa(grid);
    for (int i = 0; i < n; ++i)
        Aa[i] = Q[i] / (p - 1) + 1.5 * grid.x(i) * solver.Qp()[i];
    const Field IF2 = cumulative_from_left(F2);
    const Field A20 = solver.solve(IF2);

    Field numf = spectral_derivative(A20, 2);
    for (int i = 0; i < n; ++i) numf[i] = G2[i] + 3.0 * numf[i] + pQ[i] * A20[i];
    Field denf = spectral_derivative(Aa, 2);
    for (int i = 0; i < n; ++i)
        denf[i] = 3.0 * d2Q[i] - 3.0 * denf[i] - pQ[i] * Aa[i];
    const double a2 = inner_product(numf, Q) / inner_product(denf, Q);

    CollisionCorrections cor = first;
    cor.second_order = true;
    cor.a2 = a2;
    cor.A2 = Field(grid);
    for (int i = 0; i < n; ++i) cor.A2[i] = A20[i] + a2 * Aa[i];

    Field RHS2 = spectral_derivative(cor.A2, 2);
    for (int i = 0; i < n; ++i)
        RHS2[i] = G2[i] - 3.0 * a2 * d2Q[i] + 3.0 * RHS2[i] + pQ[i] * cor.A2[i];
    const double fredholm = inner_product(RHS2, Q);
    if (std::abs(fredholm) > 1e-8 * std::max(1.0, sobolev_norm(RHS2, 0.0)))
        throw InconsistentError("second order: B2 Fredholm condition violated");

    cor.b = 0.5 * inner_product(RHS2, Field(grid, 1.0));
    Field g2 = cumulative_from_left(RHS2);
    Field rhsV(grid);
    for (int i = 0; i < n; ++i) {
        const double y = grid.x(i);
        const double Lphi = -K.d2(y) + K.phi(y) - pQ[i] * K.phi(y);
        rhsV[i] = g2[i] - cor.b - cor.b * Lphi;
    }
    cor.B2_local = solver.solve(rhsV);
    return cor;
}

Omega2Residuals collision_system_residuals(const CollisionCorrections& cor) {
    const int p = cor.p;
    const GridSpec& g = cor.grid;
    const int n = g.n;
    const Field Q = soliton_profile({p, 1.0, 0.0}, g);
    Field pQ(g);
    for (int i = 0; i < n; ++i) pQ[i] = p * std::pow(Q[i], p - 1);
    const Field d2Q = spectral_derivative(Q, 2);

    Omega2Residuals res;

    // first-order system
    {
        Field lhs = L_prime_local(p, Q, cor.A1);
        Field three2p(g);
        for (int i = 0; i < n; ++i) three2p[i] = 3.0 * Q[i] - 2.0 * std::pow(Q[i], p);
        const Field d32p = spectral_derivative(three2p, 1);
        const Field dpQ = spectral_derivative(pQ, 1);
        const Field d2A1 = spectral_derivative(cor.A1, 2);
        for (int i = 0; i < n; ++i)
            res.eq_A1 = std::max(res.eq_A1,
                                 std::abs(lhs[i] + cor.a1 * d32p[i] - dpQ[i]));
        Field lhsB = L_prime_local(p, Q, cor.B1_local);
        const Field kinkB = L_prime_kink(p, g, Q, cor.b1);
        for (int i = 0; i < n; ++i)
            res.eq_B1 = std::max(
                res.eq_B1,
                std::abs(lhsB[i] + kinkB[i] + 3.0 * cor.a1 * d2Q[i] -
                         3.0 * d2A1[i] - pQ[i] * cor.A1[i] - pQ[i]));
    }
    if (!cor.second_order) return res;

    // rebuild F2/G2 exactly as in the solver and substitute the solution back
    CollisionCorrections first = cor;
    first.second_order = false;
    const double a1 = cor.a1;
    const double kap = 0.5 * p * (p - 1);
    const Field& A1 = cor.A1;
    const Field dA1 = spectral_derivative(A1, 1);
    const Field d2A1 = spectral_derivative(A1, 2);
    const Field B1 = cor.B1_kink();
    const Kink K(p);
    Field d2B1 = spectral_derivative(cor.B1_local, 2);
    for (int i = 0; i < n; ++i) d2B1[i] += cor.b1 * K.d2(g.x(i));
    const Field d3Q = spectral_derivative(Q, 3);

    Field inner1(g), inner2(g), inner3(g), inner4(g);
    for (int i = 0; i < n; ++i) {
        const double one_a = 1.0 + A1[i];
        inner1[i] = kap * std::pow(Q[i], p - 2) * one_a * one_a;
        inner2[i] = pQ[i] * one_a + 3.0 * d2A1[i];
        inner3[i] = kap * std::pow(Q[i], p - 2) * B1[i] * one_a;
        inner4[i] = 9.0 * dA1[i] + 3.0 * d2B1[i] + pQ[i] * B1[i];
    }
    const Field dinner1 = spectral_derivative(inner1, 1);
    const Field dinner2 = spectral_derivative(inner2, 1);
    const Field dinner3 = spectral_derivative(inner3, 1);
    const Field dinner4 = spectral_derivative(inner4, 1);

    const Field lhsA2 = L_prime_local(p, Q, cor.A2);
    Field three2p(g);
    for (int i = 0; i < n; ++i) three2p[i] = 3.0 * Q[i] - 2.0 * std::pow(Q[i], p);
    const Field d32p = spectral_derivative(three2p, 1);
    const Field d2A2 = spectral_derivative(cor.A2, 2);
    const Field lhsB2 = L_prime_local(p, Q, cor.B2_local);
    const Field kinkB2 = L_prime_kink(p, g, Q, cor.b);

    for (int i = 0; i < n; ++i) {
        const double F2 = dinner1[i] - a1 * dinner2[i] + 3.0 * a1 * a1 * d3Q[i];
        const double G2 = inner1[i] + dinner3[i] - 0.5 * a1 * dinner4[i] +
                          1.5 * a1 * a1 * d2Q[i];
        res.eq_A2 = std::max(res.eq_A2,
                             std::abs(lhsA2[i] + cor.a2 * d32p[i] - F2));
        res.eq_B2 = std::max(
            res.eq_B2, std::abs(lhsB2[i] + kinkB2[i] + 3.0 * cor.a2 * d2Q[i] -
                                3.0 * d2A2[i] - pQ[i] * cor.A2[i] - G2));
    }
    return res;
}

namespace detail {

TrigInterpolant::TrigInterpolant(const Field& f)
    : x0_(f.grid.x(0)), length_(f.grid.length), coef_(rfft(f.v)) {
    const double inv = 1.0 / f.n();
    for (cplx& c : coef_) c *= inv;
}

double TrigInterpolant::operator()(double x) const {
    // outside the sampled window the represented field has decayed; return 0
    // rather than the periodic ghost copies
    const double d = x - x0_;
    if (d <= 0.0 || d >= length_) return 0.0;
    const int nk = static_cast<int>(coef_.size());
    const double th = 2.0 * std::numbers::pi * d / length_;
    const cplx w = std::polar(1.0, th);
    cplx pw = w;
    double acc = coef_[0].real();
    for (int j = 1; j < nk - 1; ++j) {
        acc += 2.0 * (coef_[static_cast<size_t>(j)] * pw).real();
        pw *= w;
    }
    acc += (coef_[static_cast<size_t>(nk - 1)] * pw).real();  // Nyquist
    return acc;
}

}  // namespace detail

namespace {

/// cumulative integral of Q_c^k as an exact ramp plus a trigonometric
/// series; clamped to its saturated value beyond the tabulated window
class SolitonCumulative {
public:
    SolitonCumulative(int p, double c, int power)
        : ysat_(45.0 / std::sqrt(c)) {
        const int n = 2048;
        GridSpec g{2.0 * ysat_, n};
        Field f(g);
        for (int i = 0; i < n; ++i)
            f[i] = std::pow(soliton_value({p, c, 0.0}, g.x(i)), power);
        Field F = slab::detail::antiderivative_spectral(f);
        // spectral antiderivative = mean ramp + periodic part anchored at 0
        std::vector<cplx> fh = slab::detail::rfft(f.v);
        mean_ = fh[0].real() / n;
        Field periodic = F;
        for (int i = 0; i < n; ++i) periodic[i] -= mean_ * g.x(i);
        interp_ = std::make_unique<slab::detail::TrigInterpolant>(periodic);
    }
    double operator()(double y) const {
        const double yc = std::clamp(y, -0.98 * ysat_, 0.98 * ysat_);
        return mean_ * yc + (*interp_)(yc);
    }

private:
    double ysat_;
    double mean_ = 0.0;
    std::unique_ptr<slab::detail::TrigInterpolant> interp_;
};

}  // namespace

Field collision_ansatz(const CollisionConfig& cfg,
                       const CollisionCorrections& cor, double t, int order) {
    cfg.validate();
    if (order != 0 && order != 3 && order != 4)
        throw Error("collision_ansatz: order must be 0, 3 or 4");
    if (order == 4 && !cor.second_order)
        throw Error("collision_ansatz: second-order corrections required for v4");
    const int p = cfg.p;
    const double c = cfg.c;
    const GridSpec& g = cfg.grid;

    const detail::TrigInterpolant iA1(cor.A1), iV1(cor.B1_local);
    const detail::TrigInterpolant iA2(order == 4 ? cor.A2 : Field(cor.grid));
    const detail::TrigInterpolant iV2(order == 4 ? cor.B2_local : Field(cor.grid));
    const Kink K(p);
    const SolitonCumulative I1(p, c, 1), I2(p, c, 2);

    Field v(g);
    v.time = t;
    const SolitonParams small{p, c, 0.0};
    for (int i = 0; i < g.n; ++i) {
        const double x = g.x(i);
        const double yc = x + (1.0 - c) * t;
        double alpha = 0.0;
        if (order >= 3) alpha = cor.a1 * I1(yc);
        if (order == 4) alpha += cor.a2 * I2(yc);
        const double y = x - alpha;
        const double Qc = soliton_value(small, yc, 0);
        const double Qcp = soliton_value(small, yc, 1);
        double val = soliton_value({p, 1.0, 0.0}, y, 0) + Qc;
        if (order >= 3) {
            const double A1y = iA1(y);
            const double B1y = cor.b1 * K.phi(y) + iV1(y);
            val += A1y * Qc + B1y * Qcp;
        }
        if (order == 4) {
            const double A2y = iA2(y);
            const double B2y = cor.b * K.phi(y) + iV2(y);
            val += A2y * Qc * Qc + B2y * 2.0 * Qc * Qcp;
        }
        v[i] = val;
    }
    return v;
}

DefectReport measure_defect(const CollisionConfig& cfg) {
    cfg.validate();
    const int p = cfg.p;
    const double c = cfg.c;
    const GridSpec& g = cfg.grid;

    const double sep0 = std::max((1.0 - c) * cfg.interaction_time(),
                                 cfg.settle_sep_factor / std::sqrt(c));
    const double t_run = 2.0 * sep0 / (1.0 - c);

    Field u0(g);
    const SolitonParams big{p, 1.0, 0.0}, small{p, c, sep0};
    for (int i = 0; i < g.n; ++i)
        u0[i] = soliton_value(big, g.x(i), 0) + soliton_value(small, g.x(i), 0);

    DefectReport rep;
    rep.separation = sep0;
    {
        MultiFit f0 = fit_multi(u0, {{p, 1.0, 0.0}, {p, c, sep0}});
        rep.pre_fit = f0.params;
    }

    EvolveConfig ecfg;
    ecfg.p = p;
    ecfg.dt = cfg.dt;
    ecfg.t_end = t_run;
    ecfg.snapshot_stride = static_cast<int>(std::lround(t_run / cfg.dt));
    ecfg.frame_speed = 1.0;  // frame of the big soliton
    Trajectory traj = evolve(u0, ecfg);
    const Field& u = traj.snapshots.back();
    rep.t_measure = u.time;

    // locate both solitons for the post-collision fit
    int ibig = 0;
    for (int i = 1; i < g.n; ++i)
        if (u[i] > u[ibig]) ibig = i;
    const double xbig = g.x(ibig);
    int ismall = -1;
    for (int i = 0; i < g.n; ++i) {
        if (g.x(i) < xbig - 0.25 * sep0 && g.x(i) > xbig - 2.0 * sep0) {
            if (ismall < 0 || u[i] > u[ismall]) ismall = i;
        }
    }
    if (ismall < 0) throw Error("measure_defect: small soliton not found");

    MultiFit fit = fit_multi(u, {{p, c, g.x(ismall)}, {p, 1.0, xbig}});
    rep.post_fit = fit.params;

    const double mid = 0.5 * (fit.params[0].x0 + fit.params[1].x0);
    Field zr(g);
    for (int i = 0; i < g.n; ++i)
        zr[i] = (g.x(i) > mid) ? fit.residual[i] : 0.0;
    rep.defect_norm = sobolev_norm(zr, 1.0);
    rep.defect_norm_full = sobolev_norm(fit.residual, 1.0);
    return rep;
}

}  // namespace slab
