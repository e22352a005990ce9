#include "solitonlab/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "solitonlab/detail/fft.hpp"

namespace slab {

Eigen::MatrixXd differentiation_matrix(const GridSpec& g, int order) {
    const int n = g.n;
    // columns are spectral derivatives of delta functions
    Eigen::MatrixXd D(n, n);
    std::vector<double> e(static_cast<size_t>(n), 0.0);
    Field col(g);
    for (int j = 0; j < n; ++j) {
        std::fill(col.v.begin(), col.v.end(), 0.0);
        col[j] = 1.0;
        const Field d = spectral_derivative(col, order);
        for (int i = 0; i < n; ++i) D(i, j) = d[i];
    }
    if (order % 2 == 0)
        D = 0.5 * (D + D.transpose()).eval();
    else
        D = 0.5 * (D - D.transpose()).eval();
    return D;
}

LinearizedOperator assemble_soliton_operator(const SolitonParams& prm,
                                             const GridSpec& grid) {
    prm.validate();
    grid.validate();
    const double width = 1.0 / std::sqrt(prm.c);
    if (grid.spacing() > width / 32.0)
        throw Error("soliton operator: grid must resolve c^{-1/2} with >= 32 points");
    Eigen::MatrixXd M = -differentiation_matrix(grid, 2);
    const Field q = soliton_profile(prm, grid);
    for (int i = 0; i < grid.n; ++i)
        M(i, i) += prm.c - prm.p * std::pow(q[i], prm.p - 1);
    M = 0.5 * (M + M.transpose()).eval();
    return {OperatorKind::soliton, std::move(M), grid, prm};
}

LinearizedOperator assemble_breather_operator(const BreatherParams& prm,
                                              double t, const GridSpec& grid) {
    prm.validate();
    grid.validate();
    // the fourth-order block amplifies unresolved tails by k^4; the
    // spectral decay rate shrinks with beta, so resolution scales with it
    if (grid.spacing() > 1.0 / (16.0 * prm.beta))
        throw Error("breather operator: grid must resolve 1/(16 beta)");
    const double a2 = prm.alpha * prm.alpha, b2 = prm.beta * prm.beta;
    const Eigen::MatrixXd D1 = differentiation_matrix(grid, 1);
    const Eigen::MatrixXd D2 = differentiation_matrix(grid, 2);
    const Eigen::MatrixXd D4 = differentiation_matrix(grid, 4);

    const int n = grid.n;
    Eigen::VectorXd B(n), Bx(n), Bxx(n);
    for (int i = 0; i < n; ++i) {
        const auto s = detail::breather_series(prm, t, grid.x(i));
        B(i) = detail::profile_x_derivative(s, 0).real();
        Bx(i) = detail::profile_x_derivative(s, 1).real();
        Bxx(i) = detail::profile_x_derivative(s, 2).real();
    }

    Eigen::MatrixXd M = D4 - 2.0 * (b2 - a2) * D2;
    M.diagonal().array() += (a2 + b2) * (a2 + b2);
    // middle block in exact divergence form d_x(5B^2 d_x .)
    M += D1 * (5.0 * B.array().square()).matrix().asDiagonal() * D1;
    M.diagonal() += (5.0 * Bx.array().square() + 10.0 * B.array() * Bxx.array() +
                     7.5 * B.array().pow(4) - 6.0 * (b2 - a2) * B.array().square())
                        .matrix();
    M = 0.5 * (M + M.transpose()).eval();
    return {OperatorKind::breather, std::move(M), grid, std::pair{prm, t}};
}

SpectralReport eigen_report(const LinearizedOperator& op, int k,
                            const std::vector<Field>& analytic_kernel) {
    const int n = static_cast<int>(op.matrix.rows());
    if (k > n) throw Error("eigen_report: k exceeds matrix size");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.matrix);
    if (es.info() != Eigen::Success)
        throw Error("eigen_report: eigensolver failed to converge");
    const Eigen::VectorXd& ev = es.eigenvalues();

    SpectralReport rep;
    if (op.kind == OperatorKind::soliton) {
        rep.spectrum_edge = std::get<SolitonParams>(op.params).c;
    } else {
        const BreatherParams& bp = std::get<std::pair<BreatherParams, double>>(op.params).first;
        const double a2 = bp.alpha * bp.alpha, b2 = bp.beta * bp.beta;
        rep.spectrum_edge =
            (bp.beta >= bp.alpha) ? (a2 + b2) * (a2 + b2) : 4.0 * a2 * b2;
    }
    // diagonal normalization alone scales like kmax^4 for the fourth-order
    // operator, so the zero threshold is also capped by the spectrum edge
    rep.tol_zero = std::min(1e-6 * op.matrix.diagonal().cwiseAbs().maxCoeff(),
                            0.5 * rep.spectrum_edge);
    rep.eigenvalues.assign(ev.data(), ev.data() + std::max(1, k));
    rep.negative_count = static_cast<int>((ev.array() < -rep.tol_zero).count());
    rep.lambda0 = (ev(0) < -rep.tol_zero) ? -ev(0) : 0.0;

    if (!analytic_kernel.empty()) {
        // orthonormal basis of the analytic kernel span
        Eigen::MatrixXd K(n, static_cast<int>(analytic_kernel.size()));
        for (size_t j = 0; j < analytic_kernel.size(); ++j)
            for (int i = 0; i < n; ++i)
                K(i, static_cast<int>(j)) = analytic_kernel[j][i];
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(K);
        Eigen::MatrixXd Qb = qr.householderQ() *
                             Eigen::MatrixXd::Identity(n, static_cast<int>(analytic_kernel.size()));
        // near-zero eigenvectors; the discretized continuum above the edge
        // is never classified
        for (int j = 0; j < n; ++j) {
            if (ev(j) > rep.tol_zero) break;
            if (std::abs(ev(j)) < rep.tol_zero) {
                const Eigen::VectorXd v = es.eigenvectors().col(j);
                rep.kernel_alignments.push_back((Qb.transpose() * v).norm());
            }
        }
    }
    return rep;
}

double coercivity_constant(const LinearizedOperator& op,
                           const std::vector<Field>& constraints) {
    const int n = static_cast<int>(op.matrix.rows());
    const int m = static_cast<int>(constraints.size());
    if (m == 0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
            op.matrix, Eigen::EigenvaluesOnly);
        return es.eigenvalues()(0);
    }
    Eigen::MatrixXd C(n, m);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < n; ++i) C(i, j) = constraints[static_cast<size_t>(j)][i];
    // rank check via column-pivoted QR
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(C);
    if (qr.rank() < m)
        throw Error("coercivity_constant: constraints are rank-deficient");
    // orthonormal complement basis from the full QR of C
    Eigen::HouseholderQR<Eigen::MatrixXd> full(C);
    Eigen::MatrixXd Qfull = full.householderQ();
    Eigen::MatrixXd W = Qfull.rightCols(n - m);
    Eigen::MatrixXd A = W.transpose() * op.matrix * W;
    A = 0.5 * (A + A.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

double wronskian_det_formula(const BreatherParams& prm, double t, double x) {
    const double a = prm.alpha, b = prm.beta;
    const double y1 = x + prm.delta() * t + prm.x1;
    const double y2 = x + prm.gamma() * t + prm.x2;
    const double num = 16.0 * a * a * a * b * b * b * (a * a + b * b) *
                       (a * std::sinh(2.0 * b * y2) - b * std::sin(2.0 * a * y1));
    const double den = a * a + b * b + a * a * std::cosh(2.0 * b * y2) -
                       b * b * std::cos(2.0 * a * y1);
    return num / (den * den);
}

WronskianCount wronskian_negative_count(const BreatherParams& prm, double t) {
    prm.validate();
    const double a = prm.alpha, b = prm.beta;
    // roots satisfy |sinh(2 b y2)| <= b/a, so they live in a known window
    const double ymax = std::asinh(b / a) / (2.0 * b);
    const double xc = -prm.gamma() * t - prm.x2;  // y2 = 0
    const double lo = xc - ymax - 1.0, hi = xc + ymax + 1.0;
    auto f = [&](double x) {
        const double y1 = x + prm.delta() * t + prm.x1;
        const double y2 = x + prm.gamma() * t + prm.x2;
        return a * std::sinh(2.0 * b * y2) - b * std::sin(2.0 * a * y1);
    };
    const int nscan = 40000;
    WronskianCount out;
    double prev = f(lo);
    for (int i = 1; i <= nscan; ++i) {
        const double x = lo + (hi - lo) * i / nscan;
        const double cur = f(x);
        if ((prev < 0 && cur >= 0) || (prev > 0 && cur <= 0)) {
            double xa = lo + (hi - lo) * (i - 1) / nscan, xb = x;
            for (int it = 0; it < 80; ++it) {
                const double xm = 0.5 * (xa + xb);
                if ((f(xa) <= 0) == (f(xm) <= 0))
                    xa = xm;
                else
                    xb = xm;
            }
            out.x0 = 0.5 * (xa + xb);
            ++out.count;
        }
        prev = cur;
    }
    if (out.count != 1)
        throw InconsistentError(
            "wronskian_negative_count: expected a unique simple root, found " +
            std::to_string(out.count));
    // simplicity: derivative at the root must be nonzero
    const double h = 1e-6;
    if (std::abs(f(out.x0 + h) - f(out.x0 - h)) / (2 * h) <= 0.0)
        throw InconsistentError("wronskian_negative_count: root is not simple");
    return out;
}

}  // namespace slab
