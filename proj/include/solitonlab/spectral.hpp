#pragma once

#include <Eigen/Dense>
#include <variant>
#include <vector>

#include "solitonlab/grid.hpp"
#include "solitonlab/profiles.hpp"

namespace slab {

enum class OperatorKind { soliton, breather };

/// Dense symmetric realization of a linearized operator on the grid.
struct LinearizedOperator {
    OperatorKind kind;
    Eigen::MatrixXd matrix;  // exactly symmetrized
    GridSpec grid;
    std::variant<SolitonParams, std::pair<BreatherParams, double>> params;
};

/// Fourier differentiation matrix of the given order (symmetric for even
/// order, antisymmetric for odd).
Eigen::MatrixXd differentiation_matrix(const GridSpec& g, int order);

/// L = -D2 + c I - diag(p Q_c^{p-1}); requires >= 32 points per unit width
/// c^{-1/2}
LinearizedOperator assemble_soliton_operator(const SolitonParams& prm,
                                             const GridSpec& grid);

/// fourth-order operator around the breather:
/// D4 - 2(b^2-a^2) D2 + (a^2+b^2)^2 I + d_x(5B^2 d_x .) + diag(...)
LinearizedOperator assemble_breather_operator(const BreatherParams& prm,
                                              double t, const GridSpec& grid);

struct SpectralReport {
    std::vector<double> eigenvalues;  // lowest k, ascending
    int negative_count = 0;
    double lambda0 = 0.0;  // -smallest eigenvalue when negative, else 0
    std::vector<double> kernel_alignments;  // |cos angle| with analytic kernel
    double spectrum_edge = 0.0;
    double tol_zero = 0.0;
};

/// full symmetric eigendecomposition; negative_count uses
/// tol_zero = 1e-6 * max|diag|; alignments measure the projection of the
/// near-zero eigenvectors onto span(analytic_kernel)
SpectralReport eigen_report(const LinearizedOperator& op, int k,
                            const std::vector<Field>& analytic_kernel = {});

/// smallest eigenvalue of the quadratic form restricted to the orthogonal
/// complement of span(constraints), in the L^2 sense
double coercivity_constant(const LinearizedOperator& op,
                           const std::vector<Field>& constraints);

struct WronskianCount {
    int count = 0;
    double x0 = 0.0;
};

/// roots of det W[B1,B2] via the closed formula
/// 16 a^3 b^3 (a^2+b^2)(a sinh(2 b y2) - b sin(2 a y1)) / (...)^2;
/// asserts the root is unique and simple
WronskianCount wronskian_negative_count(const BreatherParams& prm, double t);

/// value of det W[B1,B2] from the closed formula at position x
double wronskian_det_formula(const BreatherParams& prm, double t, double x);

}  // namespace slab
