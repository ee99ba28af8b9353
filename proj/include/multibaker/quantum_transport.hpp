// Copyright 2026 The multibaker Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file quantum_transport.hpp
 * @brief Lattice dynamics of the quantum multibaker map.
 *
 * The map is translation invariant along the lattice, so in the lattice
 * quasimomentum basis it reduces to a family of D x D unitaries
 * B_{s,k} = diag(e^{-ik} on the x+1 half, e^{+ik} on the x-1 half) B_s.
 * Two independent routes to the coarse-grained position are provided:
 *
 *  - direct evolution of a localized state on a truncated lattice window
 *    (lattice_evolve), giving p(x, t) and its moments;
 *  - k-space quadrature over B_{s,k} (moment_via_quadrature), and its
 *    long-time limit through the eigenbasis of B_{s,k} (asymptotic_current).
 */

#pragma once

#include <multibaker/cell_hilbert.hpp>
#include <multibaker/distribution_table.hpp>

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace multibaker {

inline constexpr int kDefaultQuadratureNodes = 256;
inline constexpr double kDefaultDegeneracyTolerance = 1e-8;

/// Midpoint rule for integral dk/(2 pi) over [0, 2 pi):
/// nodes k_j = 2 pi (j + 1/2)/n_k, weights 1/n_k.
class KGrid {
public:
    explicit KGrid(int n_k = kDefaultQuadratureNodes);

    int size() const { return n_k_; }
    double node(int j) const;
    double weight() const { return 1.0 / n_k_; }
    std::vector<double> nodes() const;

private:
    int n_k_;
};

/// Reduces k into [0, 2 pi).
double wrap_phase(double k);

struct BlochOperator {
    CellDims dims;
    double k;
    CellOperator matrix;
};

BlochOperator bloch_operator(const CellDims& dims, double k);
/// Same as bloch_operator, reusing a precomputed B_s.
BlochOperator bloch_operator(const CellDims& dims, const CellOperator& baker, double k);

/// Eigenpairs of a unitary B_{s,k}, sorted by eigenphase in [0, 2 pi).
struct SpectralData {
    double k = 0.0;
    Eigen::VectorXd thetas;
    CellOperator eigenvectors;  ///< column l is phi_l(k)
    Eigen::VectorXd residuals;  ///< |B phi_l - e^{i theta_l} phi_l|
    /// Groups of indices whose unit-circle eigenvalues lie within the
    /// degeneracy tolerance of a neighbour (circular order). Singletons included.
    std::vector<std::vector<int>> clusters;

    int degenerate_cluster_count() const;
};

/// Eigendecomposition of a unitary matrix through the Hermitian Cayley
/// transform, with complex Schur as the fallback. Eigenvectors are
/// orthonormal; inside each near-degenerate cluster they are re-orthonormalized.
/// Throws NumericalError (mentioning D, D1, k) if the solver fails or a
/// residual exceeds 1e-9.
SpectralData eigendecompose_unitary(const BlochOperator& op, double eps_deg = kDefaultDegeneracyTolerance);

/// Non-oscillatory part of Tr[rho B^dagger^j Z B^j] at one k:
/// sum over clusters C of sum_{l,l' in C} a_{ll'} Z_{l'l}.
double current_density(const SpectralData& spectrum, const CellDensity& rho);

struct AsymptoticCurrent {
    double value = 0.0;
    /// Number of (k node, cluster) pairs with more than one eigenvalue.
    int degenerate_clusters = 0;

    bool degeneracy_warning() const { return degenerate_clusters > 0; }
};

/// J_inf = integral dk/2pi sum_l a_ll(k) Z_ll(k), midpoint rule over `grid`.
/// `threads` <= 0 picks default_thread_count(); the result is independent of it.
AsymptoticCurrent asymptotic_current(const CellDensity& rho0, const CellDims& dims, const KGrid& grid,
                                     double eps_deg = kDefaultDegeneracyTolerance, int threads = 1);

/// Batch form: one eigendecomposition per k node shared by all densities.
std::vector<AsymptoticCurrent> asymptotic_currents(std::span<const CellDensity> rhos, const CellDims& dims,
                                                   const KGrid& grid,
                                                   double eps_deg = kDefaultDegeneracyTolerance,
                                                   int threads = 1);

struct ConvergedCurrent {
    AsymptoticCurrent current;
    int n_k = 0;
    double last_change = 0.0;
    bool converged = false;
};

/// Doubles n_k from `start_nodes` until successive estimates differ by less
/// than `tol` or n_k would exceed `max_nodes`.
ConvergedCurrent converged_asymptotic_current(const CellDensity& rho0, const CellDims& dims,
                                              int start_nodes = kDefaultQuadratureNodes, double tol = 1e-8,
                                              int max_nodes = 8192, int threads = 1);

struct MomentEstimate {
    double value = 0.0;
    /// Set when the grid is too coarse for the degree-2t trigonometric
    /// integrand (n_k < 2t + 1).
    bool accuracy_warning = false;
};

/// <x^m>_t from k-space. m = 1 uses the exact sum over j of
/// Tr[rho B^dagger^j Z B^j]; m >= 2 differentiates B_{s,k}^t numerically
/// with a central stencil of step 2 pi/(8 n_k).
MomentEstimate moment_via_quadrature(const CellDensity& rho0, const CellDims& dims, const KGrid& grid, int t,
                                     int m, int threads = 1);

/// One pure component on the lattice window [x_min, x_max]; column x - x_min
/// holds the cell amplitudes.
struct LatticeState {
    int x_min = 0;
    Eigen::MatrixXcd cells;

    int x_max() const { return x_min + static_cast<int>(cells.cols()) - 1; }
    int dim() const { return static_cast<int>(cells.rows()); }
    bool contains(int x) const { return x >= x_min && x <= x_max(); }
    CellState cell(int x) const;
    double norm_squared() const { return cells.squaredNorm(); }
};

struct WeightedLatticeState {
    double weight = 0.0;
    LatticeState state;
};

/// Spectral split of a cell density into weighted pure states (weights > 1e-14).
std::vector<std::pair<double, CellState>> pure_components(const CellDensity& rho);

struct LatticeEvolution {
    ProbabilityTable table;
    /// Components at t_max, each started at x = 0.
    std::vector<WeightedLatticeState> components;
};

/// Evolves rho0_cell placed at x = 0 for t_max steps. Each step applies B_s
/// in every cell, then moves the j < D/2 half to x + 1 and the rest to x - 1.
LatticeEvolution evolve_lattice(const CellDensity& rho0_cell, const CellDims& dims, int t_max, int threads = 1);

ProbabilityTable lattice_evolve(const CellDensity& rho0_cell, const CellDims& dims, int t_max);

struct CurrentSeries {
    Eigen::VectorXd J;  ///< J(t) for t = 1..t_max, stored at index t - 1
    double asymptotic = 0.0;
    double standard_error = 0.0;
    int window_begin = 0;  ///< inclusive, in t
    int window_end = 0;    ///< inclusive, in t

    int t_max() const { return static_cast<int>(J.size()); }
    double at(int t) const { return J(t - 1); }
};

/// J(t) = <x>_t - <x>_{t-1}; the asymptotic estimate averages the final half.
CurrentSeries current_series(const ProbabilityTable& table);

struct WindowMean {
    double mean = 0.0;
    double standard_error = 0.0;
};

/// Mean and standard error of J(t) over t in [t_begin, t_end].
WindowMean window_mean(const CurrentSeries& series, int t_begin, int t_end);

}  // namespace multibaker
