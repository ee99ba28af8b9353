// Copyright 2026 The multibaker Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <multibaker/cell_hilbert.hpp>
#include <multibaker/quantum_transport.hpp>

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace multibaker {

/// Husimi density H(q_i, p_j) on the cell-centred grid q_i = (i + 1/2)/R,
/// p_j = (j + 1/2)/R. `values(i, j)` is indexed (q, p).
struct HusimiGrid {
    int resolution = 0;
    int cell = 0;       ///< lattice cell for panels, 0 for single-cell grids
    double mass = 0.0;  ///< trace of the (possibly unnormalized) cell state
    Eigen::MatrixXd values;

    double grid_point(int i) const { return (i + 0.5) / resolution; }
};

/// Default panel resolution: max(64, ceil(4 sqrt(D))).
int default_husimi_resolution(int D);

/// Torus coherent state centred at (q0, p0) with antiperiodic images:
/// amplitudes ~ sum_{|n|<=3} (-1)^n exp(-pi D (q_j - q0 + n)^2 + 2 pi i D p0 (q_j - q0 + n)).
CellState coherent_state(int D, double q0, double p0, int images = 3);

HusimiGrid husimi_grid(const CellState& state, int resolution);
HusimiGrid husimi_grid(const CellDensity& rho, int resolution);

/// One panel per requested cell: the Husimi of sum_c w_c |psi_c(x)><psi_c(x)|.
/// Cells outside a component's window contribute nothing.
std::vector<HusimiGrid> lattice_husimi(std::span<const WeightedLatticeState> components, std::span<const int> cells,
                                       int resolution);

}  // namespace multibaker
