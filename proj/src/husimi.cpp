// Copyright 2026 The multibaker Authors
// SPDX-License-Identifier: Apache-2.0

#include <multibaker/husimi.hpp>

#include <multibaker/errors.hpp>

#include <cmath>
#include <numbers>

namespace multibaker {

namespace {

// Columns are conj(z_{q_i, p_j}) stacked for all grid points, ordered
// i * R + j, so that (kernel^T psi) gives <z|psi> for every point at once.
Eigen::MatrixXcd coherent_bra_matrix(int D, int R) {
    Eigen::MatrixXcd bras(D, static_cast<Eigen::Index>(R) * R);
    for (int i = 0; i < R; ++i)
        for (int j = 0; j < R; ++j)
            bras.col(static_cast<Eigen::Index>(i) * R + j) =
                coherent_state(D, (i + 0.5) / R, (j + 0.5) / R).conjugate();
    return bras;
}

HusimiGrid empty_grid(int R) {
    HusimiGrid g;
    g.resolution = R;
    g.values = Eigen::MatrixXd::Zero(R, R);
    return g;
}

void check_resolution(int R) {
    if (R < 2) throw ParameterError("Husimi resolution must be at least 2");
}

// Sums w |<z|psi>|^2 into `grid` for the columns of `states`.
void accumulate(HusimiGrid& grid, const Eigen::MatrixXcd& bras, const Eigen::MatrixXcd& states,
                const Eigen::VectorXd& weights) {
    const int R = grid.resolution;
    const Eigen::MatrixXcd overlaps = bras.transpose() * states;  // (R*R) x n_states
    for (Eigen::Index c = 0; c < states.cols(); ++c) {
        for (int i = 0; i < R; ++i)
            for (int j = 0; j < R; ++j)
                grid.values(i, j) += weights(c) * std::norm(overlaps(static_cast<Eigen::Index>(i) * R + j, c));
        grid.mass += weights(c) * states.col(c).squaredNorm();
    }
}

}  // namespace

int default_husimi_resolution(int D) {
    return std::max(64, static_cast<int>(std::ceil(4.0 * std::sqrt(static_cast<double>(D)))));
}

CellState coherent_state(int D, double q0, double p0, int images) {
    if (D <= 0) throw InvalidDimension("dimension must be positive");
    if (!(q0 >= 0.0 && q0 < 1.0) || !(p0 >= 0.0 && p0 < 1.0))
        throw ParameterError("coherent-state centre must lie in [0, 1)^2");
    const double pi = std::numbers::pi;
    CellState z = CellState::Zero(D);
    for (int j = 0; j < D; ++j) {
        const double q = (j + 0.5) / D;
        for (int n = -images; n <= images; ++n) {
            const double d = q - q0 + n;
            const double sign = (n % 2 == 0) ? 1.0 : -1.0;
            z(j) += sign * std::polar(std::exp(-pi * D * d * d), 2.0 * pi * D * p0 * d);
        }
    }
    z.normalize();
    return z;
}

HusimiGrid husimi_grid(const CellState& state, int resolution) {
    check_resolution(resolution);
    HusimiGrid g = empty_grid(resolution);
    accumulate(g, coherent_bra_matrix(static_cast<int>(state.size()), resolution), state, Eigen::VectorXd::Ones(1));
    return g;
}

HusimiGrid husimi_grid(const CellDensity& rho, int resolution) {
    check_resolution(resolution);
    if (rho.rows() != rho.cols()) throw ValidationError("density must be square");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10) throw ValidationError("density must be Hermitian");
    const int D = static_cast<int>(rho.rows());
    const Eigen::MatrixXcd bras = coherent_bra_matrix(D, resolution);
    HusimiGrid g = empty_grid(resolution);
    // H = <z|rho|z> evaluated directly so that non-positive input is not masked.
    const Eigen::MatrixXcd kets = bras.conjugate();
    const Eigen::MatrixXcd rho_kets = rho * kets;
    for (int i = 0; i < resolution; ++i)
        for (int j = 0; j < resolution; ++j) {
            const Eigen::Index col = static_cast<Eigen::Index>(i) * resolution + j;
            g.values(i, j) = std::max(0.0, kets.col(col).dot(rho_kets.col(col)).real());
        }
    g.mass = rho.trace().real();
    return g;
}

std::vector<HusimiGrid> lattice_husimi(std::span<const WeightedLatticeState> components, std::span<const int> cells,
                                       int resolution) {
    check_resolution(resolution);
    std::vector<HusimiGrid> panels;
    if (components.empty()) return panels;
    const int D = components.front().state.dim();
    for (const auto& c : components)
        if (c.state.dim() != D) throw ValidationError("lattice components have different cell dimensions");

    const Eigen::MatrixXcd bras = coherent_bra_matrix(D, resolution);
    Eigen::VectorXd weights(static_cast<Eigen::Index>(components.size()));
    for (std::size_t c = 0; c < components.size(); ++c) weights(static_cast<Eigen::Index>(c)) = components[c].weight;

    for (int x : cells) {
        HusimiGrid g = empty_grid(resolution);
        g.cell = x;
        Eigen::MatrixXcd states(D, static_cast<Eigen::Index>(components.size()));
        for (std::size_t c = 0; c < components.size(); ++c)
            states.col(static_cast<Eigen::Index>(c)) = components[c].state.cell(x);
        accumulate(g, bras, states, weights);
        panels.push_back(std::move(g));
    }
    return panels;
}

}  // namespace multibaker
