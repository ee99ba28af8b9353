// Copyright 2026 The multibaker Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file spectral_stats.hpp
 * @brief Eigenphase bands of B_{s,k} and nearest-neighbour spacing statistics.
 *
 * Spacings are measured in units of the mean level spacing 2 pi/D. No
 * further unfolding is applied. Reference curves are the Poisson law and the
 * unitary-class Wigner surmise P(x) = (32/pi^2) x^2 exp(-4 x^2/pi).
 */

#pragma once

#include <multibaker/cell_hilbert.hpp>
#include <multibaker/quantum_transport.hpp>

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace multibaker {

struct EigenphaseBands {
    CellDims dims;
    KGrid grid;
    Eigen::MatrixXd thetas;  ///< n_k x D, each row ascending in [0, 2 pi)
};

EigenphaseBands eigenphase_bands(const CellDims& dims, const KGrid& grid, int threads = 1);

/// Pooled normalized spacings, row-major by k node: D circular gaps per node.
struct SpacingSample {
    int levels_per_node = 0;
    Eigen::VectorXd spacings;

    int nodes() const { return levels_per_node == 0 ? 0 : static_cast<int>(spacings.size()) / levels_per_node; }
};

SpacingSample spacing_sample(const EigenphaseBands& bands);

/// Circular gaps of one sorted eigenphase list, scaled by D/(2 pi).
Eigen::VectorXd normalized_circular_spacings(const Eigen::Ref<const Eigen::VectorXd>& sorted_thetas);

struct CumulativeCurve {
    std::vector<double> abscissae;
    std::vector<double> values;
};

/// Empirical CDF of the sample at each abscissa (fraction of spacings <= x).
CumulativeCurve cumulative_curve(const SpacingSample& sample, std::span<const double> abscissae);

/// Evenly spaced abscissae from 0 to `upper` inclusive.
std::vector<double> default_abscissae(double upper = 4.0, double step = 0.01);

enum class SpacingLaw { poisson, cue };

/// Poisson: 1 - e^{-x}. CUE: erf(2x/sqrt(pi)) - (4x/pi) e^{-4x^2/pi}.
double reference_cumulative(SpacingLaw law, double x);
/// Density whose integral is reference_cumulative.
double reference_density(SpacingLaw law, double x);

/// sup over the curve's abscissae of |empirical - reference|.
double ks_distance(const CumulativeCurve& curve, SpacingLaw law);

/// Largest distance from any point of `a` to the nearest point of `b` and
/// back, measured along the unit circle (symmetric Hausdorff distance).
double circular_multiset_distance(std::span<const double> a, std::span<const double> b);

}  // namespace multibaker
