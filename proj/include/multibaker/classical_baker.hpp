// Copyright 2026 The multibaker Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file classical_baker.hpp
 * @brief Classical asymmetric multibaker map M_s = T o B_s.
 *
 * Inside a cell B_s stretches [0, s) and [s, 1) in q onto [0, 1) and stacks
 * them in p; T then moves the point to x + 1 when the new q is below 1/2 and
 * to x - 1 otherwise. Intervals are half-open everywhere: q = s belongs to the
 * second branch, q = 1/2 to the x - 1 move.
 */

#pragma once

#include <multibaker/distribution_table.hpp>

#include <cstdint>
#include <utility>
#include <vector>

namespace multibaker {

struct PhasePoint {
    long x = 0;
    double q = 0.0;
    double p = 0.0;
};

/// One application of the multibaker map. Throws ParameterError for
/// s outside (0, 1) or q, p outside [0, 1).
PhasePoint step_point(const PhasePoint& pt, double s);

/// An interval [a, b) of the current in-cell position q, holding the mass of
/// initial conditions that now sit there with net displacement `displacement`.
/// Intervals with the same displacement are disjoint; each carries uniform
/// density.
struct ItineraryInterval {
    double a = 0.0;
    double b = 0.0;
    int displacement = 0;
    double mass = 0.0;
};

struct ItineraryPartition {
    int depth = 0;
    std::vector<ItineraryInterval> intervals;

    double measure() const;
};

inline constexpr int kDefaultExactDepth = 26;

/// Exact evolution of the q-uniform single-cell ensemble for t steps.
/// Breakpoints, densities and masses are carried as exact rationals; s is
/// taken as the exact binary value of the double. Throws BudgetError if
/// t > max_depth.
ItineraryPartition exact_partition(double s, int t, int max_depth = kDefaultExactDepth);

/// p_class(x, t') for all t' <= t from exact_partition's dynamics.
ClassicalTable exact_distribution(double s, int t, int max_depth = kDefaultExactDepth);

/// Same with s = D1/D held exactly (no binary rounding of s).
ClassicalTable exact_distribution(int D1, int D, int t, int max_depth = kDefaultExactDepth);

/// Histogram of n particles started at x = 0 with q ~ U[0, 1) and p uniform
/// on the centered band of width delta_p. Uses std::mt19937_64 seeded with
/// `seed`; the generator name is recorded under metadata["rng"].
ClassicalTable monte_carlo_distribution(double s, int t, std::int64_t n, std::uint64_t seed, double delta_p);

/// (-ln s, -ln(1 - s)).
std::pair<double, double> lyapunov_exponents(double s);

}  // namespace multibaker
