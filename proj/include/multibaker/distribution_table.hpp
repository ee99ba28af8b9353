// Copyright 2026 The multibaker Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <map>
#include <string>

namespace multibaker {

/// Cell-occupation probabilities p(x, t) for t = 0..t_max on the window
/// x in [-t_max, t_max]. Quantum and classical runs share this shape; the
/// metadata map records what produced it.
class DistributionTable {
public:
    DistributionTable() = default;
    explicit DistributionTable(int t_max);

    int t_max() const { return t_max_; }
    int x_min() const { return -t_max_; }
    int x_max() const { return t_max_; }

    /// p(x, t); zero outside the window.
    double at(int t, int x) const;
    double& at(int t, int x);

    /// Row t over the window, index x - x_min().
    Eigen::VectorXd row(int t) const { return probs_.row(t).transpose(); }
    const Eigen::MatrixXd& matrix() const { return probs_; }

    double total(int t) const { return probs_.row(t).sum(); }
    /// <x^m>_t = sum_x x^m p(x, t).
    double moment(int t, int m) const;
    double mean(int t) const { return moment(t, 1); }

    std::map<std::string, std::string> metadata;

private:
    int t_max_ = 0;
    Eigen::MatrixXd probs_;  // rows: t, cols: x - x_min
};

using ProbabilityTable = DistributionTable;
using ClassicalTable = DistributionTable;

/// Largest violation of per-time normalization, |sum_x p(x,t) - 1|.
double normalization_defect(const DistributionTable& table);

/// True when p(x,t) is exactly zero wherever x + t is odd (|x| > t lies
/// outside the window and is zero by construction).
bool has_lattice_parity_pattern(const DistributionTable& table);

}  // namespace multibaker
