// Copyright 2026 The multibaker Authors
// SPDX-License-Identifier: Apache-2.0

#include <multibaker/distribution_table.hpp>

#include <cmath>
#include <stdexcept>

namespace multibaker {

DistributionTable::DistributionTable(int t_max) : t_max_(t_max) {
    if (t_max < 0) throw std::invalid_argument("t_max must be non-negative");
    probs_ = Eigen::MatrixXd::Zero(t_max + 1, 2 * t_max + 1);
}

double DistributionTable::at(int t, int x) const {
    if (t < 0 || t > t_max_) throw std::out_of_range("time outside table");
    if (x < x_min() || x > x_max()) return 0.0;
    return probs_(t, x - x_min());
}

double& DistributionTable::at(int t, int x) {
    if (t < 0 || t > t_max_ || x < x_min() || x > x_max()) throw std::out_of_range("(t, x) outside table");
    return probs_(t, x - x_min());
}

double DistributionTable::moment(int t, int m) const {
    double acc = 0.0;
    for (int x = x_min(); x <= x_max(); ++x) {
        const double p = probs_(t, x - x_min());
        if (p != 0.0) acc += std::pow(static_cast<double>(x), m) * p;
    }
    return acc;
}

double normalization_defect(const DistributionTable& table) {
    double worst = 0.0;
    for (int t = 0; t <= table.t_max(); ++t) worst = std::max(worst, std::abs(table.total(t) - 1.0));
    return worst;
}

bool has_lattice_parity_pattern(const DistributionTable& table) {
    for (int t = 0; t <= table.t_max(); ++t)
        for (int x = table.x_min(); x <= table.x_max(); ++x)
            if (((x + t) % 2 != 0 || std::abs(x) > t) && table.at(t, x) != 0.0) return false;
    return true;
}

}  // namespace multibaker
