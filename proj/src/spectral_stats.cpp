// Copyright 2026 The multibaker Authors
// SPDX-License-Identifier: Apache-2.0

#include <multibaker/spectral_stats.hpp>

#include <multibaker/errors.hpp>
#include <multibaker/parallel.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace multibaker {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

EigenphaseBands eigenphase_bands(const CellDims& dims, const KGrid& grid, int threads) {
    const CellOperator baker = make_baker(dims);
    EigenphaseBands out{dims, grid, Eigen::MatrixXd(grid.size(), dims.D())};
    parallel_for(static_cast<std::size_t>(grid.size()), threads, [&](std::size_t j) {
        const auto row = static_cast<Eigen::Index>(j);
        const SpectralData spec = eigendecompose_unitary(bloch_operator(dims, baker, grid.node(static_cast<int>(j))));
        out.thetas.row(row) = spec.thetas.transpose();
    });
    return out;
}

Eigen::VectorXd normalized_circular_spacings(const Eigen::Ref<const Eigen::VectorXd>& sorted_thetas) {
    const Eigen::Index D = sorted_thetas.size();
    Eigen::VectorXd gaps(D);
    for (Eigen::Index l = 0; l + 1 < D; ++l) gaps(l) = sorted_thetas(l + 1) - sorted_thetas(l);
    gaps(D - 1) = kTwoPi - (sorted_thetas(D - 1) - sorted_thetas(0));
    return gaps * (static_cast<double>(D) / kTwoPi);
}

SpacingSample spacing_sample(const EigenphaseBands& bands) {
    const Eigen::Index n_k = bands.thetas.rows();
    const Eigen::Index D = bands.thetas.cols();
    SpacingSample out;
    out.levels_per_node = static_cast<int>(D);
    out.spacings.resize(n_k * D);
    for (Eigen::Index j = 0; j < n_k; ++j)
        out.spacings.segment(j * D, D) = normalized_circular_spacings(bands.thetas.row(j).transpose());
    return out;
}

CumulativeCurve cumulative_curve(const SpacingSample& sample, std::span<const double> abscissae) {
    if (!std::is_sorted(abscissae.begin(), abscissae.end()))
        throw ParameterError("abscissae must be nondecreasing");
    std::vector<double> sorted(sample.spacings.data(), sample.spacings.data() + sample.spacings.size());
    std::sort(sorted.begin(), sorted.end());
    CumulativeCurve out{{abscissae.begin(), abscissae.end()}, {}};
    out.values.reserve(abscissae.size());
    const double n = static_cast<double>(sorted.size());
    for (double x : abscissae) {
        const auto below = std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin();
        out.values.push_back(sorted.empty() ? 0.0 : static_cast<double>(below) / n);
    }
    return out;
}

std::vector<double> default_abscissae(double upper, double step) {
    std::vector<double> out;
    const auto n = static_cast<int>(std::llround(upper / step));
    out.reserve(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) out.push_back(i * step);
    return out;
}

double reference_cumulative(SpacingLaw law, double x) {
    if (!(x >= 0.0)) throw ParameterError("spacing must be non-negative");
    if (std::isinf(x)) return 1.0;
    switch (law) {
        case SpacingLaw::poisson:
            return -std::expm1(-x);
        case SpacingLaw::cue: {
            const double pi = std::numbers::pi;
            return std::erf(2.0 * x / std::sqrt(pi)) - (4.0 * x / pi) * std::exp(-4.0 * x * x / pi);
        }
    }
    return 0.0;
}

double reference_density(SpacingLaw law, double x) {
    if (!(x >= 0.0)) throw ParameterError("spacing must be non-negative");
    switch (law) {
        case SpacingLaw::poisson:
            return std::exp(-x);
        case SpacingLaw::cue: {
            const double pi = std::numbers::pi;
            return (32.0 / (pi * pi)) * x * x * std::exp(-4.0 * x * x / pi);
        }
    }
    return 0.0;
}

double ks_distance(const CumulativeCurve& curve, SpacingLaw law) {
    double worst = 0.0;
    for (std::size_t i = 0; i < curve.abscissae.size(); ++i)
        worst = std::max(worst, std::abs(curve.values[i] - reference_cumulative(law, curve.abscissae[i])));
    return worst;
}

double circular_multiset_distance(std::span<const double> a, std::span<const double> b) {
    auto one_way = [](std::span<const double> from, std::span<const double> to) {
        double worst = 0.0;
        for (double u : from) {
            double best = std::numeric_limits<double>::infinity();
            for (double v : to) best = std::min(best, std::abs(std::polar(1.0, u) - std::polar(1.0, v)));
            worst = std::max(worst, best);
        }
        return worst;
    };
    if (a.empty() || b.empty()) return a.size() == b.size() ? 0.0 : std::numeric_limits<double>::infinity();
    return std::max(one_way(a, b), one_way(b, a));
}

}  // namespace multibaker
