// Copyright 2026 The multibaker Authors
// SPDX-License-Identifier: Apache-2.0

#include <multibaker/quantum_transport.hpp>

#include <multibaker/errors.hpp>
#include <multibaker/parallel.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace multibaker {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kResidualLimit = 1e-9;
constexpr double kUnitarityLimit = 1e-10;
constexpr double kCayleyClearance = 1e-3;
constexpr double kCayleyResidual = 1e-11;

std::string describe(const CellDims& dims, double k) {
    std::ostringstream os;
    os.precision(17);
    os << "(D=" << dims.D() << ", D1=" << dims.D1() << ", k=" << k << ")";
    return os.str();
}

// Multiplies row j of `op` by e^{-ik} for j < D/2 and by e^{+ik} otherwise.
void apply_translation_phases(CellOperator& op, double k) {
    const int half = static_cast<int>(op.rows()) / 2;
    op.topRows(half) *= std::polar(1.0, -k);
    op.bottomRows(op.rows() - half) *= std::polar(1.0, k);
}

// Diagonal of Z in the position basis.
Eigen::VectorXd z_diagonal(int D) {
    Eigen::VectorXd z(D);
    z.head(D / 2).setOnes();
    z.tail(D - D / 2).setConstant(-1.0);
    return z;
}

void orthonormalize_columns(CellOperator& vecs, const std::vector<int>& cols) {
    for (std::size_t a = 0; a < cols.size(); ++a) {
        auto v = vecs.col(cols[a]);
        for (std::size_t b = 0; b < a; ++b) {
            const auto u = vecs.col(cols[b]);
            v -= u.dot(v) * u;
        }
        v.normalize();
    }
}

std::vector<std::vector<int>> circular_clusters(const Eigen::VectorXd& sorted_thetas, double eps) {
    const int n = static_cast<int>(sorted_thetas.size());
    auto close = [&](int a, int b) {
        return std::abs(std::polar(1.0, sorted_thetas(a)) - std::polar(1.0, sorted_thetas(b))) < eps;
    };
    std::vector<std::vector<int>> clusters;
    for (int l = 0; l < n; ++l) {
        if (l > 0 && close(l - 1, l))
            clusters.back().push_back(l);
        else
            clusters.push_back({l});
    }
    if (clusters.size() > 1 && close(n - 1, 0)) {
        auto& last = clusters.back();
        clusters.front().insert(clusters.front().begin(), last.begin(), last.end());
        clusters.pop_back();
    }
    return clusters;
}

// sum over clusters of sum_{l,l'} a_{ll'} Z_{l'l}, with a = Phi^dagger rho Phi
// and Z = Phi^dagger diag(z) Phi.
double cluster_trace(const SpectralData& spec, const CellOperator& a, const CellOperator& zm) {
    double acc = 0.0;
    for (const auto& cluster : spec.clusters)
        for (int l : cluster)
            for (int lp : cluster) acc += (a(l, lp) * zm(lp, l)).real();
    return acc;
}

CellOperator z_in_eigenbasis(const SpectralData& spec) {
    const Eigen::VectorXd z = z_diagonal(static_cast<int>(spec.eigenvectors.rows()));
    return spec.eigenvectors.adjoint() * (z.asDiagonal() * spec.eigenvectors);
}

// Eigenvectors of the unitary V = e^{i alpha} B through its Cayley transform
// H = i (I - V)(I + V)^{-1}, which is Hermitian with the same eigenvectors.
// Accurate while -1 stays away from the spectrum of V.
CellOperator cayley_eigenvectors(const CellOperator& B, double alpha) {
    const Eigen::Index D = B.rows();
    const CellOperator I = CellOperator::Identity(D, D);
    const CellOperator V = std::polar(1.0, alpha) * B;
    CellOperator H = Complex(0.0, 1.0) * (I + V).partialPivLu().solve(I - V);
    H = (0.5 * (H + H.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<CellOperator> es(H);
    if (es.info() != Eigen::Success) return CellOperator::Zero(D, D);
    return es.eigenvectors();
}

// Eigenphases from Rayleigh quotients, sorted, clustered and checked.
SpectralData finish_spectrum(const CellOperator& B, const CellOperator& vectors, double k, double eps_deg) {
    const int D = static_cast<int>(B.rows());
    const CellOperator image = B * vectors;
    Eigen::VectorXd raw(D);
    for (int l = 0; l < D; ++l) raw(l) = wrap_phase(std::arg(vectors.col(l).dot(image.col(l))));

    std::vector<int> order(static_cast<std::size_t>(D));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return raw(a) < raw(b); });

    SpectralData out;
    out.k = k;
    out.thetas.resize(D);
    out.eigenvectors.resize(D, D);
    out.residuals.resize(D);
    for (int l = 0; l < D; ++l) {
        out.thetas(l) = raw(order[static_cast<std::size_t>(l)]);
        out.eigenvectors.col(l) = vectors.col(order[static_cast<std::size_t>(l)]);
    }
    out.clusters = circular_clusters(out.thetas, eps_deg);
    for (const auto& cluster : out.clusters)
        if (cluster.size() > 1) orthonormalize_columns(out.eigenvectors, cluster);

    for (int l = 0; l < D; ++l) {
        const CellState v = out.eigenvectors.col(l);
        out.residuals(l) = (B * v - std::polar(1.0, out.thetas(l)) * v).norm();
    }
    return out;
}

double min_distance_to_minus_one(const Eigen::VectorXd& thetas) {
    double best = 2.0;
    for (Eigen::Index l = 0; l < thetas.size(); ++l)
        best = std::min(best, std::abs(std::polar(1.0, thetas(l)) + 1.0));
    return best;
}

// Rotation alpha that moves the centre of the widest circular gap to pi.
double widest_gap_rotation(const Eigen::VectorXd& sorted_thetas) {
    const Eigen::Index D = sorted_thetas.size();
    double widest = kTwoPi - (sorted_thetas(D - 1) - sorted_thetas(0));
    double centre = sorted_thetas(D - 1) + 0.5 * widest;
    for (Eigen::Index l = 0; l + 1 < D; ++l) {
        const double gap = sorted_thetas(l + 1) - sorted_thetas(l);
        if (gap > widest) {
            widest = gap;
            centre = sorted_thetas(l) + 0.5 * gap;
        }
    }
    return std::numbers::pi - centre;
}

CellOperator matrix_power(const CellOperator& op, int t) {
    CellOperator out = CellOperator::Identity(op.rows(), op.cols());
    for (int j = 0; j < t; ++j) out = op * out;
    return out;
}

double binomial(int n, int k) {
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
}

}  // namespace

KGrid::KGrid(int n_k) : n_k_(n_k) {
    if (n_k < 1) throw ParameterError("k-grid needs at least one node, got " + std::to_string(n_k));
}

double KGrid::node(int j) const {
    if (j < 0 || j >= n_k_) throw std::out_of_range("k-grid node index out of range");
    return kTwoPi * (j + 0.5) / n_k_;
}

std::vector<double> KGrid::nodes() const {
    std::vector<double> out(static_cast<std::size_t>(n_k_));
    for (int j = 0; j < n_k_; ++j) out[static_cast<std::size_t>(j)] = node(j);
    return out;
}

double wrap_phase(double k) {
    double r = std::fmod(k, kTwoPi);
    if (r < 0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;
    return r;
}

BlochOperator bloch_operator(const CellDims& dims, double k) {
    return bloch_operator(dims, make_baker(dims), k);
}

BlochOperator bloch_operator(const CellDims& dims, const CellOperator& baker, double k) {
    if (!std::isfinite(k)) throw ParameterError("Bloch parameter k must be finite");
    if (baker.rows() != dims.D() || baker.cols() != dims.D())
        throw ValidationError("baker matrix does not match the cell dimension");
    BlochOperator out{dims, wrap_phase(k), baker};
    apply_translation_phases(out.matrix, out.k);
    return out;
}

int SpectralData::degenerate_cluster_count() const {
    return static_cast<int>(
        std::count_if(clusters.begin(), clusters.end(), [](const auto& c) { return c.size() > 1; }));
}

SpectralData eigendecompose_unitary(const BlochOperator& op, double eps_deg) {
    const CellOperator& B = op.matrix;
    if (unitarity_defect(B) > kUnitarityLimit)
        throw ValidationError("operator is not unitary " + describe(op.dims, op.k));

    // Pass 1 rotates by nothing; if -1 is close to the spectrum, rotate so it
    // sits in the middle of the widest gap and redo. Schur is the fallback.
    SpectralData out = finish_spectrum(B, cayley_eigenvectors(B, 0.0), op.k, eps_deg);
    const double clearance = min_distance_to_minus_one(out.thetas);
    if (clearance < kCayleyClearance || out.residuals.maxCoeff() > kCayleyResidual)
        out = finish_spectrum(B, cayley_eigenvectors(B, widest_gap_rotation(out.thetas)), op.k, eps_deg);
    if (out.residuals.maxCoeff() > kCayleyResidual) {
        Eigen::ComplexSchur<CellOperator> schur(B, true);
        if (schur.info() != Eigen::Success)
            throw NumericalError("Schur decomposition did not converge " + describe(op.dims, op.k));
        out = finish_spectrum(B, schur.matrixU(), op.k, eps_deg);
    }
    if (out.residuals.maxCoeff() > kResidualLimit)
        throw NumericalError("eigenpair residual " + std::to_string(out.residuals.maxCoeff()) +
                             " above limit " + describe(op.dims, op.k));
    const double modulus_error =
        ((B * out.eigenvectors).colwise().norm().array() - 1.0).abs().maxCoeff();
    if (modulus_error > kResidualLimit)
        throw NumericalError("eigenvalue off the unit circle " + describe(op.dims, op.k));
    return out;
}

double current_density(const SpectralData& spectrum, const CellDensity& rho) {
    const CellOperator a = spectrum.eigenvectors.adjoint() * rho * spectrum.eigenvectors;
    return cluster_trace(spectrum, a, z_in_eigenbasis(spectrum));
}

AsymptoticCurrent asymptotic_current(const CellDensity& rho0, const CellDims& dims, const KGrid& grid,
                                     double eps_deg, int threads) {
    return asymptotic_currents(std::span<const CellDensity>(&rho0, 1), dims, grid, eps_deg, threads).front();
}

std::vector<AsymptoticCurrent> asymptotic_currents(std::span<const CellDensity> rhos, const CellDims& dims,
                                                   const KGrid& grid, double eps_deg, int threads) {
    for (const auto& rho : rhos) validate_density(rho, dims.D(), 1e-10);
    const CellOperator baker = make_baker(dims);
    const std::size_t n_rho = rhos.size();
    const auto n_k = static_cast<std::size_t>(grid.size());

    // contrib[j * n_rho + r]: integrand of density r at node j.
    std::vector<double> contrib(n_k * n_rho, 0.0);
    std::vector<int> degenerate(n_k, 0);
    parallel_for(n_k, threads, [&](std::size_t j) {
        const SpectralData spec =
            eigendecompose_unitary(bloch_operator(dims, baker, grid.node(static_cast<int>(j))), eps_deg);
        degenerate[j] = spec.degenerate_cluster_count();
        const CellOperator zm = z_in_eigenbasis(spec);
        for (std::size_t r = 0; r < n_rho; ++r) {
            const CellOperator a = spec.eigenvectors.adjoint() * rhos[r] * spec.eigenvectors;
            contrib[j * n_rho + r] = cluster_trace(spec, a, zm);
        }
    });

    std::vector<AsymptoticCurrent> out(n_rho);
    for (std::size_t r = 0; r < n_rho; ++r) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n_k; ++j) acc += contrib[j * n_rho + r];
        out[r].value = acc * grid.weight();
        out[r].degenerate_clusters = std::accumulate(degenerate.begin(), degenerate.end(), 0);
    }
    return out;
}

ConvergedCurrent converged_asymptotic_current(const CellDensity& rho0, const CellDims& dims, int start_nodes,
                                              double tol, int max_nodes, int threads) {
    ConvergedCurrent out;
    out.n_k = start_nodes;
    out.current = asymptotic_current(rho0, dims, KGrid(start_nodes), kDefaultDegeneracyTolerance, threads);
    while (2 * out.n_k <= max_nodes) {
        const AsymptoticCurrent finer =
            asymptotic_current(rho0, dims, KGrid(2 * out.n_k), kDefaultDegeneracyTolerance, threads);
        out.last_change = std::abs(finer.value - out.current.value);
        out.current = finer;
        out.n_k *= 2;
        if (out.last_change < tol) {
            out.converged = true;
            break;
        }
    }
    return out;
}

MomentEstimate moment_via_quadrature(const CellDensity& rho0, const CellDims& dims, const KGrid& grid, int t,
                                     int m, int threads) {
    if (t < 0) throw ParameterError("time must be non-negative");
    if (m < 1) throw ParameterError("moment order must be at least 1");
    validate_density(rho0, dims.D(), 1e-10);

    MomentEstimate out;
    out.accuracy_warning = grid.size() < 2 * t + 1;
    if (t == 0) return out;

    const CellOperator baker = make_baker(dims);
    const Eigen::VectorXd z = z_diagonal(dims.D());
    const auto n_k = static_cast<std::size_t>(grid.size());
    std::vector<double> integrand(n_k, 0.0);

    if (m == 1) {
        parallel_for(n_k, threads, [&](std::size_t j) {
            const CellOperator B = bloch_operator(dims, baker, grid.node(static_cast<int>(j))).matrix;
            CellOperator evolved = rho0;
            double acc = 0.0;
            for (int step = 1; step <= t; ++step) {
                evolved = B * evolved * B.adjoint();
                acc += (z.cast<Complex>().asDiagonal() * evolved).trace().real();
            }
            integrand[j] = acc;
        });
    } else {
        const double h = kTwoPi / (8.0 * grid.size());
        const Complex i_pow_m = std::pow(Complex(0.0, 1.0), m);
        parallel_for(n_k, threads, [&](std::size_t j) {
            const double k = grid.node(static_cast<int>(j));
            const CellOperator Bt = matrix_power(bloch_operator(dims, baker, k).matrix, t);
            CellOperator deriv = CellOperator::Zero(dims.D(), dims.D());
            for (int i = 0; i <= m; ++i) {
                const double offset = (0.5 * m - i) * h;
                const double sign = (i % 2 == 0) ? 1.0 : -1.0;
                deriv += sign * binomial(m, i) * matrix_power(bloch_operator(dims, baker, k + offset).matrix, t);
            }
            deriv /= std::pow(h, m);
            integrand[j] = (i_pow_m * (rho0 * Bt.adjoint() * deriv).trace()).real();
        });
    }
    out.value = std::accumulate(integrand.begin(), integrand.end(), 0.0) * grid.weight();
    return out;
}

CellState LatticeState::cell(int x) const {
    if (!contains(x)) return CellState::Zero(dim());
    return cells.col(x - x_min);
}

std::vector<std::pair<double, CellState>> pure_components(const CellDensity& rho) {
    Eigen::SelfAdjointEigenSolver<CellDensity> es(rho);
    if (es.info() != Eigen::Success) throw NumericalError("density diagonalization failed");
    std::vector<std::pair<double, CellState>> out;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const double w = es.eigenvalues()(i);
        if (w > 1e-14) out.emplace_back(w, es.eigenvectors().col(i));
    }
    return out;
}

LatticeEvolution evolve_lattice(const CellDensity& rho0_cell, const CellDims& dims, int t_max, int threads) {
    if (t_max < 0) throw ParameterError("t_max must be non-negative");
    validate_density(rho0_cell, dims.D(), 1e-10);

    const int D = dims.D();
    const int half = D / 2;
    const int width = 2 * t_max + 1;
    const CellOperator baker = make_baker(dims);
    const auto components = pure_components(rho0_cell);

    // probs[c](t, x + t_max): probability of component c, before weighting.
    std::vector<Eigen::MatrixXd> probs(components.size());
    std::vector<WeightedLatticeState> finals(components.size());
    parallel_for(components.size(), threads, [&](std::size_t c) {
        Eigen::MatrixXcd cells = Eigen::MatrixXcd::Zero(D, width);
        cells.col(t_max) = components[c].second;
        Eigen::MatrixXd p = Eigen::MatrixXd::Zero(t_max + 1, width);
        p(0, t_max) = cells.col(t_max).squaredNorm();
        Eigen::MatrixXcd next(D, width);
        for (int t = 1; t <= t_max; ++t) {
            // Occupied columns before the step: x in [-(t-1), t-1].
            const int lo = t_max - (t - 1);
            const int n = 2 * (t - 1) + 1;
            const Eigen::MatrixXcd stepped = baker * cells.middleCols(lo, n);
            next.setZero();
            next.block(0, lo + 1, half, n) = stepped.topRows(half);
            next.block(half, lo - 1, D - half, n) = stepped.bottomRows(D - half);
            cells.swap(next);
            p.row(t) = cells.colwise().squaredNorm();
        }
        probs[c] = std::move(p);
        finals[c] = WeightedLatticeState{components[c].first, LatticeState{-t_max, std::move(cells)}};
    });

    LatticeEvolution out;
    out.table = ProbabilityTable(t_max);
    Eigen::MatrixXd total = Eigen::MatrixXd::Zero(t_max + 1, width);
    for (std::size_t c = 0; c < components.size(); ++c) total += components[c].first * probs[c];
    for (int t = 0; t <= t_max; ++t)
        for (int x = -t_max; x <= t_max; ++x) out.table.at(t, x) = total(t, x + t_max);
    out.table.metadata = {{"kind", "quantum"},
                          {"D", std::to_string(D)},
                          {"D1", std::to_string(dims.D1())},
                          {"convention", "q<1/2->x+1"}};
    out.components = std::move(finals);
    return out;
}

ProbabilityTable lattice_evolve(const CellDensity& rho0_cell, const CellDims& dims, int t_max) {
    return evolve_lattice(rho0_cell, dims, t_max).table;
}

CurrentSeries current_series(const ProbabilityTable& table) {
    const int t_max = table.t_max();
    if (t_max < 1) throw ParameterError("current series needs t_max >= 1");
    CurrentSeries out;
    out.J.resize(t_max);
    double previous = table.mean(0);
    for (int t = 1; t <= t_max; ++t) {
        const double current = table.mean(t);
        out.J(t - 1) = current - previous;
        previous = current;
    }
    out.window_begin = t_max / 2 + 1;
    out.window_end = t_max;
    const WindowMean late = window_mean(out, out.window_begin, out.window_end);
    out.asymptotic = late.mean;
    out.standard_error = late.standard_error;
    return out;
}

WindowMean window_mean(const CurrentSeries& series, int t_begin, int t_end) {
    if (t_begin < 1 || t_end > series.t_max() || t_begin > t_end)
        throw ParameterError("averaging window outside the current series");
    const int n = t_end - t_begin + 1;
    const auto window = series.J.segment(t_begin - 1, n);
    WindowMean out;
    out.mean = window.mean();
    if (n > 1) {
        const double var = (window.array() - out.mean).square().sum() / (n - 1);
        out.standard_error = std::sqrt(var / n);
    }
    return out;
}

}  // namespace multibaker
