// Copyright 2026 The multibaker Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file cell_hilbert.hpp
 * @brief Operators and states on the D-dimensional Hilbert space of one cell.
 *
 * Position basis |j>, j = 0..D-1, sits on the half-integer grid
 * q_j = (j + 1/2)/D (antiperiodic torus quantization). Everything here is a
 * pure function of its arguments and templated on the real scalar type.
 */

#pragma once

#include <multibaker/errors.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace multibaker {

template <typename Real>
using CellOperatorT = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using CellStateT = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

using Complex = std::complex<double>;
using CellOperator = CellOperatorT<double>;
using CellState = CellStateT<double>;
/// Positive, unit-trace D x D matrix. Same storage as CellOperator;
/// validate_density() checks the extra invariants.
using CellDensity = CellOperatorT<double>;

/// Cell dimension and asymmetry split D = D1 + D2, s = D1/D.
class CellDims {
public:
    CellDims(int D, int D1) : D_(D), D1_(D1) {
        if (D <= 0 || D % 2 != 0)
            throw InvalidDimension("cell dimension must be even and positive, got " + std::to_string(D));
        if (D1 < 1 || D1 > D - 1)
            throw InvalidAsymmetry("D1 must lie in [1, " + std::to_string(D - 1) + "], got " +
                                   std::to_string(D1));
    }

    int D() const { return D_; }
    int D1() const { return D1_; }
    int D2() const { return D_ - D1_; }
    double s() const { return static_cast<double>(D1_) / D_; }

    /// The dims of the reflected map: s -> 1 - s.
    CellDims mirrored() const { return CellDims(D_, D_ - D1_); }

    friend bool operator==(const CellDims&, const CellDims&) = default;

private:
    int D_;
    int D1_;
};

/// Antiperiodic DFT, (G_D)_{kl} = D^{-1/2} exp(-2 pi i (k+1/2)(l+1/2)/D).
template <typename Real = double>
CellOperatorT<Real> make_dft(int D) {
    if (D <= 0) throw InvalidDimension("DFT dimension must be positive, got " + std::to_string(D));
    const Real norm = Real(1) / std::sqrt(static_cast<Real>(D));
    const Real two_pi = 2 * std::numbers::pi_v<Real>;
    CellOperatorT<Real> G(D, D);
    for (int k = 0; k < D; ++k) {
        for (int l = 0; l < D; ++l) {
            // Reduce the numerator mod 4D so the phase argument stays small.
            const long long num = static_cast<long long>(2 * k + 1) * (2 * l + 1) % (4LL * D);
            const Real phase = -two_pi * static_cast<Real>(num) / static_cast<Real>(4 * D);
            G(k, l) = std::polar(norm, phase);
        }
    }
    return G;
}

/// Quantum asymmetric baker, B_s = G_D^dagger diag(G_{D1}, G_{D2}).
template <typename Real = double>
CellOperatorT<Real> make_baker(const CellDims& dims) {
    const int D = dims.D();
    CellOperatorT<Real> block = CellOperatorT<Real>::Zero(D, D);
    block.topLeftCorner(dims.D1(), dims.D1()) = make_dft<Real>(dims.D1());
    block.bottomRightCorner(dims.D2(), dims.D2()) = make_dft<Real>(dims.D2());
    return make_dft<Real>(D).adjoint() * block;
}

template <typename Real = double>
struct HalfProjectorsT {
    CellOperatorT<Real> plus;   ///< positions j < D/2, sent to x + 1
    CellOperatorT<Real> minus;  ///< positions j >= D/2, sent to x - 1
    CellOperatorT<Real> Z;      ///< plus - minus
};
using HalfProjectors = HalfProjectorsT<double>;

template <typename Real = double>
HalfProjectorsT<Real> make_half_projectors(int D) {
    if (D <= 0 || D % 2 != 0)
        throw InvalidDimension("half projectors need an even positive dimension, got " + std::to_string(D));
    const int half = D / 2;
    HalfProjectorsT<Real> out{CellOperatorT<Real>::Zero(D, D), CellOperatorT<Real>::Zero(D, D),
                              CellOperatorT<Real>::Zero(D, D)};
    for (int j = 0; j < D; ++j) {
        if (j < half) {
            out.plus(j, j) = 1;
            out.Z(j, j) = 1;
        } else {
            out.minus(j, j) = 1;
            out.Z(j, j) = -1;
        }
    }
    return out;
}

/// Position-reversal permutation j -> D-1-j (the cell reflection q -> 1-q, p -> 1-p).
template <typename Real = double>
CellOperatorT<Real> position_reversal(int D) {
    if (D <= 0) throw InvalidDimension("dimension must be positive, got " + std::to_string(D));
    CellOperatorT<Real> R = CellOperatorT<Real>::Zero(D, D);
    for (int j = 0; j < D; ++j) R(j, D - 1 - j) = 1;
    return R;
}

/// Momentum eigenstate |p_m>, <j|p_m> = D^{-1/2} exp(+2 pi i (j+1/2)(m+1/2)/D).
template <typename Real = double>
CellStateT<Real> momentum_eigenstate(int D, int m) {
    if (D <= 0) throw InvalidDimension("dimension must be positive, got " + std::to_string(D));
    if (m < 0 || m >= D)
        throw std::out_of_range("momentum index " + std::to_string(m) + " outside [0, " +
                                std::to_string(D) + ")");
    const Real norm = Real(1) / std::sqrt(static_cast<Real>(D));
    const Real two_pi = 2 * std::numbers::pi_v<Real>;
    CellStateT<Real> v(D);
    for (int j = 0; j < D; ++j) {
        const long long num = static_cast<long long>(2 * j + 1) * (2 * m + 1) % (4LL * D);
        v(j) = std::polar(norm, two_pi * static_cast<Real>(num) / static_cast<Real>(4 * D));
    }
    return v;
}

/// First index of the central window of `count` momentum states:
/// [D/2 - ceil(count/2), D/2 + floor(count/2)).
inline int central_momentum_begin(int D, int count) { return D / 2 - (count + 1) / 2; }

/// Equal-weight mixture of `delta_p_states` central momentum eigenstates.
template <typename Real = double>
CellOperatorT<Real> central_momentum_mixture(int D, int delta_p_states) {
    if (D <= 0 || D % 2 != 0)
        throw InvalidDimension("mixture needs an even positive dimension, got " + std::to_string(D));
    if (delta_p_states < 1 || delta_p_states > D)
        throw InvalidWidth("number of momentum states must lie in [1, " + std::to_string(D) + "], got " +
                           std::to_string(delta_p_states));
    const Real weight = Real(1) / static_cast<Real>(delta_p_states);
    const int first = central_momentum_begin(D, delta_p_states);
    CellOperatorT<Real> rho = CellOperatorT<Real>::Zero(D, D);
    for (int m = first; m < first + delta_p_states; ++m) {
        const CellStateT<Real> p = momentum_eigenstate<Real>(D, m);
        rho.noalias() += weight * p * p.adjoint();
    }
    return rho;
}

/// max |O^dagger O - I| over entries.
template <typename Derived>
typename Derived::RealScalar unitarity_defect(const Eigen::MatrixBase<Derived>& op) {
    using Mat = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    const Mat gram = op.adjoint() * op;
    return (gram - Mat::Identity(op.rows(), op.cols())).cwiseAbs().maxCoeff();
}

/// Throws ValidationError unless rho is a square, Hermitian, unit-trace,
/// positive semidefinite matrix of dimension D (all within `tol`).
inline void validate_density(const CellDensity& rho, int D, double tol = 1e-12) {
    if (rho.rows() != D || rho.cols() != D)
        throw ValidationError("density has shape " + std::to_string(rho.rows()) + "x" +
                              std::to_string(rho.cols()) + ", expected " + std::to_string(D) + "x" +
                              std::to_string(D));
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol) throw ValidationError("density is not Hermitian");
    if (std::abs(rho.trace() - Complex(1.0, 0.0)) > tol) throw ValidationError("density trace is not 1");
    Eigen::SelfAdjointEigenSolver<CellDensity> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol) throw ValidationError("density has a negative eigenvalue");
}

}  // namespace multibaker
