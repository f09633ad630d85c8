// Copyright 2026 The Paranet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Closed-form scattering matrices of the two- and three-mode building blocks,
// written out entry by entry. They never touch a matrix inverse and serve as
// independent checks of the general S = i H^T M^-1 H - 1 path.
//
// Inputs are the normalized detunings Delta_j, the complex couplings beta_jk
// (phase convention of the corresponding edge kind) and the external
// efficiencies eta_j. Conjugated modes take their unconjugated Delta; the
// formulas apply the conjugation themselves.

#include <array>
#include <cmath>

#include "paranet/core.hpp"

namespace paranet {

template <typename Real>
using Matrix2c = Eigen::Matrix<Complex<Real>, 2, 2>;

template <typename Real>
using Matrix3c = Eigen::Matrix<Complex<Real>, 3, 3>;

namespace detail {

template <typename Real>
Complex<Real> checked_inverse(const Complex<Real> &denominator) {
    if (std::abs(denominator) == Real(0))
        throw Error(Errc::SingularMatrix, "closed form evaluated at a pole (|M| = 0)");
    return Complex<Real>(1) / denominator;
}

}  // namespace detail

/// Single damped mode: S = eta i/Delta - 1.
template <typename Real>
Complex<Real> closed_form_reflection(const Complex<Real> &delta, Real eta) {
    const Complex<Real> i(0, 1);
    return eta * i * detail::checked_inverse(delta) - Real(1);
}

/// Two-mode frequency conversion, modes (a, b).
template <typename Real>
Matrix2c<Real> closed_form_conversion(const Complex<Real> &delta_a, const Complex<Real> &delta_b,
                                      const Complex<Real> &beta, Real eta_a, Real eta_b) {
    const Complex<Real> i(0, 1);
    const Real b2 = std::norm(beta);
    const Complex<Real> inv = detail::checked_inverse<Real>(delta_a * delta_b - b2);
    const Real root = std::sqrt(eta_a * eta_b);
    Matrix2c<Real> S;
    S(0, 0) = i * eta_a * delta_b * inv - Real(1);
    S(0, 1) = -i * root * beta * inv;
    S(1, 0) = -i * root * std::conj(beta) * inv;
    S(1, 1) = i * eta_b * delta_a * inv - Real(1);
    return S;
}

/// Two-mode phase-preserving amplification, amplitude vector (a, b*).
template <typename Real>
Matrix2c<Real> closed_form_amplifier(const Complex<Real> &delta_a, const Complex<Real> &delta_b,
                                     const Complex<Real> &beta, Real eta_a, Real eta_b) {
    const Complex<Real> i(0, 1);
    const Complex<Real> db = std::conj(delta_b);
    const Complex<Real> inv = detail::checked_inverse<Real>(delta_a * db - std::norm(beta));
    const Real root = std::sqrt(eta_a * eta_b);
    Matrix2c<Real> S;
    S(0, 0) = i * eta_a * db * inv - Real(1);
    S(0, 1) = i * root * beta * inv;
    S(1, 0) = -i * root * std::conj(beta) * inv;
    S(1, 1) = -i * eta_b * delta_a * inv - Real(1);
    return S;
}

template <typename Real>
struct ThreeModeParams {
    std::array<Complex<Real>, 3> delta;  // (a, b, c)
    Complex<Real> beta_ab;
    Complex<Real> beta_bc;
    Complex<Real> beta_ac;
    std::array<Real, 3> eta{Real(1), Real(1), Real(1)};
};

/// Determinant of the circulator coupling matrix, expanded with the loop
/// phase phi_loop = arg(beta_ab) + arg(beta_bc) - arg(beta_ac).
template <typename Real>
Complex<Real> circulator_determinant(const ThreeModeParams<Real> &p) {
    const auto &[da, db, dc] = p.delta;
    const Real ab = std::abs(p.beta_ab), bc = std::abs(p.beta_bc), ac = std::abs(p.beta_ac);
    const Real loop = std::arg(p.beta_ab) + std::arg(p.beta_bc) - std::arg(p.beta_ac);
    return da * db * dc - bc * bc * da - ac * ac * db - ab * ab * dc +
           Real(2) * ab * bc * ac * std::cos(loop);
}

/// Three modes joined pairwise by conversion.
template <typename Real>
Matrix3c<Real> closed_form_circulator(const ThreeModeParams<Real> &p) {
    const Complex<Real> i(0, 1);
    const auto &[da, db, dc] = p.delta;
    const auto &[ea, eb, ec] = p.eta;
    const auto bab = p.beta_ab, bbc = p.beta_bc, bac = p.beta_ac;
    const Complex<Real> inv = detail::checked_inverse(circulator_determinant(p));
    const Real sab = std::sqrt(ea * eb), sac = std::sqrt(ea * ec), sbc = std::sqrt(eb * ec);
    Matrix3c<Real> S;
    S(0, 0) = i * ea * (db * dc - std::norm(bbc)) * inv - Real(1);
    S(0, 1) = i * sab * (bac * std::conj(bbc) - bab * dc) * inv;
    S(0, 2) = i * sac * (bab * bbc - bac * db) * inv;
    S(1, 0) = i * sab * (std::conj(bac) * bbc - std::conj(bab) * dc) * inv;
    S(1, 1) = i * eb * (da * dc - std::norm(bac)) * inv - Real(1);
    S(1, 2) = i * sbc * (std::conj(bab) * bac - bbc * da) * inv;
    S(2, 0) = i * sac * (std::conj(bab) * std::conj(bbc) - std::conj(bac) * db) * inv;
    S(2, 1) = i * sbc * (bab * std::conj(bac) - std::conj(bbc) * da) * inv;
    S(2, 2) = i * ec * (da * db - std::norm(bab)) * inv - Real(1);
    return S;
}

/// Determinant of the directional-amplifier coupling matrix with
/// phi_loop = phi_ab + phi_bc + phi_ac, where the amplification phases are
/// -arg(beta_ab), -arg(beta_bc) and the conversion phase is arg(beta_ac).
template <typename Real>
Complex<Real> directional_amplifier_determinant(const ThreeModeParams<Real> &p) {
    const auto &[da, db, dc] = p.delta;
    const Complex<Real> dbc = std::conj(db);
    const Real ab = std::abs(p.beta_ab), bc = std::abs(p.beta_bc), ac = std::abs(p.beta_ac);
    const Real loop = -std::arg(p.beta_ab) - std::arg(p.beta_bc) + std::arg(p.beta_ac);
    return -da * dbc * dc + bc * bc * da + ac * ac * dbc + ab * ab * dc +
           Real(2) * ab * bc * ac * std::cos(loop);
}

/// Conversion a<->c with amplification a<->b and b<->c; amplitude vector
/// (a, b*, c).
template <typename Real>
Matrix3c<Real> closed_form_directional_amplifier(const ThreeModeParams<Real> &p) {
    const Complex<Real> i(0, 1);
    const auto &[da, db_, dc] = p.delta;
    const Complex<Real> db = std::conj(db_);
    const auto &[ea, eb, ec] = p.eta;
    const auto bab = p.beta_ab, bbc = p.beta_bc, bac = p.beta_ac;
    const Complex<Real> inv = detail::checked_inverse(directional_amplifier_determinant(p));
    const Real sab = std::sqrt(ea * eb), sac = std::sqrt(ea * ec), sbc = std::sqrt(eb * ec);
    Matrix3c<Real> S;
    S(0, 0) = i * ea * (std::norm(bbc) - db * dc) * inv - Real(1);
    S(0, 1) = i * sab * (-bab * dc - bac * std::conj(bbc)) * inv;
    S(0, 2) = i * sac * (bac * db + bab * bbc) * inv;
    S(1, 0) = i * sab * (std::conj(bab) * dc + std::conj(bac) * bbc) * inv;
    S(1, 1) = i * eb * (da * dc - std::norm(bac)) * inv - Real(1);
    S(1, 2) = i * sbc * (-bbc * da - std::conj(bab) * bac) * inv;
    S(2, 0) = i * sac * (std::conj(bac) * db + std::conj(bab) * std::conj(bbc)) * inv;
    S(2, 1) = i * sbc * (std::conj(bbc) * da + bab * std::conj(bac)) * inv;
    S(2, 2) = i * ec * (std::norm(bab) - da * db) * inv - Real(1);
    return S;
}

}  // namespace paranet
