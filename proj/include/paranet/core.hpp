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

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace paranet {

template <typename Real>
using Complex = std::complex<Real>;

template <typename Real>
using MatrixC = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using VectorC = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, 1>;

template <typename Real>
using MatrixR = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using VectorR = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using cplx = Complex<double>;
using MatrixXcd = MatrixC<double>;
using VectorXcd = VectorC<double>;
using Eigen::MatrixXd;
using Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline constexpr double hz_to_rad(double hz) { return kTwoPi * hz; }
inline constexpr double rad_to_hz(double rad) { return rad / kTwoPi; }
inline constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle into (-pi, pi].
inline double wrap_phase(double phi) {
    double w = std::remainder(phi, kTwoPi);
    if (w <= -kPi) w += kTwoPi;
    return w;
}

// CODATA 2018.
namespace constants {
inline constexpr double kBoltzmann = 1.380649e-23;       // J/K
inline constexpr double kElementaryCharge = 1.602176634e-19;  // C
inline constexpr double kHbar = 1.054571817e-34;        // J s
}  // namespace constants

enum class Errc {
    InvalidArgument,
    EmptyNetwork,
    DuplicateId,
    UnknownMode,
    DuplicateEdge,
    SelfLoop,
    PortRateMismatch,
    LoopClosureViolation,
    OddAmplificationCycle,
    SingularMatrix,
    NonPSDInput,
    GainTooSmall,
    NoThresholdFound,
    NonConvergence,
    DegenerateProblem,
    OutOfRange,
    ParseError,
    IOError,
};

const char *errc_name(Errc code);

/// Error raised by every paranet operation. `subject` names the offending
/// item (mode id, edge id, port id, ...) when there is one.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string &message, std::string subject = {})
        : std::runtime_error(message), code_(code), subject_(std::move(subject)) {}

    Errc code() const noexcept { return code_; }
    const std::string &subject() const noexcept { return subject_; }

private:
    Errc code_;
    std::string subject_;
};

}  // namespace paranet
