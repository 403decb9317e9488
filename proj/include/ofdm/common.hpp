// SPDX-License-Identifier: Apache-2.0
//
// ofdm-phn: joint channel, phase noise and CFO estimation for OFDM receivers
// Copyright (C) 2026 The ofdm-phn authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ofdm
{
    using cplx = std::complex<double>;
    using CVec = Eigen::VectorXcd;
    using RVec = Eigen::VectorXd;
    using CMat = Eigen::MatrixXcd;
    using RMat = Eigen::MatrixXd;

    inline constexpr double two_pi = 2.0 * std::numbers::pi;
    inline constexpr cplx imag_j{0.0, 1.0};

    // Invalid scenario or unsupported option
    class ConfigError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    // Bad call arguments (dimension mismatch, non-finite values)
    class ArgumentError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    // Training symbol cannot identify the channel
    class DegenerateTrainingError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Singular or badly conditioned system; carries the condition estimate
    class NumericalError : public std::runtime_error
    {
    public:
        NumericalError(const std::string &what, double condition = 0.0)
            : std::runtime_error(what), condition_(condition) {}
        double condition() const noexcept { return condition_; }

    private:
        double condition_;
    };

    // e^{j*phase}
    inline cplx cis(double phase) { return std::polar(1.0, phase); }
}
